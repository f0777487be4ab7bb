#include "screenlab/gaussian.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace screenlab {

namespace {

constexpr int kOracleCap = 200;

// Dense SPD solve via Cholesky, long double internals.
class SpdMatrix {
 public:
  explicit SpdMatrix(int n) : n_(n), data_(static_cast<size_t>(n) * n, 0.0L) {}

  long double& at(int i, int j) { return data_[static_cast<size_t>(i) * n_ + j]; }
  long double at(int i, int j) const { return data_[static_cast<size_t>(i) * n_ + j]; }
  int size() const { return n_; }

  void factorize() {
    chol_ = data_;
    for (int j = 0; j < n_; ++j) {
      long double d = c(j, j);
      for (int k = 0; k < j; ++k) d -= c(j, k) * c(j, k);
      if (d <= 0.0L) throw std::runtime_error("SpdMatrix: not positive definite");
      c(j, j) = std::sqrt(d);
      for (int i = j + 1; i < n_; ++i) {
        long double s = c(i, j);
        for (int k = 0; k < j; ++k) s -= c(i, k) * c(j, k);
        c(i, j) = s / c(j, j);
      }
    }
  }

  std::vector<long double> solve(std::vector<long double> b) const {
    for (int i = 0; i < n_; ++i) {
      for (int k = 0; k < i; ++k) b[i] -= c(i, k) * b[k];
      b[i] /= c(i, i);
    }
    for (int i = n_ - 1; i >= 0; --i) {
      for (int k = i + 1; k < n_; ++k) b[i] -= c(k, i) * b[k];
      b[i] /= c(i, i);
    }
    return b;
  }

  long double one_norm() const {
    long double best = 0.0L;
    for (int j = 0; j < n_; ++j) {
      long double col = 0.0L;
      for (int i = 0; i < n_; ++i) col += std::fabs(at(i, j));
      if (col > best) best = col;
    }
    return best;
  }

 private:
  long double& c(int i, int j) { return chol_[static_cast<size_t>(i) * n_ + j]; }
  long double c(int i, int j) const { return chol_[static_cast<size_t>(i) * n_ + j]; }

  int n_;
  std::vector<long double> data_;
  std::vector<long double> chol_;
};

SpdMatrix observation_block(const GaussianModel& model, int n) {
  SpdMatrix sigma22(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      sigma22.at(i, j) = model.sigma_q2;
    }
    sigma22.at(i, i) += model.sigma_eta2;
  }
  return sigma22;
}

}  // namespace

GaussianModel::GaussianModel(double mu_q_, double sigma_q2_, double sigma_eta2_)
    : mu_q(mu_q_), sigma_q2(sigma_q2_), sigma_eta2(sigma_eta2_) {
  if (!(sigma_q2 > 0.0))
    throw std::invalid_argument("GaussianModel: sigma_q2 must be positive");
  if (!(sigma_eta2 > 0.0))
    throw std::invalid_argument("GaussianModel: sigma_eta2 must be positive");
}

double conditional_variance(const GaussianModel& model, int n) {
  if (n < 0) throw std::invalid_argument("conditional_variance: n must be >= 0");
  return 1.0 / (1.0 / model.sigma_q2 + n / model.sigma_eta2);
}

double conditional_mean(const GaussianModel& model,
                        std::span<const double> observations) {
  const double n = static_cast<double>(observations.size());
  const double weight = 1.0 / (model.sigma_eta2 / model.sigma_q2 + n);
  double centered_sum = 0.0;
  for (double y : observations) centered_sum += y - model.mu_q;
  return model.mu_q + weight * centered_sum;
}

PosteriorSummary conditional_summary(const GaussianModel& model,
                                     std::span<const double> observations) {
  PosteriorSummary summary;
  const int n = static_cast<int>(observations.size());
  summary.weight = 1.0 / (model.sigma_eta2 / model.sigma_q2 + n);
  summary.mean = conditional_mean(model, observations);
  summary.variance = conditional_variance(model, n);
  return summary;
}

SchurResult schur_oracle(const GaussianModel& model, int n) {
  if (n < 1 || n > kOracleCap)
    throw std::invalid_argument("schur_oracle: n out of range [1, 200]");
  SpdMatrix sigma22 = observation_block(model, n);
  sigma22.factorize();

  // Sigma12 is the constant row (sigma_q2, ..., sigma_q2).
  std::vector<long double> sigma12(n, model.sigma_q2);
  const std::vector<long double> w = sigma22.solve(sigma12);

  SchurResult result;
  long double wmin = w[0], wmax = w[0], quad = 0.0L;
  for (int i = 0; i < n; ++i) {
    wmin = std::min(wmin, w[i]);
    wmax = std::max(wmax, w[i]);
    quad += w[i] * model.sigma_q2;
  }
  if (static_cast<double>(wmax - wmin) > 1e-10)
    throw std::runtime_error("schur_oracle: exchangeable weights differ");
  result.weight = static_cast<double>((wmin + wmax) / 2.0L);
  result.variance = static_cast<double>(model.sigma_q2 - quad);

  // Condition estimate: ||Sigma22||_1 * ||Sigma22^-1||_1 with the inverse
  // assembled column by column.
  long double inv_norm = 0.0L;
  for (int j = 0; j < n; ++j) {
    std::vector<long double> e(n, 0.0L);
    e[j] = 1.0L;
    const std::vector<long double> col = sigma22.solve(e);
    long double sum = 0.0L;
    for (int i = 0; i < n; ++i) sum += std::fabs(col[i]);
    inv_norm = std::max(inv_norm, sum);
  }
  result.condition = static_cast<double>(sigma22.one_norm() * inv_norm);
  result.ill_conditioned = result.condition > 1e12;
  return result;
}

double schur_conditional_mean(const GaussianModel& model,
                              std::span<const double> observations) {
  const int n = static_cast<int>(observations.size());
  if (n < 1 || n > kOracleCap)
    throw std::invalid_argument("schur_conditional_mean: n out of range [1, 200]");
  SpdMatrix sigma22 = observation_block(model, n);
  sigma22.factorize();
  std::vector<long double> centered(n);
  for (int i = 0; i < n; ++i) centered[i] = observations[i] - model.mu_q;
  const std::vector<long double> x = sigma22.solve(std::move(centered));
  long double mean = model.mu_q;
  for (int i = 0; i < n; ++i) mean += model.sigma_q2 * x[i];
  return static_cast<double>(mean);
}

Rank1Inverse rank1_inverse(double diag_value, double rank1_value, int n) {
  if (diag_value == 0.0)
    throw std::invalid_argument("rank1_inverse: diagonal value must be nonzero");
  const double trace_term = 1.0 + n * rank1_value / diag_value;
  if (trace_term == 0.0)
    throw std::invalid_argument("rank1_inverse: singular rank-1 update");
  Rank1Inverse inv;
  inv.off_diagonal = -rank1_value / (diag_value * diag_value * trace_term);
  inv.on_diagonal = 1.0 / diag_value + inv.off_diagonal;
  return inv;
}

EqualizeResult equalize_variance_tests(const GaussianModel& model1,
                                       const GaussianModel& model2, int n1) {
  if (n1 < 0) throw std::invalid_argument("equalize_variance_tests: n1 must be >= 0");
  EqualizeResult result;
  result.n2 = model2.sigma_eta2 / model1.sigma_eta2 * n1;
  result.n2_ceil = static_cast<int>(std::ceil(result.n2 - 1e-12));
  result.variance_gap_at_ceil = conditional_variance(model2, result.n2_ceil) -
                                conditional_variance(model1, n1);
  return result;
}

ExpectationGap expectations_match_check(const GaussianModel& model1,
                                        const GaussianModel& model2, int n1,
                                        std::span<const double> data1,
                                        std::span<const double> data2) {
  if (static_cast<int>(data1.size()) != n1)
    throw std::invalid_argument("expectations_match_check: data1 length != n1");
  const double n2_real = model2.sigma_eta2 / model1.sigma_eta2 * n1;
  const double n2_rounded = std::round(n2_real);
  if (std::abs(n2_real - n2_rounded) > 1e-9)
    throw std::invalid_argument(
        "expectations_match_check: equalized n2 is not an integer");
  if (static_cast<double>(data2.size()) != n2_rounded)
    throw std::invalid_argument("expectations_match_check: data2 length != n2");

  ExpectationGap result;
  result.gap = conditional_mean(model1, data1) - conditional_mean(model2, data2);
  result.coefficient =
      model1.sigma_q2 * n1 / (model1.sigma_eta2 + n1 * model1.sigma_q2);
  return result;
}

}  // namespace screenlab
