#pragma once

#include <span>

namespace screenlab {

/// Continuous screening model: quality Q ~ N(mu_q, sigma_q2), each test
/// Y = Q + N(0, sigma_eta2) independently given Q.
struct GaussianModel {
  double mu_q;
  double sigma_q2;
  double sigma_eta2;

  GaussianModel(double mu_q, double sigma_q2, double sigma_eta2);
};

struct PosteriorSummary {
  double weight = 0.0;    // common per-observation regression weight
  double mean = 0.0;      // E[Q | data]
  double variance = 0.0;  // Var[Q | data]
};

/// Var[Q | n tests] = 1 / (1/sigma_q2 + n/sigma_eta2).
double conditional_variance(const GaussianModel& model, int n);

/// E[Q | data] = mu_q + w * sum(y_i - mu_q), w = 1 / (sigma_eta2/sigma_q2 + n).
double conditional_mean(const GaussianModel& model,
                        std::span<const double> observations);

PosteriorSummary conditional_summary(const GaussianModel& model,
                                     std::span<const double> observations);

struct SchurResult {
  double weight = 0.0;
  double variance = 0.0;
  double condition = 0.0;       // 1-norm condition estimate of Sigma22
  bool ill_conditioned = false; // condition > 1e12
};

/// Ground-truth conditioning: builds the full (n+1)x(n+1) covariance,
/// inverts the observation block numerically (Cholesky), and reads the
/// regression weight and Schur-complement variance off the matrices.
/// Independent of every closed form above.
SchurResult schur_oracle(const GaussianModel& model, int n);

/// Conditional mean through the same numeric path, for cross-checks.
double schur_conditional_mean(const GaussianModel& model,
                              std::span<const double> observations);

struct Rank1Inverse {
  double on_diagonal = 0.0;
  double off_diagonal = 0.0;
};

/// Closed-form inverse of diag(d) + c * ones(n, n): two distinct entry
/// values. Requires d != 0 and 1 + n c / d != 0.
Rank1Inverse rank1_inverse(double diag_value, double rank1_value, int n);

struct EqualizeResult {
  double n2 = 0.0;                    // (sigma_eta2_b / sigma_eta2_a) * n1
  int n2_ceil = 0;
  double variance_gap_at_ceil = 0.0;  // Var_2(ceil(n2)) - Var_1(n1)
};

/// Test count for the noisier group that equalizes posterior variance
/// with n1 tests of the cleaner group. Exact only when n2 is integral;
/// the ceiling and its residual gap are reported for the rest.
EqualizeResult equalize_variance_tests(const GaussianModel& model1,
                                       const GaussianModel& model2, int n1);

struct ExpectationGap {
  double gap = 0.0;          // E1[Q|data1] - E2[Q|data2]
  double coefficient = 0.0;  // gap == coefficient * (mean(data1) - mean(data2))
};

/// Difference of the two groups' posterior means at variance-equalized
/// test counts. The gap collapses to coefficient * (ybar1 - ybar2), so it
/// vanishes only when the sample means agree; both pieces are returned.
ExpectationGap expectations_match_check(const GaussianModel& model1,
                                        const GaussianModel& model2, int n1,
                                        std::span<const double> data1,
                                        std::span<const double> data2);

}  // namespace screenlab
