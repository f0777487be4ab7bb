#include "screenlab/bernoulli.hpp"

#include <cmath>
#include <stdexcept>

namespace screenlab {

namespace {

bool in_open_unit(double x) { return x > 0.0 && x < 1.0; }

// C(n, k) as unsigned __int128; exact for n <= 64 (largest value needs
// 61 bits).
unsigned __int128 binomial_coefficient_u128(int n, int k) {
  if (k < 0 || k > n) return 0;
  if (k > n - k) k = n - k;
  unsigned __int128 result = 1;
  for (int i = 0; i < k; ++i) {
    result = result * static_cast<unsigned>(n - i) / static_cast<unsigned>(i + 1);
  }
  return result;
}

double log_binomial_coefficient(int n, int k) {
  return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0);
}

}  // namespace

PopulationParams::PopulationParams(double p_, double sigma_) : p(p_), sigma(sigma_) {
  if (!in_open_unit(p)) throw std::invalid_argument("PopulationParams: p must be in (0,1)");
  if (!in_open_unit(sigma)) throw std::invalid_argument("PopulationParams: sigma must be in (0,1)");
}

ThresholdPolicy::ThresholdPolicy(int tau_, int theta_, double r_)
    : tau(tau_), theta(theta_), r(r_) {
  if (tau < 1) throw std::invalid_argument("ThresholdPolicy: tau must be >= 1");
  if (theta < 0 || theta > tau + 1)
    throw std::invalid_argument("ThresholdPolicy: theta must be in [0, tau+1]");
  if (!(r >= 0.0 && r <= 1.0))
    throw std::invalid_argument("ThresholdPolicy: r must be in [0,1]");
}

AlphaLoss::AlphaLoss(double alpha_) : alpha(alpha_) {
  if (!(alpha >= 0.0 && alpha <= 1.0))
    throw std::invalid_argument("AlphaLoss: alpha must be in [0,1]");
}

int sample_candidate(const PopulationParams& params, RandomStream& rng) {
  return rng.bernoulli(params.p) ? 1 : 0;
}

int sample_test(int skill, const PopulationParams& params, RandomStream& rng) {
  const int flip = rng.bernoulli(params.eta()) ? 1 : 0;
  return skill ^ flip;
}

double binomial_pmf(int tau, double eta, int k) {
  if (k < 0 || k > tau) return 0.0;
  if (eta <= 0.0) return k == 0 ? 1.0 : 0.0;
  if (eta >= 1.0) return k == tau ? 1.0 : 0.0;
  if (tau <= 64) {
    const long double coeff =
        static_cast<long double>(binomial_coefficient_u128(tau, k));
    const long double term = coeff * std::pow((long double)eta, k) *
                             std::pow((long double)(1.0 - eta), tau - k);
    return static_cast<double>(term);
  }
  const double log_term = log_binomial_coefficient(tau, k) +
                          k * std::log(eta) + (tau - k) * std::log1p(-eta);
  return std::exp(log_term);
}

double binomial_tail(int tau, double eta, int theta) {
  if (theta <= 0) return 1.0;
  if (theta > tau) return 0.0;
  // All terms are positive, so plain accumulation is stable; long double
  // keeps the relative error well under 1e-12 for the tau we care about.
  if (tau <= 64) {
    const long double le = eta;
    const long double l1 = 1.0L - le;
    long double sum = 0.0L;
    for (int k = theta; k <= tau; ++k) {
      const long double coeff =
          static_cast<long double>(binomial_coefficient_u128(tau, k));
      sum += coeff * std::pow(le, k) * std::pow(l1, tau - k);
    }
    return static_cast<double>(sum);
  }
  // Log-space seed at k = theta, then the term ratio recurrence.
  const double log_seed = log_binomial_coefficient(tau, theta) +
                          theta * std::log(eta) +
                          (tau - theta) * std::log1p(-eta);
  const long double ratio_base = (long double)eta / (1.0L - (long double)eta);
  long double term = std::exp((long double)log_seed);
  long double sum = term;
  for (int k = theta; k < tau; ++k) {
    term *= ratio_base * (tau - k) / (k + 1);
    sum += term;
    if (term < 1e-22L * sum) break;
  }
  if (sum > 1.0L) sum = 1.0L;
  return static_cast<double>(sum);
}

ConfusionMatrix threshold_confusion(const ThresholdPolicy& policy,
                                    const PopulationParams& params) {
  const int tau = policy.tau;
  const int theta = policy.theta;
  const double r = policy.r;
  const double eta = params.eta();
  // Unskilled pass counts ~ Bin(tau, eta), skilled ~ Bin(tau, 1 - eta).
  // Every rate is its own tail sum; complements like 1 - tpr would wash
  // out rates below machine epsilon.
  ConfusionMatrix cm;
  cm.fpr = binomial_tail(tau, eta, theta + 1) + r * binomial_pmf(tau, eta, theta);
  cm.tpr = binomial_tail(tau, 1.0 - eta, theta + 1) +
           r * binomial_pmf(tau, 1.0 - eta, theta);
  // S < theta counts as tau - S > tau - theta failures.
  cm.fnr = binomial_tail(tau, eta, tau - theta + 1) +
           (1.0 - r) * binomial_pmf(tau, 1.0 - eta, theta);
  cm.tnr = binomial_tail(tau, 1.0 - eta, tau - theta + 1) +
           (1.0 - r) * binomial_pmf(tau, eta, theta);
  return cm;
}

double alpha_loss(const ThresholdPolicy& policy, const PopulationParams& params,
                  const AlphaLoss& loss) {
  const ConfusionMatrix cm = threshold_confusion(policy, params);
  return loss.alpha * (1.0 - params.p) * cm.fpr +
         (1.0 - loss.alpha) * params.p * cm.fnr;
}

double false_discovery_rate(const ConfusionMatrix& cm, double p) {
  const double accept = accept_probability(cm, p);
  if (accept <= 0.0) return 0.0;
  return (1.0 - p) * cm.fpr / accept;
}

double false_omission_rate(const ConfusionMatrix& cm, double p) {
  const double reject = (1.0 - p) * cm.tnr + p * cm.fnr;
  if (reject <= 0.0) return 0.0;
  return p * cm.fnr / reject;
}

double accept_probability(const ConfusionMatrix& cm, double p) {
  return (1.0 - p) * cm.fpr + p * cm.tpr;
}

}  // namespace screenlab
