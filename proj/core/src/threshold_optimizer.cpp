#include "screenlab/threshold_optimizer.hpp"

#include <cmath>
#include <stdexcept>

namespace screenlab {

BudgetConstraint::BudgetConstraint(double b) : tests_per_hire(b) {
  if (!(b > 1.0)) throw std::invalid_argument("BudgetConstraint: budget must exceed 1");
}

int optimal_theta(int tau, double p, double alpha, double sigma) {
  // Accepting at S = theta beats rejecting exactly when the posterior odds
  // clear alpha/(1-alpha); solving for theta places the valley at
  //   (tau + (log(1/p - 1) - log(1/alpha - 1)) / log((1+sigma)/(1-sigma))) / 2.
  const double rho = std::log1p(2.0 * sigma / (1.0 - sigma));
  const double shift = (std::log(1.0 / p - 1.0) - std::log(1.0 / alpha - 1.0)) / rho;
  const double raw = 0.5 * (tau + shift);
  int theta = static_cast<int>(std::ceil(raw));
  if (theta < 0) theta = 0;
  if (theta > tau + 1) theta = tau + 1;
  return theta;
}

ValleyCheck loss_valley_check(int tau, double p, double alpha, double sigma) {
  const PopulationParams params(p, sigma);
  const AlphaLoss loss(alpha);
  ValleyCheck check;
  double best = 0.0;
  double prev = 0.0;
  bool rising = false;
  for (int theta = 0; theta <= tau + 1; ++theta) {
    const double value = alpha_loss(ThresholdPolicy(tau, theta, 1.0), params, loss);
    if (theta == 0 || value < best) {
      best = value;
      check.argmin_theta = theta;
    }
    if (theta > 0) {
      if (value > prev + 1e-15) {
        rising = true;
      } else if (rising && value < prev - 1e-15) {
        check.quasiconvex = false;
        if (check.violation_theta < 0) check.violation_theta = theta;
      }
    }
    prev = value;
  }
  return check;
}

int majority_sample_bound(double delta, double sigma) {
  if (!(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument("majority_sample_bound: delta must be in (0,1)");
  if (!(sigma > 0.0 && sigma <= 1.0))
    throw std::invalid_argument("majority_sample_bound: sigma must be in (0,1]");
  const double raw = std::log(1.0 / delta) / (sigma * sigma);
  int tau = static_cast<int>(std::ceil(raw - 1e-12));
  if (tau < 1) tau = 1;
  if (tau % 2 == 0) ++tau;
  return tau;
}

namespace {

struct Candidate {
  int tau;
  int theta;
  double r;
  double fdr;
  double accept;
};

// Accept mass of (tau, theta, r) split by class; boundary handled
// analytically.
Candidate evaluate(int tau, int theta, double r, const PopulationParams& params) {
  const ThresholdPolicy policy(tau, theta, r);
  const ConfusionMatrix cm = threshold_confusion(policy, params);
  Candidate c{tau, theta, r, 0.0, 0.0};
  c.accept = accept_probability(cm, params.p);
  c.fdr = false_discovery_rate(cm, params.p);
  return c;
}

bool better(const Candidate& a, const Candidate& b) {
  constexpr double kTol = 1e-12;
  if (a.fdr < b.fdr - kTol) return true;
  if (a.fdr > b.fdr + kTol) return false;
  if (a.tau != b.tau) return a.tau < b.tau;
  if (a.theta != b.theta) return a.theta < b.theta;
  return a.r > b.r;
}

OptimizationResult search(const PopulationParams& params,
                          const BudgetConstraint& budget, int tau_max,
                          bool randomized) {
  if (tau_max < 1) throw std::invalid_argument("optimize_fdr_budget: tau_max must be >= 1");
  const double B = budget.tests_per_hire;
  bool found = false;
  Candidate best{1, 0, 1.0, 1.0, 0.0};
  for (int tau = 1; tau <= tau_max; ++tau) {
    const double need = tau / B;
    if (need > 1.0) break;  // even accept-all cannot meet the budget
    for (int theta = 0; theta <= tau + 1; ++theta) {
      const Candidate pure = evaluate(tau, theta, 1.0, params);
      if (pure.accept >= need - 1e-15) {
        if (!found || better(pure, best)) {
          best = pure;
          found = true;
        }
      }
      if (!randomized) continue;
      // Smallest boundary weight that meets the budget exactly, when the
      // pure thresholds straddle it.
      const Candidate strict = evaluate(tau, theta, 0.0, params);
      const double boundary = pure.accept - strict.accept;
      if (boundary <= 1e-15) continue;
      if (strict.accept < need && pure.accept >= need - 1e-15) {
        double r = (need - strict.accept) / boundary;
        if (r < 0.0) r = 0.0;
        if (r > 1.0) r = 1.0;
        const Candidate tight = evaluate(tau, theta, r, params);
        if (tight.accept >= need - 1e-12 && (!found || better(tight, best))) {
          best = tight;
          found = true;
        }
      }
    }
  }
  OptimizationResult result;
  result.feasible = found;
  if (found) {
    result.policy = ThresholdPolicy(best.tau, best.theta, best.r);
    result.fdr = best.fdr;
    result.accept_prob = best.accept;
  }
  return result;
}

}  // namespace

OptimizationResult optimize_fdr_budget(const PopulationParams& params,
                                       const BudgetConstraint& budget, int tau_max) {
  return search(params, budget, tau_max, true);
}

OptimizationResult optimize_fdr_budget_pure(const PopulationParams& params,
                                            const BudgetConstraint& budget, int tau_max) {
  return search(params, budget, tau_max, false);
}

}  // namespace screenlab
