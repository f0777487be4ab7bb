#pragma once

#include "screenlab/bernoulli.hpp"

namespace screenlab {

/// Tests-per-hire cap: a policy with tau tests and accept probability q
/// is feasible iff tau / q <= tests_per_hire.
struct BudgetConstraint {
  double tests_per_hire;

  explicit BudgetConstraint(double b);
};

struct OptimizationResult {
  ThresholdPolicy policy{1, 0, 1.0};
  double fdr = 1.0;
  double accept_prob = 0.0;
  bool feasible = false;
};

/// Loss-minimizing threshold for a fixed test count, clamped to
/// [0, tau + 1]. A clamp to 0 means always-accept is optimal, tau + 1
/// means always-reject.
int optimal_theta(int tau, double p, double alpha, double sigma);

/// Scans the loss over theta = 0..tau+1 and checks the sequence falls
/// then rises (single valley, ties allowed).
struct ValleyCheck {
  bool quasiconvex = true;
  int violation_theta = -1;  // first theta where a second descent starts
  int argmin_theta = 0;
};

ValleyCheck loss_valley_check(int tau, double p, double alpha, double sigma);

/// Test count such that a majority rule keeps each class's error below
/// delta: ceil(ln(1/delta) / sigma^2), rounded up to odd so the majority
/// is well defined. The constant is taken at face value; callers should
/// confirm sufficiency with binomial_tail, which is exact.
int majority_sample_bound(double delta, double sigma);

/// Minimizes FDR over randomized threshold policies subject to the
/// tests-per-hire budget. For each (tau, theta) the boundary weight r is
/// either 1 (plain threshold, if feasible) or the unique value making the
/// budget tight. Ties broken toward smaller tau, then smaller theta, then
/// larger r.
OptimizationResult optimize_fdr_budget(const PopulationParams& params,
                                       const BudgetConstraint& budget,
                                       int tau_max = 64);

/// Same search restricted to plain threshold policies (r = 1).
OptimizationResult optimize_fdr_budget_pure(const PopulationParams& params,
                                            const BudgetConstraint& budget,
                                            int tau_max = 64);

}  // namespace screenlab
