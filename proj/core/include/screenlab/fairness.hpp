#pragma once

#include "screenlab/bernoulli.hpp"
#include "screenlab/dynamic_policy.hpp"

namespace screenlab {

/// Two populations with the same skill prior but different test noise.
/// Normalized at construction so group1 is the cleaner one
/// (eta1 <= eta2, equivalently sigma1 >= sigma2).
struct GroupPair {
  PopulationParams group1;
  PopulationParams group2;

  GroupPair(const PopulationParams& a, const PopulationParams& b);

  double p() const { return group1.p; }
  double eta1() const { return group1.eta(); }
  double eta2() const { return group2.eta(); }
};

/// Maximum-likelihood flip rate from k flips in n tests: k / n.
double mle_eta(long k, long n);

struct SharedPolicyAudit {
  ConfusionMatrix group1;
  ConfusionMatrix group2;
  bool fpr_strictly_ordered = false;  // FPR1 < FPR2
  bool fnr_strictly_ordered = false;  // FNR1 < FNR2
  /// theta in {0, tau+1} accepts or rejects everyone: both groups get the
  /// same trivial rates, so no ordering claim applies.
  bool degenerate = false;
};

/// Exact per-group rates of one shared threshold policy, plus the
/// strict-ordering verdicts.
SharedPolicyAudit shared_policy_audit(const ThresholdPolicy& policy,
                                      const GroupPair& groups);

/// Rejection cutoff for the noisier group that closes the false-negative
/// gap: eps' = (eta1 / eta2) p. The cleaner group keeps eps' = p.
double equalizing_epsilon_prime(double p, double eta1, double eta2);

/// Greedy-policy audit of the eps' intervention. All rates and expected
/// test counts come from the closed forms on the lattice barriers, i.e.
/// they are exact for the policy a simulation runs; the paper-ceiling
/// numbers are reported next to them.
struct InterventionReport {
  double epsilon = 0.0;
  double epsilon_prime_group1 = 0.0;
  double epsilon_prime_group2 = 0.0;  // the intervened cutoff

  WalkGeometry geometry_group1;
  WalkGeometry geometry_group2_baseline;
  WalkGeometry geometry_group2_intervened;

  double fnr_group1 = 0.0;
  double fnr_group2_baseline = 0.0;
  double fnr_group2_intervened = 0.0;
  double fnr_gap_baseline = 0.0;
  double fnr_gap_intervened = 0.0;

  double expected_tests_group1 = 0.0;
  double expected_tests_group2_baseline = 0.0;
  double expected_tests_group2_intervened = 0.0;
  /// Extra tests the intervention costs the noisier group.
  double expected_tests_delta = 0.0;

  double fnr_gap_intervened_ceiling = 0.0;  // same audit on the paper (a, z)
  double expected_tests_delta_ceiling = 0.0;

  bool degenerate = false;
};

InterventionReport intervention_cost(const GroupPair& groups, double epsilon);

}  // namespace screenlab
