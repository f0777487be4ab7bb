#include "screenlab/fairness.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace screenlab {

GroupPair::GroupPair(const PopulationParams& a, const PopulationParams& b)
    : group1(a), group2(b) {
  if (std::abs(a.p - b.p) > 1e-12)
    throw std::invalid_argument("GroupPair: groups must share the skill prior p");
  // Normalize so group1 is the cleaner group. Equal noise is allowed and
  // makes every comparison trivially equal.
  if (group1.eta() > group2.eta()) std::swap(group1, group2);
}

double mle_eta(long k, long n) {
  if (n < 1) throw std::invalid_argument("mle_eta: need n >= 1");
  if (k < 0 || k > n) throw std::invalid_argument("mle_eta: need 0 <= k <= n");
  return static_cast<double>(k) / static_cast<double>(n);
}

SharedPolicyAudit shared_policy_audit(const ThresholdPolicy& policy,
                                      const GroupPair& groups) {
  SharedPolicyAudit audit;
  audit.group1 = threshold_confusion(policy, groups.group1);
  audit.group2 = threshold_confusion(policy, groups.group2);
  audit.degenerate = policy.theta == 0 || policy.theta == policy.tau + 1;
  if (!audit.degenerate) {
    audit.fpr_strictly_ordered = audit.group1.fpr < audit.group2.fpr;
    audit.fnr_strictly_ordered = audit.group1.fnr < audit.group2.fnr;
  }
  return audit;
}

double equalizing_epsilon_prime(double p, double eta1, double eta2) {
  if (!(eta1 > 0.0 && eta2 > 0.0 && eta1 <= eta2))
    throw std::invalid_argument("equalizing_epsilon_prime: need 0 < eta1 <= eta2");
  return eta1 / eta2 * p;
}

InterventionReport intervention_cost(const GroupPair& groups, double epsilon) {
  const double p = groups.p();
  InterventionReport report;
  report.epsilon = epsilon;
  report.epsilon_prime_group1 = p;
  report.epsilon_prime_group2 =
      equalizing_epsilon_prime(p, groups.eta1(), groups.eta2());

  const GreedyPolicyParams base(epsilon, p);
  const GreedyPolicyParams intervened(epsilon, report.epsilon_prime_group2);

  report.geometry_group1 = walk_geometry(p, groups.group1.sigma, base);
  report.geometry_group2_baseline = walk_geometry(p, groups.group2.sigma, base);
  report.geometry_group2_intervened =
      walk_geometry(p, groups.group2.sigma, intervened);
  report.degenerate = report.geometry_group1.degenerate ||
                      report.geometry_group2_baseline.degenerate ||
                      report.geometry_group2_intervened.degenerate;
  if (report.degenerate) return report;

  const WalkGeometry g1 = report.geometry_group1.lattice();
  const WalkGeometry g2b = report.geometry_group2_baseline.lattice();
  const WalkGeometry g2i = report.geometry_group2_intervened.lattice();

  report.fnr_group1 = greedy_confusion_exact(g1).fnr;
  report.fnr_group2_baseline = greedy_confusion_exact(g2b).fnr;
  report.fnr_group2_intervened = greedy_confusion_exact(g2i).fnr;
  report.fnr_gap_baseline =
      std::abs(report.fnr_group1 - report.fnr_group2_baseline);
  report.fnr_gap_intervened =
      std::abs(report.fnr_group1 - report.fnr_group2_intervened);

  report.expected_tests_group1 = expected_tests_overall(p, g1).exact;
  report.expected_tests_group2_baseline = expected_tests_overall(p, g2b).exact;
  report.expected_tests_group2_intervened = expected_tests_overall(p, g2i).exact;
  report.expected_tests_delta = report.expected_tests_group2_intervened -
                                report.expected_tests_group2_baseline;

  report.fnr_gap_intervened_ceiling =
      std::abs(greedy_confusion_exact(report.geometry_group1).fnr -
               greedy_confusion_exact(report.geometry_group2_intervened).fnr);
  report.expected_tests_delta_ceiling =
      expected_tests_overall(p, report.geometry_group2_intervened).exact -
      expected_tests_overall(p, report.geometry_group2_baseline).exact;
  return report;
}

}  // namespace screenlab
