#pragma once

#include <cstdint>
#include <variant>

#include "screenlab/bernoulli.hpp"
#include "screenlab/dynamic_policy.hpp"

namespace screenlab {

struct SimulationConfig {
  std::uint64_t seed = 0;
  long num_candidates = 0;
  int shards = 1;
};

/// Integer tallies from a simulation. Everything accumulated is an exact
/// integer, so merge order and shard count cannot perturb the result;
/// rates and standard errors are derived on demand.
struct EmpiricalSummary {
  long num_candidates = 0;
  std::uint64_t accept_skilled = 0;
  std::uint64_t reject_skilled = 0;
  std::uint64_t accept_unskilled = 0;
  std::uint64_t reject_unskilled = 0;
  std::uint64_t sum_tests_skilled = 0;
  std::uint64_t sumsq_tests_skilled = 0;
  std::uint64_t sum_tests_unskilled = 0;
  std::uint64_t sumsq_tests_unskilled = 0;

  void merge(const EmpiricalSummary& other);

  std::uint64_t skilled() const { return accept_skilled + reject_skilled; }
  std::uint64_t unskilled() const { return accept_unskilled + reject_unskilled; }

  double tpr_hat() const;
  double fpr_hat() const;
  double tpr_se() const;
  double fpr_se() const;
  double mean_tests_skilled() const;
  double mean_tests_unskilled() const;
  double mean_tests() const;
  double se_tests_skilled() const;
  double se_tests_unskilled() const;
  double se_tests() const;
};

struct ThresholdExperiment {
  PopulationParams params;
  ThresholdPolicy policy;
};

struct GreedyExperiment {
  PopulationParams params;
  GreedyPolicyParams policy;
  long step_cap = 1'000'000;
};

using ExperimentSpec = std::variant<ThresholdExperiment, GreedyExperiment>;

/// Runs the experiment across config.shards worker threads. Candidate i
/// always draws from substream i of the master seed, so the aggregate is
/// bit-identical for any shard count.
EmpiricalSummary run_experiment(const SimulationConfig& config,
                                const ExperimentSpec& spec);

struct ThresholdOracleResult {
  ConfusionMatrix confusion;
  double loss = 0.0;
  double accept_prob = 0.0;
};

/// Brute-force ground truth for the threshold analytics: sums the policy
/// over all 2^tau outcome sequences for each skill class, weighting each
/// sequence by its product probability. The boundary randomization r
/// enters as an analytic weight. tau is capped at 20.
ThresholdOracleResult enumerate_threshold_oracle(const ThresholdPolicy& policy,
                                                 const PopulationParams& params,
                                                 double alpha);

struct RateBracket {
  double lower = 0.0;
  double upper = 0.0;

  bool contains(double x) const { return x >= lower - 1e-12 && x <= upper + 1e-12; }
};

struct GreedyOracleResult {
  RateBracket tpr, fpr, fnr, tnr;
  /// Expected tests bracketed by the truncation: the unresolved mass takes
  /// at least max_len steps (lower) and at most max_len plus a geometric
  /// absorption bound (upper).
  RateBracket expected_tests_skilled;
  RateBracket expected_tests_unskilled;
  double unresolved_skilled = 0.0;
  double unresolved_unskilled = 0.0;
};

/// Walks the greedy decision tree over outcome prefixes up to max_len
/// (<= 25), accumulating absorbed probability mass per class; whatever is
/// still undecided widens the brackets.
GreedyOracleResult enumerate_greedy_oracle(const PopulationParams& params,
                                           const GreedyPolicyParams& gp,
                                           int max_len);

struct RuinWalkSummary {
  long walks = 0;
  std::uint64_t absorbed_up = 0;
  std::uint64_t sum_steps = 0;
  std::uint64_t sumsq_steps = 0;

  double absorb_up_hat() const;
  double absorb_up_se() const;
  double mean_steps() const;
  double se_steps() const;
};

/// Monte Carlo of the unit-step ruin walk itself (barriers 0 and a,
/// start z, right-step probability p_right).
RuinWalkSummary simulate_ruin_walk(int a, int z, double p_right, long walks,
                                   std::uint64_t seed);

}  // namespace screenlab
