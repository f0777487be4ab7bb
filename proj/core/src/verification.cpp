#include "screenlab/verification.hpp"

#include <cmath>
#include <map>
#include <stdexcept>
#include <thread>
#include <vector>

namespace screenlab {

namespace {

double rate_se(double rate, std::uint64_t n) {
  if (n == 0) return 0.0;
  return std::sqrt(rate * (1.0 - rate) / static_cast<double>(n));
}

double mean_se(std::uint64_t sum, std::uint64_t sumsq, std::uint64_t n) {
  if (n < 2) return 0.0;
  const double nn = static_cast<double>(n);
  const double mean = static_cast<double>(sum) / nn;
  const double var = (static_cast<double>(sumsq) - nn * mean * mean) / (nn - 1.0);
  return std::sqrt(std::max(var, 0.0) / nn);
}

}  // namespace

void EmpiricalSummary::merge(const EmpiricalSummary& other) {
  num_candidates += other.num_candidates;
  accept_skilled += other.accept_skilled;
  reject_skilled += other.reject_skilled;
  accept_unskilled += other.accept_unskilled;
  reject_unskilled += other.reject_unskilled;
  sum_tests_skilled += other.sum_tests_skilled;
  sumsq_tests_skilled += other.sumsq_tests_skilled;
  sum_tests_unskilled += other.sum_tests_unskilled;
  sumsq_tests_unskilled += other.sumsq_tests_unskilled;
}

double EmpiricalSummary::tpr_hat() const {
  return skilled() ? static_cast<double>(accept_skilled) / static_cast<double>(skilled()) : 0.0;
}

double EmpiricalSummary::fpr_hat() const {
  return unskilled() ? static_cast<double>(accept_unskilled) / static_cast<double>(unskilled()) : 0.0;
}

double EmpiricalSummary::tpr_se() const { return rate_se(tpr_hat(), skilled()); }
double EmpiricalSummary::fpr_se() const { return rate_se(fpr_hat(), unskilled()); }

double EmpiricalSummary::mean_tests_skilled() const {
  return skilled() ? static_cast<double>(sum_tests_skilled) / static_cast<double>(skilled()) : 0.0;
}

double EmpiricalSummary::mean_tests_unskilled() const {
  return unskilled() ? static_cast<double>(sum_tests_unskilled) / static_cast<double>(unskilled()) : 0.0;
}

double EmpiricalSummary::mean_tests() const {
  if (num_candidates == 0) return 0.0;
  return static_cast<double>(sum_tests_skilled + sum_tests_unskilled) /
         static_cast<double>(num_candidates);
}

double EmpiricalSummary::se_tests_skilled() const {
  return mean_se(sum_tests_skilled, sumsq_tests_skilled, skilled());
}

double EmpiricalSummary::se_tests_unskilled() const {
  return mean_se(sum_tests_unskilled, sumsq_tests_unskilled, unskilled());
}

double EmpiricalSummary::se_tests() const {
  return mean_se(sum_tests_skilled + sum_tests_unskilled,
                 sumsq_tests_skilled + sumsq_tests_unskilled,
                 static_cast<std::uint64_t>(num_candidates));
}

namespace {

void record(EmpiricalSummary& summary, int skill, bool accepted, long tests) {
  const auto t = static_cast<std::uint64_t>(tests);
  if (skill == 1) {
    (accepted ? summary.accept_skilled : summary.reject_skilled) += 1;
    summary.sum_tests_skilled += t;
    summary.sumsq_tests_skilled += t * t;
  } else {
    (accepted ? summary.accept_unskilled : summary.reject_unskilled) += 1;
    summary.sum_tests_unskilled += t;
    summary.sumsq_tests_unskilled += t * t;
  }
}

EmpiricalSummary run_range(const SimulationConfig& config,
                           const ExperimentSpec& spec, long begin, long end) {
  EmpiricalSummary summary;
  const RandomStream master(config.seed);
  for (long i = begin; i < end; ++i) {
    RandomStream stream = master.substream(static_cast<std::uint64_t>(i));
    ++summary.num_candidates;
    if (const auto* threshold = std::get_if<ThresholdExperiment>(&spec)) {
      const int skill = sample_candidate(threshold->params, stream);
      int passes = 0;
      for (int t = 0; t < threshold->policy.tau; ++t)
        passes += sample_test(skill, threshold->params, stream);
      bool accepted = false;
      if (passes > threshold->policy.theta) {
        accepted = true;
      } else if (passes == threshold->policy.theta) {
        accepted = stream.bernoulli(threshold->policy.r);
      }
      record(summary, skill, accepted, threshold->policy.tau);
    } else {
      const auto& greedy = std::get<GreedyExperiment>(spec);
      const GreedyTrace trace =
          simulate_greedy(greedy.params, greedy.policy, stream, greedy.step_cap);
      record(summary, trace.true_skill, trace.decision == Decision::Accept,
             trace.tests_used);
    }
  }
  return summary;
}

}  // namespace

EmpiricalSummary run_experiment(const SimulationConfig& config,
                                const ExperimentSpec& spec) {
  if (config.num_candidates < 0)
    throw std::invalid_argument("run_experiment: negative candidate count");
  const int shards = std::max(config.shards, 1);
  const long n = config.num_candidates;
  if (shards == 1) return run_range(config, spec, 0, n);

  std::vector<EmpiricalSummary> partials(shards);
  std::vector<std::exception_ptr> errors(shards);
  std::vector<std::thread> workers;
  workers.reserve(shards);
  const long chunk = (n + shards - 1) / shards;
  for (int s = 0; s < shards; ++s) {
    const long begin = std::min<long>(s * chunk, n);
    const long end = std::min<long>(begin + chunk, n);
    workers.emplace_back([&, s, begin, end] {
      try {
        partials[s] = run_range(config, spec, begin, end);
      } catch (...) {
        errors[s] = std::current_exception();
      }
    });
  }
  for (auto& worker : workers) worker.join();
  for (const auto& error : errors)
    if (error) std::rethrow_exception(error);
  EmpiricalSummary total;
  for (const auto& partial : partials) total.merge(partial);
  return total;
}

ThresholdOracleResult enumerate_threshold_oracle(const ThresholdPolicy& policy,
                                                 const PopulationParams& params,
                                                 double alpha) {
  if (policy.tau > 20)
    throw std::invalid_argument("enumerate_threshold_oracle: tau capped at 20");
  const int tau = policy.tau;
  const double eta = params.eta();

  // Accept probability per class from raw sequence enumeration.
  double accept_mass[2] = {0.0, 0.0};
  for (int skill = 0; skill <= 1; ++skill) {
    const double pass_prob = skill == 1 ? 1.0 - eta : eta;
    for (std::uint32_t bits = 0; bits < (1u << tau); ++bits) {
      double prob = 1.0;
      int passes = 0;
      for (int t = 0; t < tau; ++t) {
        const bool passed = bits & (1u << t);
        prob *= passed ? pass_prob : 1.0 - pass_prob;
        passes += passed ? 1 : 0;
      }
      double weight = 0.0;
      if (passes > policy.theta) {
        weight = 1.0;
      } else if (passes == policy.theta) {
        weight = policy.r;
      }
      accept_mass[skill] += prob * weight;
    }
  }

  ThresholdOracleResult result;
  result.confusion.fpr = accept_mass[0];
  result.confusion.tpr = accept_mass[1];
  result.confusion.tnr = 1.0 - accept_mass[0];
  result.confusion.fnr = 1.0 - accept_mass[1];
  result.accept_prob =
      (1.0 - params.p) * accept_mass[0] + params.p * accept_mass[1];
  result.loss = alpha * (1.0 - params.p) * result.confusion.fpr +
                (1.0 - alpha) * params.p * result.confusion.fnr;
  return result;
}

GreedyOracleResult enumerate_greedy_oracle(const PopulationParams& params,
                                           const GreedyPolicyParams& gp,
                                           int max_len) {
  if (max_len < 1 || max_len > 25)
    throw std::invalid_argument("enumerate_greedy_oracle: max_len must be in [1, 25]");

  const double x0 = std::log(params.p / (1.0 - params.p));
  const double step = std::log((1.0 + params.sigma) / (1.0 - params.sigma));
  const double eta = params.eta();

  GreedyOracleResult result;
  double accept[2] = {0.0, 0.0};
  double reject[2] = {0.0, 0.0};
  double steps_absorbed[2] = {0.0, 0.0};
  double unresolved[2] = {0.0, 0.0};

  for (int skill = 0; skill <= 1; ++skill) {
    const double pass_prob = skill == 1 ? 1.0 - eta : eta;
    // Mass per lattice offset among still-undecided prefixes. The decision
    // depends on the prefix only through its offset, so equal-offset
    // prefixes can be pooled without changing the tree's leaf masses.
    std::map<long, double> mass;
    if (greedy_decide(x0, gp) != Decision::Retest) {
      // Degenerate band: the policy decides at depth zero.
      (greedy_decide(x0, gp) == Decision::Accept ? accept : reject)[skill] = 1.0;
      continue;
    }
    mass[0] = 1.0;
    for (int depth = 1; depth <= max_len && !mass.empty(); ++depth) {
      std::map<long, double> next;
      for (const auto& [offset, m] : mass) {
        for (int outcome = 0; outcome <= 1; ++outcome) {
          const long k = offset + (outcome ? 1 : -1);
          const double m2 = m * (outcome ? pass_prob : 1.0 - pass_prob);
          switch (greedy_decide(x0 + k * step, gp)) {
            case Decision::Accept:
              accept[skill] += m2;
              steps_absorbed[skill] += m2 * depth;
              break;
            case Decision::Reject:
              reject[skill] += m2;
              steps_absorbed[skill] += m2 * depth;
              break;
            case Decision::Retest:
              next[k] += m2;
              break;
          }
        }
      }
      mass = std::move(next);
    }
    for (const auto& [offset, m] : mass) unresolved[skill] += m;
  }

  result.unresolved_skilled = unresolved[1];
  result.unresolved_unskilled = unresolved[0];
  result.tpr = {accept[1], accept[1] + unresolved[1]};
  result.fnr = {reject[1], reject[1] + unresolved[1]};
  result.fpr = {accept[0], accept[0] + unresolved[0]};
  result.tnr = {reject[0], reject[0] + unresolved[0]};

  // Geometric absorption bound for the truncated walks: within any window
  // of a_lattice consecutive steps an undecided walk reaches a barrier
  // with probability at least q_window = min(pass, fail)^a_lattice, so the
  // expected overhang is at most a_lattice / q_window.
  const WalkGeometry geom = walk_geometry(params.p, params.sigma, gp);
  const int span = std::max(geom.a_lattice, 1);
  for (int skill = 0; skill <= 1; ++skill) {
    const double pass_prob = skill == 1 ? 1.0 - eta : eta;
    const double q_window = std::pow(std::min(pass_prob, 1.0 - pass_prob), span);
    const double overhang = q_window > 0.0 ? span / q_window : 0.0;
    const double lower = steps_absorbed[skill] + unresolved[skill] * max_len;
    const double upper = lower + unresolved[skill] * overhang;
    auto& bracket = skill == 1 ? result.expected_tests_skilled
                               : result.expected_tests_unskilled;
    bracket = {lower, upper};
  }
  return result;
}

double RuinWalkSummary::absorb_up_hat() const {
  return walks ? static_cast<double>(absorbed_up) / static_cast<double>(walks) : 0.0;
}

double RuinWalkSummary::absorb_up_se() const {
  return rate_se(absorb_up_hat(), static_cast<std::uint64_t>(walks));
}

double RuinWalkSummary::mean_steps() const {
  return walks ? static_cast<double>(sum_steps) / static_cast<double>(walks) : 0.0;
}

double RuinWalkSummary::se_steps() const {
  return mean_se(sum_steps, sumsq_steps, static_cast<std::uint64_t>(walks));
}

RuinWalkSummary simulate_ruin_walk(int a, int z, double p_right, long walks,
                                   std::uint64_t seed) {
  if (!(a >= 2 && z > 0 && z < a))
    throw std::invalid_argument("simulate_ruin_walk: need 0 < z < a");
  RuinWalkSummary summary;
  summary.walks = walks;
  const RandomStream master(seed);
  for (long i = 0; i < walks; ++i) {
    RandomStream stream = master.substream(static_cast<std::uint64_t>(i));
    int position = z;
    std::uint64_t steps = 0;
    while (position > 0 && position < a) {
      position += stream.bernoulli(p_right) ? 1 : -1;
      ++steps;
    }
    if (position == a) ++summary.absorbed_up;
    summary.sum_steps += steps;
    summary.sumsq_steps += steps * steps;
  }
  return summary;
}

}  // namespace screenlab
