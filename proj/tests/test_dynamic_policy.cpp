#include <tuple>
#include <stdexcept>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "screenlab/dynamic_policy.hpp"
#include "screenlab/verification.hpp"

using namespace screenlab;

namespace {

// Brute-force posterior by enumerating every length-tau outcome sequence.
double posterior_by_enumeration(double p, double sigma, int tau, int passes) {
  const double eta = (1.0 - sigma) / 2.0;
  double mass_skilled = 0.0, mass_unskilled = 0.0;
  for (std::uint32_t bits = 0; bits < (1u << tau); ++bits) {
    int ones = 0;
    double prob_s = 1.0, prob_u = 1.0;
    for (int t = 0; t < tau; ++t) {
      const bool pass = bits & (1u << t);
      ones += pass;
      prob_s *= pass ? 1.0 - eta : eta;
      prob_u *= pass ? eta : 1.0 - eta;
    }
    if (ones == passes) {
      mass_skilled += prob_s;
      mass_unskilled += prob_u;
    }
  }
  return p * mass_skilled / (p * mass_skilled + (1.0 - p) * mass_unskilled);
}

}  // namespace

TEST_SUITE("dynamic_policy") {

TEST_CASE("policy parameter validation") {
  CHECK_THROWS_AS(GreedyPolicyParams(0.0, 0.3), std::invalid_argument);
  CHECK_THROWS_AS(GreedyPolicyParams(0.3, 0.8), std::invalid_argument);
  CHECK(GreedyPolicyParams(0.1, 0.5).beta() == doctest::Approx(9.0));
}

TEST_CASE("posterior at a balanced count is the prior") {
  for (double p : {0.2, 0.5, 0.8}) {
    for (double sigma : {0.3, 0.7}) {
      CHECK(posterior_given_counts(p, sigma, 6, 3) == doctest::Approx(p).epsilon(1e-14));
    }
  }
}

TEST_CASE("posterior moves with the pass count") {
  for (double p : {0.2, 0.5, 0.8}) {
    for (double sigma : {0.3, 0.7}) {
      for (int tau = 1; tau <= 9; ++tau) {
        for (int passes = 0; passes <= tau; ++passes) {
          const double post = posterior_given_counts(p, sigma, tau, passes);
          if (2 * passes > tau) CHECK(post > p);
          if (2 * passes < tau) CHECK(post < p);
        }
      }
    }
  }
}

TEST_CASE("posterior matches a hand Bayes computation and enumeration") {
  // rho = 2 at sigma = 1/3, so two passes of three give odds 2:1.
  CHECK(posterior_given_counts(0.5, 1.0 / 3, 3, 2) ==
        doctest::Approx(2.0 / 3).epsilon(1e-14));
  for (int tau = 1; tau <= 10; ++tau) {
    for (int passes = 0; passes <= tau; ++passes) {
      const double closed = posterior_given_counts(0.35, 0.45, tau, passes);
      const double brute = posterior_by_enumeration(0.35, 0.45, tau, passes);
      CHECK(closed == doctest::Approx(brute).epsilon(1e-11));
    }
  }
}

TEST_CASE("log odds position basics") {
  const std::vector<int> empty;
  CHECK(log_odds_position(0.3, 0.5, empty) ==
        doctest::Approx(std::log(0.3 / 0.7)).epsilon(1e-14));
  const std::vector<int> updown{1, 0};
  CHECK(log_odds_position(0.3, 0.5, updown) ==
        doctest::Approx(std::log(0.3 / 0.7)).epsilon(1e-13));
  const std::vector<int> two{1, 1};
  CHECK(log_odds_position(0.5, 1.0 / 3, two) ==
        doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-13));
}

TEST_CASE("greedy_decide boundaries") {
  const GreedyPolicyParams gp(0.1, 0.3);
  CHECK(greedy_decide(std::log(gp.beta()), gp) == Decision::Accept);
  CHECK(greedy_decide(std::log(gp.beta()) - 1e-9, gp) == Decision::Retest);
  CHECK(greedy_decide(std::log(gp.beta_prime()), gp) == Decision::Retest);
  CHECK(greedy_decide(std::log(gp.beta_prime()) - 1e-9, gp) == Decision::Reject);
}

TEST_CASE("position decisions equal posterior-threshold decisions") {
  // Every outcome sequence of length <= 12 at several parameter points.
  for (auto [p, sigma, eps, epsp] :
       {std::tuple{0.5, 1.0 / 3, 0.1, 0.5}, {0.3, 0.45, 0.05, 0.3},
        {0.55, 0.6, 0.2, 0.25}}) {
    const GreedyPolicyParams gp(eps, epsp);
    for (int len = 0; len <= 12; ++len) {
      for (std::uint32_t bits = 0; bits < (1u << len); ++bits) {
        int passes = 0;
        for (int t = 0; t < len; ++t) passes += (bits >> t) & 1;
        const double position =
            std::log(p / (1.0 - p)) +
            (2.0 * passes - len) * std::log((1.0 + sigma) / (1.0 - sigma));
        const Decision by_position = greedy_decide(position, gp);
        const double posterior = posterior_given_counts(p, sigma, len, passes);
        const Decision by_posterior = posterior >= 1.0 - eps ? Decision::Accept
                                      : posterior < epsp     ? Decision::Reject
                                                             : Decision::Retest;
        INFO("p=" << (p) << " " << "sigma=" << (sigma) << " " << "eps=" << (eps) << " " << "epsp=" << (epsp) << " " << "len=" << (len) << " " << "passes=" << (passes));
        CHECK(by_position == by_posterior);
      }
    }
  }
}

TEST_CASE("walk geometry at the reference point") {
  // epsilon' = p puts the start one step above the reject barrier.
  const auto geom = walk_geometry(0.5, 1.0 / 3, GreedyPolicyParams(0.1, 0.5));
  CHECK(geom.z == 1);
  CHECK(geom.a == 5);
  CHECK(geom.z_lattice == 1);
  CHECK(geom.a_lattice == 5);
  CHECK(!geom.degenerate);
  CHECK(geom.step == doctest::Approx(std::log(2.0)).epsilon(1e-14));
  CHECK(geom.p_right_skilled == doctest::Approx(2.0 / 3).epsilon(1e-14));
}

TEST_CASE("larger epsilon_prime narrows the start gap") {
  int prev_z = 1000;
  for (double epsp : {0.05, 0.1, 0.2, 0.3, 0.4, 0.5}) {
    const auto geom = walk_geometry(0.5, 0.4, GreedyPolicyParams(0.1, epsp));
    CHECK(geom.z <= prev_z);
    prev_z = geom.z;
  }
}

TEST_CASE("accept barrier is far for small epsilon") {
  for (double sigma : {0.2, 0.5, 0.8}) {
    for (double p : {0.3, 0.5}) {
      const auto geom = walk_geometry(p, sigma, GreedyPolicyParams(0.01, p));
      CHECK(geom.a > 1.0 / sigma);
    }
  }
}

TEST_CASE("degenerate geometry is flagged") {
  // epsilon' above p: the prior already sits below the reject cutoff.
  const auto geom = walk_geometry(0.2, 0.5, GreedyPolicyParams(0.1, 0.6));
  CHECK(geom.degenerate);
}

TEST_CASE("closed forms match the tridiagonal oracle") {
  for (double sigma : {0.2, 0.5, 0.8}) {
    for (int a : {2, 3, 5, 9, 17, 33, 60}) {
      for (int z = 1; z < a; ++z) {
        WalkGeometry geom;
        geom.sigma = sigma;
        geom.a = a;
        geom.z = z;
        const double p_right_s = (1.0 + sigma) / 2.0;
        const auto oracle_s = markov_absorption_oracle(a, z, p_right_s);
        const auto oracle_u = markov_absorption_oracle(a, z, 1.0 - p_right_s);
        const auto cm = greedy_confusion_exact(geom);
        INFO("sigma=" << (sigma) << " " << "a=" << (a) << " " << "z=" << (z));
        CHECK(expected_tests_skilled(geom) ==
              doctest::Approx(oracle_s.expected_duration).epsilon(1e-9));
        CHECK(expected_tests_unskilled(geom) ==
              doctest::Approx(oracle_u.expected_duration).epsilon(1e-9));
        CHECK(cm.tpr == doctest::Approx(oracle_s.absorb_up).epsilon(1e-9));
        CHECK(cm.fpr == doctest::Approx(oracle_u.absorb_up).epsilon(1e-9));
        CHECK(oracle_s.absorb_up + oracle_s.absorb_down ==
              doctest::Approx(1.0).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("oracle sanity on classic gambler's ruin values") {
  const auto symmetric = markov_absorption_oracle(10, 5, 0.5);
  CHECK(symmetric.absorb_up == doctest::Approx(0.5).epsilon(1e-12));
  // (1 - (q/p)^z) / (1 - (q/p)^a) at p = 2/3, a = 3, z = 1 gives 4/7.
  const auto classic = markov_absorption_oracle(3, 1, 2.0 / 3);
  CHECK(classic.absorb_up == doctest::Approx(4.0 / 7).epsilon(1e-12));
}

TEST_CASE("oracle durations agree with walk simulation") {
  const auto oracle = markov_absorption_oracle(7, 2, 0.6);
  const auto mc = simulate_ruin_walk(7, 2, 0.6, 200000, 314);
  CHECK(std::abs(mc.mean_steps() - oracle.expected_duration) <
        3.0 * mc.se_steps());
  CHECK(std::abs(mc.absorb_up_hat() - oracle.absorb_up) < 3.0 * mc.absorb_up_se());
}

TEST_CASE("noiseless limit is a deterministic drift") {
  WalkGeometry geom;
  geom.sigma = 0.999999;
  geom.a = 8;
  geom.z = 3;
  CHECK(expected_tests_skilled(geom) == doctest::Approx(5.0).epsilon(1e-4));
  CHECK(expected_tests_unskilled(geom) == doctest::Approx(3.0).epsilon(1e-4));
  const auto cm = greedy_confusion_exact(geom);
  CHECK(cm.fnr == doctest::Approx(0.0).epsilon(1e-6));
  CHECK(cm.fpr == doctest::Approx(0.0).epsilon(1e-6));
}

TEST_CASE("simulation matches closed forms when the lattice is exact") {
  // epsilon' = p: ceiling and lattice barriers coincide, so the simulated
  // policy is exactly the closed-form walk.
  const PopulationParams params(0.5, 1.0 / 3);
  const GreedyPolicyParams gp(0.1, 0.5);
  const auto geom = walk_geometry(params.p, params.sigma, gp);
  REQUIRE(geom.a == geom.a_lattice);
  REQUIRE(geom.z == geom.z_lattice);

  SimulationConfig config{777, 200000, 2};
  const auto summary = run_experiment(config, GreedyExperiment{params, gp});
  const auto cm = greedy_confusion_exact(geom);
  CHECK(std::abs(summary.tpr_hat() - cm.tpr) < 3.0 * summary.tpr_se());
  CHECK(std::abs(summary.fpr_hat() - cm.fpr) < 3.0 * summary.fpr_se());
  CHECK(std::abs(summary.mean_tests_skilled() - expected_tests_skilled(geom)) <
        3.0 * summary.se_tests_skilled());
  CHECK(std::abs(summary.mean_tests_unskilled() - expected_tests_unskilled(geom)) <
        3.0 * summary.se_tests_unskilled());
}

TEST_CASE("simulation matches the lattice closed forms under intervention") {
  // epsilon' < p: the ceiling formulas overshoot the true lattice
  // barriers; the simulation must track the lattice ones.
  const PopulationParams params(0.3, 0.4);
  const GreedyPolicyParams gp(0.1, 0.1);
  const auto geom = walk_geometry(params.p, params.sigma, gp);
  CHECK((geom.a != geom.a_lattice || geom.z != geom.z_lattice));

  SimulationConfig config{1234, 200000, 2};
  const auto summary = run_experiment(config, GreedyExperiment{params, gp});
  const auto lattice = geom.lattice();
  const auto cm = greedy_confusion_exact(lattice);
  CHECK(std::abs(summary.tpr_hat() - cm.tpr) < 3.0 * summary.tpr_se());
  CHECK(std::abs(summary.mean_tests_skilled() - expected_tests_skilled(lattice)) <
        3.0 * summary.se_tests_skilled());
  CHECK(std::abs(summary.mean_tests_unskilled() -
                 expected_tests_unskilled(lattice)) <
        3.0 * summary.se_tests_unskilled());
}

TEST_CASE("sigma near one accepts skilled candidates in a - z steps") {
  const PopulationParams params(0.5, 0.999);
  const GreedyPolicyParams gp(0.1, 0.5);
  const auto geom = walk_geometry(params.p, params.sigma, gp);
  RandomStream rng(5);
  for (int i = 0; i < 200; ++i) {
    const auto trace = simulate_greedy(params, gp, rng);
    if (trace.true_skill == 1 && trace.decision == Decision::Accept) {
      CHECK(trace.tests_used == geom.a_lattice - geom.z_lattice);
    }
  }
}

TEST_CASE("step cap turns pathological walks into errors") {
  const PopulationParams params(0.5, 0.2);
  const GreedyPolicyParams gp(1e-9, 1e-9);
  RandomStream rng(1);
  bool threw = false;
  for (int i = 0; i < 50 && !threw; ++i) {
    try {
      (void)simulate_greedy(params, gp, rng, 50);
    } catch (const std::runtime_error&) {
      threw = true;
    }
  }
  CHECK(threw);
}

TEST_CASE("overall expected tests mix the per-class values") {
  const auto geom = walk_geometry(0.4, 0.5, GreedyPolicyParams(0.1, 0.4));
  const auto overall = expected_tests_overall(0.4, geom);
  CHECK(overall.exact ==
        doctest::Approx(0.4 * expected_tests_skilled(geom) +
                        0.6 * expected_tests_unskilled(geom)).epsilon(1e-13));
  CHECK(overall.approx == doctest::Approx(geom.a * 0.4 / 0.5).epsilon(1e-13));

  // p -> 1: the mixture collapses to the skilled mean. The accept cutoff
  // has to stay above the prior log-odds for the walk to exist at all.
  const auto geom_hi = walk_geometry(0.999, 0.5, GreedyPolicyParams(5e-4, 0.4));
  REQUIRE(!geom_hi.degenerate);
  const auto overall_hi = expected_tests_overall(0.999, geom_hi);
  CHECK(overall_hi.exact ==
        doctest::Approx(expected_tests_skilled(geom_hi)).epsilon(5e-3));
}

TEST_CASE("approximation ratio stays within a factor of four") {
  for (double p : {0.2, 0.3, 0.4, 0.5}) {
    for (double sigma : {0.2, 1.0 / 3, 0.5, 0.8}) {
      for (double eps : {0.05, 0.1, 0.2, 0.25}) {
        const auto geom = walk_geometry(p, sigma, GreedyPolicyParams(eps, p));
        const auto overall = expected_tests_overall(p, geom);
        INFO("p=" << (p) << " " << "sigma=" << (sigma) << " " << "eps=" << (eps));
        CHECK(overall.ratio > 0.25);
        CHECK(overall.ratio < 4.0);
      }
    }
  }
}

TEST_CASE("table-1 rates as bounded ratios when epsilon_prime = p") {
  for (double p : {0.2, 0.3, 0.4, 0.5}) {
    for (double sigma : {0.2, 1.0 / 3, 0.5, 0.8}) {
      for (double eps : {0.05, 0.1, 0.2, 0.25}) {
        const auto geom = walk_geometry(p, sigma, GreedyPolicyParams(eps, p));
        const auto cm = greedy_confusion_exact(geom);
        const double tpr_ratio = cm.tpr / sigma;
        const double fpr_ratio = cm.fpr / (eps * p * sigma);
        INFO("p=" << (p) << " " << "sigma=" << (sigma) << " " << "eps=" << (eps));
        CHECK(tpr_ratio > 1.0 / 8);
        CHECK(tpr_ratio < 8.0);
        CHECK(fpr_ratio > 1.0 / 8);
        CHECK(fpr_ratio < 8.0);
      }
    }
  }
}

TEST_CASE("tpr does not increase as the reject cutoff rises") {
  for (double p : {0.3, 0.5}) {
    for (double sigma : {0.4, 0.6}) {
      double prev = 2.0;
      for (int i = 1; i <= 40; ++i) {
        const double epsp = 0.01 + (p - 0.011) * i / 40.0;
        const auto geom = walk_geometry(p, sigma, GreedyPolicyParams(0.1, epsp));
        if (geom.degenerate) continue;
        const double tpr = greedy_confusion_exact(geom.lattice()).tpr;
        CHECK(tpr <= prev + 1e-12);
        prev = tpr;
      }
    }
  }
}

}  // TEST_SUITE
