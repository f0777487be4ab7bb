#pragma once

#include <cstdint>
#include <span>

#include "screenlab/bernoulli.hpp"
#include "screenlab/rng.hpp"

namespace screenlab {

/// Posterior cutoffs of the greedy retest policy: accept once the
/// posterior skilled-probability reaches 1 - epsilon, reject once it
/// falls below epsilon_prime, retest in between.
struct GreedyPolicyParams {
  double epsilon;
  double epsilon_prime;

  GreedyPolicyParams(double epsilon, double epsilon_prime);

  double beta() const { return (1.0 - epsilon) / epsilon; }
  double beta_prime() const { return epsilon_prime / (1.0 - epsilon_prime); }
};

enum class Decision { Accept, Reject, Retest };

/// Normalized gambler's-ruin view of the greedy policy.
///
/// The log-odds walk has fixed step log((1+sigma)/(1-sigma)); after
/// shifting the reject barrier to 0 the walk starts at index z with the
/// accept barrier at index a. Two quantizations are carried:
///   a, z                 the displayed ceiling formulas;
///   a_lattice, z_lattice the barrier indices the real-valued cutoffs
///                        actually induce on the step lattice (what a
///                        simulated walk obeys).
/// The two coincide whenever the start-to-reject distance is a whole
/// number of steps (in particular for epsilon_prime = p).
struct WalkGeometry {
  double step = 0.0;
  double sigma = 0.0;
  int a = 0;
  int z = 0;
  int a_lattice = 0;
  int z_lattice = 0;
  double p_right_skilled = 0.0;
  double p_right_unskilled = 0.0;
  /// Start outside the retest band: the policy decides without testing.
  bool degenerate = false;

  /// Copy with the lattice barriers promoted to (a, z).
  WalkGeometry lattice() const {
    WalkGeometry g = *this;
    g.a = a_lattice;
    g.z = z_lattice;
    return g;
  }
};

/// Pr[skilled | theta_passed passes out of tau], via the prior-odds
/// update rho^(2 theta - tau) with rho = (1+sigma)/(1-sigma).
double posterior_given_counts(double p, double sigma, int tau, int theta_passed);

/// Log-odds of skill after a test sequence:
/// log(p/(1-p)) + (2 S - tau) log((1+sigma)/(1-sigma)).
double log_odds_position(double p, double sigma, std::span<const int> outcomes);

/// Accept iff X >= log((1-eps)/eps); reject iff X < log(eps'/(1-eps')).
Decision greedy_decide(double position, const GreedyPolicyParams& params);

WalkGeometry walk_geometry(double p, double sigma, const GreedyPolicyParams& params);

/// Expected walk length before absorption, by true class. Closed
/// Gambler's-ruin forms, evaluated with powers of
/// lambda = (1-sigma)/(1+sigma) < 1 only.
double expected_tests_skilled(const WalkGeometry& geom);
double expected_tests_unskilled(const WalkGeometry& geom);

/// Absorption probabilities at the two barriers, by true class.
ConfusionMatrix greedy_confusion_exact(const WalkGeometry& geom);

struct OverallTests {
  double exact = 0.0;   // p E[tau_s] + (1-p) E[tau_u]
  double approx = 0.0;  // a p / sigma
  double ratio = 0.0;   // exact / approx
};

OverallTests expected_tests_overall(double p, const WalkGeometry& geom);

struct Absorption {
  double absorb_up = 0.0;
  double absorb_down = 0.0;
  double expected_duration = 0.0;
};

/// Independent ground truth: solves the two first-step tridiagonal
/// systems on states 1..a-1 directly (absorbing 0 and a, start z).
Absorption markov_absorption_oracle(int a, int z, double p_right);

struct GreedyTrace {
  Decision decision = Decision::Retest;
  long tests_used = 0;
  int true_skill = 0;
};

/// Samples a candidate and runs the greedy policy on the real-valued
/// log-odds barriers until it leaves the retest band. Exceeding step_cap
/// is an error (finite expected duration makes the cap unreachable for
/// sane geometry).
GreedyTrace simulate_greedy(const PopulationParams& params,
                            const GreedyPolicyParams& gp, RandomStream& rng,
                            long step_cap = 1'000'000);

}  // namespace screenlab
