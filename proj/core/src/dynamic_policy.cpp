#include "screenlab/dynamic_policy.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace screenlab {

namespace {

constexpr double kCeilTol = 1e-9;

int ceil_with_tol(double x) { return static_cast<int>(std::ceil(x - kCeilTol)); }
int floor_with_tol(double x) { return static_cast<int>(std::floor(x + kCeilTol)); }

double lambda_of(double sigma) { return (1.0 - sigma) / (1.0 + sigma); }

}  // namespace

GreedyPolicyParams::GreedyPolicyParams(double epsilon_, double epsilon_prime_)
    : epsilon(epsilon_), epsilon_prime(epsilon_prime_) {
  if (!(epsilon > 0.0 && epsilon < 1.0))
    throw std::invalid_argument("GreedyPolicyParams: epsilon must be in (0,1)");
  if (!(epsilon_prime > 0.0 && epsilon_prime < 1.0))
    throw std::invalid_argument("GreedyPolicyParams: epsilon_prime must be in (0,1)");
  if (!(epsilon_prime < 1.0 - epsilon))
    throw std::invalid_argument(
        "GreedyPolicyParams: retest band is empty (epsilon_prime >= 1 - epsilon)");
}

double posterior_given_counts(double p, double sigma, int tau, int theta_passed) {
  if (theta_passed < 0 || theta_passed > tau)
    throw std::invalid_argument("posterior_given_counts: theta_passed out of range");
  const double rho = (1.0 + sigma) / (1.0 - sigma);
  // Evaluate the odds ratio in log space; 2 theta - tau can be negative.
  const double log_odds =
      std::log(p / (1.0 - p)) + (2.0 * theta_passed - tau) * std::log(rho);
  // posterior = odds / (1 + odds), computed stably on both sides.
  if (log_odds > 0.0) {
    return 1.0 / (1.0 + std::exp(-log_odds));
  }
  const double odds = std::exp(log_odds);
  return odds / (1.0 + odds);
}

double log_odds_position(double p, double sigma, std::span<const int> outcomes) {
  long passes = 0;
  for (int bit : outcomes) {
    if (bit != 0 && bit != 1)
      throw std::invalid_argument("log_odds_position: outcomes must be bits");
    passes += bit;
  }
  const double step = std::log((1.0 + sigma) / (1.0 - sigma));
  const double tau = static_cast<double>(outcomes.size());
  return std::log(p / (1.0 - p)) + (2.0 * passes - tau) * step;
}

Decision greedy_decide(double position, const GreedyPolicyParams& params) {
  if (position >= std::log(params.beta())) return Decision::Accept;
  if (position < std::log(params.beta_prime())) return Decision::Reject;
  return Decision::Retest;
}

WalkGeometry walk_geometry(double p, double sigma, const GreedyPolicyParams& params) {
  if (!(p > 0.0 && p < 1.0) || !(sigma > 0.0 && sigma < 1.0))
    throw std::invalid_argument("walk_geometry: p and sigma must be in (0,1)");
  WalkGeometry geom;
  geom.sigma = sigma;
  geom.step = std::log((1.0 + sigma) / (1.0 - sigma));
  geom.p_right_skilled = (1.0 + sigma) / 2.0;
  geom.p_right_unskilled = (1.0 - sigma) / 2.0;

  const double eps = params.epsilon;
  const double epsp = params.epsilon_prime;
  geom.a = ceil_with_tol(std::log((1.0 - eps) * (1.0 - epsp) * (1.0 + sigma) /
                                  (eps * epsp * (1.0 - sigma))) /
                         geom.step);
  geom.z = ceil_with_tol(std::log(p * (1.0 - epsp) * (1.0 + sigma) /
                                  (epsp * (1.0 - p) * (1.0 - sigma))) /
                         geom.step);

  // Lattice barriers: position after j tests is X0 + k*step, k integer.
  // The walk accepts at the first k with X0 + k*step >= log(beta) and
  // rejects at the first k with X0 + k*step < log(beta'); those first
  // reachable indices define the true absorbing states.
  const double x0 = std::log(p / (1.0 - p));
  const double v = (std::log(params.beta()) - x0) / geom.step;
  const double w = (x0 - std::log(params.beta_prime())) / geom.step;
  const int k_accept = ceil_with_tol(v);
  geom.z_lattice = floor_with_tol(w) + 1;
  geom.a_lattice = k_accept + geom.z_lattice;

  geom.degenerate = geom.z_lattice <= 0 || geom.a_lattice <= geom.z_lattice;
  return geom;
}

namespace {

void require_interior(const WalkGeometry& geom) {
  if (!(geom.z > 0 && geom.z < geom.a))
    throw std::invalid_argument("walk closed form requires 0 < z < a");
}

}  // namespace

double expected_tests_skilled(const WalkGeometry& geom) {
  require_interior(geom);
  const double lam = lambda_of(geom.sigma);
  const double up = (1.0 - std::pow(lam, geom.z)) / (1.0 - std::pow(lam, geom.a));
  return (geom.a * up - geom.z) / geom.sigma;
}

double expected_tests_unskilled(const WalkGeometry& geom) {
  require_interior(geom);
  const double lam = lambda_of(geom.sigma);
  // (1 - lam^-z) / (1 - lam^-a) rewritten in positive powers of lam < 1.
  const double up = std::pow(lam, geom.a - geom.z) *
                    (1.0 - std::pow(lam, geom.z)) / (1.0 - std::pow(lam, geom.a));
  return (geom.z - geom.a * up) / geom.sigma;
}

ConfusionMatrix greedy_confusion_exact(const WalkGeometry& geom) {
  require_interior(geom);
  const double lam = lambda_of(geom.sigma);
  const double lam_z = std::pow(lam, geom.z);
  const double lam_a = std::pow(lam, geom.a);
  const double lam_az = std::pow(lam, geom.a - geom.z);
  ConfusionMatrix cm;
  cm.fnr = (lam_z - lam_a) / (1.0 - lam_a);
  cm.tpr = 1.0 - cm.fnr;
  cm.fpr = (lam_az - lam_a) / (1.0 - lam_a);
  cm.tnr = 1.0 - cm.fpr;
  return cm;
}

OverallTests expected_tests_overall(double p, const WalkGeometry& geom) {
  OverallTests result;
  result.exact = p * expected_tests_skilled(geom) +
                 (1.0 - p) * expected_tests_unskilled(geom);
  result.approx = geom.a * p / geom.sigma;
  result.ratio = result.exact / result.approx;
  return result;
}

Absorption markov_absorption_oracle(int a, int z, double p_right) {
  if (!(a >= 2 && z > 0 && z < a))
    throw std::invalid_argument("markov_absorption_oracle: need 0 < z < a");
  if (!(p_right > 0.0 && p_right < 1.0))
    throw std::invalid_argument("markov_absorption_oracle: p_right must be in (0,1)");
  const int n = a - 1;
  const long double p = p_right;
  const long double q = 1.0L - p;

  // Thomas solve of (-q, 1, -p) x = rhs on states 1..a-1.
  auto solve = [&](std::vector<long double> rhs) {
    std::vector<long double> diag(n, 1.0L);
    std::vector<long double> upper(n, -p);
    for (int i = 1; i < n; ++i) {
      const long double m = -q / diag[i - 1];
      diag[i] -= m * upper[i - 1];
      rhs[i] -= m * rhs[i - 1];
    }
    std::vector<long double> x(n);
    x[n - 1] = rhs[n - 1] / diag[n - 1];
    for (int i = n - 2; i >= 0; --i) {
      x[i] = (rhs[i] - upper[i] * x[i + 1]) / diag[i];
    }
    return x;
  };

  std::vector<long double> up_rhs(n, 0.0L);
  up_rhs[n - 1] = p;  // absorbing at a contributes p * 1
  std::vector<long double> down_rhs(n, 0.0L);
  down_rhs[0] = q;  // absorbing at 0 contributes q * 1
  std::vector<long double> dur_rhs(n, 1.0L);

  const auto up = solve(up_rhs);
  const auto down = solve(down_rhs);
  const auto dur = solve(dur_rhs);

  Absorption result;
  result.absorb_up = static_cast<double>(up[z - 1]);
  result.absorb_down = static_cast<double>(down[z - 1]);
  result.expected_duration = static_cast<double>(dur[z - 1]);
  return result;
}

GreedyTrace simulate_greedy(const PopulationParams& params,
                            const GreedyPolicyParams& gp, RandomStream& rng,
                            long step_cap) {
  GreedyTrace trace;
  trace.true_skill = sample_candidate(params, rng);
  const double x0 = std::log(params.p / (1.0 - params.p));
  const double step = std::log((1.0 + params.sigma) / (1.0 - params.sigma));
  // Track the lattice index and recompute the position from it, so the
  // barrier comparisons see no accumulated rounding.
  long k = 0;
  Decision decision = greedy_decide(x0, gp);
  while (decision == Decision::Retest) {
    if (trace.tests_used >= step_cap)
      throw std::runtime_error("simulate_greedy: step cap exceeded");
    const int outcome = sample_test(trace.true_skill, params, rng);
    k += outcome ? 1 : -1;
    ++trace.tests_used;
    decision = greedy_decide(x0 + k * step, gp);
  }
  trace.decision = decision;
  return trace;
}

}  // namespace screenlab
