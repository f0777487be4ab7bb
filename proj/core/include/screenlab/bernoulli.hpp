#pragma once

#include "screenlab/rng.hpp"

namespace screenlab {

/// A candidate population: skill prior p and test signal strength sigma.
/// A single test agrees with the true skill bit with probability
/// 1 - eta, where eta = (1 - sigma) / 2 is the flip (noise) rate.
struct PopulationParams {
  double p;
  double sigma;

  PopulationParams(double p, double sigma);

  double eta() const { return (1.0 - sigma) / 2.0; }
};

/// Fixed-count screening rule with boundary randomization.
///
/// Run tau tests and count passes S. Accept if S > theta, reject if
/// S < theta, accept with probability r if S == theta. r = 1 recovers a
/// plain threshold policy (accept iff S >= theta).
struct ThresholdPolicy {
  int tau;
  int theta;
  double r;

  ThresholdPolicy(int tau, int theta, double r = 1.0);
};

/// Misclassification weights: alpha on false positives, 1 - alpha on
/// false negatives.
struct AlphaLoss {
  double alpha;

  explicit AlphaLoss(double alpha);
};

/// Conditional decision rates of a policy under a population.
struct ConfusionMatrix {
  double tpr = 0.0;
  double fpr = 0.0;
  double fnr = 0.0;
  double tnr = 0.0;
};

/// Draw a skill bit: 1 with probability p.
int sample_candidate(const PopulationParams& params, RandomStream& rng);

/// Draw one test result for a candidate of known skill:
/// skill XOR Bernoulli(eta).
int sample_test(int skill, const PopulationParams& params, RandomStream& rng);

/// Pr[Bin(tau, eta) = k]. Exact binomial coefficients up to tau = 64,
/// log-space beyond.
double binomial_pmf(int tau, double eta, int k);

/// Upper tail Pr[Bin(tau, eta) >= theta]. theta = 0 gives 1,
/// theta = tau + 1 gives 0.
double binomial_tail(int tau, double eta, int theta);

/// Exact decision rates of a randomized threshold policy. Pass counts are
/// Bin(tau, 1 - eta) for skilled candidates and Bin(tau, eta) for
/// unskilled ones; the boundary mass at S == theta is weighted by r.
ConfusionMatrix threshold_confusion(const ThresholdPolicy& policy,
                                    const PopulationParams& params);

/// Expected alpha-loss: alpha (1-p) FPR + (1-alpha) p FNR.
double alpha_loss(const ThresholdPolicy& policy,
                  const PopulationParams& params, const AlphaLoss& loss);

/// Fraction of unskilled among accepted: (1-p) FPR / ((1-p) FPR + p TPR).
double false_discovery_rate(const ConfusionMatrix& cm, double p);

/// Fraction of skilled among rejected.
double false_omission_rate(const ConfusionMatrix& cm, double p);

/// Marginal accept probability (1-p) FPR + p TPR.
double accept_probability(const ConfusionMatrix& cm, double p);

}  // namespace screenlab
