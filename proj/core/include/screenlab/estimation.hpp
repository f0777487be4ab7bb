#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace screenlab {

/// Per-candidate binary test sequences. Only candidates with at least two
/// recorded tests enter the estimators, and only their first two columns
/// are used.
struct BernoulliTestLog {
  std::vector<std::vector<int>> tests;

  /// Candidates with >= 2 tests.
  long usable_count() const;
  /// Among usable candidates, how many pass the first test and fail the
  /// second. That pattern occurs with probability (1 - sigma^2)/4
  /// regardless of p, and it is the only inconsistency a
  /// reject-on-first-failure screening log can contain.
  long inconsistency_count() const;
  /// Among usable candidates, how many pass the first test.
  long first_test_positive_count() const;
};

struct EstimateReport {
  double estimate = 0.0;
  long m_used = 0;
  /// Raw statistic behind the estimate (c/m for sigma, q-hat for p).
  double raw_statistic = 0.0;
  /// Estimate left its natural range and was clamped.
  bool clamped = false;
  /// Accuracy/confidence targets, when the caller planned for some.
  double epsilon = 0.0;
  double delta = 0.0;
  bool meets_plan = false;
};

/// Candidates needed so the raw statistic lands within epsilon of its mean
/// with probability 1 - delta: ceil(ln(2/delta) / (2 epsilon^2)).
long plan_samples(double epsilon, double delta);

/// sigma-hat = sqrt(1 - 4 c / m) from the pass-then-fail rate c / m.
/// A radicand below zero (possible in small samples even for sigma > 0)
/// clamps to 0 and sets the flag.
EstimateReport estimate_sigma(const BernoulliTestLog& log);

/// p-hat = (2 q-hat - 1 + sigma-hat) / (2 sigma-hat) where q-hat is the
/// positive rate of first tests; inverts q = 1/2 + (2p - 1) sigma / 2.
/// sigma_hat = 0 leaves p unidentifiable and throws.
EstimateReport estimate_p(const BernoulliTestLog& log, double sigma_hat);

struct GaussianEstimates {
  double mu_q = 0.0;
  // Plug-in moment estimates (within-candidate spread uses 1/n, candidate
  // spread uses 1/m).
  double sigma_eta2 = 0.0;
  double sigma_q2 = 0.0;
  // Small-sample corrected versions; the plug-in sigma_eta2 is low by a
  // factor (n-1)/n and the plug-in sigma_q2 absorbs sigma_eta2/n.
  double sigma_eta2_debiased = 0.0;
  double sigma_q2_debiased = 0.0;
  long m = 0;
  int n_min = 0;
  /// Hoeffding-style deviation scale sqrt(ln(2/delta) / m) for the
  /// requested confidence.
  double error_scale = 0.0;
};

/// Moment estimators for (mu_q, sigma_eta2, sigma_q2) from per-candidate
/// real-valued test sequences; every candidate needs n >= 2 tests.
GaussianEstimates estimate_gaussian(
    const std::vector<std::vector<double>>& logs, double delta = 0.05);

/// CSV ingest, schema: candidate_id,test_index,outcome (header required).
BernoulliTestLog read_bernoulli_log_csv(std::istream& in);
std::vector<std::vector<double>> read_gaussian_log_csv(std::istream& in);

}  // namespace screenlab
