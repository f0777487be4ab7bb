#include "screenlab/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace screenlab {

long BernoulliTestLog::usable_count() const {
  long m = 0;
  for (const auto& seq : tests)
    if (seq.size() >= 2) ++m;
  return m;
}

long BernoulliTestLog::inconsistency_count() const {
  long c = 0;
  for (const auto& seq : tests)
    if (seq.size() >= 2 && seq[0] == 1 && seq[1] == 0) ++c;
  return c;
}

long BernoulliTestLog::first_test_positive_count() const {
  long c = 0;
  for (const auto& seq : tests)
    if (seq.size() >= 2 && seq[0] == 1) ++c;
  return c;
}

long plan_samples(double epsilon, double delta) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("plan_samples: epsilon must be positive");
  if (!(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument("plan_samples: delta must be in (0,1)");
  const double raw = std::log(2.0 / delta) / (2.0 * epsilon * epsilon);
  long m = static_cast<long>(std::ceil(raw - 1e-12));
  return std::max(m, 1L);
}

EstimateReport estimate_sigma(const BernoulliTestLog& log) {
  const long m = log.usable_count();
  if (m < 1) throw std::invalid_argument("estimate_sigma: no candidate has two tests");
  const long c = log.inconsistency_count();
  EstimateReport report;
  report.m_used = m;
  report.raw_statistic = static_cast<double>(c) / static_cast<double>(m);
  const double radicand = 1.0 - 4.0 * report.raw_statistic;
  if (radicand < 0.0) {
    report.estimate = 0.0;
    report.clamped = true;
  } else {
    report.estimate = std::sqrt(radicand);
  }
  return report;
}

EstimateReport estimate_p(const BernoulliTestLog& log, double sigma_hat) {
  const long m = log.usable_count();
  if (m < 1) throw std::invalid_argument("estimate_p: no candidate has two tests");
  if (!(sigma_hat > 0.0))
    throw std::domain_error("estimate_p: p is unidentifiable at sigma_hat = 0");
  EstimateReport report;
  report.m_used = m;
  const double q_hat =
      static_cast<double>(log.first_test_positive_count()) / static_cast<double>(m);
  report.raw_statistic = q_hat;
  double p_hat = (2.0 * q_hat - 1.0 + sigma_hat) / (2.0 * sigma_hat);
  if (p_hat < 0.0) {
    p_hat = 0.0;
    report.clamped = true;
  } else if (p_hat > 1.0) {
    p_hat = 1.0;
    report.clamped = true;
  }
  report.estimate = p_hat;
  return report;
}

GaussianEstimates estimate_gaussian(const std::vector<std::vector<double>>& logs,
                                    double delta) {
  if (logs.empty()) throw std::invalid_argument("estimate_gaussian: empty log");
  if (!(delta > 0.0 && delta < 1.0))
    throw std::invalid_argument("estimate_gaussian: delta must be in (0,1)");
  const long m = static_cast<long>(logs.size());

  GaussianEstimates est;
  est.m = m;
  est.n_min = static_cast<int>(logs.front().size());

  std::vector<double> candidate_means(logs.size());
  double mu_sum = 0.0;
  for (size_t i = 0; i < logs.size(); ++i) {
    const auto& seq = logs[i];
    if (seq.size() < 2)
      throw std::invalid_argument("estimate_gaussian: every candidate needs >= 2 tests");
    est.n_min = std::min(est.n_min, static_cast<int>(seq.size()));
    double s = 0.0;
    for (double y : seq) s += y;
    candidate_means[i] = s / static_cast<double>(seq.size());
    mu_sum += candidate_means[i];
  }
  est.mu_q = mu_sum / static_cast<double>(m);

  double within_plugin = 0.0, within_unbiased = 0.0, inv_n_mean = 0.0;
  for (size_t i = 0; i < logs.size(); ++i) {
    const auto& seq = logs[i];
    const double n = static_cast<double>(seq.size());
    double ss = 0.0;
    for (double y : seq) {
      const double d = y - candidate_means[i];
      ss += d * d;
    }
    within_plugin += ss / n;
    within_unbiased += ss / (n - 1.0);
    inv_n_mean += 1.0 / n;
  }
  within_plugin /= static_cast<double>(m);
  within_unbiased /= static_cast<double>(m);
  inv_n_mean /= static_cast<double>(m);

  double between = 0.0;
  for (double mean : candidate_means) {
    const double d = mean - est.mu_q;
    between += d * d;
  }
  est.sigma_eta2 = within_plugin;
  est.sigma_q2 = between / static_cast<double>(m);
  est.sigma_eta2_debiased = within_unbiased;
  const double between_unbiased =
      m > 1 ? between / static_cast<double>(m - 1) : est.sigma_q2;
  est.sigma_q2_debiased =
      std::max(0.0, between_unbiased - within_unbiased * inv_n_mean);
  est.error_scale = std::sqrt(std::log(2.0 / delta) / static_cast<double>(m));
  return est;
}

namespace {

struct CsvRow {
  std::string candidate;
  long test_index;
  double outcome;
};

std::vector<CsvRow> parse_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("csv: empty input");
  // Tolerate a UTF-8 BOM and require the documented header.
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "candidate_id,test_index,outcome")
    throw std::runtime_error("csv: expected header candidate_id,test_index,outcome");
  std::vector<CsvRow> rows;
  long line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream fields(line);
    CsvRow row;
    std::string index_text, outcome_text;
    if (!std::getline(fields, row.candidate, ',') ||
        !std::getline(fields, index_text, ',') ||
        !std::getline(fields, outcome_text)) {
      throw std::runtime_error("csv: malformed line " + std::to_string(line_no));
    }
    try {
      row.test_index = std::stol(index_text);
      row.outcome = std::stod(outcome_text);
    } catch (const std::exception&) {
      throw std::runtime_error("csv: bad number on line " + std::to_string(line_no));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw std::runtime_error("csv: no data rows");
  return rows;
}

template <typename T, typename Convert>
std::vector<std::vector<T>> group_rows(const std::vector<CsvRow>& rows,
                                       Convert convert) {
  std::map<std::string, std::vector<std::pair<long, T>>> by_candidate;
  for (const auto& row : rows) {
    by_candidate[row.candidate].emplace_back(row.test_index, convert(row.outcome));
  }
  std::vector<std::vector<T>> result;
  result.reserve(by_candidate.size());
  for (auto& [id, entries] : by_candidate) {
    std::sort(entries.begin(), entries.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    std::vector<T> seq;
    seq.reserve(entries.size());
    for (const auto& [index, value] : entries) seq.push_back(value);
    result.push_back(std::move(seq));
  }
  return result;
}

}  // namespace

BernoulliTestLog read_bernoulli_log_csv(std::istream& in) {
  const auto rows = parse_csv(in);
  BernoulliTestLog log;
  log.tests = group_rows<int>(rows, [](double outcome) {
    if (outcome != 0.0 && outcome != 1.0)
      throw std::runtime_error("csv: bernoulli outcomes must be 0 or 1");
    return static_cast<int>(outcome);
  });
  return log;
}

std::vector<std::vector<double>> read_gaussian_log_csv(std::istream& in) {
  const auto rows = parse_csv(in);
  return group_rows<double>(rows, [](double outcome) { return outcome; });
}

}  // namespace screenlab
