#include "screenlab/json_io.hpp"

#include <cstdio>
#include <cstdlib>
#include <istream>
#include <stdexcept>

namespace screenlab {

json to_json(const PopulationParams& params) {
  return json{{"p", params.p}, {"sigma", params.sigma}, {"eta", params.eta()}};
}

json to_json(const ThresholdPolicy& policy) {
  return json{{"tau", policy.tau}, {"theta", policy.theta}, {"r", policy.r}};
}

json to_json(const ConfusionMatrix& cm) {
  return json{{"tpr", cm.tpr}, {"fpr", cm.fpr}, {"fnr", cm.fnr}, {"tnr", cm.tnr}};
}

json to_json(const OptimizationResult& result) {
  return json{{"policy", to_json(result.policy)},
              {"fdr", result.fdr},
              {"accept_prob", result.accept_prob},
              {"feasible", result.feasible}};
}

json to_json(const GreedyPolicyParams& params) {
  return json{{"epsilon", params.epsilon}, {"epsilon_prime", params.epsilon_prime}};
}

json to_json(const WalkGeometry& geom) {
  return json{{"step", geom.step},
              {"sigma", geom.sigma},
              {"a", geom.a},
              {"z", geom.z},
              {"a_lattice", geom.a_lattice},
              {"z_lattice", geom.z_lattice},
              {"p_right_skilled", geom.p_right_skilled},
              {"p_right_unskilled", geom.p_right_unskilled},
              {"degenerate", geom.degenerate}};
}

json to_json(const SharedPolicyAudit& audit) {
  return json{{"group1", to_json(audit.group1)},
              {"group2", to_json(audit.group2)},
              {"fpr_strictly_ordered", audit.fpr_strictly_ordered},
              {"fnr_strictly_ordered", audit.fnr_strictly_ordered},
              {"degenerate", audit.degenerate}};
}

json to_json(const InterventionReport& report) {
  return json{
      {"epsilon", report.epsilon},
      {"epsilon_prime_group1", report.epsilon_prime_group1},
      {"epsilon_prime_group2", report.epsilon_prime_group2},
      {"geometry_group1", to_json(report.geometry_group1)},
      {"geometry_group2_baseline", to_json(report.geometry_group2_baseline)},
      {"geometry_group2_intervened", to_json(report.geometry_group2_intervened)},
      {"fnr_group1", report.fnr_group1},
      {"fnr_group2_baseline", report.fnr_group2_baseline},
      {"fnr_group2_intervened", report.fnr_group2_intervened},
      {"fnr_gap_baseline", report.fnr_gap_baseline},
      {"fnr_gap_intervened", report.fnr_gap_intervened},
      {"expected_tests_group1", report.expected_tests_group1},
      {"expected_tests_group2_baseline", report.expected_tests_group2_baseline},
      {"expected_tests_group2_intervened", report.expected_tests_group2_intervened},
      {"expected_tests_delta", report.expected_tests_delta},
      {"fnr_gap_intervened_ceiling", report.fnr_gap_intervened_ceiling},
      {"expected_tests_delta_ceiling", report.expected_tests_delta_ceiling},
      {"degenerate", report.degenerate}};
}

json to_json(const EstimateReport& report) {
  return json{{"estimate", report.estimate},
              {"m_used", report.m_used},
              {"raw_statistic", report.raw_statistic},
              {"clamped", report.clamped},
              {"epsilon", report.epsilon},
              {"delta", report.delta},
              {"meets_plan", report.meets_plan}};
}

json to_json(const GaussianEstimates& estimates) {
  return json{{"mu_q", estimates.mu_q},
              {"sigma_eta2", estimates.sigma_eta2},
              {"sigma_q2", estimates.sigma_q2},
              {"sigma_eta2_debiased", estimates.sigma_eta2_debiased},
              {"sigma_q2_debiased", estimates.sigma_q2_debiased},
              {"m", estimates.m},
              {"n_min", estimates.n_min},
              {"error_scale", estimates.error_scale}};
}

json to_json(const EmpiricalSummary& summary) {
  return json{{"num_candidates", summary.num_candidates},
              {"accept_skilled", summary.accept_skilled},
              {"reject_skilled", summary.reject_skilled},
              {"accept_unskilled", summary.accept_unskilled},
              {"reject_unskilled", summary.reject_unskilled},
              {"sum_tests_skilled", summary.sum_tests_skilled},
              {"sumsq_tests_skilled", summary.sumsq_tests_skilled},
              {"sum_tests_unskilled", summary.sum_tests_unskilled},
              {"sumsq_tests_unskilled", summary.sumsq_tests_unskilled},
              {"tpr", summary.tpr_hat()},
              {"fpr", summary.fpr_hat()},
              {"tpr_se", summary.tpr_se()},
              {"fpr_se", summary.fpr_se()},
              {"mean_tests_skilled", summary.mean_tests_skilled()},
              {"mean_tests_unskilled", summary.mean_tests_unskilled()},
              {"mean_tests", summary.mean_tests()},
              {"se_tests_skilled", summary.se_tests_skilled()},
              {"se_tests_unskilled", summary.se_tests_unskilled()},
              {"se_tests", summary.se_tests()}};
}

json to_json(const GreedyTrace& trace) {
  const char* decision = trace.decision == Decision::Accept   ? "accept"
                         : trace.decision == Decision::Reject ? "reject"
                                                              : "retest";
  return json{{"decision", decision},
              {"tests_used", trace.tests_used},
              {"true_skill", trace.true_skill}};
}

json to_json(const SimulationConfig& config) {
  return json{{"seed", config.seed},
              {"num_candidates", config.num_candidates},
              {"shards", config.shards}};
}

json to_json(const ExperimentSpec& spec) {
  if (const auto* threshold = std::get_if<ThresholdExperiment>(&spec)) {
    return json{{"kind", "threshold"},
                {"params", to_json(threshold->params)},
                {"policy", to_json(threshold->policy)}};
  }
  const auto& greedy = std::get<GreedyExperiment>(spec);
  return json{{"kind", "greedy"},
              {"params", to_json(greedy.params)},
              {"policy", to_json(greedy.policy)},
              {"step_cap", greedy.step_cap}};
}

PopulationParams population_from_json(const json& j) {
  return PopulationParams(j.at("p").get<double>(), j.at("sigma").get<double>());
}

ThresholdPolicy threshold_policy_from_json(const json& j) {
  return ThresholdPolicy(j.at("tau").get<int>(), j.at("theta").get<int>(),
                         j.value("r", 1.0));
}

GreedyPolicyParams greedy_params_from_json(const json& j) {
  return GreedyPolicyParams(j.at("epsilon").get<double>(),
                            j.at("epsilon_prime").get<double>());
}

SimulationConfig simulation_config_from_json(const json& j) {
  SimulationConfig config;
  config.seed = j.at("seed").get<std::uint64_t>();
  config.num_candidates = j.at("num_candidates").get<long>();
  config.shards = j.value("shards", 1);
  return config;
}

ExperimentSpec experiment_spec_from_json(const json& j) {
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "threshold") {
    return ThresholdExperiment{population_from_json(j.at("params")),
                               threshold_policy_from_json(j.at("policy"))};
  }
  if (kind == "greedy") {
    return GreedyExperiment{population_from_json(j.at("params")),
                            greedy_params_from_json(j.at("policy")),
                            j.value("step_cap", 1000000L)};
  }
  throw std::runtime_error("experiment spec: unknown kind " + kind);
}

json round_floats(json value) {
  if (value.is_object() || value.is_array()) {
    for (auto& element : value) element = round_floats(element);
    return value;
  }
  if (value.is_number_float()) {
    char buffer[64];
    std::snprintf(buffer, sizeof(buffer), "%.12g", value.get<double>());
    return json(std::strtod(buffer, nullptr));
  }
  return value;
}

json to_json(const RunManifest& manifest) {
  return json{{"command", manifest.command},
              {"parameters", manifest.parameters},
              {"seed", manifest.seed},
              {"version", manifest.version},
              {"outputs", manifest.outputs}};
}

RunManifest manifest_from_json(const json& j) {
  RunManifest manifest;
  manifest.command = j.at("command").get<std::string>();
  manifest.parameters = j.at("parameters");
  manifest.seed = j.at("seed").get<std::uint64_t>();
  manifest.version = j.at("version").get<std::string>();
  manifest.outputs = j.at("outputs").get<std::vector<std::string>>();
  return manifest;
}

namespace {

template <typename T>
std::vector<std::vector<T>> read_jsonl(std::istream& in) {
  std::vector<std::vector<T>> result;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json record;
    try {
      record = json::parse(line);
    } catch (const json::parse_error&) {
      throw std::runtime_error("jsonl: parse error on line " + std::to_string(line_no));
    }
    if (!record.contains("tests") || !record["tests"].is_array())
      throw std::runtime_error("jsonl: missing tests array on line " +
                               std::to_string(line_no));
    result.push_back(record["tests"].get<std::vector<T>>());
  }
  if (result.empty()) throw std::runtime_error("jsonl: no records");
  return result;
}

}  // namespace

BernoulliTestLog read_bernoulli_log_jsonl(std::istream& in) {
  BernoulliTestLog log;
  log.tests = read_jsonl<int>(in);
  for (const auto& seq : log.tests) {
    for (int bit : seq) {
      if (bit != 0 && bit != 1)
        throw std::runtime_error("jsonl: bernoulli outcomes must be 0 or 1");
    }
  }
  return log;
}

std::vector<std::vector<double>> read_gaussian_log_jsonl(std::istream& in) {
  return read_jsonl<double>(in);
}

}  // namespace screenlab
