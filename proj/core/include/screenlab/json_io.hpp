#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"
#include "screenlab/bernoulli.hpp"
#include "screenlab/dynamic_policy.hpp"
#include "screenlab/estimation.hpp"
#include "screenlab/fairness.hpp"
#include "screenlab/gaussian.hpp"
#include "screenlab/threshold_optimizer.hpp"
#include "screenlab/verification.hpp"

namespace screenlab {

using json = nlohmann::json;

json to_json(const PopulationParams& params);
json to_json(const ThresholdPolicy& policy);
json to_json(const ConfusionMatrix& cm);
json to_json(const OptimizationResult& result);
json to_json(const GreedyPolicyParams& params);
json to_json(const WalkGeometry& geom);
json to_json(const SharedPolicyAudit& audit);
json to_json(const InterventionReport& report);
json to_json(const EstimateReport& report);
json to_json(const GaussianEstimates& estimates);
json to_json(const EmpiricalSummary& summary);
json to_json(const GreedyTrace& trace);
json to_json(const SimulationConfig& config);
json to_json(const ExperimentSpec& spec);

PopulationParams population_from_json(const json& j);
ThresholdPolicy threshold_policy_from_json(const json& j);
GreedyPolicyParams greedy_params_from_json(const json& j);
SimulationConfig simulation_config_from_json(const json& j);
ExperimentSpec experiment_spec_from_json(const json& j);

/// Round every number in the document to 12 significant digits, so dumped
/// files are stable golden-test targets.
json round_floats(json value);

/// Provenance record written next to every CLI output; replaying it must
/// reproduce the outputs byte for byte.
struct RunManifest {
  std::string command;
  json parameters;
  std::uint64_t seed = 0;
  std::string version;
  std::vector<std::string> outputs;
};

json to_json(const RunManifest& manifest);
RunManifest manifest_from_json(const json& j);

/// JSON-lines ingest, one candidate per line:
/// {"candidate_id": ..., "tests": [...]}.
BernoulliTestLog read_bernoulli_log_jsonl(std::istream& in);
std::vector<std::vector<double>> read_gaussian_log_jsonl(std::istream& in);

}  // namespace screenlab
