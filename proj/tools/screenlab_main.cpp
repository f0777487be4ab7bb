// screenlab: screening-policy analytics as reproducible batch commands.
//
// Exit codes: 0 success, 2 usage error, 3 infeasible or degenerate model,
// 4 input format error.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "screenlab/json_io.hpp"

#ifndef SCREENLAB_VERSION
#define SCREENLAB_VERSION "0.0.0"
#endif

namespace {

using screenlab::json;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitInfeasible = 3;
constexpr int kExitInput = 4;

struct CommandResult {
  json document;
  int exit_code = kExitOk;
  std::vector<std::string> side_outputs;
};

std::uint64_t default_seed() {
  if (const char* env = std::getenv("SCREENLAB_SEED")) {
    return std::strtoull(env, nullptr, 10);
  }
  return 0;
}

std::string format_probability(double x) {
  char buffer[64];
  std::snprintf(buffer, sizeof(buffer), "%.12g", x);
  return buffer;
}

CommandResult run_optimal_threshold(const json& p) {
  const int tau = p.at("tau").get<int>();
  const screenlab::PopulationParams params(p.at("p").get<double>(),
                                           p.at("sigma").get<double>());
  const screenlab::AlphaLoss loss(p.at("alpha").get<double>());

  const int theta_star =
      screenlab::optimal_theta(tau, params.p, loss.alpha, params.sigma);
  const screenlab::ThresholdPolicy policy(tau, theta_star, 1.0);
  const double loss_at_star = screenlab::alpha_loss(policy, params, loss);

  CommandResult result;
  result.document = json{{"params", screenlab::to_json(params)},
                         {"alpha", loss.alpha},
                         {"tau", tau},
                         {"theta_star", theta_star},
                         {"loss_at_theta_star", loss_at_star},
                         {"policy", screenlab::to_json(policy)}};

  if (p.contains("curve")) {
    const std::string path = p.at("curve").get<std::string>();
    std::ofstream curve(path);
    if (!curve) throw std::runtime_error("cannot open curve output: " + path);
    curve << "theta,loss\n";
    for (int theta = 0; theta <= tau + 1; ++theta) {
      const double value = screenlab::alpha_loss(
          screenlab::ThresholdPolicy(tau, theta, 1.0), params, loss);
      curve << theta << ',' << format_probability(value) << '\n';
    }
    result.side_outputs.push_back(path);
    result.document["curve_csv"] = path;
  }
  return result;
}

CommandResult run_budget(const json& p) {
  const double eta = p.at("eta").get<double>();
  if (!(eta > 0.0 && eta < 0.5))
    throw std::invalid_argument("budget: eta must be in (0, 1/2)");
  const double sigma = 1.0 - 2.0 * eta;
  const screenlab::PopulationParams params(0.5, sigma);
  const screenlab::BudgetConstraint budget(p.at("B").get<double>());
  const int tau_max = p.value("tau_max", 12);

  const auto randomized = screenlab::optimize_fdr_budget(params, budget, tau_max);
  const auto pure = screenlab::optimize_fdr_budget_pure(params, budget, tau_max);

  CommandResult result;
  result.document = json{{"budget", budget.tests_per_hire},
                         {"eta", eta},
                         {"tau_max", tau_max},
                         {"randomized", screenlab::to_json(randomized)},
                         {"best_pure", screenlab::to_json(pure)}};
  if (!randomized.feasible) result.exit_code = kExitInfeasible;
  return result;
}

CommandResult run_greedy(const json& p) {
  const screenlab::PopulationParams params(p.at("p").get<double>(),
                                           p.at("sigma").get<double>());
  const screenlab::GreedyPolicyParams gp(p.at("epsilon").get<double>(),
                                         p.at("epsilon_prime").get<double>());
  const auto geom = screenlab::walk_geometry(params.p, params.sigma, gp);

  CommandResult result;
  result.document = json{{"params", screenlab::to_json(params)},
                         {"policy", screenlab::to_json(gp)},
                         {"geometry", screenlab::to_json(geom)}};
  if (geom.degenerate) {
    result.document["degenerate"] = true;
    result.exit_code = kExitInfeasible;
    return result;
  }

  const auto lattice = geom.lattice();
  auto closed = [&](const screenlab::WalkGeometry& g) {
    const auto overall = screenlab::expected_tests_overall(params.p, g);
    return json{{"expected_tests_skilled", screenlab::expected_tests_skilled(g)},
                {"expected_tests_unskilled", screenlab::expected_tests_unskilled(g)},
                {"expected_tests_overall", overall.exact},
                {"approx_ap_over_sigma", overall.approx},
                {"approx_ratio", overall.ratio},
                {"confusion", screenlab::to_json(screenlab::greedy_confusion_exact(g))}};
  };
  result.document["closed_form"] = closed(geom);
  result.document["closed_form_lattice"] = closed(lattice);

  const auto cm = screenlab::greedy_confusion_exact(geom);
  result.document["theta_ratios"] =
      json{{"tpr_over_sigma", cm.tpr / params.sigma},
           {"fpr_over_eps_p_sigma",
            cm.fpr / (gp.epsilon * params.p * params.sigma)}};

  if (p.contains("simulate")) {
    screenlab::SimulationConfig config;
    config.seed = p.at("seed").get<std::uint64_t>();
    config.num_candidates = p.at("simulate").get<long>();
    config.shards = p.value("shards", 1);
    const screenlab::GreedyExperiment experiment{params, gp,
                                                 p.value("step_cap", 1000000L)};
    const auto summary = screenlab::run_experiment(config, experiment);
    // Deliberately shard-free: the same seed must give the same bytes no
    // matter how the work was split.
    result.document["empirical"] = screenlab::to_json(summary);
    result.document["empirical"]["seed"] = config.seed;
  }
  return result;
}

CommandResult run_fairness(const json& p) {
  const double eta1 = p.at("eta1").get<double>();
  const double eta2 = p.at("eta2").get<double>();
  if (!(eta1 > 0.0 && eta1 < 0.5) || !(eta2 > 0.0 && eta2 < 0.5))
    throw std::invalid_argument("fairness: noise levels must be in (0, 1/2)");
  const double prior = p.at("p").get<double>();
  const screenlab::GroupPair groups(
      screenlab::PopulationParams(prior, 1.0 - 2.0 * eta1),
      screenlab::PopulationParams(prior, 1.0 - 2.0 * eta2));

  CommandResult result;
  result.document = json{{"p", prior},
                         {"eta1", groups.eta1()},
                         {"eta2", groups.eta2()}};

  if (p.value("dynamic", false)) {
    const double epsilon = p.at("epsilon").get<double>();
    const auto report = screenlab::intervention_cost(groups, epsilon);
    result.document["mode"] = "dynamic";
    result.document["intervention"] = screenlab::to_json(report);
    if (report.degenerate) result.exit_code = kExitInfeasible;
  } else {
    const screenlab::ThresholdPolicy policy(p.at("tau").get<int>(),
                                            p.at("theta").get<int>(),
                                            p.value("r", 1.0));
    const auto audit = screenlab::shared_policy_audit(policy, groups);
    result.document["mode"] = "threshold";
    result.document["policy"] = screenlab::to_json(policy);
    result.document["audit"] = screenlab::to_json(audit);
    result.document["equalizing_epsilon_prime"] = screenlab::equalizing_epsilon_prime(
        prior, groups.eta1(), groups.eta2());
    if (audit.degenerate) result.exit_code = kExitInfeasible;
  }
  return result;
}

CommandResult run_gaussian(const json& p) {
  const screenlab::GaussianModel model(p.at("mu").get<double>(),
                                       p.at("sigma_q2").get<double>(),
                                       p.at("sigma_eta2").get<double>());
  CommandResult result;
  result.document = json{{"mu_q", model.mu_q},
                         {"sigma_q2", model.sigma_q2},
                         {"sigma_eta2", model.sigma_eta2}};

  if (p.contains("equalize_sigma_eta2_b")) {
    const screenlab::GaussianModel model2(
        model.mu_q, model.sigma_q2, p.at("equalize_sigma_eta2_b").get<double>());
    const int n1 = p.at("n1").get<int>();
    const auto eq = screenlab::equalize_variance_tests(model, model2, n1);
    result.document["equalize"] =
        json{{"sigma_eta2_b", model2.sigma_eta2},
             {"n1", n1},
             {"n2", eq.n2},
             {"n2_ceil", eq.n2_ceil},
             {"variance_gap_at_ceil", eq.variance_gap_at_ceil},
             {"variance_group1", screenlab::conditional_variance(model, n1)},
             {"variance_group2_at_ceil",
              screenlab::conditional_variance(model2, eq.n2_ceil)}};
    return result;
  }

  const int n = p.at("n").get<int>();
  const double weight =
      n > 0 ? 1.0 / (model.sigma_eta2 / model.sigma_q2 + n) : 0.0;
  result.document["n"] = n;
  result.document["weight"] = weight;
  result.document["variance"] = screenlab::conditional_variance(model, n);
  if (n >= 1) {
    const auto oracle = screenlab::schur_oracle(model, n);
    result.document["oracle"] = json{{"weight", oracle.weight},
                                     {"variance", oracle.variance},
                                     {"condition", oracle.condition},
                                     {"ill_conditioned", oracle.ill_conditioned}};
  }
  return result;
}

CommandResult run_estimate(const json& p) {
  const std::string path = p.at("input").get<std::string>();
  const std::string format = p.value("format", "csv");
  const std::string model = p.value("model", "bernoulli");
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open input: " + path);

  CommandResult result;
  result.document = json{{"input", path}, {"format", format}, {"model", model}};

  const bool planned = p.contains("epsilon") && p.contains("delta");
  double epsilon = p.value("epsilon", 0.0);
  double delta = p.value("delta", 0.0);
  long m_required = 0;
  if (planned) {
    m_required = screenlab::plan_samples(epsilon, delta);
    result.document["planner"] =
        json{{"epsilon", epsilon}, {"delta", delta}, {"m_required", m_required}};
  }

  if (model == "bernoulli") {
    screenlab::BernoulliTestLog log;
    if (format == "csv") {
      log = screenlab::read_bernoulli_log_csv(in);
    } else if (format == "jsonl") {
      log = screenlab::read_bernoulli_log_jsonl(in);
    } else {
      throw std::invalid_argument("estimate: format must be csv or jsonl");
    }
    auto sigma_report = screenlab::estimate_sigma(log);
    if (planned) {
      sigma_report.epsilon = epsilon;
      sigma_report.delta = delta;
      sigma_report.meets_plan = sigma_report.m_used >= m_required;
    }
    result.document["sigma"] = screenlab::to_json(sigma_report);
    if (sigma_report.estimate > 0.0) {
      auto p_report = screenlab::estimate_p(log, sigma_report.estimate);
      if (planned) {
        p_report.epsilon = 2.0 * epsilon;
        p_report.delta = delta;
        p_report.meets_plan = p_report.m_used >= m_required;
      }
      result.document["p"] = screenlab::to_json(p_report);
    } else {
      result.document["p"] = nullptr;
      result.document["degenerate"] = "sigma_hat is 0; p unidentifiable";
      result.exit_code = kExitInfeasible;
    }
  } else if (model == "gaussian") {
    std::vector<std::vector<double>> logs;
    if (format == "csv") {
      logs = screenlab::read_gaussian_log_csv(in);
    } else if (format == "jsonl") {
      logs = screenlab::read_gaussian_log_jsonl(in);
    } else {
      throw std::invalid_argument("estimate: format must be csv or jsonl");
    }
    const auto estimates =
        screenlab::estimate_gaussian(logs, planned ? delta : 0.05);
    result.document["gaussian"] = screenlab::to_json(estimates);
  } else {
    throw std::invalid_argument("estimate: model must be bernoulli or gaussian");
  }
  return result;
}

CommandResult dispatch(const std::string& command, const json& params) {
  if (command == "optimal-threshold") return run_optimal_threshold(params);
  if (command == "budget") return run_budget(params);
  if (command == "greedy") return run_greedy(params);
  if (command == "fairness") return run_fairness(params);
  if (command == "gaussian") return run_gaussian(params);
  if (command == "estimate") return run_estimate(params);
  throw std::invalid_argument("unknown command: " + command);
}

int execute(const std::string& command, const json& params,
            const std::optional<std::string>& out_path) {
  CommandResult result = dispatch(command, params);
  result.document = screenlab::round_floats(result.document);
  const std::string text = result.document.dump(2) + "\n";
  if (out_path) {
    {
      std::ofstream out(*out_path, std::ios::binary);
      if (!out) throw std::runtime_error("cannot open output: " + *out_path);
      out << text;
    }
    screenlab::RunManifest manifest;
    manifest.command = command;
    manifest.parameters = params;
    manifest.seed = params.value("seed", std::uint64_t{0});
    manifest.version = SCREENLAB_VERSION;
    manifest.outputs.push_back(*out_path);
    for (const auto& side : result.side_outputs) manifest.outputs.push_back(side);
    std::ofstream mout(*out_path + ".manifest.json", std::ios::binary);
    if (!mout) throw std::runtime_error("cannot write manifest");
    mout << screenlab::to_json(manifest).dump(2) << "\n";
  } else {
    std::cout << text;
  }
  return result.exit_code;
}

int run_rerun(const std::string& manifest_path) {
  std::ifstream in(manifest_path);
  if (!in) throw std::runtime_error("cannot open manifest: " + manifest_path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(std::string("manifest parse error: ") + e.what());
  }
  const auto manifest = screenlab::manifest_from_json(doc);
  if (manifest.outputs.empty())
    throw std::runtime_error("manifest lists no outputs");
  return execute(manifest.command, manifest.parameters, manifest.outputs.front());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"screening-policy laboratory"};
  app.set_version_flag("--version", SCREENLAB_VERSION);
  app.require_subcommand(1);

  json params;
  std::optional<std::string> out_path;
  std::string manifest_path;

  auto key_of = [](const std::string& flag) {
    std::string key = flag.substr(2);
    for (char& c : key)
      if (c == '-') c = '_';
    return key;
  };
  auto add_out = [&](CLI::App* cmd) {
    cmd->add_option_function<std::string>(
        "--out", [&](const std::string& v) { out_path = v; },
        "write JSON here (plus a .manifest.json)");
  };
  auto bind = [&](CLI::App* cmd, const std::string& flag, const std::string& help,
                  bool required = true) {
    const std::string key = key_of(flag);
    auto* opt = cmd->add_option_function<double>(
        flag, [&params, key](double v) { params[key] = v; }, help);
    if (required) opt->required();
    return opt;
  };
  auto bind_int = [&](CLI::App* cmd, const std::string& flag,
                      const std::string& help, bool required = true) {
    const std::string key = key_of(flag);
    auto* opt = cmd->add_option_function<long>(
        flag, [&params, key](long v) { params[key] = v; }, help);
    if (required) opt->required();
    return opt;
  };

  auto* optimal = app.add_subcommand("optimal-threshold",
                                     "loss-minimizing threshold for fixed tau");
  bind_int(optimal, "--tau", "number of tests");
  bind(optimal, "--p", "skill prior");
  bind(optimal, "--alpha", "false-positive loss weight");
  bind(optimal, "--sigma", "test signal strength");
  optimal->add_option_function<std::string>(
      "--curve", [&](const std::string& v) { params["curve"] = v; },
      "dump loss(theta) CSV here");
  add_out(optimal);

  auto* budget = app.add_subcommand("budget",
                                    "FDR-minimizing policy under a tests-per-hire budget");
  bind(budget, "--B", "tests-per-hire budget (> 1)");
  bind(budget, "--eta", "test flip probability (0, 1/2)");
  bind_int(budget, "--tau-max", "search cap on tau", false);
  add_out(budget);

  auto* greedy = app.add_subcommand("greedy", "dynamic retest policy analytics");
  bind(greedy, "--p", "skill prior");
  bind(greedy, "--sigma", "test signal strength");
  bind(greedy, "--epsilon", "accept cutoff complement");
  bind(greedy, "--epsilon-prime", "reject cutoff", true);
  bind_int(greedy, "--simulate", "also run this many simulated candidates", false);
  bind_int(greedy, "--seed", "simulation seed", false);
  bind_int(greedy, "--shards", "simulation worker shards", false);
  add_out(greedy);

  auto* fairness = app.add_subcommand("fairness", "two-group audit");
  bind(fairness, "--p", "shared skill prior");
  bind(fairness, "--eta1", "group 1 flip probability");
  bind(fairness, "--eta2", "group 2 flip probability");
  bind_int(fairness, "--tau", "threshold policy test count", false);
  bind_int(fairness, "--theta", "threshold", false);
  bind(fairness, "--r", "boundary acceptance probability", false);
  fairness->add_flag_function(
      "--dynamic", [&](std::int64_t) { params["dynamic"] = true; },
      "audit the greedy policy and the equalizing intervention");
  bind(fairness, "--epsilon", "greedy accept cutoff complement", false);
  add_out(fairness);

  auto* gaussian = app.add_subcommand("gaussian", "Gaussian screening analytics");
  bind(gaussian, "--mu", "quality mean");
  bind(gaussian, "--sigma-q2", "quality variance");
  bind(gaussian, "--sigma-eta2", "test noise variance");
  bind_int(gaussian, "--n", "number of tests", false);
  bind(gaussian, "--equalize-sigma-eta2-b", "group 2 noise variance", false);
  bind_int(gaussian, "--n1", "group 1 test count", false);
  add_out(gaussian);

  auto* estimate = app.add_subcommand("estimate", "recover parameters from test logs");
  estimate->add_option_function<std::string>(
      "--input", [&](const std::string& v) { params["input"] = v; },
      "test log path")->required();
  estimate->add_option_function<std::string>(
      "--format", [&](const std::string& v) { params["format"] = v; },
      "csv or jsonl");
  estimate->add_option_function<std::string>(
      "--model", [&](const std::string& v) { params["model"] = v; },
      "bernoulli or gaussian");
  bind(estimate, "--epsilon", "accuracy target", false);
  bind(estimate, "--delta", "confidence target", false);
  add_out(estimate);

  auto* rerun = app.add_subcommand("rerun", "replay a recorded manifest");
  rerun->add_option("--manifest", manifest_path, "manifest path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help / --version
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (rerun->parsed()) return run_rerun(manifest_path);
    std::string command;
    for (auto* cmd : app.get_subcommands()) command = cmd->get_name();
    if (command == "greedy" && params.contains("simulate") &&
        !params.contains("seed")) {
      params["seed"] = default_seed();
    }
    return execute(command, params, out_path);
  } catch (const json::exception& e) {
    std::cerr << "error: missing or invalid parameter (" << e.what() << ")\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const std::runtime_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
}
