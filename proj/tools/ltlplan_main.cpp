// Command line front end: compile a formula, run a mission, fit a conformal
// model, evaluate a suite, or run the flat baseline. Every option can come
// from a --config JSON file; explicit flags win over the file, the file wins
// over defaults.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "ltlplan/automaton.hpp"
#include "ltlplan/mission.hpp"
#include "ltlplan/suite.hpp"
#include "tool_common.hpp"

namespace {

using tool::ConfigFile;

ltlplan::GatingMode parse_gating(const std::string& text) {
  if (text == "semantic") return ltlplan::GatingMode::Semantic;
  if (text == "conformal") return ltlplan::GatingMode::Conformal;
  return ltlplan::GatingMode::Both;
}

ltlplan::CpMethod parse_cp(const std::string& text) {
  return text == "raps" ? ltlplan::CpMethod::Raps
                        : ltlplan::CpMethod::Vanilla;
}

ltlplan::HumanAssistMode parse_assist(const std::string& text) {
  if (text == "interactive") return ltlplan::HumanAssistMode::Interactive;
  if (text == "scripted") return ltlplan::HumanAssistMode::ScriptedOracle;
  return ltlplan::HumanAssistMode::Deny;
}

std::string read_file(const std::string& path, const char* flag) {
  std::ifstream in(path);
  if (!in) throw CLI::ValidationError(flag, "cannot open " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

struct Tracked {
  std::vector<std::pair<CLI::Option*, std::string>> options;

  CLI::Option* track(CLI::Option* option, const std::string& key) {
    options.emplace_back(option, key);
    return option;
  }
};

// compile: formula -> minimal DFA, pruning summary, optional exports.
struct CompileCmd : Tracked {
  std::string formula_text;
  std::vector<std::string> inline_aps;
  std::string atoms_path;
  std::string dot_path;
  std::string pruned_path;
  std::string config_path;
  CLI::Option* ap_option = nullptr;

  void install(CLI::App& app, int& exit_code) {
    auto* cmd = app.add_subcommand("compile",
                                   "parse a co-safe formula and build its DFA");
    cmd->add_option("--config", config_path, "JSON file with option defaults");
    track(cmd->add_option("--formula", formula_text, "co-safe LTL text"),
          "formula");
    ap_option = cmd->add_option(
        "--ap", inline_aps,
        "atom spec id:action:target:destination (repeatable)");
    track(cmd->add_option("--atoms", atoms_path, "JSON file with atom specs"),
          "atoms");
    track(cmd->add_option("--dot", dot_path, "write the DFA as Graphviz DOT"),
          "dot");
    track(cmd->add_option("--pruned-json", pruned_path,
                          "write the pruned automaton dump"),
          "pruned-json");
    cmd->callback([this, &exit_code] { exit_code = run(); });
  }

  int run() {
    ConfigFile config;
    if (!config_path.empty()) config.load(config_path);
    for (auto& [option, key] : options) {
      if (key == "formula") config.overlay(option, key, formula_text);
      if (key == "atoms") config.overlay(option, key, atoms_path);
      if (key == "dot") config.overlay(option, key, dot_path);
      if (key == "pruned-json") config.overlay(option, key, pruned_path);
    }
    config.overlay(ap_option, "ap", inline_aps);
    if (formula_text.empty()) {
      throw CLI::ValidationError("--formula", "a formula is required");
    }

    std::vector<ltlplan::AtomicProposition> atoms;
    if (!atoms_path.empty()) atoms = tool::load_atoms_file(atoms_path);
    for (const auto& spec : inline_aps) {
      atoms.push_back(tool::parse_inline_ap(spec));
    }

    ltlplan::Formula formula = ltlplan::parse_ltl(formula_text, atoms);
    ltlplan::Dfa dfa = ltlplan::to_dfa(formula);
    ltlplan::PrunedDfa pruned = ltlplan::prune(dfa);

    std::cout << "formula: " << ltlplan::to_string(formula) << "\n";
    std::cout << "propositions: " << formula.ap_set.size() << "\n";
    std::cout << "states: " << dfa.num_states << "\n";
    std::cout << "edges: " << ltlplan::edge_count(dfa) << "\n";
    std::cout << "satisfiable: " << (dfa.satisfiable ? "yes" : "no") << "\n";
    int d = ltlplan::distance(pruned, dfa.initial, dfa.accepting);
    std::cout << "pruned distance to acceptance: ";
    if (d == ltlplan::kInfiniteDistance) {
      std::cout << "unreachable\n";
    } else {
      std::cout << d << "\n";
    }
    if (!dot_path.empty()) {
      tool::write_text_file(dot_path, ltlplan::export_dot(dfa));
      std::cout << "dot written to " << dot_path << "\n";
    }
    if (!pruned_path.empty()) {
      tool::write_text_file(pruned_path, ltlplan::pruned_to_json(pruned));
      std::cout << "pruned dump written to " << pruned_path << "\n";
    }
    if (!dfa.satisfiable ||
        d == ltlplan::kInfiniteDistance) {
      return ltlplan::kExitInfeasible;
    }
    return 0;
  }
};

// plan: one full mission with trace output and status exit codes.
struct PlanCmd : Tracked {
  std::string formula_text;
  std::vector<std::string> inline_aps;
  std::string atoms_path;
  std::string scenario_path;
  std::string config_path;
  tool::ScorerOptions scorer;
  double alpha = 0.05;
  int delta = 1;
  int t_budget = 7;
  std::uint64_t seed = 0;
  std::string gating = "both";
  std::string cp_method = "vanilla";
  double raps_lambda = 0.01;
  int raps_kreg = 2;
  std::string assist = "deny";
  int calibration_n = 50;
  int max_windows = 64;
  std::string model_path;
  std::string trace_path;
  CLI::Option* ap_option = nullptr;

  void install(CLI::App& app, int& exit_code) {
    auto* cmd = app.add_subcommand("plan", "run one mission end to end");
    cmd->add_option("--config", config_path, "JSON file with option defaults");
    track(cmd->add_option("--formula", formula_text, "co-safe LTL text"),
          "formula");
    ap_option = cmd->add_option(
        "--ap", inline_aps,
        "atom spec id:action:target:destination (repeatable)");
    track(cmd->add_option("--atoms", atoms_path, "JSON file with atom specs"),
          "atoms");
    track(cmd->add_option("--scenario", scenario_path, "scenario JSON file"),
          "scenario");
    scorer.add_options(cmd, options);
    track(cmd->add_option("--alpha", alpha, "miscoverage level"), "alpha");
    track(cmd->add_option("--delta", delta,
                          "assistance threshold on |C|"),
          "delta");
    track(cmd->add_option("--t-budget", t_budget, "steps per sub-task window"),
          "t-budget");
    track(cmd->add_option("--seed", seed, "mission seed"), "seed");
    track(cmd->add_option("--gating", gating, "semantic | conformal | both")
              ->check(CLI::IsMember({"semantic", "conformal", "both"})),
          "gating");
    track(cmd->add_option("--cp-method", cp_method, "vanilla | raps")
              ->check(CLI::IsMember({"vanilla", "raps"})),
          "cp-method");
    track(cmd->add_option("--raps-lambda", raps_lambda, "RAPS penalty"),
          "raps-lambda");
    track(cmd->add_option("--raps-kreg", raps_kreg, "RAPS rank offset"),
          "raps-kreg");
    track(cmd->add_option("--assist", assist,
                          "deny | scripted | interactive")
              ->check(CLI::IsMember({"deny", "scripted", "interactive"})),
          "assist");
    track(cmd->add_option("--calibration-n", calibration_n,
                          "calibration tasks when no model file is given"),
          "calibration-n");
    track(cmd->add_option("--max-windows", max_windows,
                          "hard stop on sub-task attempts"),
          "max-windows");
    track(cmd->add_option("--model", model_path,
                          "calibration model JSON from 'calibrate'"),
          "model");
    track(cmd->add_option("--trace", trace_path, "write the plan trace JSON"),
          "trace");
    cmd->callback([this, &exit_code] { exit_code = run(); });
  }

  void apply_config(const ConfigFile& config) {
    for (auto& [option, key] : options) {
      if (key == "formula") config.overlay(option, key, formula_text);
      if (key == "atoms") config.overlay(option, key, atoms_path);
      if (key == "scenario") config.overlay(option, key, scenario_path);
      if (key == "scorer") config.overlay(option, key, scorer.kind);
      if (key == "noise-temperature")
        config.overlay(option, key, scorer.noise_temperature);
      if (key == "noise-confusion")
        config.overlay(option, key, scorer.noise_confusion);
      if (key == "noise-hallucination")
        config.overlay(option, key, scorer.noise_hallucination);
      if (key == "noise-seed") config.overlay(option, key, scorer.noise_seed);
      if (key == "remote-endpoint")
        config.overlay(option, key, scorer.remote_endpoint);
      if (key == "remote-path")
        config.overlay(option, key, scorer.remote_path);
      if (key == "remote-model")
        config.overlay(option, key, scorer.remote_model);
      if (key == "remote-auth-env")
        config.overlay(option, key, scorer.remote_auth_env);
      if (key == "remote-timeout-ms")
        config.overlay(option, key, scorer.remote_timeout_ms);
      if (key == "cassette") config.overlay(option, key, scorer.cassette);
      if (key == "cassette-path")
        config.overlay(option, key, scorer.cassette_path);
      if (key == "remote-temperature")
        config.overlay(option, key, scorer.remote_temperature);
      if (key == "alpha") config.overlay(option, key, alpha);
      if (key == "delta") config.overlay(option, key, delta);
      if (key == "t-budget") config.overlay(option, key, t_budget);
      if (key == "seed") config.overlay(option, key, seed);
      if (key == "gating") config.overlay(option, key, gating);
      if (key == "cp-method") config.overlay(option, key, cp_method);
      if (key == "raps-lambda") config.overlay(option, key, raps_lambda);
      if (key == "raps-kreg") config.overlay(option, key, raps_kreg);
      if (key == "assist") config.overlay(option, key, assist);
      if (key == "calibration-n")
        config.overlay(option, key, calibration_n);
      if (key == "max-windows") config.overlay(option, key, max_windows);
      if (key == "model") config.overlay(option, key, model_path);
      if (key == "trace") config.overlay(option, key, trace_path);
    }
  }

  int run() {
    ConfigFile config;
    if (!config_path.empty()) config.load(config_path);
    apply_config(config);
    config.overlay(ap_option, "ap", inline_aps);
    if (formula_text.empty()) {
      throw CLI::ValidationError("--formula", "a formula is required");
    }
    if (scenario_path.empty()) {
      throw CLI::ValidationError("--scenario", "a scenario is required");
    }

    std::vector<ltlplan::AtomicProposition> atoms;
    if (!atoms_path.empty()) atoms = tool::load_atoms_file(atoms_path);
    for (const auto& spec : inline_aps) {
      atoms.push_back(tool::parse_inline_ap(spec));
    }

    ltlplan::MissionConfig mission;
    mission.formula = ltlplan::parse_ltl(formula_text, atoms);
    mission.scenario = ltlplan::load_scenario(scenario_path);
    mission.scorer = scorer.build();
    mission.alpha = alpha;
    mission.delta = delta;
    mission.t_budget = t_budget;
    mission.seed = seed;
    mission.human_assist = parse_assist(assist);
    mission.gating = parse_gating(gating);
    mission.cp_method = parse_cp(cp_method);
    mission.raps.lambda = raps_lambda;
    mission.raps.k_reg = raps_kreg;
    mission.calibration_n = calibration_n;
    mission.max_windows = max_windows;
    if (!model_path.empty()) {
      mission.model =
          ltlplan::model_from_json(read_file(model_path, "--model"));
    }

    ltlplan::PlanTrace trace;
    try {
      trace = ltlplan::run_mission(mission);
    } catch (const ltlplan::HumanAssistDeniedError& e) {
      trace = e.trace;
    }
    if (!trace_path.empty()) {
      tool::write_text_file(trace_path, trace.to_json());
    }
    std::cout << "status: " << ltlplan::to_string(trace.status) << "\n";
    std::cout << "steps: " << trace.steps.size() << "\n";
    std::cout << "sub-tasks completed: " << trace.subtasks_completed << "\n";
    std::cout << "assist events: " << trace.events.size() << "\n";
    std::cout << "word accepting: " << (trace.word_accepting ? "yes" : "no")
              << "\n";
    std::cout << "joint confidence: " << trace.joint_conf << "\n";
    return trace.exit_code;
  }
};

// calibrate: fit and persist a conformal model.
struct CalibrateCmd : Tracked {
  std::string scenario_path;
  std::string config_path;
  tool::ScorerOptions scorer;
  int n = 50;
  double alpha = 0.05;
  int t_budget = 7;
  std::uint64_t seed = 0;
  std::string cp_method = "vanilla";
  double raps_lambda = 0.01;
  int raps_kreg = 2;
  std::string out_path;
  std::string set_path;

  void install(CLI::App& app, int& exit_code) {
    auto* cmd = app.add_subcommand("calibrate",
                                   "fit a conformal model on seeded tasks");
    cmd->add_option("--config", config_path, "JSON file with option defaults");
    track(cmd->add_option("--scenario", scenario_path, "scenario JSON file"),
          "scenario");
    scorer.add_options(cmd, options);
    track(cmd->add_option("-n,--n", n, "number of calibration tasks"), "n");
    track(cmd->add_option("--alpha", alpha, "miscoverage level"), "alpha");
    track(cmd->add_option("--t-budget", t_budget, "steps per task"),
          "t-budget");
    track(cmd->add_option("--seed", seed, "task draw seed"), "seed");
    track(cmd->add_option("--cp-method", cp_method, "vanilla | raps")
              ->check(CLI::IsMember({"vanilla", "raps"})),
          "cp-method");
    track(cmd->add_option("--raps-lambda", raps_lambda, "RAPS penalty"),
          "raps-lambda");
    track(cmd->add_option("--raps-kreg", raps_kreg, "RAPS rank offset"),
          "raps-kreg");
    track(cmd->add_option("--out", out_path, "write the model JSON here"),
          "out");
    track(cmd->add_option("--set-out", set_path,
                          "also write the raw calibration set"),
          "set-out");
    cmd->callback([this, &exit_code] { exit_code = run(); });
  }

  int run() {
    ConfigFile config;
    if (!config_path.empty()) config.load(config_path);
    for (auto& [option, key] : options) {
      if (key == "scenario") config.overlay(option, key, scenario_path);
      if (key == "scorer") config.overlay(option, key, scorer.kind);
      if (key == "noise-temperature")
        config.overlay(option, key, scorer.noise_temperature);
      if (key == "noise-confusion")
        config.overlay(option, key, scorer.noise_confusion);
      if (key == "noise-hallucination")
        config.overlay(option, key, scorer.noise_hallucination);
      if (key == "noise-seed") config.overlay(option, key, scorer.noise_seed);
      if (key == "n") config.overlay(option, key, n);
      if (key == "alpha") config.overlay(option, key, alpha);
      if (key == "t-budget") config.overlay(option, key, t_budget);
      if (key == "seed") config.overlay(option, key, seed);
      if (key == "cp-method") config.overlay(option, key, cp_method);
      if (key == "raps-lambda") config.overlay(option, key, raps_lambda);
      if (key == "raps-kreg") config.overlay(option, key, raps_kreg);
      if (key == "out") config.overlay(option, key, out_path);
      if (key == "set-out") config.overlay(option, key, set_path);
    }
    if (scenario_path.empty()) {
      throw CLI::ValidationError("--scenario", "a scenario is required");
    }

    ltlplan::Scenario scenario = ltlplan::load_scenario(scenario_path);
    ltlplan::RapsParams raps{raps_lambda, raps_kreg};
    ltlplan::CalibrationSet set = ltlplan::build_calibration_set(
        scenario, scorer.build(), n, t_budget, alpha, parse_cp(cp_method),
        raps, seed);
    ltlplan::CalibrationModel model = ltlplan::calibrate(set);

    std::cout << "calibration points: " << set.points.size() << "\n";
    std::cout << "method: " << cp_method << "\n";
    std::cout << "q_bar: " << model.q_bar << "\n";
    std::cout << "degenerate: " << (model.degenerate ? "yes" : "no") << "\n";
    if (!out_path.empty()) {
      tool::write_text_file(out_path, ltlplan::model_to_json(model));
      std::cout << "model written to " << out_path << "\n";
    }
    if (!set_path.empty()) {
      tool::write_text_file(set_path, ltlplan::calibration_set_to_json(set));
      std::cout << "calibration set written to " << set_path << "\n";
    }
    return 0;
  }
};

// Shared by evaluate and baseline.
struct SuiteCmdBase : Tracked {
  std::string suite_path;
  std::string config_path;
  tool::ScorerOptions scorer;
  std::uint64_t seed = 0;
  std::string report_path;

  void add_common(CLI::App* cmd) {
    cmd->add_option("--config", config_path, "JSON file with option defaults");
    track(cmd->add_option("--suite", suite_path, "suite JSON file"), "suite");
    scorer.add_options(cmd, options);
    track(cmd->add_option("--seed", seed, "suite seed"), "seed");
    track(cmd->add_option("--report", report_path, "write the report JSON"),
          "report");
  }

  void apply_common(const ConfigFile& config) {
    for (auto& [option, key] : options) {
      if (key == "suite") config.overlay(option, key, suite_path);
      if (key == "scorer") config.overlay(option, key, scorer.kind);
      if (key == "noise-temperature")
        config.overlay(option, key, scorer.noise_temperature);
      if (key == "noise-confusion")
        config.overlay(option, key, scorer.noise_confusion);
      if (key == "noise-hallucination")
        config.overlay(option, key, scorer.noise_hallucination);
      if (key == "noise-seed") config.overlay(option, key, scorer.noise_seed);
      if (key == "seed") config.overlay(option, key, seed);
      if (key == "report") config.overlay(option, key, report_path);
    }
  }

  ltlplan::SuiteScorerKind suite_scorer() const {
    if (scorer.kind == "noisy") return ltlplan::SuiteScorerKind::Noisy;
    if (scorer.kind == "uniform") return ltlplan::SuiteScorerKind::Uniform;
    return ltlplan::SuiteScorerKind::Oracle;
  }

  int finish(const ltlplan::SuiteReport& report) {
    std::cout << report.to_text();
    if (!report_path.empty()) {
      tool::write_text_file(report_path, report.to_json());
      std::cout << "report written to " << report_path << "\n";
    }
    return 0;
  }
};

// evaluate: hierarchical planner over a suite.
struct EvaluateCmd : SuiteCmdBase {
  std::string gating = "both";
  std::string cp_method = "vanilla";
  double raps_lambda = 0.01;
  int raps_kreg = 2;
  std::string assist = "deny";
  int calibration_n = 50;
  std::string model_path;
  int max_windows = 64;

  void install(CLI::App& app, int& exit_code) {
    auto* cmd = app.add_subcommand(
        "evaluate", "run the hierarchical planner over a suite");
    add_common(cmd);
    track(cmd->add_option("--gating", gating, "semantic | conformal | both")
              ->check(CLI::IsMember({"semantic", "conformal", "both"})),
          "gating");
    track(cmd->add_option("--cp-method", cp_method, "vanilla | raps")
              ->check(CLI::IsMember({"vanilla", "raps"})),
          "cp-method");
    track(cmd->add_option("--raps-lambda", raps_lambda, "RAPS penalty"),
          "raps-lambda");
    track(cmd->add_option("--raps-kreg", raps_kreg, "RAPS rank offset"),
          "raps-kreg");
    track(cmd->add_option("--assist", assist,
                          "deny | scripted | interactive")
              ->check(CLI::IsMember({"deny", "scripted", "interactive"})),
          "assist");
    track(cmd->add_option("--calibration-n", calibration_n,
                          "calibration tasks when no model file is given"),
          "calibration-n");
    track(cmd->add_option("--model", model_path,
                          "calibration model JSON from 'calibrate'"),
          "model");
    track(cmd->add_option("--max-windows", max_windows,
                          "hard stop on sub-task attempts"),
          "max-windows");
    cmd->callback([this, &exit_code] { exit_code = run(); });
  }

  int run() {
    ConfigFile config;
    if (!config_path.empty()) config.load(config_path);
    apply_common(config);
    for (auto& [option, key] : options) {
      if (key == "gating") config.overlay(option, key, gating);
      if (key == "cp-method") config.overlay(option, key, cp_method);
      if (key == "raps-lambda") config.overlay(option, key, raps_lambda);
      if (key == "raps-kreg") config.overlay(option, key, raps_kreg);
      if (key == "assist") config.overlay(option, key, assist);
      if (key == "calibration-n")
        config.overlay(option, key, calibration_n);
      if (key == "model") config.overlay(option, key, model_path);
      if (key == "max-windows") config.overlay(option, key, max_windows);
    }
    if (suite_path.empty()) {
      throw CLI::ValidationError("--suite", "a suite is required");
    }

    ltlplan::SuiteSpec suite = ltlplan::load_suite(suite_path);
    ltlplan::SuiteRunOptions run_options;
    run_options.scorer = suite_scorer();
    run_options.noise = scorer.noise();
    run_options.human_assist = parse_assist(assist);
    run_options.gating = parse_gating(gating);
    run_options.cp_method = parse_cp(cp_method);
    run_options.raps.lambda = raps_lambda;
    run_options.raps.k_reg = raps_kreg;
    run_options.seed = seed;
    run_options.calibration_n = calibration_n;
    run_options.max_windows = max_windows;
    if (!model_path.empty()) {
      run_options.model =
          ltlplan::model_from_json(read_file(model_path, "--model"));
    }
    return finish(ltlplan::run_experiment_suite(suite, run_options));
  }
};

// baseline: flat-prompt baseline over the same suite.
struct BaselineCmd : SuiteCmdBase {
  double misorder = 0.0;

  void install(CLI::App& app, int& exit_code) {
    auto* cmd = app.add_subcommand(
        "baseline", "run the flat-prompt baseline over a suite");
    add_common(cmd);
    track(cmd->add_option("--misorder", misorder,
                          "P(an ordering constraint is dropped)"),
          "misorder");
    cmd->callback([this, &exit_code] { exit_code = run(); });
  }

  int run() {
    ConfigFile config;
    if (!config_path.empty()) config.load(config_path);
    apply_common(config);
    for (auto& [option, key] : options) {
      if (key == "misorder") config.overlay(option, key, misorder);
    }
    if (suite_path.empty()) {
      throw CLI::ValidationError("--suite", "a suite is required");
    }

    ltlplan::SuiteSpec suite = ltlplan::load_suite(suite_path);
    ltlplan::SuiteRunOptions run_options;
    run_options.scorer = suite_scorer();
    run_options.noise = scorer.noise();
    run_options.seed = seed;
    run_options.flat_baseline = true;
    run_options.misorder = misorder;
    return finish(ltlplan::run_experiment_suite(suite, run_options));
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"co-safe LTL task planning with conformal gating"};
  app.require_subcommand(1);
  int exit_code = 0;

  CompileCmd compile_cmd;
  PlanCmd plan_cmd;
  CalibrateCmd calibrate_cmd;
  EvaluateCmd evaluate_cmd;
  BaselineCmd baseline_cmd;
  compile_cmd.install(app, exit_code);
  plan_cmd.install(app, exit_code);
  calibrate_cmd.install(app, exit_code);
  evaluate_cmd.install(app, exit_code);
  baseline_cmd.install(app, exit_code);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  } catch (const ltlplan::MissionInfeasibleError& e) {
    std::cerr << "infeasible: " << e.what() << "\n";
    return ltlplan::kExitInfeasible;
  } catch (const ltlplan::LtlSyntaxError& e) {
    std::cerr << "formula error at offset " << e.offset << ": " << e.what()
              << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return exit_code;
}
