#include "ltlplan/suite.hpp"

#include <algorithm>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "json.hpp"
#include "rng_util.hpp"

namespace ltlplan {

namespace {

using nlohmann::ordered_json;

std::string dirname_of(const std::string& path) {
  auto pos = path.find_last_of('/');
  return pos == std::string::npos ? std::string(".") : path.substr(0, pos);
}

std::string scorer_name(SuiteScorerKind kind) {
  switch (kind) {
    case SuiteScorerKind::Oracle: return "oracle";
    case SuiteScorerKind::Noisy: return "noisy";
    case SuiteScorerKind::Uniform: return "uniform";
  }
  return "oracle";
}

}  // namespace

SuiteSpec suite_from_json_text(const std::string& text,
                               const std::string& base_dir) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ScenarioError(std::string("suite json: ") + e.what());
  }
  SuiteSpec suite;
  suite.name = j.value("name", "suite");
  suite.alpha = j.value("alpha", 0.05);
  suite.delta = j.value("delta", 1);
  suite.t_budget = j.value("t_budget", 7);

  std::string scenario_ref = j.at("scenario").get<std::string>();
  if (!scenario_ref.empty() && scenario_ref[0] != '/' && !base_dir.empty()) {
    scenario_ref = base_dir + "/" + scenario_ref;
  }
  suite.scenario_path = scenario_ref;
  suite.scenario = load_scenario(scenario_ref);

  for (const auto& mj : j.at("missions")) {
    SuiteMission mission;
    mission.id = mj.at("id").get<std::string>();
    mission.category = mj.value("category", "easy");
    mission.formula_text = mj.at("formula").get<std::string>();
    mission.baseline_nl = mj.value("baseline_nl", "");
    mission.repetitions = mj.value("repetitions", 1);
    for (const auto& aj : mj.at("atoms")) {
      mission.atoms.push_back(
          make_ap(aj.at("id").get<int>(),
                  ap_action_from_string(aj.value("action", "deliver")),
                  aj.at("target").get<std::string>(),
                  aj.at("destination").get<std::string>()));
    }
    suite.missions.push_back(std::move(mission));
  }
  return suite;
}

SuiteSpec load_suite(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("cannot open suite file: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return suite_from_json_text(buffer.str(), dirname_of(path));
}

SuiteReport run_experiment_suite(const SuiteSpec& suite,
                                 const SuiteRunOptions& options) {
  ScorerPtr scorer;
  switch (options.scorer) {
    case SuiteScorerKind::Oracle:
      scorer = std::make_shared<OracleScorer>();
      break;
    case SuiteScorerKind::Noisy: {
      NoiseParams noise = options.noise;
      noise.seed ^= options.seed;
      scorer = std::make_shared<NoisyScorer>(noise);
      break;
    }
    case SuiteScorerKind::Uniform:
      scorer = std::make_shared<UniformScorer>();
      break;
  }

  SuiteReport report;
  report.suite_name = suite.name;
  report.scorer = scorer_name(options.scorer);
  report.flat_baseline = options.flat_baseline;
  report.seed = options.seed;

  // One calibration model shared across every mission of the suite.
  std::optional<CalibrationModel> model = options.model;
  if (!options.flat_baseline && options.gating != GatingMode::Semantic &&
      !model) {
    CalibrationSet calib = build_calibration_set(
        suite.scenario, scorer, options.calibration_n, suite.t_budget,
        suite.alpha, options.cp_method, options.raps,
        options.seed ^ 0x9e3779b97f4a7c15ULL);
    model = calibrate(calib);
  }

  for (const auto& mission : suite.missions) {
    Formula formula = parse_ltl(mission.formula_text, mission.atoms);
    for (int rep = 0; rep < mission.repetitions; ++rep) {
      std::uint64_t seed =
          detail::mix64(options.seed ^ (fnv1a64(mission.id) + rep));

      PlanTrace trace;
      if (options.flat_baseline) {
        FlatBaselineConfig config;
        config.formula = formula;
        config.scenario = suite.scenario;
        config.instruction = mission.baseline_nl;
        config.use_oracle = options.scorer == SuiteScorerKind::Oracle;
        config.noise = options.noise;
        config.misorder = options.misorder;
        config.seed = seed;
        config.t_budget = suite.t_budget;
        trace = run_flat_baseline(config);
      } else {
        MissionConfig config;
        config.formula = formula;
        config.scenario = suite.scenario;
        config.scorer = scorer;
        config.alpha = suite.alpha;
        config.delta = suite.delta;
        config.t_budget = suite.t_budget;
        config.seed = seed;
        config.human_assist = options.human_assist;
        config.gating = options.gating;
        config.cp_method = options.cp_method;
        config.raps = options.raps;
        config.model = model;
        config.calibration_n = options.calibration_n;
        config.max_windows = options.max_windows;
        try {
          trace = run_mission(config);
        } catch (const HumanAssistDeniedError& e) {
          trace = e.trace;
        } catch (const MissionInfeasibleError&) {
          trace.status = MissionStatus::Failed;
          trace.exit_code = kExitInfeasible;
        }
      }

      MissionResult result;
      result.id = mission.id;
      result.category = mission.category;
      result.repetition = rep;
      result.status = trace.status;
      result.completed = trace.status != MissionStatus::Failed;
      result.steps = static_cast<int>(trace.steps.size());
      result.subtasks_completed = trace.subtasks_completed;
      result.joint_conf = trace.joint_conf;
      for (const auto& event : trace.events) {
        result.assist_events += 1;
        if (event.kind == AssistKind::Human ||
            event.kind == AssistKind::Denied) {
          result.human_events += 1;
        }
      }
      int scored = 0;
      double total_set = 0.0;
      CategoryStats& stats = report.categories[mission.category];
      for (const auto& step : trace.steps) {
        if (step.set_size > 0) {
          scored += 1;
          total_set += step.set_size;
          stats.set_size_histogram[step.set_size] += 1;
        }
      }
      result.mean_set_size = scored == 0 ? 0.0 : total_set / scored;

      stats.missions += 1;
      stats.completed += result.completed ? 1 : 0;
      stats.assist_events += result.assist_events;
      stats.human_events += result.human_events;
      report.missions.push_back(std::move(result));
    }
  }

  int completed = 0;
  for (const auto& result : report.missions) {
    completed += result.completed ? 1 : 0;
  }
  report.overall_completion_rate =
      report.missions.empty()
          ? 0.0
          : static_cast<double>(completed) / report.missions.size();
  return report;
}

std::string SuiteReport::to_json() const {
  ordered_json j;
  j["suite"] = suite_name;
  j["scorer"] = scorer;
  j["flat_baseline"] = flat_baseline;
  j["seed"] = std::to_string(seed);
  j["overall_completion_rate"] = overall_completion_rate;
  j["categories"] = ordered_json::object();
  for (const auto& [name, stats] : categories) {
    ordered_json c;
    c["missions"] = stats.missions;
    c["completed"] = stats.completed;
    c["completion_rate"] = stats.completion_rate();
    c["assist_events"] = stats.assist_events;
    c["human_events"] = stats.human_events;
    ordered_json hist = ordered_json::object();
    for (const auto& [size, count] : stats.set_size_histogram) {
      hist[std::to_string(size)] = count;
    }
    c["set_size_histogram"] = hist;
    j["categories"][name] = c;
  }
  j["missions"] = ordered_json::array();
  for (const auto& result : missions) {
    ordered_json m;
    m["id"] = result.id;
    m["category"] = result.category;
    m["repetition"] = result.repetition;
    m["status"] = ltlplan::to_string(result.status);
    m["completed"] = result.completed;
    m["steps"] = result.steps;
    m["assist_events"] = result.assist_events;
    m["human_events"] = result.human_events;
    m["subtasks_completed"] = result.subtasks_completed;
    m["joint_confidence"] = result.joint_conf;
    m["mean_set_size"] = result.mean_set_size;
    j["missions"].push_back(m);
  }
  return j.dump(2);
}

std::string SuiteReport::to_text() const {
  std::ostringstream out;
  out << "suite " << suite_name << " | scorer " << scorer
      << (flat_baseline ? " (flat baseline)" : "") << " | seed " << seed
      << "\n";
  out << std::left << std::setw(10) << "category" << std::right
      << std::setw(10) << "missions" << std::setw(11) << "completed"
      << std::setw(8) << "rate" << std::setw(9) << "assist" << std::setw(8)
      << "human" << "\n";
  for (const auto& [name, stats] : categories) {
    out << std::left << std::setw(10) << name << std::right << std::setw(10)
        << stats.missions << std::setw(11) << stats.completed << std::setw(8)
        << std::fixed << std::setprecision(2) << stats.completion_rate()
        << std::setw(9) << stats.assist_events << std::setw(8)
        << stats.human_events << "\n";
  }
  out << "overall completion " << std::fixed << std::setprecision(3)
      << overall_completion_rate << " over " << missions.size()
      << " runs\n";
  return out.str();
}

}  // namespace ltlplan
