#pragma once

// Experiment suites: batches of missions over a shared scenario, run with a
// configurable scorer, reported per difficulty category with assistance and
// prediction-set statistics. The flat baseline runs the same missions from
// their monolithic NL renderings for comparison.

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ltlplan/conformal.hpp"
#include "ltlplan/mission.hpp"

namespace ltlplan {

struct SuiteMission {
  std::string id;
  std::string category;  // easy | medium | hard
  std::string formula_text;
  std::vector<AtomicProposition> atoms;
  std::string baseline_nl;  // monolithic instruction for the flat baseline
  int repetitions = 1;
};

struct SuiteSpec {
  std::string name;
  std::string scenario_path;
  Scenario scenario;
  double alpha = 0.05;
  int delta = 1;
  int t_budget = 7;
  std::vector<SuiteMission> missions;
};

SuiteSpec load_suite(const std::string& path);
SuiteSpec suite_from_json_text(const std::string& text,
                               const std::string& base_dir);

enum class SuiteScorerKind { Oracle, Noisy, Uniform };

struct SuiteRunOptions {
  SuiteScorerKind scorer = SuiteScorerKind::Oracle;
  NoiseParams noise;
  HumanAssistMode human_assist = HumanAssistMode::Deny;
  GatingMode gating = GatingMode::Both;
  CpMethod cp_method = CpMethod::Vanilla;
  RapsParams raps;
  std::uint64_t seed = 0;
  std::optional<CalibrationModel> model;  // shared across missions; fitted
                                          // once from the suite scenario
                                          // when absent
  int calibration_n = 50;
  bool flat_baseline = false;  // run baselines instead of the hierarchy
  double misorder = 0.0;       // flat-baseline constraint drop probability
  int max_windows = 64;
};

struct MissionResult {
  std::string id;
  std::string category;
  int repetition = 0;
  MissionStatus status = MissionStatus::Failed;
  bool completed = false;  // satisfied or human-completed
  int steps = 0;
  int assist_events = 0;
  int human_events = 0;
  int subtasks_completed = 0;
  double joint_conf = 1.0;
  double mean_set_size = 0.0;
};

struct CategoryStats {
  int missions = 0;
  int completed = 0;
  int assist_events = 0;
  int human_events = 0;
  std::map<int, int> set_size_histogram;
  double completion_rate() const {
    return missions == 0 ? 0.0
                         : static_cast<double>(completed) / missions;
  }
};

struct SuiteReport {
  std::string suite_name;
  std::string scorer;
  bool flat_baseline = false;
  std::uint64_t seed = 0;
  std::vector<MissionResult> missions;
  std::map<std::string, CategoryStats> categories;
  double overall_completion_rate = 0.0;

  std::string to_json() const;
  std::string to_text() const;  // aligned per-category table
};

SuiteReport run_experiment_suite(const SuiteSpec& suite,
                                 const SuiteRunOptions& options);

}  // namespace ltlplan
