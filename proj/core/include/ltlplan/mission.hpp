#pragma once

// The hierarchical planning loop: sub-task selection over the pruned DFA, a
// T-step scored window per sub-task, conformal gating, the assistance
// cascade (alternative AP -> alternative DFA state -> human), and the
// independent ground-truth word check that decides mission soundness.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ltlplan/conformal.hpp"
#include "ltlplan/prompt.hpp"
#include "ltlplan/scorer.hpp"
#include "ltlplan/task_automaton.hpp"
#include "ltlplan/world.hpp"

namespace ltlplan {

enum class HumanAssistMode { Interactive, ScriptedOracle, Deny };

// How a completed T-window earns a DFA advance: the ground-truth conditions
// (i)-(ii) (the raw-word run reaches q_next), the conformal labeling
// function, or both (default).
enum class GatingMode { Semantic, Conformal, Both };

enum class MissionStatus { Satisfied, Failed, HumanCompleted };
enum class AssistKind { AlternativeAp, AlternativeState, Human, Denied };

inline constexpr int kExitSatisfied = 0;
inline constexpr int kExitFailed = 2;
inline constexpr int kExitHumanDenied = 3;
inline constexpr int kExitInfeasible = 4;

struct MissionConfig {
  Formula formula;
  Scenario scenario;
  ScorerPtr scorer;
  double alpha = 0.05;
  int delta = 1;    // assistance triggers when |C| > delta
  int t_budget = 7; // scored steps per sub-task window
  std::uint64_t seed = 0;
  HumanAssistMode human_assist = HumanAssistMode::Deny;
  GatingMode gating = GatingMode::Both;
  CpMethod cp_method = CpMethod::Vanilla;
  RapsParams raps;
  // Prediction sets need a fitted quantile; when no model is supplied the
  // runner calibrates one on calibration_n seeded single-AP tasks drawn from
  // the mission scenario with the mission scorer.
  std::optional<CalibrationModel> model;
  int calibration_n = 50;
  PromptOptions prompt;
  int max_windows = 64;  // hard stop against non-advancing loops
  std::istream* human_input = nullptr;   // interactive mode (default stdin)
  std::ostream* human_output = nullptr;  // interactive mode (default stdout)
};

struct StepRecord {
  int window = 0;            // sub-task attempt index
  int subtask_ap_id = -1;    // AP id pursued in this window
  std::string subtask;       // its nl_text
  std::uint64_t prompt_digest = 0;
  int decision_index = -1;
  std::string decision;      // rendered label
  int set_size = 0;          // |C| at this step (0 when CP was bypassed)
  std::string outcome;       // ok | failed | reported
  std::string sensor;
  Symbol word = 0;           // ground-truth symbol after the step
  bool by_human = false;
};

struct AssistEvent {
  AssistKind kind = AssistKind::AlternativeAp;
  int window = 0;
  std::string detail;
};

struct PlanTrace {
  std::vector<StepRecord> steps;
  std::vector<int> dfa_states;  // planner state per window boundary, q0 first
  std::vector<AssistEvent> events;
  MissionStatus status = MissionStatus::Failed;
  bool word_accepting = false;  // independent unpruned-DFA replay verdict
  int subtasks_completed = 0;
  double joint_conf = 1.0;      // (1-alpha)^completed
  int exit_code = kExitFailed;

  std::string to_json() const;
};

struct MissionInfeasibleError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct HumanAssistDeniedError : std::runtime_error {
  explicit HumanAssistDeniedError(const std::string& what, PlanTrace trace);
  PlanTrace trace;  // partial trace up to the denial
};

PlanTrace run_mission(const MissionConfig& config);

// One cascade walk after a trigger: drops pi_next from the transition's
// candidates, falls back to a sibling AP, then to a different reachable
// state, then to a human request. Mutates the exhaustion sets in state.
struct CascadeOutcome {
  bool human = false;
  AssistKind kind = AssistKind::AlternativeAp;
  SubtaskAssignment next;  // valid when !human
};
CascadeOutcome assistance_cascade(MissionState& state,
                                  const SubtaskAssignment& failed,
                                  const PrunedDfa& pruned,
                                  const MissionConfig& config);

// Seeded single-AP calibration tasks from a scenario: ground truth from
// oracle_plan, prompts following the truth trajectory, scores from `scorer`.
CalibrationSet build_calibration_set(const Scenario& scenario,
                                     const ScorerPtr& scorer, int n,
                                     int t_budget, double alpha,
                                     CpMethod method, const RapsParams& raps,
                                     std::uint64_t seed);

// Replays a decision sequence through a fresh copy of the scenario and runs
// the per-step ground-truth symbols through the unpruned DFA. This is the
// soundness arbiter for "satisfied", independent of planner bookkeeping.
bool replay_accepts(const Formula& formula, const Scenario& scenario,
                    const std::vector<Decision>& decisions);

std::vector<Decision> trace_decisions(const PlanTrace& trace);

std::string to_string(MissionStatus status);
std::string to_string(AssistKind kind);

// Flat-prompt baseline: one monolithic NL instruction, K*T total scored
// steps, no DFA, no conformal gating; completion judged by the same
// unpruned-DFA word check. The synthetic stand-in models comprehension loss
// on long instructions by dropping each ordering constraint from its
// internal plan with probability `misorder` (seeded); the oracle control
// (use_oracle = true) never misorders and never errs.
struct FlatBaselineConfig {
  Formula formula;
  Scenario scenario;
  std::string instruction;  // hand-written NL rendering from the suite
  bool use_oracle = false;
  NoiseParams noise;
  double misorder = 0.0;
  std::uint64_t seed = 0;
  int t_budget = 7;
  PromptOptions prompt;
};
PlanTrace run_flat_baseline(const FlatBaselineConfig& config);

}  // namespace ltlplan
