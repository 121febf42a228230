#include "ltlplan/mission.hpp"

#include <algorithm>
#include <functional>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>

#include "json.hpp"
#include "rng_util.hpp"

namespace ltlplan {

namespace {

using nlohmann::ordered_json;

std::string outcome_text(Outcome outcome) {
  switch (outcome) {
    case Outcome::Ok: return "ok";
    case Outcome::Failed: return "failed";
    case Outcome::Reported: return "reported";
  }
  return "ok";
}

ordered_json step_to_json(const StepRecord& step) {
  ordered_json j;
  j["window"] = step.window;
  j["subtask_ap_id"] = step.subtask_ap_id;
  j["subtask"] = step.subtask;
  j["prompt_digest"] = std::to_string(step.prompt_digest);
  j["decision_index"] = step.decision_index;
  j["decision"] = step.decision;
  j["set_size"] = step.set_size;
  j["outcome"] = step.outcome;
  j["sensor"] = step.sensor;
  j["word"] = step.word;
  j["by_human"] = step.by_human;
  return j;
}

// The per-window gate bookkeeping shared by run_mission's verdict logic.
struct WindowResult {
  bool reported = false;
  bool cp_triggered = false;
  bool all_singletons = true;

  std::string trigger() const {
    if (cp_triggered) return "prediction set exceeded delta";
    if (reported) return "scorer reported failure";
    return "window ended without advancing";
  }
};

}  // namespace

HumanAssistDeniedError::HumanAssistDeniedError(const std::string& what,
                                               PlanTrace trace_in)
    : std::runtime_error(what), trace(std::move(trace_in)) {}

std::string to_string(MissionStatus status) {
  switch (status) {
    case MissionStatus::Satisfied: return "satisfied";
    case MissionStatus::Failed: return "failed";
    case MissionStatus::HumanCompleted: return "human-completed";
  }
  return "failed";
}

std::string to_string(AssistKind kind) {
  switch (kind) {
    case AssistKind::AlternativeAp: return "alternative-ap";
    case AssistKind::AlternativeState: return "alternative-state";
    case AssistKind::Human: return "human";
    case AssistKind::Denied: return "denied";
  }
  return "denied";
}

std::string PlanTrace::to_json() const {
  ordered_json j;
  j["status"] = ltlplan::to_string(status);
  j["exit_code"] = exit_code;
  j["word_accepting"] = word_accepting;
  j["subtasks_completed"] = subtasks_completed;
  j["joint_confidence"] = joint_conf;
  j["dfa_states"] = dfa_states;
  j["events"] = ordered_json::array();
  for (const auto& event : events) {
    ordered_json e;
    e["kind"] = ltlplan::to_string(event.kind);
    e["window"] = event.window;
    e["detail"] = event.detail;
    j["events"].push_back(e);
  }
  j["steps"] = ordered_json::array();
  for (const auto& step : steps) j["steps"].push_back(step_to_json(step));
  return j.dump(2);
}

CascadeOutcome assistance_cascade(MissionState& state,
                                  const SubtaskAssignment& failed,
                                  const PrunedDfa& pruned,
                                  const MissionConfig& config) {
  (void)config;
  CascadeOutcome outcome;
  if (failed.next_ap_index >= 0) {
    state.exhausted_aps[{state.current, failed.next_state}].insert(
        failed.next_ap_index);
  }

  // Stay on the same transition if a sibling proposition is still untried:
  // mask out every other reachable target and re-run the seeded selector.
  ReachableSet reachable = reachable_next(pruned, state);
  MissionState forced = state;
  for (int q : reachable.states) {
    if (q != failed.next_state) forced.exhausted_targets.insert(q);
  }
  try {
    outcome.next = select_subtask(pruned, forced);
    outcome.kind = AssistKind::AlternativeAp;
    return outcome;
  } catch (const NoSubtaskError&) {
  }

  // Abandon the target state and look for a different reachable state.
  state.exhausted_targets.insert(failed.next_state);
  try {
    outcome.next = select_subtask(pruned, state);
    outcome.kind = AssistKind::AlternativeState;
    return outcome;
  } catch (const NoSubtaskError&) {
  }

  outcome.human = true;
  outcome.kind = AssistKind::Human;
  return outcome;
}

CalibrationSet build_calibration_set(const Scenario& scenario,
                                     const ScorerPtr& scorer, int n,
                                     int t_budget, double alpha,
                                     CpMethod method, const RapsParams& raps,
                                     std::uint64_t seed) {
  if (!scorer) throw EmptyCalibrationError("calibration needs a scorer");
  CalibrationSet set;
  set.method = method;
  set.alpha = alpha;
  set.raps = raps;

  std::mt19937_64 rng(detail::mix64(seed));
  const World& world = scenario.world;
  DecisionSet decisions = build_decision_set(world);
  PromptOptions options;
  options.step_budget = t_budget;

  for (int i = 0; i < n; ++i) {
    // Draw a single-proposition delivery task that the oracle can actually
    // finish inside the budget; resample on trivial or impossible draws.
    std::vector<Decision> plan;
    SubtaskAssignment assignment;
    bool found = false;
    for (int attempt = 0; attempt < 200 && !found; ++attempt) {
      const auto& object =
          world.objects[detail::uniform_index(rng, world.objects.size())];
      const auto& dest =
          world.locations[detail::uniform_index(rng, world.locations.size())];
      AtomicProposition ap = make_ap(1, ApAction::Deliver, object.id, dest);
      if (ap_satisfied(world, ap)) continue;
      assignment = SubtaskAssignment{};
      assignment.next_ap = ap;
      assignment.next_ap_index = 0;
      try {
        plan = oracle_plan(world, scenario.robot, assignment, t_budget);
        found = true;
      } catch (const NoPlanWithinBudgetError&) {
      }
    }
    if (!found) continue;

    CalibPoint point;
    World cur = world;
    RobotState robot = scenario.robot;
    std::vector<HistoryStep> history;
    for (const Decision& truth : plan) {
      PromptContext prompt = build_prompt(assignment, cur, robot, history,
                                          options);
      ScoreVector scores = scorer->score(prompt, decisions);
      CalibStep step;
      step.prompt_digest = prompt.digest();
      step.truth_index = decisions.index_of(truth);
      step.softmax = scores.softmax;
      point.steps.push_back(std::move(step));

      ApplyResult result = apply(cur, robot, truth);
      history.push_back({truth, decision_label(truth), result.feedback.text});
      cur = std::move(result.world);
      robot = result.robot;
    }
    set.points.push_back(std::move(point));
  }
  if (set.points.empty()) {
    throw EmptyCalibrationError("no calibration tasks could be drawn");
  }
  return set;
}

bool replay_accepts(const Formula& formula, const Scenario& scenario,
                    const std::vector<Decision>& decisions) {
  Dfa dfa = to_dfa(formula);
  World world = scenario.world;
  RobotState robot = scenario.robot;
  int state = dfa.initial;
  for (const Decision& decision : decisions) {
    ApplyResult result = apply(world, robot, decision);
    world = std::move(result.world);
    robot = result.robot;
    state = dfa.step(state, word_symbol(world, formula.ap_set));
  }
  return state == dfa.accepting;
}

std::vector<Decision> trace_decisions(const PlanTrace& trace) {
  auto parse = [](const std::string& label) -> Decision {
    auto strip_prefix = [&](const std::string& prefix) {
      return label.substr(prefix.size());
    };
    if (label == "put down the held object")
      return {ActionKind::PutDown, ""};
    if (label == "do nothing") return {ActionKind::DoNothing, ""};
    if (label == "report failure") return {ActionKind::ReportFailure, ""};
    if (label.rfind("go to ", 0) == 0)
      return {ActionKind::GoTo, strip_prefix("go to ")};
    if (label.rfind("pick up ", 0) == 0)
      return {ActionKind::PickUp, strip_prefix("pick up ")};
    const std::string open_prefix = "open the ";
    const std::string open_suffix = " door";
    if (label.rfind(open_prefix, 0) == 0 &&
        label.size() > open_prefix.size() + open_suffix.size() &&
        label.compare(label.size() - open_suffix.size(), open_suffix.size(),
                      open_suffix) == 0) {
      return {ActionKind::OpenDoor,
              label.substr(open_prefix.size(), label.size() -
                                                   open_prefix.size() -
                                                   open_suffix.size())};
    }
    throw MalformedDecisionError("unparseable decision label: " + label);
  };
  std::vector<Decision> decisions;
  decisions.reserve(trace.steps.size());
  for (const auto& step : trace.steps) decisions.push_back(parse(step.decision));
  return decisions;
}

namespace {

// Shared mutable state for one mission run.
struct MissionRun {
  const MissionConfig& config;
  Dfa dfa;
  PrunedDfa pruned;
  DecisionSet decisions;
  World world;
  RobotState robot;
  MissionState planner;
  int raw_state = 0;
  PlanTrace trace;
  bool human_used = false;
  int window = 0;

  explicit MissionRun(const MissionConfig& cfg)
      : config(cfg),
        dfa(to_dfa(cfg.formula)),
        world(cfg.scenario.world),
        robot(cfg.scenario.robot) {}

  bool use_cp() const { return config.gating != GatingMode::Semantic; }
  bool use_semantic() const { return config.gating != GatingMode::Conformal; }

  Symbol observe() { return word_symbol(world, config.formula.ap_set); }

  StepRecord execute(const SubtaskAssignment& assignment,
                     const Decision& decision, int decision_index,
                     int set_size, bool by_human,
                     std::vector<HistoryStep>& history,
                     std::uint64_t prompt_digest = 0) {
    ApplyResult result = apply(world, robot, decision);
    world = std::move(result.world);
    robot = result.robot;
    Symbol symbol = observe();
    raw_state = dfa.step(raw_state, symbol);

    StepRecord record;
    record.window = window;
    record.subtask_ap_id = assignment.next_ap.id;
    record.subtask = assignment.next_ap.nl_text;
    record.prompt_digest = prompt_digest;
    record.decision_index = decision_index;
    record.decision = decision_label(decision);
    record.set_size = set_size;
    record.outcome = outcome_text(result.outcome);
    record.sensor = result.feedback.text;
    record.word = symbol;
    record.by_human = by_human;
    history.push_back({decision, record.decision, record.sensor});
    trace.steps.push_back(record);
    return record;
  }

  // Advance bookkeeping shared by scored windows and human interventions.
  void commit_advance(int new_state) {
    planner.current = new_state;
    planner.time += 1;
    planner.exhausted_aps.clear();
    planner.exhausted_targets.clear();
    trace.dfa_states.push_back(planner.current);
    trace.subtasks_completed += 1;
  }

  void finalize() {
    trace.word_accepting = (raw_state == dfa.accepting);
    if (planner.current == dfa.accepting && trace.word_accepting) {
      trace.status = human_used ? MissionStatus::HumanCompleted
                                : MissionStatus::Satisfied;
      trace.exit_code = kExitSatisfied;
    } else {
      trace.status = MissionStatus::Failed;
      trace.exit_code = kExitFailed;
    }
    trace.joint_conf =
        use_cp() ? joint_confidence(config.alpha, trace.subtasks_completed)
                 : 1.0;
  }
};

// The operator executes an oracle plan for the failed sub-task, or for the
// first transition candidate that still has one. Returns false when not even
// ground truth can make progress from here.
bool scripted_human(MissionRun& run, const SubtaskAssignment& failed) {
  std::vector<SubtaskAssignment> candidates{failed};
  MissionState fresh;  // human ignores planner exhaustion bookkeeping
  fresh.current = run.planner.current;
  fresh.rng_seed = run.planner.rng_seed;
  try {
    ReachableSet reachable = reachable_next(run.pruned, fresh);
    for (int q : reachable.states) {
      MissionState forced = fresh;
      for (int other : reachable.states) {
        if (other != q) forced.exhausted_targets.insert(other);
      }
      try {
        candidates.push_back(select_subtask(run.pruned, forced));
      } catch (const NoSubtaskError&) {
      }
    }
  } catch (const NoProgressError&) {
    return false;
  }

  for (const auto& candidate : candidates) {
    if (candidate.next_ap_index < 0) continue;
    std::vector<Decision> plan;
    try {
      plan = oracle_plan(run.world, run.robot, candidate, run.config.t_budget);
    } catch (const NoPlanWithinBudgetError&) {
      continue;
    }
    std::vector<HistoryStep> history;
    for (const Decision& decision : plan) {
      if (decision.action == ActionKind::DoNothing) break;  // padding
      run.execute(candidate, decision, run.decisions.index_of(decision), 0,
                  true, history);
    }
    return true;
  }
  return false;
}

// Manual control: numbered options on human_output, one decision index per
// line on human_input; blank line or end-of-input hands control back.
bool interactive_human(MissionRun& run, const SubtaskAssignment& failed) {
  std::istream* in = run.config.human_input ? run.config.human_input
                                            : &std::cin;
  std::ostream* out = run.config.human_output ? run.config.human_output
                                              : &std::cout;
  *out << "Assistance requested (window " << run.window
       << "). Sub-task: " << failed.next_ap.nl_text << ".\n";
  *out << "Robot at " << run.robot.at;
  if (!run.robot.holding.empty()) *out << ", holding " << run.robot.holding;
  *out << ".\nOptions:\n";
  for (int i = 0; i < run.decisions.size(); ++i) {
    *out << "  " << i << ". " << run.decisions.labels[i] << "\n";
  }
  *out << "Enter one decision index per line (blank line to finish):\n";

  std::vector<HistoryStep> history;
  bool acted = false;
  std::string line;
  while (std::getline(*in, line)) {
    if (line.empty()) break;
    int index = -1;
    try {
      index = std::stoi(line);
    } catch (const std::exception&) {
      *out << "unrecognized input: " << line << "\n";
      continue;
    }
    if (index < 0 || index >= run.decisions.size()) {
      *out << "index out of range: " << line << "\n";
      continue;
    }
    StepRecord record = run.execute(failed, run.decisions.decisions[index],
                                    index, 0, true, history);
    acted = true;
    *out << record.decision;
    if (!record.sensor.empty()) *out << " -> " << record.sensor;
    *out << "\n";
  }
  return acted;
}

}  // namespace

PlanTrace run_mission(const MissionConfig& config) {
  if (!config.scorer) {
    throw std::invalid_argument("run_mission: config.scorer is null");
  }
  MissionRun run(config);
  if (!run.dfa.satisfiable) {
    throw MissionInfeasibleError("formula has no satisfying trace");
  }
  run.pruned = prune(run.dfa);
  if (distance(run.pruned, run.dfa.initial, run.dfa.accepting) ==
      kInfiniteDistance) {
    throw MissionInfeasibleError(
        "no path to acceptance over single-proposition symbols");
  }

  CalibrationModel model;
  if (run.use_cp()) {
    if (config.model) {
      model = *config.model;
    } else {
      CalibrationSet calib = build_calibration_set(
          config.scenario, config.scorer, config.calibration_n,
          config.t_budget, config.alpha, config.cp_method, config.raps,
          config.seed ^ 0x9e3779b97f4a7c15ULL);
      model = calibrate(calib);
    }
  }

  run.planner.current = run.dfa.initial;
  run.planner.rng_seed = config.seed;
  run.trace.dfa_states.push_back(run.planner.current);
  run.decisions = build_decision_set(run.world);
  run.raw_state = run.dfa.initial;

  PromptOptions options = config.prompt;
  options.step_budget = config.t_budget;

  std::optional<SubtaskAssignment> pending;
  bool failed = false;
  while (!failed && run.planner.current != run.dfa.accepting &&
         run.window < config.max_windows) {
    SubtaskAssignment assignment;
    if (pending) {
      assignment = *pending;
      pending.reset();
    } else {
      try {
        assignment = select_subtask(run.pruned, run.planner);
      } catch (const NoProgressError&) {
        failed = true;  // resynced into a trap state
        break;
      } catch (const NoSubtaskError&) {
        failed = true;  // only symbol-free transitions remain
        break;
      }
    }

    const int window_start_state = run.planner.current;
    WindowResult result;
    std::vector<HistoryStep> history;
    for (int t = 0; t < config.t_budget; ++t) {
      PromptContext prompt =
          build_prompt(assignment, run.world, run.robot, history, options);
      ScoreVector scores = config.scorer->score(prompt, run.decisions);
      int set_size = 0;
      if (run.use_cp()) {
        PredictionSet pset = predict_set(model, scores, t);
        set_size = static_cast<int>(pset.members.size());
        if (set_size > config.delta) {
          result.cp_triggered = true;
          break;  // too uncertain to act; escalate instead
        }
        if (set_size != 1) result.all_singletons = false;
      }
      StepRecord record =
          run.execute(assignment, run.decisions.decisions[scores.argmax],
                      scores.argmax, set_size, false, history,
                      prompt.digest());
      if (record.outcome == "reported") {
        result.reported = true;
        break;
      }
    }

    bool advanced = false;
    if (!result.reported && !result.cp_triggered) {
      bool semantic_ok =
          !run.use_semantic() || run.raw_state == assignment.next_state;
      bool conformal_ok = !run.use_cp() || result.all_singletons;
      advanced = semantic_ok && conformal_ok;
    }

    if (run.use_semantic()) {
      run.planner.current = run.raw_state;  // keep the planner honest
    }

    if (advanced) {
      run.commit_advance(run.use_semantic() ? run.raw_state
                                            : assignment.next_state);
      run.window += 1;
      continue;
    }

    if (run.use_semantic() &&
        distance(run.pruned, run.planner.current, run.dfa.accepting) ==
            kInfiniteDistance) {
      failed = true;  // the word wandered into a trap
      break;
    }

    CascadeOutcome cascade =
        assistance_cascade(run.planner, assignment, run.pruned, config);
    if (!cascade.human) {
      std::string detail =
          result.trigger() + "; " +
          (cascade.kind == AssistKind::AlternativeAp
               ? "retrying transition with sub-task '" +
                     cascade.next.next_ap.nl_text + "'"
               : "redirecting to state q" +
                     std::to_string(cascade.next.next_state) +
                     " via sub-task '" + cascade.next.next_ap.nl_text + "'");
      run.trace.events.push_back({cascade.kind, run.window, detail});
      pending = cascade.next;
      run.window += 1;
      continue;
    }

    run.human_used = true;
    if (config.human_assist == HumanAssistMode::Deny) {
      run.trace.events.push_back(
          {AssistKind::Denied, run.window,
           result.trigger() + "; human assistance required for sub-task '" +
               assignment.next_ap.nl_text + "' but denied"});
      run.finalize();
      run.trace.exit_code = kExitHumanDenied;
      throw HumanAssistDeniedError("human assistance denied", run.trace);
    }

    run.trace.events.push_back(
        {AssistKind::Human, run.window,
         result.trigger() + "; operator takes over after sub-task '" +
             assignment.next_ap.nl_text + "'"});
    bool human_ok = config.human_assist == HumanAssistMode::ScriptedOracle
                        ? scripted_human(run, assignment)
                        : interactive_human(run, assignment);
    run.planner.current = run.raw_state;
    if (!human_ok) {
      failed = true;
      break;
    }
    int d_before = distance(run.pruned, window_start_state, run.dfa.accepting);
    int d_after = distance(run.pruned, run.raw_state, run.dfa.accepting);
    if (d_after < d_before) {
      run.commit_advance(run.raw_state);
      run.window += 1;
      continue;
    }
    failed = true;
  }

  run.finalize();
  return run.trace;
}

namespace {

// The flat agent's reading of the instruction: the F-goals in id order,
// resequenced by whichever precedence constraints it retained.
struct FlatReading {
  std::vector<int> goals;                      // ap_set indices, ordered
  std::vector<std::pair<int, int>> constraints;  // (before, after)
};

void collect_flat(const FormulaPtr& node, std::vector<int>& goals,
                  std::vector<std::pair<int, int>>& constraints) {
  if (!node) return;
  switch (node->kind) {
    case FormulaKind::And:
      collect_flat(node->lhs, goals, constraints);
      collect_flat(node->rhs, goals, constraints);
      return;
    case FormulaKind::Eventually: {
      // F over anything: the flat agent aims for the lowest-indexed atom.
      const FormulaNode* inner = node->lhs.get();
      std::vector<int> atoms;
      std::function<void(const FormulaNode*)> walk =
          [&](const FormulaNode* n) {
            if (n == nullptr) return;
            if (n->kind == FormulaKind::Atom) atoms.push_back(n->atom_index);
            walk(n->lhs.get());
            walk(n->rhs.get());
          };
      walk(inner);
      if (!atoms.empty())
        goals.push_back(*std::min_element(atoms.begin(), atoms.end()));
      return;
    }
    case FormulaKind::Until: {
      // !a U b reads as "b before a".
      const FormulaNode* guard = node->lhs.get();
      const FormulaNode* release = node->rhs.get();
      if (guard != nullptr && guard->kind == FormulaKind::Not &&
          guard->lhs && guard->lhs->kind == FormulaKind::Atom &&
          release != nullptr && release->kind == FormulaKind::Atom) {
        constraints.emplace_back(release->atom_index, guard->lhs->atom_index);
      }
      return;
    }
    default:
      return;
  }
}

std::vector<int> understood_order(const Formula& formula, double misorder,
                                  std::mt19937_64& rng) {
  std::vector<int> goals;
  std::vector<std::pair<int, int>> constraints;
  collect_flat(formula.root, goals, constraints);
  std::sort(goals.begin(), goals.end());
  goals.erase(std::unique(goals.begin(), goals.end()), goals.end());

  std::vector<std::pair<int, int>> kept;
  for (const auto& c : constraints) {
    if (detail::uniform01(rng) >= misorder) kept.push_back(c);
  }

  // Kahn's algorithm, smallest atom index first.
  std::vector<int> order;
  std::set<int> remaining(goals.begin(), goals.end());
  while (!remaining.empty()) {
    int pick = -1;
    for (int g : remaining) {
      bool free = true;
      for (const auto& [before, after] : kept) {
        if (after == g && remaining.count(before)) {
          free = false;
          break;
        }
      }
      if (free) {
        pick = g;
        break;
      }
    }
    if (pick < 0) pick = *remaining.begin();  // constraint cycle fallback
    order.push_back(pick);
    remaining.erase(pick);
  }
  return order;
}

// DFA states from which acceptance is still reachable.
std::vector<bool> live_states(const Dfa& dfa) {
  std::vector<bool> live(dfa.num_states, false);
  live[dfa.accepting] = true;
  bool changed = true;
  while (changed) {
    changed = false;
    for (int q = 0; q < dfa.num_states; ++q) {
      if (live[q]) continue;
      for (Symbol s = 0; s < static_cast<Symbol>(dfa.alphabet_size()); ++s) {
        if (live[dfa.step(q, s)]) {
          live[q] = true;
          changed = true;
          break;
        }
      }
    }
  }
  return live;
}

}  // namespace

PlanTrace run_flat_baseline(const FlatBaselineConfig& config) {
  Dfa dfa = to_dfa(config.formula);
  if (!dfa.satisfiable) {
    throw MissionInfeasibleError("formula has no satisfying trace");
  }
  std::vector<bool> live = live_states(dfa);

  std::mt19937_64 rng(detail::mix64(config.seed));
  double misorder = config.use_oracle ? 0.0 : config.misorder;
  std::vector<int> order = understood_order(config.formula, misorder, rng);

  ScorerPtr scorer;
  if (config.use_oracle) {
    scorer = std::make_shared<OracleScorer>();
  } else {
    NoiseParams noise = config.noise;
    noise.seed = config.seed;
    scorer = std::make_shared<NoisyScorer>(noise);
  }

  PlanTrace trace;
  World world = config.scenario.world;
  RobotState robot = config.scenario.robot;
  DecisionSet decisions = build_decision_set(world);
  int raw_state = dfa.initial;
  trace.dfa_states.push_back(raw_state);

  PromptOptions options = config.prompt;
  options.step_budget = config.t_budget;

  const int total_budget =
      config.t_budget * std::max<int>(1, static_cast<int>(order.size()));
  std::size_t goal = 0;
  std::vector<HistoryStep> history;
  int spent = 0;
  while (spent < total_budget && goal < order.size() && live[raw_state] &&
         raw_state != dfa.accepting) {
    const AtomicProposition& ap = config.formula.ap_set[order[goal]];
    if (ap_satisfied(world, ap)) {
      goal += 1;
      trace.dfa_states.push_back(raw_state);
      history.clear();
      continue;
    }

    SubtaskAssignment assignment;
    assignment.next_ap = ap;
    assignment.next_ap_index = order[goal];

    PromptContext prompt = build_prompt(assignment, world, robot, history,
                                        options);
    ScoreVector scores = scorer->score(prompt, decisions);
    const Decision& decision = decisions.decisions[scores.argmax];
    ApplyResult result = apply(world, robot, decision);
    world = std::move(result.world);
    robot = result.robot;
    Symbol symbol = word_symbol(world, config.formula.ap_set);
    raw_state = dfa.step(raw_state, symbol);

    StepRecord record;
    record.window = static_cast<int>(goal);
    record.subtask_ap_id = ap.id;
    record.subtask = ap.nl_text;
    record.prompt_digest = prompt.digest();
    record.decision_index = scores.argmax;
    record.decision = decision_label(decision);
    record.set_size = 0;
    record.outcome = outcome_text(result.outcome);
    record.sensor = result.feedback.text;
    record.word = symbol;
    trace.steps.push_back(record);
    history.push_back({decision, record.decision, record.sensor});
    spent += 1;
    if (record.outcome == "reported") break;
  }

  // Credit goals that completed on the final step.
  while (goal < order.size() &&
         ap_satisfied(world, config.formula.ap_set[order[goal]])) {
    goal += 1;
    trace.dfa_states.push_back(raw_state);
  }

  trace.subtasks_completed = static_cast<int>(goal);
  trace.word_accepting = (raw_state == dfa.accepting);
  trace.status = trace.word_accepting ? MissionStatus::Satisfied
                                      : MissionStatus::Failed;
  trace.exit_code = trace.word_accepting ? kExitSatisfied : kExitFailed;
  trace.joint_conf = 1.0;
  return trace;
}

}  // namespace ltlplan
