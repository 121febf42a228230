#include <sstream>

#include "doctest.h"
#include "ltlplan/mission.hpp"
#include "ltlplan/suite.hpp"

using namespace ltlplan;

namespace {

Scenario load(const std::string& name) {
  return load_scenario(std::string(LTLPLAN_DATA_DIR) + "/scenarios/" + name);
}

CalibrationModel sharp_model(double q_bar) {
  CalibrationModel model;
  model.method = CpMethod::Vanilla;
  model.alpha = 0.05;
  model.q_bar = q_bar;
  model.n = 50;
  return model;
}

// Seed under which the selector tries the given AP id first from q0.
std::uint64_t seed_selecting(const Formula& formula, int ap_id) {
  Dfa dfa = to_dfa(formula);
  PrunedDfa pruned = prune(dfa);
  for (std::uint64_t seed = 0; seed < 256; ++seed) {
    MissionState state;
    state.current = dfa.initial;
    state.rng_seed = seed;
    if (select_subtask(pruned, state).next_ap.id == ap_id) return seed;
  }
  FAIL("no seed found selecting p" << ap_id << " first");
  return 0;
}

}  // namespace

TEST_CASE("blocked delivery recovers through an alternative proposition") {
  std::vector<AtomicProposition> atoms{
      make_ap(1, ApAction::Deliver, "C1", "LC"),
      make_ap(2, ApAction::Deliver, "C2", "LC")};
  Formula formula = parse_ltl("F (p1 | p2)", atoms);

  MissionConfig config;
  config.formula = formula;
  config.scenario = load("iva_env_blocked.json");
  config.scorer = std::make_shared<OracleScorer>();
  config.model = sharp_model(0.5);
  config.seed = seed_selecting(formula, 2);  // try the blocked C2 first

  PlanTrace trace = run_mission(config);

  CHECK(trace.status == MissionStatus::Satisfied);
  CHECK(trace.exit_code == kExitSatisfied);
  CHECK(trace.word_accepting);
  CHECK(trace.subtasks_completed == 1);
  REQUIRE(trace.events.size() == 1);
  CHECK(trace.events[0].kind == AssistKind::AlternativeAp);
  CHECK(trace.events[0].detail.find("scorer reported failure") !=
        std::string::npos);

  // The first window ends in a report, the retry delivers C1.
  REQUIRE(!trace.steps.empty());
  CHECK(trace.steps.front().outcome == "reported");
  CHECK(trace.steps.front().subtask == "deliver C2 to LC");
  CHECK(trace.steps.back().subtask == "deliver C1 to LC");
  for (const auto& step : trace.steps) CHECK(!step.by_human);

  // Independent replay agrees with the planner's verdict.
  CHECK(replay_accepts(formula, config.scenario, trace_decisions(trace)));

  Dfa dfa = to_dfa(formula);
  REQUIRE(trace.dfa_states.size() == 2);
  CHECK(trace.dfa_states.front() == dfa.initial);
  CHECK(trace.dfa_states.back() == dfa.accepting);
}

TEST_CASE("uncertain scoring escalates to a scripted operator") {
  std::vector<AtomicProposition> atoms{
      make_ap(1, ApAction::Deliver, "a drink", "LC")};
  Formula formula = parse_ltl("F p1", atoms);

  NoiseParams noise;
  noise.temperature = 0.1;
  noise.confusion = 1.0;
  noise.seed = 7;

  MissionConfig config;
  config.formula = formula;
  config.scenario = load("iva_env.json");
  config.scorer = std::make_shared<NoisyScorer>(noise);
  config.model = sharp_model(0.9);  // wide sets: both near-ties survive
  config.seed = 11;
  config.human_assist = HumanAssistMode::ScriptedOracle;

  PlanTrace trace = run_mission(config);

  CHECK(trace.status == MissionStatus::HumanCompleted);
  CHECK(trace.exit_code == kExitSatisfied);
  CHECK(trace.word_accepting);
  REQUIRE(!trace.events.empty());
  CHECK(trace.events.back().kind == AssistKind::Human);
  CHECK(trace.events.back().detail.find("prediction set exceeded delta") !=
        std::string::npos);

  // Nothing was executed autonomously; the operator did all the work.
  REQUIRE(!trace.steps.empty());
  for (const auto& step : trace.steps) CHECK(step.by_human);
  CHECK(replay_accepts(formula, config.scenario, trace_decisions(trace)));
}

TEST_CASE("denied human assistance raises with the partial trace") {
  std::vector<AtomicProposition> atoms{
      make_ap(1, ApAction::Deliver, "a drink", "LC")};
  Formula formula = parse_ltl("F p1", atoms);

  NoiseParams noise;
  noise.temperature = 0.1;
  noise.confusion = 1.0;
  noise.seed = 7;

  MissionConfig config;
  config.formula = formula;
  config.scenario = load("iva_env.json");
  config.scorer = std::make_shared<NoisyScorer>(noise);
  config.model = sharp_model(0.9);
  config.human_assist = HumanAssistMode::Deny;

  try {
    run_mission(config);
    FAIL("expected HumanAssistDeniedError");
  } catch (const HumanAssistDeniedError& e) {
    CHECK(e.trace.exit_code == kExitHumanDenied);
    CHECK(e.trace.status == MissionStatus::Failed);
    REQUIRE(!e.trace.events.empty());
    CHECK(e.trace.events.back().kind == AssistKind::Denied);
  }
}

TEST_CASE("an interactive operator can finish the mission by hand") {
  std::vector<AtomicProposition> atoms{
      make_ap(1, ApAction::Deliver, "a drink", "LC")};
  Formula formula = parse_ltl("F p1", atoms);

  NoiseParams noise;
  noise.temperature = 0.1;
  noise.confusion = 1.0;
  noise.seed = 7;

  // go to LB, pick up C1, go to LC, put down.
  std::istringstream input("1\n7\n2\n13\n\n");
  std::ostringstream output;

  MissionConfig config;
  config.formula = formula;
  config.scenario = load("iva_env.json");
  config.scorer = std::make_shared<NoisyScorer>(noise);
  config.model = sharp_model(0.9);
  config.human_assist = HumanAssistMode::Interactive;
  config.human_input = &input;
  config.human_output = &output;

  PlanTrace trace = run_mission(config);
  CHECK(trace.status == MissionStatus::HumanCompleted);
  CHECK(trace.word_accepting);
  CHECK(output.str().find("Assistance requested") != std::string::npos);
  CHECK(output.str().find("pick up C1") != std::string::npos);
}

TEST_CASE("a window that never advances walks the cascade to denial") {
  std::vector<AtomicProposition> atoms{
      make_ap(1, ApAction::Deliver, "C1", "LC")};
  Formula formula = parse_ltl("F p1", atoms);

  MissionConfig config;
  config.formula = formula;
  config.scenario = load("iva_env.json");
  config.scorer = std::make_shared<UniformScorer>();
  config.gating = GatingMode::Semantic;  // no conformal veto, just the word
  config.t_budget = 4;

  try {
    run_mission(config);
    FAIL("expected HumanAssistDeniedError");
  } catch (const HumanAssistDeniedError& e) {
    CHECK(e.trace.steps.size() == 4);  // one full fruitless window
    CHECK(e.trace.exit_code == kExitHumanDenied);
    REQUIRE(!e.trace.events.empty());
    CHECK(e.trace.events.back().detail.find(
              "window ended without advancing") != std::string::npos);
    for (const auto& step : e.trace.steps) CHECK(step.set_size == 0);
  }
}

TEST_CASE("infeasible formulas are rejected up front") {
  std::vector<AtomicProposition> atoms{
      make_ap(1, ApAction::Deliver, "C1", "LC"),
      make_ap(2, ApAction::Deliver, "C2", "LC")};

  MissionConfig config;
  config.scenario = load("iva_env.json");
  config.scorer = std::make_shared<OracleScorer>();
  config.gating = GatingMode::Semantic;

  config.formula = parse_ltl("p1 & !p1", atoms);
  CHECK_THROWS_AS(run_mission(config), MissionInfeasibleError);

  // Satisfiable, but only through a two-proposition symbol.
  config.formula = parse_ltl("p1 & p2", atoms);
  CHECK_THROWS_AS(run_mission(config), MissionInfeasibleError);
}

TEST_CASE("ordered missions complete without assistance under the oracle") {
  std::vector<AtomicProposition> atoms{
      make_ap(1, ApAction::Deliver, "C1", "LC"),
      make_ap(2, ApAction::Deliver, "P", "LA")};
  Formula formula = parse_ltl("F p1 & F p2 & (!p1 U p2)", atoms);

  MissionConfig config;
  config.formula = formula;
  config.scenario = load("iva_env.json");
  config.scorer = std::make_shared<OracleScorer>();
  config.model = sharp_model(0.5);
  config.seed = 3;
  config.t_budget = 7;

  PlanTrace trace = run_mission(config);
  CHECK(trace.status == MissionStatus::Satisfied);
  CHECK(trace.word_accepting);
  CHECK(trace.subtasks_completed == 2);
  CHECK(trace.events.empty());
  CHECK(trace.joint_conf == doctest::Approx(0.95 * 0.95));
  CHECK(replay_accepts(formula, config.scenario, trace_decisions(trace)));

  // The forbidden proposition stayed false until its release: p2 (bit 1)
  // appears in the word before p1 (bit 0) does.
  bool seen_p2 = false;
  for (const auto& step : trace.steps) {
    if (step.word & 0b01) CHECK(seen_p2);
    if (step.word & 0b10) seen_p2 = true;
  }
}

TEST_CASE("trace json serializes the full story") {
  std::vector<AtomicProposition> atoms{
      make_ap(1, ApAction::Deliver, "C1", "LC")};
  Formula formula = parse_ltl("F p1", atoms);

  MissionConfig config;
  config.formula = formula;
  config.scenario = load("iva_env.json");
  config.scorer = std::make_shared<OracleScorer>();
  config.gating = GatingMode::Semantic;

  PlanTrace trace = run_mission(config);
  std::string json = trace.to_json();
  CHECK(json.find("\"status\": \"satisfied\"") != std::string::npos);
  CHECK(json.find("\"word_accepting\": true") != std::string::npos);
  CHECK(json.find("\"decision\": \"pick up C1\"") != std::string::npos);
}

TEST_CASE("calibration harness is deterministic and oracle-consistent") {
  Scenario scenario = load("iva_env.json");
  ScorerPtr oracle = std::make_shared<OracleScorer>();

  // n = 20 keeps ceil((n+1)(1-alpha)) = 20 inside the sample at alpha 0.05.
  CalibrationSet a = build_calibration_set(scenario, oracle, 20, 7, 0.05,
                                           CpMethod::Vanilla, {}, 42);
  CalibrationSet b = build_calibration_set(scenario, oracle, 20, 7, 0.05,
                                           CpMethod::Vanilla, {}, 42);
  REQUIRE(a.points.size() == b.points.size());
  REQUIRE(!a.points.empty());
  for (std::size_t i = 0; i < a.points.size(); ++i) {
    REQUIRE(a.points[i].steps.size() == 7);
    for (std::size_t t = 0; t < a.points[i].steps.size(); ++t) {
      CHECK(a.points[i].steps[t].prompt_digest ==
            b.points[i].steps[t].prompt_digest);
      CHECK(a.points[i].steps[t].truth_index ==
            b.points[i].steps[t].truth_index);
    }
  }

  // Oracle scoring makes every truth the argmax, so q_bar collapses.
  CalibrationModel model = calibrate(a);
  CHECK(model.q_bar < 0.01);
  CHECK(!model.degenerate);
}

TEST_CASE("flat baseline follows understood order and breaks under misorder") {
  std::vector<AtomicProposition> atoms{
      make_ap(1, ApAction::Deliver, "C1", "LC"),
      make_ap(2, ApAction::Deliver, "P", "LA")};
  Formula formula = parse_ltl("F p1 & F p2 & (!p1 U p2)", atoms);
  Scenario scenario = load("iva_env.json");

  FlatBaselineConfig config;
  config.formula = formula;
  config.scenario = scenario;
  config.instruction = "Deliver the pen to LA, then bring C1 to LC.";
  config.use_oracle = true;
  config.seed = 5;

  PlanTrace ok = run_flat_baseline(config);
  CHECK(ok.status == MissionStatus::Satisfied);
  CHECK(ok.word_accepting);
  CHECK(ok.subtasks_completed == 2);

  // Dropping the ordering constraint sends p1 first and traps the word.
  config.use_oracle = false;
  config.misorder = 1.0;
  config.noise.temperature = 0.05;
  PlanTrace broken = run_flat_baseline(config);
  CHECK(broken.status == MissionStatus::Failed);
  CHECK(!broken.word_accepting);
  REQUIRE(!broken.steps.empty());
  CHECK(broken.steps.front().subtask == "deliver C1 to LC");
}

TEST_CASE("experiment suites aggregate per category") {
  const std::string suite_json = R"json({
    "name": "mini",
    "scenario": "scenarios/iva_env.json",
    "t_budget": 7,
    "missions": [
      {"id": "easy-1", "category": "easy", "formula": "F p1",
       "atoms": [{"id": 1, "action": "deliver", "target": "C1",
                  "destination": "LC"}],
       "baseline_nl": "Bring C1 to LC."},
      {"id": "medium-1", "category": "medium",
       "formula": "F p1 & F p2 & (!p1 U p2)",
       "atoms": [{"id": 1, "action": "deliver", "target": "C1",
                  "destination": "LC"},
                 {"id": 2, "action": "deliver", "target": "P",
                  "destination": "LA"}],
       "baseline_nl": "Deliver the pen to LA, then bring C1 to LC.",
       "repetitions": 2}
    ]
  })json";
  SuiteSpec suite = suite_from_json_text(suite_json, LTLPLAN_DATA_DIR);
  CHECK(suite.missions.size() == 2);
  CHECK(suite.scenario.name == "iva_env");

  SuiteRunOptions options;
  options.scorer = SuiteScorerKind::Oracle;
  options.gating = GatingMode::Semantic;
  options.seed = 9;

  SuiteReport report = run_experiment_suite(suite, options);
  CHECK(report.missions.size() == 3);  // 1 + 2 repetitions
  CHECK(report.overall_completion_rate == doctest::Approx(1.0));
  CHECK(report.categories.at("easy").missions == 1);
  CHECK(report.categories.at("medium").missions == 2);
  CHECK(report.categories.at("medium").completion_rate() ==
        doctest::Approx(1.0));
  CHECK(report.to_text().find("overall completion") != std::string::npos);
  CHECK(report.to_json().find("\"scorer\": \"oracle\"") != std::string::npos);

  // The flat oracle control also clears this tiny suite.
  options.flat_baseline = true;
  SuiteReport flat = run_experiment_suite(suite, options);
  CHECK(flat.flat_baseline);
  CHECK(flat.overall_completion_rate == doctest::Approx(1.0));
}
