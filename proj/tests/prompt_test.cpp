#include <string>

#include "doctest.h"
#include "ltlplan/prompt.hpp"
#include "ltlplan/world.hpp"

using namespace ltlplan;

namespace {

const std::string kDataDir = LTLPLAN_DATA_DIR;

Scenario iva() { return load_scenario(kDataDir + "/scenarios/iva_env.json"); }

SubtaskAssignment sample_assignment() {
  SubtaskAssignment a;
  a.next_state = 1;
  a.next_ap_index = 0;
  a.next_ap = make_ap(1, ApAction::Deliver, "C1", "LC");
  a.forbidden_ap_indices = {1};
  a.forbidden_aps = {make_ap(2, ApAction::Deliver, "C2", "LC")};
  return a;
}

}  // namespace

TEST_CASE("decision set covers the full fixed action menu in order") {
  Scenario s = iva();
  DecisionSet set = build_decision_set(s.world);
  REQUIRE(set.size() == 18);  // 7 go-to + 6 pick-up + put-down + 2 doors + 2

  CHECK(set.decisions[0] == Decision{ActionKind::GoTo, "LA"});
  CHECK(set.labels[0] == "go to LA");
  CHECK(set.decisions[7] == Decision{ActionKind::PickUp, "C1"});
  CHECK(set.labels[7] == "pick up C1");
  CHECK(set.decisions[13] == Decision{ActionKind::PutDown, ""});
  CHECK(set.decisions[14] == Decision{ActionKind::OpenDoor, "fridge"});
  CHECK(set.labels[14] == "open the fridge door");
  CHECK(set.decisions[16] == Decision{ActionKind::DoNothing, ""});
  CHECK(set.decisions[17] == Decision{ActionKind::ReportFailure, ""});

  CHECK(set.index_of({ActionKind::PickUp, "W"}) == 9);
  CHECK(set.index_of({ActionKind::PickUp, "nope"}) == -1);
  for (int i = 0; i < set.size(); ++i) {
    CHECK(set.index_of(set.decisions[i]) == i);
  }
}

TEST_CASE("prompt renders all five parts and the option menu") {
  Scenario s = iva();
  PromptContext prompt =
      build_prompt(sample_assignment(), s.world, s.robot, {}, {});
  std::string text = prompt.render();

  CHECK(text.find("[system]") != std::string::npos);
  CHECK(text.find("[environment]") != std::string::npos);
  CHECK(text.find("[task]") != std::string::npos);
  CHECK(text.find("[history]") != std::string::npos);
  CHECK(text.find("[options]") != std::string::npos);
  CHECK(text.find("[response]") != std::string::npos);

  CHECK(text.find("Current sub-task: deliver C1 to LC.") != std::string::npos);
  CHECK(text.find("Do not yet accomplish: [deliver C2 to LC]") !=
        std::string::npos);
  CHECK(text.find("You have 7 steps.") != std::string::npos);
  CHECK(text.find("18. report failure") != std::string::npos);
  CHECK(text.find("W (Water Bottle) expected at LD inside the fridge") !=
        std::string::npos);
  CHECK(text.find("[example]") == std::string::npos);
}

TEST_CASE("history accumulates decision and sensor pairs") {
  Scenario s = iva();
  std::vector<HistoryStep> history = {
      {{ActionKind::GoTo, "LB"}, "go to LB", "C1 (Coke) at LB"},
      {{ActionKind::PickUp, "C1"}, "pick up C1", ""},
  };
  PromptContext prompt =
      build_prompt(sample_assignment(), s.world, s.robot, history, {});
  std::string text = prompt.render();
  CHECK(text.find("1. go to LB -> C1 (Coke) at LB") != std::string::npos);
  CHECK(text.find("2. pick up C1\n") != std::string::npos);
}

TEST_CASE("digest is stable and input-sensitive") {
  Scenario s = iva();
  PromptContext a = build_prompt(sample_assignment(), s.world, s.robot, {}, {});
  PromptContext b = build_prompt(sample_assignment(), s.world, s.robot, {}, {});
  CHECK(a.digest() == b.digest());

  std::vector<HistoryStep> history = {
      {{ActionKind::GoTo, "LB"}, "go to LB", ""}};
  PromptContext c =
      build_prompt(sample_assignment(), s.world, s.robot, history, {});
  CHECK(a.digest() != c.digest());

  PromptOptions options;
  options.step_budget = 5;
  PromptContext d =
      build_prompt(sample_assignment(), s.world, s.robot, {}, options);
  CHECK(a.digest() != d.digest());

  options.step_budget = 7;
  options.one_shot = "Example: the sub-task is done, answer with do nothing.";
  PromptContext e =
      build_prompt(sample_assignment(), s.world, s.robot, {}, options);
  CHECK(e.render().find("[example]") != std::string::npos);
  CHECK(a.digest() != e.digest());
}

TEST_CASE("fnv1a64 matches its reference values") {
  // Standard FNV-1a test vectors.
  CHECK(fnv1a64("") == 14695981039346656037ull);
  CHECK(fnv1a64("a") == 12638187200555641996ull);
  CHECK(fnv1a64("foobar") == 0x85944171f73967e8ull);
}
