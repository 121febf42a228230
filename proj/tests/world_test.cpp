#include <string>
#include <vector>

#include "doctest.h"
#include "ltlplan/world.hpp"

using namespace ltlplan;

namespace {

const std::string kDataDir = LTLPLAN_DATA_DIR;

Scenario iva() { return load_scenario(kDataDir + "/scenarios/iva_env.json"); }
Scenario iva_blocked() {
  return load_scenario(kDataDir + "/scenarios/iva_env_blocked.json");
}

struct Sim {
  World world;
  RobotState robot;
  Outcome last = Outcome::Ok;
  SensorFeedback feedback;

  explicit Sim(const Scenario& s) : world(s.world), robot(s.robot) {}
  Outcome run(ActionKind action, const std::string& target = "") {
    ApplyResult r = apply(world, robot, {action, target});
    world = r.world;
    robot = r.robot;
    feedback = r.feedback;
    last = r.outcome;
    return last;
  }
};

bool has_fact(const SensorFeedback& fb, SensorFact::Kind kind,
              const std::string& subject) {
  for (const auto& f : fb.facts) {
    if (f.kind == kind && f.subject.find(subject) != std::string::npos) {
      return true;
    }
  }
  return false;
}

}  // namespace

TEST_CASE("iva scenario loads with full inventory") {
  Scenario s = iva();
  CHECK(s.name == "iva_env");
  CHECK(s.world.locations.size() == 7);
  CHECK(s.world.objects.size() == 6);
  CHECK(s.world.containers.size() == 2);
  CHECK(s.world.synonyms.size() == 1);
  CHECK(s.robot.at == "LA");
  CHECK(s.world.find_object("W")->container == "fridge");
  CHECK_FALSE(s.world.find_container("fridge")->open);
  CHECK(s.world.blocked.empty());
  CHECK(iva_blocked().world.blocked.count("LE") == 1);
}

TEST_CASE("scenario validation rejects dangling references") {
  CHECK_THROWS_AS(scenario_from_json_text("{not json"), ScenarioError);
  CHECK_THROWS_AS(scenario_from_json_text("{}"), ScenarioError);
  CHECK_THROWS_AS(scenario_from_json_text(R"({
    "locations": ["LA"],
    "robot": {"at": "LA"},
    "objects": [{"id": "X", "class": "Box", "loc": "LZ"}]
  })"),
                  ScenarioError);
  CHECK_THROWS_AS(scenario_from_json_text(R"({
    "locations": ["LA"],
    "robot": {"at": "LZ"},
    "objects": []
  })"),
                  ScenarioError);
  CHECK_THROWS_AS(scenario_from_json_text(R"({
    "locations": ["LA", "LB"],
    "robot": {"at": "LA"},
    "objects": [{"id": "X", "class": "Box", "loc": "LA", "container": "c"}],
    "containers": [{"id": "c", "kind": "box", "location": "LB"}]
  })"),
                  ScenarioError);
}

TEST_CASE("scenario serialization round-trips") {
  Scenario s = iva_blocked();
  std::string json = scenario_to_json(s);
  Scenario back = scenario_from_json_text(json);
  CHECK(scenario_to_json(back) == json);
}

TEST_CASE("pick, carry and deliver") {
  Sim sim(iva());
  AtomicProposition delivered = make_ap(1, ApAction::Deliver, "C1", "LC");

  CHECK(sim.run(ActionKind::GoTo, "LB") == Outcome::Ok);
  CHECK(sim.robot.at == "LB");
  CHECK(has_fact(sim.feedback, SensorFact::Kind::ObjectSeen, "C1"));

  CHECK(sim.run(ActionKind::PickUp, "C1") == Outcome::Ok);
  CHECK(sim.robot.holding == "C1");
  CHECK(sim.world.find_object("C1")->held);

  CHECK(sim.run(ActionKind::GoTo, "LC") == Outcome::Ok);
  CHECK(sim.world.find_object("C1")->true_loc == "LC");
  CHECK_FALSE(ap_satisfied(sim.world, delivered));  // still in hand

  CHECK(sim.run(ActionKind::PutDown) == Outcome::Ok);
  CHECK(sim.robot.holding.empty());
  CHECK(ap_satisfied(sim.world, delivered));

  // The origin now senses the object as missing from where it was expected.
  CHECK(sim.run(ActionKind::GoTo, "LB") == Outcome::Ok);
  CHECK(has_fact(sim.feedback, SensorFact::Kind::ObjectMissing, "C1"));
}

TEST_CASE("blocked locations fail go-to and reveal themselves") {
  Sim sim(iva_blocked());
  CHECK(sim.run(ActionKind::GoTo, "LE") == Outcome::Failed);
  CHECK(sim.robot.at == "LA");
  CHECK(has_fact(sim.feedback, SensorFact::Kind::LocationBlocked, "LE"));
  CHECK(sim.feedback.text.find("cannot reach LE") != std::string::npos);
}

TEST_CASE("closed containers guard their contents") {
  Sim sim(iva());
  CHECK(sim.run(ActionKind::GoTo, "LD") == Outcome::Ok);
  CHECK(has_fact(sim.feedback, SensorFact::Kind::DoorState, "fridge"));
  CHECK_FALSE(has_fact(sim.feedback, SensorFact::Kind::ObjectSeen, "W"));

  CHECK(sim.run(ActionKind::PickUp, "W") == Outcome::Failed);
  CHECK(sim.feedback.text.find("closed") != std::string::npos);

  CHECK(sim.run(ActionKind::OpenDoor, "fridge") == Outcome::Ok);
  CHECK(sim.world.find_container("fridge")->open);
  CHECK(has_fact(sim.feedback, SensorFact::Kind::ObjectSeen, "W"));

  CHECK(sim.run(ActionKind::PickUp, "W") == Outcome::Ok);
  CHECK(sim.robot.holding == "W");

  // Doors open one-way; opening again is harmless.
  CHECK(sim.run(ActionKind::OpenDoor, "fridge") == Outcome::Ok);
}

TEST_CASE("domain failures are outcomes, not exceptions") {
  Sim sim(iva());
  CHECK(sim.run(ActionKind::PutDown) == Outcome::Failed);
  CHECK(sim.run(ActionKind::PickUp, "C1") == Outcome::Failed);  // C1 is at LB
  CHECK(has_fact(sim.feedback, SensorFact::Kind::ObjectMissing, "C1"));
  CHECK(sim.run(ActionKind::OpenDoor, "fridge") == Outcome::Failed);

  CHECK(sim.run(ActionKind::PickUp, "A") == Outcome::Ok);
  CHECK(sim.run(ActionKind::PickUp, "A") == Outcome::Failed);
  CHECK(sim.feedback.text.find("already holding") != std::string::npos);

  CHECK(sim.run(ActionKind::ReportFailure) == Outcome::Reported);
  CHECK(sim.run(ActionKind::DoNothing) == Outcome::Ok);
}

TEST_CASE("structurally invalid decisions throw") {
  Scenario s = iva();
  CHECK_THROWS_AS(apply(s.world, s.robot, {ActionKind::GoTo, ""}),
                  MalformedDecisionError);
  CHECK_THROWS_AS(apply(s.world, s.robot, {ActionKind::GoTo, "Mars"}),
                  UnresolvableTargetError);
  CHECK_THROWS_AS(apply(s.world, s.robot, {ActionKind::PickUp, "ghost"}),
                  UnresolvableTargetError);
  CHECK_THROWS_AS(apply(s.world, s.robot, {ActionKind::PutDown, "C1"}),
                  MalformedDecisionError);
  CHECK_THROWS_AS(apply(s.world, s.robot, {ActionKind::DoNothing, "LB"}),
                  MalformedDecisionError);
  CHECK_THROWS_AS(apply(s.world, s.robot, {ActionKind::OpenDoor, "C1"}),
                  UnresolvableTargetError);
}

TEST_CASE("ap matching resolves ids, classes and synonyms") {
  Scenario s = iva();
  CHECK(ap_satisfied(s.world, make_ap(1, ApAction::Deliver, "C1", "LB")));
  CHECK(ap_satisfied(s.world, make_ap(2, ApAction::Deliver, "Coke", "LB")));
  CHECK(ap_satisfied(s.world, make_ap(3, ApAction::Deliver, "coke", "LE")));
  CHECK(ap_satisfied(s.world, make_ap(4, ApAction::Bring, "a drink", "LD")));
  CHECK(ap_satisfied(s.world, make_ap(5, ApAction::Bring, "A Drink", "LB")));
  CHECK_FALSE(ap_satisfied(s.world, make_ap(6, ApAction::Bring, "a drink", "LG")));
  CHECK_FALSE(ap_satisfied(s.world, make_ap(7, ApAction::Move, "Pen", "LA")));

  std::vector<AtomicProposition> aps = {
      make_ap(1, ApAction::Deliver, "C1", "LB"),
      make_ap(2, ApAction::Move, "Pen", "LG"),
      make_ap(3, ApAction::Move, "Apple", "LB"),
  };
  CHECK(word_symbol(s.world, aps) == 0b011);
}

TEST_CASE("figure environment replay satisfies the two-delivery mission") {
  Scenario s = load_scenario(kDataDir + "/scenarios/fig_env.json");
  std::vector<AtomicProposition> aps = {
      make_ap(1, ApAction::Deliver, "Coke", "x3"),
      make_ap(2, ApAction::Deliver, "Water Bottle", "x3"),
  };
  std::vector<Decision> replay = {
      {ActionKind::GoTo, "x1"},   {ActionKind::PickUp, "coke1"},
      {ActionKind::GoTo, "x3"},   {ActionKind::PutDown, ""},
      {ActionKind::GoTo, "x4"},   {ActionKind::PickUp, "water1"},
      {ActionKind::GoTo, "x3"},   {ActionKind::PutDown, ""},
  };

  Sim sim(s);
  std::vector<Symbol> word;
  for (const Decision& d : replay) {
    REQUIRE(sim.run(d.action, d.target) == Outcome::Ok);
    word.push_back(word_symbol(sim.world, aps));
  }
  CHECK(word[2] == 0);  // still holding the coke at x3
  CHECK(word[3] == 0b01);
  CHECK(word[7] == 0b11);

  Formula f = parse_ltl("F p1 & F p2", aps);
  CHECK(to_dfa(f).accepts(word));
}
