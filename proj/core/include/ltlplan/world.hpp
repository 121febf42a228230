#pragma once

// Deterministic semantic grid world: named locations, objects with true and
// expected positions, door-guarded containers, statically blocked locations,
// the six-action decision space, sensor feedback text, and the ground-truth
// AP checker used to label words over 2^AP.

#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "ltlplan/automaton.hpp"
#include "ltlplan/ltl.hpp"

namespace ltlplan {

struct SemanticObject {
  std::string id;           // e.g. "C1", "P", "Ca"
  std::string class_label;  // e.g. "Coke", "Pen", "Tin Can"
  std::string true_loc;
  std::string expected_loc;
  std::string container;    // container id the object sits inside, or ""
  bool held = false;        // true while in the robot's hand
};

struct Container {
  std::string id;        // e.g. "fridge"
  std::string kind;      // "fridge" | "drawer"
  std::string location;
  bool open = false;
};

struct Synonym {
  std::string descriptor;                // e.g. "a drink"
  std::vector<std::string> class_labels; // e.g. {"Coke", "Water Bottle"}
};

struct World {
  std::vector<std::string> locations;
  std::vector<SemanticObject> objects;
  std::vector<Container> containers;
  std::set<std::string> blocked;
  std::vector<Synonym> synonyms;

  bool has_location(const std::string& loc) const;
  const SemanticObject* find_object(const std::string& id) const;
  const Container* find_container(const std::string& id) const;
};

struct RobotState {
  std::string at;
  std::string holding;  // object id or ""
};

enum class ActionKind {
  GoTo = 1,        // (1, X): go to location X
  PickUp = 2,      // (2, X): pick up object X
  PutDown = 3,     // (3): put down the held object
  OpenDoor = 4,    // (4, X): open the door of container X
  DoNothing = 5,   // (5)
  ReportFailure = 6  // (6): report item missing / failure
};

struct Decision {
  ActionKind action = ActionKind::DoNothing;
  std::string target;  // location/object/container id; empty for (3),(5),(6)

  bool operator==(const Decision&) const = default;
};

enum class Outcome { Ok, Failed, Reported };

struct SensorFact {
  enum class Kind { ObjectSeen, ObjectMissing, DoorState, LocationBlocked };
  Kind kind;
  std::string subject;   // object class / container id / location
  std::string location;
  bool open = false;     // DoorState only
};

struct SensorFeedback {
  std::string text;  // deterministic rendering of facts
  std::vector<SensorFact> facts;
};

struct ApplyResult {
  World world;
  RobotState robot;
  SensorFeedback feedback;
  Outcome outcome = Outcome::Ok;
};

struct MalformedDecisionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct UnresolvableTargetError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ScenarioError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Executes one decision. Domain failures (blocked go-to, closed-container
// grab, pick while holding, put-down with empty hand, opening a remote door)
// are Outcome::Failed with explanatory feedback, never exceptions; only a
// structurally invalid decision throws. Feedback always reports the true
// object/door facts at the robot's resulting location.
ApplyResult apply(const World& world, const RobotState& robot,
                  const Decision& decision);

// True iff some object matching ap.target (object id, then class label, then
// synonym descriptor; case-insensitive) sits at ap.destination and is not in
// the robot's hand — a delivery counts once the object is put down.
bool ap_satisfied(const World& world, const AtomicProposition& ap);

// Ground-truth symbol: bit i set iff ap_satisfied(world, aps[i]).
Symbol word_symbol(const World& world,
                   const std::vector<AtomicProposition>& aps);

std::string render_feedback_text(const std::vector<SensorFact>& facts);

struct Scenario {
  std::string name;
  World world;
  RobotState robot;
};

Scenario load_scenario(const std::string& path);
Scenario scenario_from_json_text(const std::string& json_text);
std::string scenario_to_json(const Scenario& scenario);

}  // namespace ltlplan
