#include "ltlplan/world.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace ltlplan {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) {
    return static_cast<char>(std::tolower(c));
  });
  return s;
}

bool iequals(const std::string& a, const std::string& b) {
  return lower(a) == lower(b);
}

SemanticObject* find_object_mut(World& world, const std::string& id) {
  for (auto& obj : world.objects) {
    if (obj.id == id) return &obj;
  }
  return nullptr;
}

Container* find_container_mut(World& world, const std::string& id) {
  for (auto& c : world.containers) {
    if (c.id == id) return &c;
  }
  return nullptr;
}

bool object_visible_at(const World& world, const SemanticObject& obj,
                       const std::string& loc) {
  if (obj.held || obj.true_loc != loc) return false;
  if (obj.container.empty()) return true;
  const Container* c = world.find_container(obj.container);
  return c != nullptr && c->open;
}

// True object/door facts at the robot's resulting location.
void sense_location(const World& world, const std::string& loc,
                    std::vector<SensorFact>& facts) {
  for (const auto& obj : world.objects) {
    if (object_visible_at(world, obj, loc)) {
      facts.push_back({SensorFact::Kind::ObjectSeen,
                       obj.id + " (" + obj.class_label + ")", loc, false});
    } else if (!obj.held && obj.expected_loc == loc && obj.true_loc != loc) {
      facts.push_back({SensorFact::Kind::ObjectMissing,
                       obj.id + " (" + obj.class_label + ")", loc, false});
    }
  }
  for (const auto& c : world.containers) {
    if (c.location == loc) {
      facts.push_back({SensorFact::Kind::DoorState, c.id, loc, c.open});
    }
  }
}

}  // namespace

bool World::has_location(const std::string& loc) const {
  return std::find(locations.begin(), locations.end(), loc) != locations.end();
}

const SemanticObject* World::find_object(const std::string& id) const {
  for (const auto& obj : objects) {
    if (obj.id == id) return &obj;
  }
  return nullptr;
}

const Container* World::find_container(const std::string& id) const {
  for (const auto& c : containers) {
    if (c.id == id) return &c;
  }
  return nullptr;
}

std::string render_feedback_text(const std::vector<SensorFact>& facts) {
  std::string out;
  for (const SensorFact& fact : facts) {
    if (!out.empty()) out += "; ";
    switch (fact.kind) {
      case SensorFact::Kind::ObjectSeen:
        out += fact.subject + " at " + fact.location;
        break;
      case SensorFact::Kind::ObjectMissing:
        out += fact.subject + " missing from " + fact.location;
        break;
      case SensorFact::Kind::DoorState:
        out += fact.subject + " door at " + fact.location +
               (fact.open ? " is open" : " is closed");
        break;
      case SensorFact::Kind::LocationBlocked:
        out += fact.location + " is blocked";
        break;
    }
  }
  return out;
}

ApplyResult apply(const World& world, const RobotState& robot,
                  const Decision& decision) {
  ApplyResult result;
  result.world = world;
  result.robot = robot;
  result.outcome = Outcome::Ok;
  std::string note;

  switch (decision.action) {
    case ActionKind::GoTo: {
      if (decision.target.empty()) {
        throw MalformedDecisionError("go-to requires a location");
      }
      if (!world.has_location(decision.target)) {
        throw UnresolvableTargetError("unknown location " + decision.target);
      }
      if (world.blocked.count(decision.target)) {
        result.outcome = Outcome::Failed;
        note = "cannot reach " + decision.target;
        result.feedback.facts.push_back({SensorFact::Kind::LocationBlocked,
                                         decision.target, decision.target,
                                         false});
      } else {
        result.robot.at = decision.target;
        if (!robot.holding.empty()) {
          find_object_mut(result.world, robot.holding)->true_loc =
              decision.target;
        }
      }
      break;
    }
    case ActionKind::PickUp: {
      if (decision.target.empty()) {
        throw MalformedDecisionError("pick-up requires an object");
      }
      const SemanticObject* obj = world.find_object(decision.target);
      if (obj == nullptr) {
        throw UnresolvableTargetError("unknown object " + decision.target);
      }
      if (!robot.holding.empty()) {
        result.outcome = Outcome::Failed;
        note = "already holding " + robot.holding;
      } else if (obj->true_loc != robot.at || obj->held) {
        result.outcome = Outcome::Failed;
        note = obj->id + " is not here";
        result.feedback.facts.push_back(
            {SensorFact::Kind::ObjectMissing,
             obj->id + " (" + obj->class_label + ")", robot.at, false});
      } else if (!obj->container.empty() &&
                 !world.find_container(obj->container)->open) {
        result.outcome = Outcome::Failed;
        note = obj->id + " is inside the closed " + obj->container;
      } else {
        SemanticObject* target = find_object_mut(result.world, obj->id);
        target->held = true;
        target->container.clear();
        result.robot.holding = obj->id;
      }
      break;
    }
    case ActionKind::PutDown: {
      if (!decision.target.empty()) {
        throw MalformedDecisionError("put-down takes no target");
      }
      if (robot.holding.empty()) {
        result.outcome = Outcome::Failed;
        note = "not holding anything";
      } else {
        SemanticObject* obj = find_object_mut(result.world, robot.holding);
        obj->held = false;
        obj->true_loc = robot.at;
        result.robot.holding.clear();
      }
      break;
    }
    case ActionKind::OpenDoor: {
      if (decision.target.empty()) {
        throw MalformedDecisionError("open-door requires a container");
      }
      const Container* c = world.find_container(decision.target);
      if (c == nullptr) {
        throw UnresolvableTargetError("unknown container " + decision.target);
      }
      if (c->location != robot.at) {
        result.outcome = Outcome::Failed;
        note = c->id + " is not at " + robot.at;
      } else {
        find_container_mut(result.world, c->id)->open = true;
      }
      break;
    }
    case ActionKind::DoNothing: {
      if (!decision.target.empty()) {
        throw MalformedDecisionError("do-nothing takes no target");
      }
      break;
    }
    case ActionKind::ReportFailure: {
      if (!decision.target.empty()) {
        throw MalformedDecisionError("report-failure takes no target");
      }
      result.outcome = Outcome::Reported;
      break;
    }
    default:
      throw MalformedDecisionError("unknown action");
  }

  sense_location(result.world, result.robot.at, result.feedback.facts);
  auto& facts = result.feedback.facts;
  for (std::size_t i = 0; i < facts.size(); ++i) {
    for (std::size_t k = i + 1; k < facts.size(); ++k) {
      if (facts[i].kind == facts[k].kind &&
          facts[i].subject == facts[k].subject &&
          facts[i].location == facts[k].location) {
        facts.erase(facts.begin() + k);
        --k;
      }
    }
  }
  std::string fact_text = render_feedback_text(result.feedback.facts);
  if (note.empty()) {
    result.feedback.text = fact_text;
  } else if (fact_text.empty()) {
    result.feedback.text = note;
  } else {
    result.feedback.text = note + "; " + fact_text;
  }
  return result;
}

bool ap_satisfied(const World& world, const AtomicProposition& ap) {
  const Synonym* synonym = nullptr;
  for (const auto& s : world.synonyms) {
    if (iequals(s.descriptor, ap.target)) {
      synonym = &s;
      break;
    }
  }
  for (const auto& obj : world.objects) {
    bool matches = iequals(obj.id, ap.target) ||
                   iequals(obj.class_label, ap.target);
    if (!matches && synonym != nullptr) {
      matches = std::any_of(synonym->class_labels.begin(),
                            synonym->class_labels.end(),
                            [&](const std::string& label) {
                              return iequals(obj.class_label, label);
                            });
    }
    if (matches && !obj.held && obj.true_loc == ap.destination) return true;
  }
  return false;
}

Symbol word_symbol(const World& world,
                   const std::vector<AtomicProposition>& aps) {
  Symbol symbol = 0;
  for (std::size_t i = 0; i < aps.size(); ++i) {
    if (ap_satisfied(world, aps[i])) symbol |= Symbol{1} << i;
  }
  return symbol;
}

namespace {

Scenario scenario_from_json(const nlohmann::json& j) {
  Scenario scenario;
  scenario.name = j.value("name", "");
  World& world = scenario.world;

  for (const auto& loc : j.at("locations")) {
    world.locations.push_back(loc.get<std::string>());
  }
  for (const auto& cj : j.value("containers", nlohmann::json::array())) {
    Container c;
    c.id = cj.at("id").get<std::string>();
    c.kind = cj.value("kind", "container");
    c.location = cj.at("location").get<std::string>();
    c.open = cj.value("open", false);
    if (!world.has_location(c.location)) {
      throw ScenarioError("container " + c.id + " at unknown location " +
                          c.location);
    }
    world.containers.push_back(std::move(c));
  }
  for (const auto& oj : j.at("objects")) {
    SemanticObject obj;
    obj.id = oj.at("id").get<std::string>();
    obj.class_label = oj.at("class").get<std::string>();
    obj.true_loc = oj.at("loc").get<std::string>();
    obj.expected_loc = oj.value("expected_loc", obj.true_loc);
    obj.container = oj.value("container", "");
    obj.held = oj.value("held", false);
    if (!world.has_location(obj.true_loc)) {
      throw ScenarioError("object " + obj.id + " at unknown location " +
                          obj.true_loc);
    }
    if (!world.has_location(obj.expected_loc)) {
      throw ScenarioError("object " + obj.id + " expected at unknown location " +
                          obj.expected_loc);
    }
    if (!obj.container.empty()) {
      const Container* c = nullptr;
      for (const auto& cand : world.containers) {
        if (cand.id == obj.container) c = &cand;
      }
      if (c == nullptr) {
        throw ScenarioError("object " + obj.id + " in unknown container " +
                            obj.container);
      }
      if (c->location != obj.true_loc) {
        throw ScenarioError("object " + obj.id + " not at its container's location");
      }
    }
    world.objects.push_back(std::move(obj));
  }
  for (const auto& loc : j.value("blocked", nlohmann::json::array())) {
    std::string b = loc.get<std::string>();
    if (!world.has_location(b)) {
      throw ScenarioError("blocked location " + b + " is not declared");
    }
    world.blocked.insert(std::move(b));
  }
  for (const auto& sj : j.value("synonyms", nlohmann::json::array())) {
    Synonym s;
    s.descriptor = sj.at("descriptor").get<std::string>();
    for (const auto& label : sj.at("classes")) {
      s.class_labels.push_back(label.get<std::string>());
    }
    world.synonyms.push_back(std::move(s));
  }

  scenario.robot.at = j.at("robot").at("at").get<std::string>();
  scenario.robot.holding = j.at("robot").value("holding", "");
  if (!world.has_location(scenario.robot.at)) {
    throw ScenarioError("robot at unknown location " + scenario.robot.at);
  }
  if (!scenario.robot.holding.empty() &&
      world.find_object(scenario.robot.holding) == nullptr) {
    throw ScenarioError("robot holding unknown object " +
                        scenario.robot.holding);
  }
  return scenario;
}

}  // namespace

Scenario scenario_from_json_text(const std::string& json_text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::exception& e) {
    throw ScenarioError(std::string("invalid scenario JSON: ") + e.what());
  }
  try {
    return scenario_from_json(j);
  } catch (const nlohmann::json::exception& e) {
    throw ScenarioError(std::string("scenario missing field: ") + e.what());
  }
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("cannot open scenario file " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return scenario_from_json_text(buffer.str());
}

std::string scenario_to_json(const Scenario& scenario) {
  nlohmann::ordered_json j;
  j["name"] = scenario.name;
  j["locations"] = scenario.world.locations;
  j["robot"] = {{"at", scenario.robot.at},
                {"holding", scenario.robot.holding}};
  auto& objects = j["objects"] = nlohmann::ordered_json::array();
  for (const auto& obj : scenario.world.objects) {
    nlohmann::ordered_json oj;
    oj["id"] = obj.id;
    oj["class"] = obj.class_label;
    oj["loc"] = obj.true_loc;
    oj["expected_loc"] = obj.expected_loc;
    if (!obj.container.empty()) oj["container"] = obj.container;
    if (obj.held) oj["held"] = true;
    objects.push_back(std::move(oj));
  }
  auto& containers = j["containers"] = nlohmann::ordered_json::array();
  for (const auto& c : scenario.world.containers) {
    containers.push_back({{"id", c.id},
                          {"kind", c.kind},
                          {"location", c.location},
                          {"open", c.open}});
  }
  j["blocked"] = scenario.world.blocked;
  auto& synonyms = j["synonyms"] = nlohmann::ordered_json::array();
  for (const auto& s : scenario.world.synonyms) {
    synonyms.push_back(
        {{"descriptor", s.descriptor}, {"classes", s.class_labels}});
  }
  return j.dump(2);
}

}  // namespace ltlplan
