#include "ltlplan/prompt.hpp"

#include <sstream>

namespace ltlplan {

std::uint64_t fnv1a64(const std::string& text) {
  std::uint64_t hash = 14695981039346656037ull;
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 1099511628211ull;
  }
  return hash;
}

std::string decision_label(const Decision& decision) {
  switch (decision.action) {
    case ActionKind::GoTo: return "go to " + decision.target;
    case ActionKind::PickUp: return "pick up " + decision.target;
    case ActionKind::PutDown: return "put down the held object";
    case ActionKind::OpenDoor: return "open the " + decision.target + " door";
    case ActionKind::DoNothing: return "do nothing";
    case ActionKind::ReportFailure: return "report failure";
  }
  return "do nothing";
}

DecisionSet build_decision_set(const World& world) {
  DecisionSet set;
  auto add = [&set](ActionKind action, const std::string& target) {
    Decision d{action, target};
    set.labels.push_back(decision_label(d));
    set.decisions.push_back(std::move(d));
  };
  for (const auto& loc : world.locations) add(ActionKind::GoTo, loc);
  for (const auto& obj : world.objects) add(ActionKind::PickUp, obj.id);
  add(ActionKind::PutDown, "");
  for (const auto& c : world.containers) add(ActionKind::OpenDoor, c.id);
  add(ActionKind::DoNothing, "");
  add(ActionKind::ReportFailure, "");
  return set;
}

int DecisionSet::index_of(const Decision& decision) const {
  for (std::size_t i = 0; i < decisions.size(); ++i) {
    if (decisions[i] == decision) return static_cast<int>(i);
  }
  return -1;
}

namespace {

std::string render_environment(const World& world, const RobotState& robot) {
  std::ostringstream out;
  out << "Locations:";
  for (const auto& loc : world.locations) out << " " << loc;
  out << "\nRobot at " << robot.at;
  if (robot.holding.empty()) {
    out << ", hand empty.";
  } else {
    out << ", holding " << robot.holding << ".";
  }
  out << "\nSemantic map:";
  for (const auto& obj : world.objects) {
    out << "\n- " << obj.id << " (" << obj.class_label << ") expected at "
        << obj.expected_loc;
    if (!obj.container.empty()) out << " inside the " << obj.container;
  }
  for (const auto& c : world.containers) {
    out << "\n- " << c.id << " (" << c.kind << ") at " << c.location
        << ", door " << (c.open ? "open" : "closed");
  }
  return out.str();
}

std::string render_task(const SubtaskAssignment& assignment, int step_budget) {
  std::ostringstream out;
  out << "Current sub-task: " << assignment.next_ap.nl_text << ".";
  if (!assignment.forbidden_aps.empty()) {
    out << "\nDo not yet accomplish:";
    for (const auto& ap : assignment.forbidden_aps) {
      out << " [" << ap.nl_text << "]";
    }
  }
  out << "\nYou have " << step_budget << " steps.";
  return out.str();
}

}  // namespace

std::string PromptContext::render() const {
  std::ostringstream out;
  out << "[system]\n" << system << "\n";
  if (!one_shot.empty()) out << "[example]\n" << one_shot << "\n";
  out << "[environment]\n" << environment << "\n";
  out << "[task]\n" << task << "\n";
  out << "[history]\n";
  for (std::size_t i = 0; i < history.size(); ++i) {
    out << (i + 1) << ". " << history[i].decision_label;
    if (!history[i].sensor_text.empty()) {
      out << " -> " << history[i].sensor_text;
    }
    out << "\n";
  }
  out << "[options]\n";
  DecisionSet set = build_decision_set(world);
  for (std::size_t i = 0; i < set.labels.size(); ++i) {
    out << (i + 1) << ". " << set.labels[i] << "\n";
  }
  out << "[response]\n" << response_format << "\n";
  return out.str();
}

std::uint64_t PromptContext::digest() const { return fnv1a64(render()); }

PromptContext build_prompt(const SubtaskAssignment& assignment,
                           const World& world, const RobotState& robot,
                           const std::vector<HistoryStep>& history,
                           const PromptOptions& options) {
  PromptContext prompt;
  prompt.system =
      "You are a mobile manipulator choosing the next primitive action. "
      "Work toward the current sub-task without accomplishing any "
      "forbidden sub-task.";
  prompt.environment = render_environment(world, robot);
  prompt.task = render_task(assignment, options.step_budget);
  prompt.history = history;
  prompt.response_format =
      "Answer with the number of exactly one option.";
  prompt.one_shot = options.one_shot;
  prompt.world = world;
  prompt.robot = robot;
  prompt.assignment = assignment;
  prompt.step_budget = options.step_budget;
  return prompt;
}

}  // namespace ltlplan
