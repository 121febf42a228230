#pragma once

// Five-part prompt record (system, environment, task, history, response
// format) plus the fixed decision set S. The record stays structured — local
// scorers read the embedded world snapshot; only the remote scorer renders
// it to text.

#include <cstdint>
#include <string>
#include <vector>

#include "ltlplan/task_automaton.hpp"
#include "ltlplan/world.hpp"

namespace ltlplan {

// The fixed, ordered decision set S for a world: one go-to per location, one
// pick-up per object, put-down, one open-door per container, do-nothing,
// report-failure — in that order, following scenario declaration order.
struct DecisionSet {
  std::vector<Decision> decisions;
  std::vector<std::string> labels;  // "go to LB", "pick up C1", ...

  int size() const { return static_cast<int>(decisions.size()); }
  // Index of a decision in S, or -1.
  int index_of(const Decision& decision) const;
};

DecisionSet build_decision_set(const World& world);
std::string decision_label(const Decision& decision);

struct HistoryStep {
  Decision decision;
  std::string decision_label;
  std::string sensor_text;
};

struct PromptOptions {
  int step_budget = 7;
  std::string one_shot;  // static example block, included verbatim
};

struct PromptContext {
  // Rendered parts (1)-(5).
  std::string system;
  std::string environment;
  std::string task;
  std::vector<HistoryStep> history;
  std::string response_format;
  std::string one_shot;

  // Structured payload for local scorers.
  World world;
  RobotState robot;
  SubtaskAssignment assignment;
  int step_budget = 7;

  std::string render() const;       // deterministic full prompt text
  std::uint64_t digest() const;     // FNV-1a of render()
};

// Builds the prompt for one scoring step. History is empty at sub-task start
// and grows by one (decision, sensor text) pair per executed step:
// h(t+1) = h(t) + s(t) + p(t+1).
PromptContext build_prompt(const SubtaskAssignment& assignment,
                           const World& world, const RobotState& robot,
                           const std::vector<HistoryStep>& history,
                           const PromptOptions& options);

std::uint64_t fnv1a64(const std::string& text);

}  // namespace ltlplan
