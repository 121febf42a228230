#include "ltlplan/scorer.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <utility>

#include "rng_util.hpp"

namespace ltlplan {

ScoreVector make_score_vector(std::vector<double> raw, double temperature) {
  ScoreVector v;
  v.raw = std::move(raw);
  v.softmax.resize(v.raw.size());
  if (v.raw.empty()) return v;
  if (temperature <= 0.0) temperature = 1e-9;

  double best = v.raw[0];
  v.argmax = 0;
  for (std::size_t i = 1; i < v.raw.size(); ++i) {
    if (v.raw[i] > best) {
      best = v.raw[i];
      v.argmax = static_cast<int>(i);
    }
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < v.raw.size(); ++i) {
    v.softmax[i] = std::exp((v.raw[i] - best) / temperature);
    sum += v.softmax[i];
  }
  for (double& g : v.softmax) g /= sum;
  return v;
}

ScorerUnavailableError::ScorerUnavailableError(const std::string& what,
                                               int http_status)
    : std::runtime_error(what), http_status(http_status) {}

namespace {

std::string world_key(const World& world, const RobotState& robot) {
  std::ostringstream key;
  key << robot.at << '|' << robot.holding;
  for (const auto& obj : world.objects) {
    key << '|' << obj.true_loc << (obj.held ? '*' : '.') << obj.container;
  }
  for (const auto& c : world.containers) key << '|' << (c.open ? 'o' : 'c');
  return key.str();
}

}  // namespace

std::vector<Decision> oracle_plan(const World& world, const RobotState& robot,
                                  const SubtaskAssignment& assignment,
                                  int t_budget) {
  std::vector<Decision> plan;
  auto pad = [&plan, t_budget]() {
    while (static_cast<int>(plan.size()) < t_budget) {
      plan.push_back({ActionKind::DoNothing, ""});
    }
    return plan;
  };
  if (t_budget < 0) t_budget = 0;
  if (ap_satisfied(world, assignment.next_ap)) return pad();

  // Forbidden sub-tasks that already hold are standing conditions, not
  // obstacles the plan could avoid; the rest must stay false at every step.
  std::vector<AtomicProposition> forbidden;
  for (const auto& ap : assignment.forbidden_aps) {
    if (!ap_satisfied(world, ap)) forbidden.push_back(ap);
  }

  DecisionSet set = build_decision_set(world);
  struct Node {
    World world;
    RobotState robot;
    int parent = -1;
    int decision = -1;
    int depth = 0;
  };
  std::vector<Node> nodes;
  nodes.push_back({world, robot, -1, -1, 0});
  std::map<std::string, int> seen;
  seen.emplace(world_key(world, robot), 0);

  for (std::size_t i = 0; i < nodes.size(); ++i) {
    Node current = nodes[i];  // copy: nodes grows below
    if (current.depth >= t_budget) continue;
    for (int di = 0; di < set.size(); ++di) {
      const Decision& d = set.decisions[di];
      if (d.action == ActionKind::DoNothing ||
          d.action == ActionKind::ReportFailure) {
        continue;
      }
      ApplyResult r = apply(current.world, current.robot, d);
      if (r.outcome != Outcome::Ok) continue;
      bool derails = false;
      for (const auto& ap : forbidden) {
        if (ap_satisfied(r.world, ap)) {
          derails = true;
          break;
        }
      }
      if (derails) continue;
      std::string key = world_key(r.world, r.robot);
      if (!seen.emplace(std::move(key), static_cast<int>(nodes.size()))
               .second) {
        continue;
      }
      nodes.push_back({std::move(r.world), std::move(r.robot),
                       static_cast<int>(i), di, current.depth + 1});
      if (ap_satisfied(nodes.back().world, assignment.next_ap)) {
        for (int at = static_cast<int>(nodes.size()) - 1; at > 0;
             at = nodes[at].parent) {
          plan.push_back(set.decisions[nodes[at].decision]);
        }
        std::reverse(plan.begin(), plan.end());
        return pad();
      }
    }
  }
  throw NoPlanWithinBudgetError("no plan for [" + assignment.next_ap.nl_text +
                                "] within " + std::to_string(t_budget) +
                                " steps");
}

int oracle_decision(const PromptContext& prompt, const DecisionSet& decisions) {
  if (ap_satisfied(prompt.world, prompt.assignment.next_ap)) {
    return decisions.index_of({ActionKind::DoNothing, ""});
  }
  int remaining = prompt.step_budget - static_cast<int>(prompt.history.size());
  if (remaining > 0) {
    try {
      std::vector<Decision> plan =
          oracle_plan(prompt.world, prompt.robot, prompt.assignment, remaining);
      return decisions.index_of(plan.front());
    } catch (const NoPlanWithinBudgetError&) {
    }
  }
  return decisions.index_of({ActionKind::ReportFailure, ""});
}

ScoreVector UniformScorer::score(const PromptContext&,
                                 const DecisionSet& decisions) const {
  return make_score_vector(std::vector<double>(decisions.size(), 0.0));
}

ScoreVector OracleScorer::score(const PromptContext& prompt,
                                const DecisionSet& decisions) const {
  std::vector<double> raw(decisions.size(), 0.0);
  raw[oracle_decision(prompt, decisions)] = confidence_raw_;
  return make_score_vector(std::move(raw));
}

NoisyScorer::NoisyScorer(NoiseParams params, TruthFn truth)
    : params_(params), truth_(std::move(truth)) {}

ScoreVector NoisyScorer::score(const PromptContext& prompt,
                               const DecisionSet& decisions) const {
  int truth = truth_ ? truth_(prompt, decisions)
                     : oracle_decision(prompt, decisions);
  std::mt19937_64 rng(detail::mix64(params_.seed) ^
                      detail::mix64(prompt.digest()));

  std::vector<double> raw(decisions.size());
  for (double& r : raw) r = detail::gaussian(rng, 0.0, params_.temperature);

  bool hallucinated = detail::uniform01(rng) < params_.hallucination;
  if (hallucinated) {
    raw[truth] -= 2.0;  // the right answer sinks below the noise floor
  } else {
    raw[truth] += confidence_raw_;
  }
  if (decisions.size() > 1 && detail::uniform01(rng) < params_.confusion) {
    std::size_t d = detail::uniform_index(rng, decisions.size() - 1);
    if (static_cast<int>(d) >= truth) ++d;
    raw[d] = raw[truth] + detail::gaussian(rng, 0.0, params_.confusion_spread);
  }
  return make_score_vector(std::move(raw), params_.softmax_temperature);
}

}  // namespace ltlplan
