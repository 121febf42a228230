#pragma once

// MCQA scorers: softmax confidences g(s|l) over the fixed decision set.
// The oracle plans against the ground-truth world; the noisy scorer wraps it
// with seeded perturbations as a desk-scale stand-in for a remote LLM.

#include <cstdint>
#include <functional>
#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "ltlplan/prompt.hpp"

namespace ltlplan {

struct ScoreVector {
  std::vector<double> raw;      // scorer-specific raw scores r(s|l)
  std::vector<double> softmax;  // positive, sums to 1
  int argmax = 0;               // ties broken toward the lowest index

  int size() const { return static_cast<int>(raw.size()); }
};

// Softmax with temperature; ties in argmax break toward the lowest index.
ScoreVector make_score_vector(std::vector<double> raw, double temperature = 1.0);

struct ScorerUnavailableError : std::runtime_error {
  ScorerUnavailableError(const std::string& what, int http_status = 0);
  int http_status;
};

class Scorer {
 public:
  virtual ~Scorer() = default;
  virtual ScoreVector score(const PromptContext& prompt,
                            const DecisionSet& decisions) const = 0;
  virtual std::string name() const = 0;
};

using ScorerPtr = std::shared_ptr<const Scorer>;

struct NoPlanWithinBudgetError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Breadth-first search over (robot, world) states for a shortest decision
// sequence achieving ap_satisfied(next_ap) while no forbidden AP is true at
// any strict prefix; padded with do-nothing to exactly T decisions. Ties
// break in decision-set order. Throws NoPlanWithinBudget.
std::vector<Decision> oracle_plan(const World& world, const RobotState& robot,
                                  const SubtaskAssignment& assignment,
                                  int t_budget);

// The oracle's next decision from the prompt's embedded world snapshot:
// first step of a fresh oracle_plan, do-nothing once the sub-task is already
// satisfied, report-failure when no plan exists within the remaining budget.
int oracle_decision(const PromptContext& prompt, const DecisionSet& decisions);

class UniformScorer : public Scorer {
 public:
  ScoreVector score(const PromptContext&, const DecisionSet&) const override;
  std::string name() const override { return "uniform"; }
};

class OracleScorer : public Scorer {
 public:
  explicit OracleScorer(double confidence_raw = 8.0)
      : confidence_raw_(confidence_raw) {}
  ScoreVector score(const PromptContext&, const DecisionSet&) const override;
  std::string name() const override { return "oracle"; }

 private:
  double confidence_raw_;  // raw score of the oracle decision (others 0)
};

struct NoiseParams {
  double temperature = 0.25;  // sd of the per-decision raw-score jitter
  double confusion = 0.0;     // P(one distractor is near-tied with the truth)
  double confusion_spread = 0.35;  // sd of the confused distractor's offset
  double hallucination = 0.0; // P(the truth's raw score is suppressed)
  double softmax_temperature = 1.0;  // >1 flattens g toward LLM-like spreads
  std::uint64_t seed = 0;
};

// Customizable ground-truth hook so the flat baseline can substitute its own
// (deliberately weaker) notion of the correct decision.
using TruthFn = std::function<int(const PromptContext&, const DecisionSet&)>;

// Oracle scores perturbed per step. The RNG is re-seeded from
// (seed, prompt digest), so scoring is a pure function of its inputs and
// safe to call concurrently.
class NoisyScorer : public Scorer {
 public:
  explicit NoisyScorer(NoiseParams params, TruthFn truth = nullptr);
  ScoreVector score(const PromptContext&, const DecisionSet&) const override;
  std::string name() const override { return "noisy"; }
  const NoiseParams& params() const { return params_; }

 private:
  NoiseParams params_;
  TruthFn truth_;
  double confidence_raw_ = 8.0;
};

}  // namespace ltlplan
