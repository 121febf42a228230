#pragma once

// Split conformal prediction over MCQA sequences: vanilla and deterministic
// RAPS nonconformity, the ceil((N+1)(1-alpha)) calibration quantile with a
// degenerate full-set sentinel, causal per-step prediction sets, and the
// singleton labeling function that gates DFA advancement.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "ltlplan/scorer.hpp"

namespace ltlplan {

enum class CpMethod { Vanilla, Raps };

struct RapsParams {
  double lambda = 0.01;
  int k_reg = 2;
};

struct CalibStep {
  std::uint64_t prompt_digest = 0;
  int truth_index = 0;              // ground-truth decision, index into S
  std::vector<double> softmax;      // g(.|l) over S at this step
};

struct CalibPoint {
  std::vector<CalibStep> steps;     // horizon H_i = steps.size() >= 1
};

struct CalibrationSet {
  std::vector<CalibPoint> points;
  CpMethod method = CpMethod::Vanilla;
  double alpha = 0.05;
  RapsParams raps;
};

struct CalibrationModel {
  CpMethod method = CpMethod::Vanilla;
  double alpha = 0.05;
  double q_bar = 0.0;
  RapsParams raps;
  int n = 0;
  bool degenerate = false;  // quantile index exceeded N: full-set sentinel
};

struct PredictionSet {
  std::vector<int> members;  // ascending decision indices, never empty
  int step_index = 0;
  bool singleton = false;
};

struct EmptyCalibrationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// r = 1 - g(truth | l).
double nonconformity_vanilla(const ScoreVector& scores, int truth_index);

// Deterministic RAPS: mass ranked strictly above the truth, plus g(truth),
// plus lambda * max(0, rank(truth) - k_reg); ranks are 1-based with ties
// broken toward the lower decision index.
double nonconformity_raps(const ScoreVector& scores, int truth_index,
                          const RapsParams& params);

// Sequence score: max per-step nonconformity (the min-confidence lifting);
// q_bar is the ceil((N+1)(1-alpha))-th smallest sequence score, or the
// degenerate sentinel when that index exceeds N.
CalibrationModel calibrate(const CalibrationSet& set);

// Vanilla: { s : g(s) > 1 - q_bar }. RAPS: decisions in rank order while the
// cumulative regularized mass stays <= q_bar. The argmax is always included;
// a degenerate model returns all of S.
PredictionSet predict_set(const CalibrationModel& model,
                          const ScoreVector& scores, int step_index);

// Per-step sets over a causally scored run (prompt at step t depends only on
// the past); the product of these sets equals the sequence-level set.
std::vector<PredictionSet> causal_sets(const CalibrationModel& model,
                                       const std::vector<ScoreVector>& run);

// True iff every set is a singleton (vacuously true for an empty list).
bool label(const std::vector<PredictionSet>& sets);

// (1 - alpha)^K: compounded coverage over a K-sub-task mission.
double joint_confidence(double alpha, int k);

std::string calibration_set_to_json(const CalibrationSet& set);
CalibrationSet calibration_set_from_json(const std::string& json_text);
std::string model_to_json(const CalibrationModel& model);
CalibrationModel model_from_json(const std::string& json_text);

}  // namespace ltlplan
