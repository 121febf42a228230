#include "ltlplan/conformal.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "json.hpp"

namespace ltlplan {

double nonconformity_vanilla(const ScoreVector& scores, int truth_index) {
  return 1.0 - scores.softmax[truth_index];
}

namespace {

// Descending-softmax order with ties toward the lower decision index.
std::vector<int> rank_order(const std::vector<double>& softmax) {
  std::vector<int> order(softmax.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return softmax[a] > softmax[b];
  });
  return order;
}

}  // namespace

double nonconformity_raps(const ScoreVector& scores, int truth_index,
                          const RapsParams& params) {
  std::vector<int> order = rank_order(scores.softmax);
  double mass_above = 0.0;
  int rank = 0;
  for (std::size_t k = 0; k < order.size(); ++k) {
    if (order[k] == truth_index) {
      rank = static_cast<int>(k) + 1;
      break;
    }
    mass_above += scores.softmax[order[k]];
  }
  return mass_above + scores.softmax[truth_index] +
         params.lambda * std::max(0, rank - params.k_reg);
}

CalibrationModel calibrate(const CalibrationSet& set) {
  if (set.points.empty()) {
    throw EmptyCalibrationError("calibration set has no points");
  }
  int num_decisions = 0;
  std::vector<double> sequence_scores;
  sequence_scores.reserve(set.points.size());
  for (const CalibPoint& point : set.points) {
    if (point.steps.empty()) {
      throw EmptyCalibrationError("calibration point has no steps");
    }
    double worst = 0.0;
    for (const CalibStep& step : point.steps) {
      ScoreVector v;
      v.softmax = step.softmax;
      num_decisions = std::max(num_decisions,
                               static_cast<int>(step.softmax.size()));
      double r = set.method == CpMethod::Vanilla
                     ? nonconformity_vanilla(v, step.truth_index)
                     : nonconformity_raps(v, step.truth_index, set.raps);
      worst = std::max(worst, r);
    }
    sequence_scores.push_back(worst);
  }
  std::sort(sequence_scores.begin(), sequence_scores.end());

  CalibrationModel model;
  model.method = set.method;
  model.alpha = set.alpha;
  model.raps = set.raps;
  model.n = static_cast<int>(sequence_scores.size());

  // ceil((N+1)(1-alpha))-th smallest; past the sample -> full-set sentinel.
  int index = static_cast<int>(
      std::ceil((model.n + 1) * (1.0 - set.alpha) - 1e-9));
  if (index > model.n) {
    model.degenerate = true;
    model.q_bar = set.method == CpMethod::Vanilla
                      ? 1.0
                      : 1.0 + set.raps.lambda * num_decisions;
  } else {
    model.q_bar = sequence_scores[std::max(0, index - 1)];
  }
  return model;
}

PredictionSet predict_set(const CalibrationModel& model,
                          const ScoreVector& scores, int step_index) {
  PredictionSet set;
  set.step_index = step_index;
  const int n = scores.size();
  if (model.degenerate) {
    set.members.resize(n);
    std::iota(set.members.begin(), set.members.end(), 0);
    set.singleton = n == 1;
    return set;
  }

  if (model.method == CpMethod::Vanilla) {
    for (int s = 0; s < n; ++s) {
      if (scores.softmax[s] > 1.0 - model.q_bar) set.members.push_back(s);
    }
  } else {
    std::vector<int> order = rank_order(scores.softmax);
    double cumulative = 0.0;
    for (std::size_t k = 0; k < order.size(); ++k) {
      cumulative += scores.softmax[order[k]];
      double stat = cumulative + model.raps.lambda *
                                     std::max<int>(0, static_cast<int>(k) + 1 -
                                                          model.raps.k_reg);
      if (stat > model.q_bar) break;
      set.members.push_back(order[k]);
    }
    std::sort(set.members.begin(), set.members.end());
  }

  if (set.members.empty()) set.members.push_back(scores.argmax);
  set.singleton = set.members.size() == 1;
  return set;
}

std::vector<PredictionSet> causal_sets(const CalibrationModel& model,
                                       const std::vector<ScoreVector>& run) {
  std::vector<PredictionSet> sets;
  sets.reserve(run.size());
  for (std::size_t t = 0; t < run.size(); ++t) {
    sets.push_back(predict_set(model, run[t], static_cast<int>(t)));
  }
  return sets;
}

bool label(const std::vector<PredictionSet>& sets) {
  return std::all_of(sets.begin(), sets.end(),
                     [](const PredictionSet& s) { return s.singleton; });
}

double joint_confidence(double alpha, int k) {
  return std::pow(1.0 - alpha, k);
}

namespace {

std::string method_name(CpMethod method) {
  return method == CpMethod::Vanilla ? "vanilla" : "raps";
}

CpMethod method_from_name(const std::string& name) {
  if (name == "vanilla") return CpMethod::Vanilla;
  if (name == "raps") return CpMethod::Raps;
  throw EmptyCalibrationError("unknown conformal method: " + name);
}

}  // namespace

std::string calibration_set_to_json(const CalibrationSet& set) {
  nlohmann::ordered_json j;
  j["method"] = method_name(set.method);
  j["alpha"] = set.alpha;
  j["raps"] = {{"lambda", set.raps.lambda}, {"k_reg", set.raps.k_reg}};
  auto& points = j["points"] = nlohmann::ordered_json::array();
  for (const CalibPoint& point : set.points) {
    auto steps = nlohmann::ordered_json::array();
    for (const CalibStep& step : point.steps) {
      steps.push_back({{"digest", std::to_string(step.prompt_digest)},
                       {"truth", step.truth_index},
                       {"softmax", step.softmax}});
    }
    points.push_back({{"steps", std::move(steps)}});
  }
  return j.dump(2);
}

CalibrationSet calibration_set_from_json(const std::string& json_text) {
  nlohmann::json j = nlohmann::json::parse(json_text);
  CalibrationSet set;
  set.method = method_from_name(j.at("method").get<std::string>());
  set.alpha = j.at("alpha").get<double>();
  set.raps.lambda = j.at("raps").at("lambda").get<double>();
  set.raps.k_reg = j.at("raps").at("k_reg").get<int>();
  for (const auto& pj : j.at("points")) {
    CalibPoint point;
    for (const auto& sj : pj.at("steps")) {
      CalibStep step;
      step.prompt_digest = std::stoull(sj.at("digest").get<std::string>());
      step.truth_index = sj.at("truth").get<int>();
      step.softmax = sj.at("softmax").get<std::vector<double>>();
      point.steps.push_back(std::move(step));
    }
    set.points.push_back(std::move(point));
  }
  return set;
}

std::string model_to_json(const CalibrationModel& model) {
  nlohmann::ordered_json j;
  j["method"] = method_name(model.method);
  j["alpha"] = model.alpha;
  j["q_bar"] = model.q_bar;
  j["raps"] = {{"lambda", model.raps.lambda}, {"k_reg", model.raps.k_reg}};
  j["n"] = model.n;
  j["degenerate"] = model.degenerate;
  return j.dump(2);
}

CalibrationModel model_from_json(const std::string& json_text) {
  nlohmann::json j = nlohmann::json::parse(json_text);
  CalibrationModel model;
  model.method = method_from_name(j.at("method").get<std::string>());
  model.alpha = j.at("alpha").get<double>();
  model.q_bar = j.at("q_bar").get<double>();
  model.raps.lambda = j.at("raps").at("lambda").get<double>();
  model.raps.k_reg = j.at("raps").at("k_reg").get<int>();
  model.n = j.at("n").get<int>();
  model.degenerate = j.at("degenerate").get<bool>();
  return model;
}

}  // namespace ltlplan
