#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "ltlplan/conformal.hpp"

using namespace ltlplan;

namespace {

ScoreVector sv(std::vector<double> softmax) {
  ScoreVector v;
  v.raw = softmax;
  v.softmax = std::move(softmax);
  v.argmax = 0;
  for (std::size_t i = 1; i < v.softmax.size(); ++i) {
    if (v.softmax[i] > v.softmax[v.argmax]) v.argmax = static_cast<int>(i);
  }
  return v;
}

// One single-step calibration point with an exact vanilla score of r:
// g(truth) = 1 - r over a two-way softmax.
CalibPoint vanilla_point(double r) {
  CalibPoint p;
  p.steps.push_back({0, 0, {1.0 - r, r}});
  return p;
}

CalibrationSet vanilla_set(const std::vector<double>& scores, double alpha) {
  CalibrationSet set;
  set.alpha = alpha;
  for (double r : scores) set.points.push_back(vanilla_point(r));
  return set;
}

}  // namespace

TEST_CASE("vanilla nonconformity is one minus the truth confidence") {
  ScoreVector uniform18 = sv(std::vector<double>(18, 1.0 / 18));
  CHECK(nonconformity_vanilla(uniform18, 4) ==
        doctest::Approx(17.0 / 18).epsilon(1e-12));
  CHECK(nonconformity_vanilla(sv({0.9, 0.1}), 0) == doctest::Approx(0.1));
}

TEST_CASE("raps nonconformity stacks mass, truth and rank penalty") {
  RapsParams no_reg{0.0, 0};
  // Uniform over four options, truth ranked third by index tie-breaking.
  CHECK(nonconformity_raps(sv({0.25, 0.25, 0.25, 0.25}), 2, no_reg) ==
        doctest::Approx(0.75));

  RapsParams params{0.1, 2};
  // softmax (0.5, 0.3, 0.2): truth at rank 3 pays one lambda.
  CHECK(nonconformity_raps(sv({0.5, 0.3, 0.2}), 2, params) ==
        doctest::Approx(1.0 + 0.1));
  CHECK(nonconformity_raps(sv({0.5, 0.3, 0.2}), 0, params) ==
        doctest::Approx(0.5));
  CHECK(nonconformity_raps(sv({0.5, 0.3, 0.2}), 1, params) ==
        doctest::Approx(0.8));
}

TEST_CASE("calibration quantile picks the ceil((N+1)(1-alpha)) order statistic") {
  // Fifty distinct scores 0.01 .. 0.50: index ceil(51 * 0.95) = 49.
  std::vector<double> scores;
  for (int i = 1; i <= 50; ++i) scores.push_back(i / 100.0);
  CalibrationModel model = calibrate(vanilla_set(scores, 0.05));
  CHECK(model.n == 50);
  CHECK_FALSE(model.degenerate);
  CHECK(model.q_bar == doctest::Approx(0.49));

  // N=19 at alpha=0.05 lands exactly on the largest score.
  scores.assign(19, 0.0);
  for (int i = 0; i < 19; ++i) scores[i] = (i + 1) / 20.0;
  model = calibrate(vanilla_set(scores, 0.05));
  CHECK_FALSE(model.degenerate);
  CHECK(model.q_bar == doctest::Approx(0.95));

  // N=99 at alpha=0.10: ceil(100 * 0.9) = 90.
  scores.clear();
  for (int i = 1; i <= 99; ++i) scores.push_back(i / 1000.0);
  model = calibrate(vanilla_set(scores, 0.10));
  CHECK(model.q_bar == doctest::Approx(0.090));
}

TEST_CASE("too-small calibration sets degenerate to the full set") {
  CalibrationModel model =
      calibrate(vanilla_set({0.1, 0.2, 0.3, 0.4}, 0.05));
  CHECK(model.degenerate);
  CHECK(model.n == 4);

  PredictionSet set = predict_set(model, sv({0.7, 0.2, 0.1}), 0);
  CHECK(set.members == std::vector<int>{0, 1, 2});
  CHECK_FALSE(set.singleton);
}

TEST_CASE("sequence score is the worst step") {
  CalibrationSet set;
  set.alpha = 0.5;
  CalibPoint p;
  p.steps.push_back({0, 0, {0.8, 0.2}});  // r = 0.2
  p.steps.push_back({0, 0, {0.3, 0.7}});  // r = 0.7
  p.steps.push_back({0, 0, {0.6, 0.4}});  // r = 0.4
  set.points.push_back(p);
  set.points.push_back(vanilla_point(0.1));

  // Scores {0.7, 0.1}; ceil(3 * 0.5) = 2nd smallest = 0.7.
  CalibrationModel model = calibrate(set);
  CHECK(model.q_bar == doctest::Approx(0.7));
}

TEST_CASE("empty calibration inputs throw") {
  CHECK_THROWS_AS(calibrate(CalibrationSet{}), EmptyCalibrationError);
  CalibrationSet set;
  set.points.push_back(CalibPoint{});
  CHECK_THROWS_AS(calibrate(set), EmptyCalibrationError);
}

TEST_CASE("vanilla prediction sets threshold confidence, never empty") {
  CalibrationModel model;
  model.method = CpMethod::Vanilla;
  model.q_bar = 0.3;

  PredictionSet set = predict_set(model, sv({0.75, 0.2, 0.05}), 2);
  CHECK(set.members == std::vector<int>{0});
  CHECK(set.singleton);
  CHECK(set.step_index == 2);

  set = predict_set(model, sv({0.5, 0.45, 0.05}), 0);
  CHECK(set.members == std::vector<int>{0});  // forced argmax

  model.q_bar = 0.6;
  set = predict_set(model, sv({0.5, 0.45, 0.05}), 0);
  CHECK(set.members == std::vector<int>{0, 1});
  CHECK_FALSE(set.singleton);
}

TEST_CASE("raps prediction sets are rank prefixes under the budget") {
  CalibrationModel model;
  model.method = CpMethod::Raps;
  model.raps = {0.0, 2};
  model.q_bar = 0.8;

  PredictionSet set = predict_set(model, sv({0.5, 0.3, 0.2}), 0);
  CHECK(set.members == std::vector<int>{0, 1});

  model.raps = {0.1, 1};  // second rank now pays lambda
  set = predict_set(model, sv({0.5, 0.3, 0.2}), 0);
  CHECK(set.members == std::vector<int>{0});

  model.raps = {0.0, 2};
  model.q_bar = 0.2;  // below even the top mass: forced argmax
  set = predict_set(model, sv({0.5, 0.3, 0.2}), 0);
  CHECK(set.members == std::vector<int>{0});

  // Rank order follows softmax with index tie-breaking, not index order.
  model.q_bar = 0.8;
  set = predict_set(model, sv({0.2, 0.3, 0.5}), 0);
  CHECK(set.members == std::vector<int>{1, 2});
}

TEST_CASE("causal per-step sets multiply out to the sequence-level set") {
  std::mt19937_64 rng(7);
  auto random_scores = [&rng](int n) {
    std::vector<double> raw(n);
    for (double& r : raw) {
      r = static_cast<double>(rng() >> 11) * 0x1p-53 * 6.0;
    }
    return make_score_vector(raw);
  };

  for (CpMethod method : {CpMethod::Vanilla, CpMethod::Raps}) {
    CalibrationModel model;
    model.method = method;
    model.raps = {0.05, 1};
    model.q_bar = 0.85;

    for (int trial = 0; trial < 50; ++trial) {
      std::vector<ScoreVector> run = {random_scores(4), random_scores(4),
                                      random_scores(4)};
      std::vector<PredictionSet> sets = causal_sets(model, run);
      REQUIRE(sets.size() == 3);

      // Brute-force sequence membership: max per-step nonconformity within
      // q_bar (RAPS inclusive, vanilla strict), argmax sequence forced.
      for (int s0 = 0; s0 < 4; ++s0) {
        for (int s1 = 0; s1 < 4; ++s1) {
          for (int s2 = 0; s2 < 4; ++s2) {
            int seq[3] = {s0, s1, s2};
            bool in_product = true;
            bool by_rule = true;
            bool is_argmax_seq = true;
            for (int t = 0; t < 3; ++t) {
              const auto& members = sets[t].members;
              in_product = in_product &&
                           std::find(members.begin(), members.end(), seq[t]) !=
                               members.end();
              double r = method == CpMethod::Vanilla
                             ? nonconformity_vanilla(run[t], seq[t])
                             : nonconformity_raps(run[t], seq[t], model.raps);
              by_rule = by_rule && (method == CpMethod::Vanilla
                                        ? r < model.q_bar
                                        : r <= model.q_bar);
              is_argmax_seq = is_argmax_seq && seq[t] == run[t].argmax;
            }
            // The forced-argmax floor only widens steps whose rule set came
            // out empty; for those steps membership equals being the argmax.
            bool expected = by_rule;
            if (!expected && in_product) {
              bool explained = true;
              for (int t = 0; t < 3; ++t) {
                const auto& members = sets[t].members;
                bool member = std::find(members.begin(), members.end(),
                                        seq[t]) != members.end();
                double r = method == CpMethod::Vanilla
                               ? nonconformity_vanilla(run[t], seq[t])
                               : nonconformity_raps(run[t], seq[t], model.raps);
                bool rule = method == CpMethod::Vanilla ? r < model.q_bar
                                                        : r <= model.q_bar;
                if (member && !rule) {
                  explained = explained && members.size() == 1 &&
                              seq[t] == run[t].argmax;
                }
              }
              expected = explained;
            }
            CHECK(in_product == expected);
          }
        }
      }
    }
  }
}

TEST_CASE("calibration coverage holds on exchangeable synthetic scores") {
  // Ground truth uniformly among five options; scorer puts a noisy bump on
  // it. Calibration and evaluation draw from the same process.
  std::mt19937_64 rng(2024);
  auto draw = [&rng](int truth) {
    std::vector<double> raw(5);
    for (double& r : raw) r = static_cast<double>(rng() >> 11) * 0x1p-53;
    raw[truth] += 1.0 + static_cast<double>(rng() >> 11) * 0x1p-53 * 2.0;
    return make_score_vector(raw);
  };

  for (CpMethod method : {CpMethod::Vanilla, CpMethod::Raps}) {
    CalibrationSet set;
    set.method = method;
    set.alpha = 0.05;
    set.raps = {0.01, 2};
    for (int i = 0; i < 200; ++i) {
      CalibPoint p;
      int steps = 1 + static_cast<int>(rng() % 3);
      for (int t = 0; t < steps; ++t) {
        int truth = static_cast<int>(rng() % 5);
        CalibStep step;
        step.truth_index = truth;
        step.softmax = draw(truth).softmax;
        p.steps.push_back(std::move(step));
      }
      set.points.push_back(std::move(p));
    }
    CalibrationModel model = calibrate(set);
    CHECK(model.q_bar >= 0.0);
    CHECK(model.q_bar <= 1.0 + set.raps.lambda * 5);

    int covered = 0;
    const int trials = 500;
    for (int i = 0; i < trials; ++i) {
      int steps = 1 + static_cast<int>(rng() % 3);
      bool all_in = true;
      for (int t = 0; t < steps; ++t) {
        int truth = static_cast<int>(rng() % 5);
        PredictionSet ps = predict_set(model, draw(truth), t);
        all_in = all_in && std::find(ps.members.begin(), ps.members.end(),
                                     truth) != ps.members.end();
      }
      covered += all_in ? 1 : 0;
    }
    // 1 - alpha minus three binomial sigmas at 500 trials.
    CHECK(static_cast<double>(covered) / trials >= 0.95 - 0.0293);
  }
}

TEST_CASE("joint confidence compounds per sub-task coverage") {
  CHECK(joint_confidence(0.05, 5) == doctest::Approx(0.7737809375));
  CHECK(joint_confidence(0.05, 1) == doctest::Approx(0.95));
  CHECK(joint_confidence(0.2, 0) == doctest::Approx(1.0));
}

TEST_CASE("calibration sets and models round-trip through JSON") {
  CalibrationSet set;
  set.method = CpMethod::Raps;
  set.alpha = 0.1;
  set.raps = {0.02, 3};
  CalibPoint p;
  p.steps.push_back({fnv1a64("prompt-a"), 2, {0.1, 0.2, 0.7}});
  p.steps.push_back({fnv1a64("prompt-b"), 0, {0.6, 0.3, 0.1}});
  set.points.push_back(p);
  set.points.push_back(vanilla_point(0.25));

  CalibrationSet back = calibration_set_from_json(calibration_set_to_json(set));
  CHECK(back.method == set.method);
  CHECK(back.alpha == set.alpha);
  CHECK(back.raps.k_reg == 3);
  REQUIRE(back.points.size() == 2);
  CHECK(back.points[0].steps[0].prompt_digest == fnv1a64("prompt-a"));
  CHECK(back.points[0].steps[1].softmax == std::vector<double>{0.6, 0.3, 0.1});

  CalibrationModel model = calibrate(set);
  CalibrationModel model_back = model_from_json(model_to_json(model));
  CHECK(model_back.method == model.method);
  CHECK(model_back.q_bar == doctest::Approx(model.q_bar));
  CHECK(model_back.n == model.n);
  CHECK(model_back.degenerate == model.degenerate);
}
