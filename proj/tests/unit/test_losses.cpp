#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "leafkit/error.hpp"
#include "leafkit/losses.hpp"

using namespace leafkit;
using namespace leafkit::losses;

TEST(Focal, HandComputed) {
  const std::vector<double> p{0.5};
  EXPECT_NEAR(focal_loss<double>(p).value, 0.25 * 0.25 * std::log(2.0), 1e-15);
}

TEST(Focal, ReducesToScaledNllWithoutFocusing) {
  LossConfig cfg;
  cfg.focal_gamma = 0;
  const std::vector<double> p{0.2, 0.7, 0.9};
  const double nll = -(std::log(0.2) + std::log(0.7) + std::log(0.9)) / 3;
  EXPECT_NEAR(focal_loss<double>(p, cfg).value, cfg.focal_alpha * nll, 1e-15);
}

TEST(Focal, ClampsAtZeroProbability) {
  const std::vector<double> p{0.0, 0.5};
  const auto v = focal_loss<double>(p);
  EXPECT_TRUE(v.clamped);
  EXPECT_TRUE(std::isfinite(v.value));
  EXPECT_EQ(focal_loss_gradient<double>(p)[0], 0.0);
  EXPECT_THROW(focal_loss<double>(std::vector<double>{1.5}), ValidationError);
}

TEST(Giou, HandComputed) {
  // Disjoint unit squares two apart: IoU 0, hull 3, union 2.
  const Box<double> a{0, 0, 1, 1}, b{2, 0, 3, 1};
  EXPECT_NEAR(giou(a, b), -1.0 / 3.0, 1e-15);
  // Touching at a corner inside a 2x2 hull: union 2, hull 4.
  EXPECT_NEAR(giou(a, Box<double>{1, 1, 2, 2}), -0.5, 1e-15);
  EXPECT_EQ(giou_loss(a, a), 0.0);
  EXPECT_THROW(giou(a, Box<double>{1, 1, 1, 2}), ValidationError);
}

TEST(Centerness, BceHandComputed) {
  const std::vector<double> t{std::sqrt(1.0 / 3.0)}, q{0.5};
  EXPECT_NEAR(centerness_loss<double>(t, q).value, std::log(2.0), 1e-15);
}

TEST(Dice, HandComputed) {
  const std::vector<double> truth{1, 0}, pred{0.5, 0.5};
  const double eps = 1e-6;
  EXPECT_NEAR(dice_loss<double>(truth, pred), 1 - (1 + eps) / (1.5 + eps), 1e-15);
  EXPECT_NEAR(dice_loss<double>(truth, truth), 0.0, 1e-15);
}

TEST(Total, PaperWeightsOnUnitComponents) {
  EXPECT_EQ(total_loss({1, 1, 1, 1}), 5.0);
  LossConfig bad;
  bad.lambda_mask = 0;
  EXPECT_THROW(bad.validate(), ValidationError);
}

TEST(GradCheck, AllLossesAgreeWithCentralDifferences) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.05, 0.95);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<double> x(6), t(6);
    for (auto& v : x) v = u(rng);
    for (auto& v : t) v = u(rng);
    EXPECT_LT(grad_check([](std::span<const double> p) { return focal_loss(p).value; },
                         [](std::span<const double> p) { return focal_loss_gradient(p); }, x),
              1e-4);
    EXPECT_LT(grad_check([&](std::span<const double> p) { return centerness_loss<double>(t, p).value; },
                         [&](std::span<const double> p) { return centerness_loss_gradient<double>(t, p); }, x),
              1e-4);
    EXPECT_LT(grad_check([&](std::span<const double> p) { return dice_loss<double>(t, p); },
                         [&](std::span<const double> p) { return dice_loss_gradient<double>(t, p); }, x),
              1e-4);
    const Box<double> target{1, 1, 4, 5};
    const std::vector<double> box{0.3 + x[0], 0.2 + x[1], 3 + x[2], 4.4 + x[3]};
    auto as_box = [](std::span<const double> b) { return Box<double>{b[0], b[1], b[2], b[3]}; };
    EXPECT_LT(grad_check([&](std::span<const double> b) { return giou_loss(as_box(b), target); },
                         [&](std::span<const double> b) {
                           const auto g = giou_loss_gradient(as_box(b), target);
                           return std::vector<double>(g.begin(), g.end());
                         },
                         box),
              1e-4);
  }
}

TEST(GradCheck, DetectsAWrongGradient) {
  const std::vector<double> truth{1, 0, 1}, pred{0.4, 0.3, 0.8};
  const double err = grad_check([&](std::span<const double> p) { return dice_loss<double>(truth, p); },
                                [&](std::span<const double> p) {
                                  auto g = dice_loss_gradient<double>(truth, p);
                                  for (auto& v : g) v = -v;
                                  return g;
                                },
                                pred);
  EXPECT_GT(err, 1.0);
  EXPECT_NEAR(gradient_relative_error(1e-9, 0), 1e-3, 1e-15);
}
