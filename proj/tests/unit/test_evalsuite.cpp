#include <gtest/gtest.h>

#include <cmath>

#include "leafkit/error.hpp"
#include "leafkit/evalsuite.hpp"
#include "leafkit/verify/oracles.hpp"
#include "leafkit/verify/synth.hpp"

using namespace leafkit;

namespace {

InstanceMask inst(std::int64_t id, std::int64_t image, const Mask& m, std::optional<double> score = {}) {
  return make_instance(id, image, m, score);
}

}  // namespace

TEST(Iou, MasksAndBoxes) {
  Mask a = Mask::Zero(4, 4), b = Mask::Zero(4, 4);
  a.block(0, 0, 2, 4).setOnes();
  b.block(0, 0, 4, 2).setOnes();
  EXPECT_DOUBLE_EQ(iou(a, b), 4.0 / 12.0);
  EXPECT_EQ(iou(Mask(Mask::Zero(2, 2)), Mask(Mask::Zero(2, 2))), 0.0);
  EXPECT_DOUBLE_EQ(iou(Box<double>{0, 0, 2, 2}, Box<double>{1, 1, 3, 3}), 1.0 / 7.0);
  EXPECT_THROW(iou(Region(a), Region(Box<double>{0, 0, 1, 1})), ValidationError);
}

TEST(Thresholds, CocoGrids) {
  const auto t = coco_iou_thresholds();
  EXPECT_EQ(t.front(), 0.5);
  EXPECT_NEAR(t.back(), 0.95, 1e-15);
  const auto r = coco_recall_points();
  EXPECT_EQ(r[0], 0.0);
  EXPECT_EQ(r[100], 1.0);
}

TEST(Matching, PrecisionRecallFromCounts) {
  MatchResult m;
  m.pairs = {{1, 1, 0.9}, {2, 2, 0.8}, {3, 3, 0.7}};
  m.unmatched_preds = {4};
  m.unmatched_gts = {5, 6};
  const auto pr = precision_recall(m);
  EXPECT_DOUBLE_EQ(pr.precision, 0.75);
  EXPECT_DOUBLE_EQ(pr.recall, 0.6);
}

TEST(Matching, EqualIouGoesToEarlierGroundTruth) {
  Mask left = Mask::Zero(4, 6), right = Mask::Zero(4, 6), mid = Mask::Zero(4, 6);
  left.block(0, 0, 4, 2).setOnes();
  right.block(0, 4, 4, 2).setOnes();
  mid.block(0, 1, 4, 4).setOnes();  // overlaps each by 4 of 8 pixels in the union of 16
  std::vector<InstanceMask> gts{inst(10, 1, left), inst(11, 1, right)};
  std::vector<InstanceMask> preds{inst(1, 1, mid, 0.9)};
  const MatchResult m = match_instances(preds, gts, 0.1);
  ASSERT_EQ(m.pairs.size(), 1u);
  EXPECT_EQ(m.pairs[0].gt_id, 10);
}

TEST(Ap, PerfectPredictionsScoreOne) {
  synth::Rng rng(1);
  std::vector<InstanceMask> gts, preds;
  for (int k = 0; k < 4; ++k) {
    const Mask m = synth::random_mask(rng, 30, 30);
    gts.push_back(inst(k + 1, 1 + k % 2, m));
    preds.push_back(inst(k + 1, 1 + k % 2, m, 0.5 + 0.1 * k));
  }
  const auto d = coco_map(preds, gts);
  EXPECT_DOUBLE_EQ(d.seg_map, 1.0);
  EXPECT_DOUBLE_EQ(d.box_ap75, 1.0);
  EXPECT_DOUBLE_EQ(d.precision, 1.0);
  EXPECT_DOUBLE_EQ(d.recall, 1.0);
}

TEST(Ap, NoPredictionsScoreZero) {
  const std::vector<InstanceMask> gts{inst(1, 1, Mask::Ones(5, 5))};
  const auto d = coco_map(std::vector<InstanceMask>{}, gts);
  EXPECT_EQ(d.seg_map, 0.0);
  EXPECT_EQ(d.recall, 0.0);
}

TEST(Ap, HandComputedRanking) {
  // Ranked hit, miss, hit against two objects: precision envelope is 1 up to
  // recall 0.5 and 2/3 up to 1, so AP = (51 + 50 * 2/3) / 101.
  Mask a = Mask::Zero(10, 10), b = Mask::Zero(10, 10), c = Mask::Zero(10, 10);
  a.block(0, 0, 4, 4).setOnes();
  b.block(6, 6, 4, 4).setOnes();
  c.block(0, 6, 3, 3).setOnes();
  const std::vector<InstanceMask> gts{inst(1, 1, a), inst(2, 1, b)};
  const std::vector<InstanceMask> preds{inst(1, 1, a, 0.9), inst(2, 1, c, 0.8), inst(3, 1, b, 0.7)};
  EXPECT_NEAR(average_precision(preds, gts, 0.5), (51 + 50 * 2.0 / 3.0) / 101.0, 1e-15);
}

TEST(Ap, MatchesBruteForceOnRandomScenes) {
  synth::Rng rng(2024);
  int nontrivial = 0;
  for (int s = 0; s < 150; ++s) {
    const synth::Scene scene = synth::random_scene(rng);
    for (double t : {0.5, 0.75}) {
      for (IouKind kind : {IouKind::mask, IouKind::box}) {
        const double fast = average_precision(scene.preds, scene.gts, t, kind);
        const double slow = oracle::brute_force_ap(scene.preds, scene.gts, t, kind);
        EXPECT_NEAR(fast, slow, 1e-9) << "scene " << s;
        if (fast > 0 && fast < 1) ++nontrivial;
      }
    }
  }
  // The generator must exercise partial recall, not only all-or-nothing scenes.
  EXPECT_GT(nontrivial, 100);
}

TEST(Ap, MaxDetectionsKeepsHighestScores) {
  Mask m = Mask::Zero(8, 8), miss = Mask::Zero(8, 8);
  m.block(0, 0, 4, 4).setOnes();
  miss(7, 7) = 1;
  const std::vector<InstanceMask> gts{inst(1, 1, m)};
  const std::vector<InstanceMask> preds{inst(1, 1, miss, 0.95), inst(2, 1, m, 0.9)};
  EXPECT_DOUBLE_EQ(average_precision(preds, gts, 0.5), 0.5);
  EvalOptions o;
  o.max_detections = 1;
  EXPECT_EQ(average_precision(preds, gts, 0.5, IouKind::mask, o), 0.0);
}

TEST(Regression, HandComputed) {
  // SSE 2 against SST 8.
  const std::vector<double> gt{0, 2, 4}, pred{1, 2, 3};
  const auto r = regression_metrics(pred, gt);
  EXPECT_DOUBLE_EQ(r.r2, 0.75);
  EXPECT_DOUBLE_EQ(r.mae, 2.0 / 3.0);
  EXPECT_DOUBLE_EQ(r.rmse, std::sqrt(2.0 / 3.0));
  EXPECT_FALSE(r.degenerate);
}

TEST(Regression, ConstantTruthIsDegenerate) {
  const std::vector<double> gt{2, 2, 2}, pred{1, 2, 3};
  const auto r = regression_metrics(pred, gt);
  EXPECT_TRUE(r.degenerate);
  EXPECT_EQ(r.r2, 0.0);
  EXPECT_THROW(regression_metrics(std::vector<double>{1}, gt), ValidationError);
}

TEST(AccVis, Percentage) {
  EXPECT_NEAR(acc_vis(20, 22), 90.909090909, 1e-8);
  EXPECT_THROW(acc_vis(3, 0), ValidationError);
  EXPECT_THROW(acc_vis(5, 4), ValidationError);
}
