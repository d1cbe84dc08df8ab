#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <variant>
#include <vector>

#include "leafkit/types.hpp"

namespace leafkit {

/// |a & b| / |a | b|; 0 when both are empty. Masks must share dimensions.
double iou(const Mask& a, const Mask& b);
double iou(const Box<double>& a, const Box<double>& b);

using Region = std::variant<Mask, Box<double>>;
/// Throws ValidationError when the two regions are of different kinds.
double iou(const Region& a, const Region& b);

enum class IouKind { mask, box };

double instance_iou(const InstanceMask& a, const InstanceMask& b, IouKind kind);

struct MatchPair {
  std::int64_t pred_id{0};
  std::int64_t gt_id{0};
  double iou{0};
};

struct MatchResult {
  std::vector<MatchPair> pairs;
  std::vector<std::int64_t> unmatched_preds;
  std::vector<std::int64_t> unmatched_gts;
};

/// Greedy one-to-one matching in descending score order (stable on ties). Each
/// prediction takes the unmatched ground truth of highest IoU >= threshold;
/// IoU ties go to the earlier ground truth.
MatchResult match_instances(std::span<const InstanceMask> preds, std::span<const InstanceMask> gts,
                            double iou_threshold, IouKind kind = IouKind::mask);

/// Greedy one-to-one matching over all pairs in descending IoU order, for
/// aligning instances that carry no scores.
MatchResult match_by_iou(std::span<const InstanceMask> preds, std::span<const InstanceMask> gts,
                         double iou_threshold, IouKind kind = IouKind::mask);

struct PrecisionRecall {
  double precision{0};
  double recall{0};
};

PrecisionRecall precision_recall(const MatchResult& match);

/// COCO IoU thresholds 0.50:0.05:0.95, reproduced bit-for-bit.
std::array<double, 10> coco_iou_thresholds();
/// COCO recall sampling points 0:0.01:1.
std::array<double, 101> coco_recall_points();

struct EvalOptions {
  int max_detections = 100;  // per image, highest scores first
};

/// 101-point interpolated AP at one threshold. Instances carry their image and
/// category; AP is averaged over categories with at least one ground truth.
double average_precision(std::span<const InstanceMask> preds, std::span<const InstanceMask> gts,
                         double iou_threshold, IouKind kind = IouKind::mask,
                         const EvalOptions& options = {});

struct DetectionMetrics {
  double seg_map{0};
  double seg_ap50{0};
  double seg_ap75{0};
  double box_map{0};
  double box_ap50{0};
  double box_ap75{0};
  double iou_threshold{0.5};
  double precision{0};
  double recall{0};
};

/// Mask and box mAP / AP50 / AP75, plus mask precision / recall at
/// `iou_threshold` using per-image greedy matching.
DetectionMetrics coco_map(std::span<const InstanceMask> preds, std::span<const InstanceMask> gts,
                          double iou_threshold = 0.5, const EvalOptions& options = {});

/// Percentage of ground-truth leaves recognised on visual inspection.
double acc_vis(std::int64_t tp_vis, std::int64_t n_g);

struct RegressionMetrics {
  double r2{0};
  double rmse{0};
  double mae{0};
  bool degenerate{false};  // constant ground truth; r2 reported as 0
};

RegressionMetrics regression_metrics(std::span<const double> pred, std::span<const double> gt);

}  // namespace leafkit
