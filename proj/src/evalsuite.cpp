#include "leafkit/evalsuite.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include "leafkit/error.hpp"
#include "leafkit/numeric.hpp"

namespace leafkit {

namespace {

using IouMatrix = Eigen::MatrixXd;  // rows = preds (score order), cols = gts

struct ImageCategoryEntry {
  std::vector<const InstanceMask*> preds;  // score-descending, truncated
  std::vector<const InstanceMask*> gts;
  IouMatrix ious;
};

std::vector<std::size_t> score_order(std::span<const InstanceMask* const> preds) {
  std::vector<std::size_t> order(preds.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return preds[a]->score_or_default() > preds[b]->score_or_default();
  });
  return order;
}

// Greedy score-ordered assignment over a precomputed IoU matrix whose rows are
// already in score order. Returns the matched gt column per row, or -1.
std::vector<int> greedy_assign(const IouMatrix& ious, double threshold) {
  std::vector<int> match(std::size_t(ious.rows()), -1);
  std::vector<bool> taken(std::size_t(ious.cols()), false);
  for (Eigen::Index p = 0; p < ious.rows(); ++p) {
    double best = -1.0;
    int best_gt = -1;
    for (Eigen::Index g = 0; g < ious.cols(); ++g) {
      if (taken[std::size_t(g)]) continue;
      const double v = ious(p, g);
      if (v >= threshold && v > best) {
        best = v;
        best_gt = int(g);
      }
    }
    if (best_gt >= 0) {
      taken[std::size_t(best_gt)] = true;
      match[std::size_t(p)] = best_gt;
    }
  }
  return match;
}

IouMatrix iou_matrix(std::span<const InstanceMask* const> preds,
                     std::span<const InstanceMask* const> gts, IouKind kind) {
  IouMatrix m(Eigen::Index(preds.size()), Eigen::Index(gts.size()));
  for (std::size_t p = 0; p < preds.size(); ++p)
    for (std::size_t g = 0; g < gts.size(); ++g)
      m(Eigen::Index(p), Eigen::Index(g)) = instance_iou(*preds[p], *gts[g], kind);
  return m;
}

MatchResult build_result(std::span<const InstanceMask* const> preds,
                         std::span<const InstanceMask* const> gts, const IouMatrix& ious,
                         const std::vector<int>& match) {
  MatchResult r;
  std::vector<bool> gt_used(gts.size(), false);
  for (std::size_t p = 0; p < preds.size(); ++p) {
    if (match[p] < 0) {
      r.unmatched_preds.push_back(preds[p]->id);
      continue;
    }
    gt_used[std::size_t(match[p])] = true;
    r.pairs.push_back({preds[p]->id, gts[std::size_t(match[p])]->id,
                       ious(Eigen::Index(p), Eigen::Index(match[p]))});
  }
  for (std::size_t g = 0; g < gts.size(); ++g)
    if (!gt_used[g]) r.unmatched_gts.push_back(gts[g]->id);
  return r;
}

std::vector<const InstanceMask*> pointers(std::span<const InstanceMask> v) {
  std::vector<const InstanceMask*> out;
  out.reserve(v.size());
  for (const auto& x : v) out.push_back(&x);
  return out;
}

void check_threshold(double t) {
  if (!(t > 0.0 && t <= 1.0)) throw ValidationError("IoU threshold must lie in (0, 1]");
}

// Groups instances by (category, image) and precomputes IoU matrices.
std::map<std::int64_t, std::vector<ImageCategoryEntry>> group_for_eval(
    std::span<const InstanceMask> preds, std::span<const InstanceMask> gts, IouKind kind,
    const EvalOptions& options) {
  std::map<std::int64_t, std::map<std::int64_t, ImageCategoryEntry>> grouped;
  for (const auto& g : gts) grouped[g.category_id][g.image_id].gts.push_back(&g);
  for (const auto& p : preds) grouped[p.category_id][p.image_id].preds.push_back(&p);

  std::map<std::int64_t, std::vector<ImageCategoryEntry>> out;
  for (auto& [cat, images] : grouped) {
    auto& list = out[cat];
    for (auto& [image_id, entry] : images) {
      const auto order = score_order(entry.preds);
      std::vector<const InstanceMask*> sorted;
      for (std::size_t k = 0; k < order.size() && int(k) < options.max_detections; ++k)
        sorted.push_back(entry.preds[order[k]]);
      entry.preds = std::move(sorted);
      entry.ious = iou_matrix(entry.preds, entry.gts, kind);
      list.push_back(std::move(entry));
    }
  }
  return out;
}

double category_ap(const std::vector<ImageCategoryEntry>& entries, double threshold) {
  struct Det {
    double score;
    bool tp;
  };
  std::vector<Det> dets;
  std::size_t npos = 0;
  for (const auto& e : entries) {
    npos += e.gts.size();
    const auto match = greedy_assign(e.ious, threshold);
    for (std::size_t p = 0; p < e.preds.size(); ++p)
      dets.push_back({e.preds[p]->score_or_default(), match[p] >= 0});
  }
  if (npos == 0) return -1.0;
  std::stable_sort(dets.begin(), dets.end(),
                   [](const Det& a, const Det& b) { return a.score > b.score; });

  std::vector<double> recall(dets.size()), precision(dets.size());
  std::size_t tp = 0, fp = 0;
  for (std::size_t k = 0; k < dets.size(); ++k) {
    (dets[k].tp ? tp : fp) += 1;
    recall[k] = double(tp) / double(npos);
    precision[k] = double(tp) / double(tp + fp);
  }
  for (std::size_t k = dets.size(); k-- > 1;)
    precision[k - 1] = std::max(precision[k - 1], precision[k]);

  CompensatedSum<double> sum;
  for (double r : coco_recall_points()) {
    const auto it = std::lower_bound(recall.begin(), recall.end(), r);
    if (it != recall.end()) sum += precision[std::size_t(it - recall.begin())];
  }
  return sum.value() / 101.0;
}

double mean_over_categories(const std::map<std::int64_t, std::vector<ImageCategoryEntry>>& groups,
                            double threshold) {
  CompensatedSum<double> sum;
  int n = 0;
  for (const auto& [cat, entries] : groups) {
    const double ap = category_ap(entries, threshold);
    if (ap < 0.0) continue;
    sum += ap;
    ++n;
  }
  return n == 0 ? 0.0 : sum.value() / n;
}

}  // namespace

double iou(const Mask& a, const Mask& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols())
    throw ValidationError("IoU of masks with different dimensions");
  const auto sa = a.array() != 0;
  const auto sb = b.array() != 0;
  const auto inter = (sa && sb).count();
  const auto uni = (sa || sb).count();
  return uni == 0 ? 0.0 : double(inter) / double(uni);
}

double iou(const Box<double>& a, const Box<double>& b) {
  if (a.x_max < a.x_min || a.y_max < a.y_min || b.x_max < b.x_min || b.y_max < b.y_min)
    throw ValidationError("IoU of an invalid box");
  const double iw = std::max(0.0, std::min(a.x_max, b.x_max) - std::max(a.x_min, b.x_min));
  const double ih = std::max(0.0, std::min(a.y_max, b.y_max) - std::max(a.y_min, b.y_min));
  const double inter = iw * ih;
  const double uni = a.area() + b.area() - inter;
  return uni <= 0.0 ? 0.0 : inter / uni;
}

double iou(const Region& a, const Region& b) {
  if (a.index() != b.index()) throw ValidationError("IoU between a mask and a box");
  if (const auto* ma = std::get_if<Mask>(&a)) return iou(*ma, std::get<Mask>(b));
  return iou(std::get<Box<double>>(a), std::get<Box<double>>(b));
}

double instance_iou(const InstanceMask& a, const InstanceMask& b, IouKind kind) {
  return kind == IouKind::mask ? iou(a.grid, b.grid) : iou(a.bbox.to_box(), b.bbox.to_box());
}

MatchResult match_instances(std::span<const InstanceMask> preds, std::span<const InstanceMask> gts,
                            double iou_threshold, IouKind kind) {
  check_threshold(iou_threshold);
  const auto pred_ptrs = pointers(preds);
  const auto order = score_order(pred_ptrs);
  std::vector<const InstanceMask*> sorted;
  for (auto k : order) sorted.push_back(pred_ptrs[k]);
  const auto gt_ptrs = pointers(gts);
  const IouMatrix ious = iou_matrix(sorted, gt_ptrs, kind);
  return build_result(sorted, gt_ptrs, ious, greedy_assign(ious, iou_threshold));
}

MatchResult match_by_iou(std::span<const InstanceMask> preds, std::span<const InstanceMask> gts,
                         double iou_threshold, IouKind kind) {
  check_threshold(iou_threshold);
  const auto pred_ptrs = pointers(preds);
  const auto gt_ptrs = pointers(gts);
  const IouMatrix ious = iou_matrix(pred_ptrs, gt_ptrs, kind);

  struct Candidate {
    double iou;
    int p, g;
  };
  std::vector<Candidate> cands;
  for (Eigen::Index p = 0; p < ious.rows(); ++p)
    for (Eigen::Index g = 0; g < ious.cols(); ++g)
      if (ious(p, g) >= iou_threshold) cands.push_back({ious(p, g), int(p), int(g)});
  std::stable_sort(cands.begin(), cands.end(),
                   [](const Candidate& a, const Candidate& b) { return a.iou > b.iou; });

  std::vector<int> match(pred_ptrs.size(), -1);
  std::vector<bool> gt_taken(gt_ptrs.size(), false);
  for (const auto& c : cands) {
    if (match[std::size_t(c.p)] >= 0 || gt_taken[std::size_t(c.g)]) continue;
    match[std::size_t(c.p)] = c.g;
    gt_taken[std::size_t(c.g)] = true;
  }
  return build_result(pred_ptrs, gt_ptrs, ious, match);
}

PrecisionRecall precision_recall(const MatchResult& match) {
  const double tp = double(match.pairs.size());
  const double fp = double(match.unmatched_preds.size());
  const double fn = double(match.unmatched_gts.size());
  return {tp + fp > 0 ? tp / (tp + fp) : 0.0, tp + fn > 0 ? tp / (tp + fn) : 0.0};
}

std::array<double, 10> coco_iou_thresholds() {
  // numpy.linspace(.5, .95, 10): start + i * step, endpoint pinned
  std::array<double, 10> t{};
  const double step = (0.95 - 0.5) / 9.0;
  for (int i = 0; i < 10; ++i) t[std::size_t(i)] = 0.5 + i * step;
  t[9] = 0.95;
  return t;
}

std::array<double, 101> coco_recall_points() {
  std::array<double, 101> r{};
  const double step = 1.0 / 100.0;
  for (int i = 0; i < 101; ++i) r[std::size_t(i)] = i * step;
  r[100] = 1.0;
  return r;
}

double average_precision(std::span<const InstanceMask> preds, std::span<const InstanceMask> gts,
                         double iou_threshold, IouKind kind, const EvalOptions& options) {
  check_threshold(iou_threshold);
  return mean_over_categories(group_for_eval(preds, gts, kind, options), iou_threshold);
}

DetectionMetrics coco_map(std::span<const InstanceMask> preds, std::span<const InstanceMask> gts,
                          double iou_threshold, const EvalOptions& options) {
  check_threshold(iou_threshold);
  DetectionMetrics m;
  const auto thresholds = coco_iou_thresholds();
  for (IouKind kind : {IouKind::mask, IouKind::box}) {
    const auto groups = group_for_eval(preds, gts, kind, options);
    std::array<double, 10> ap{};
    CompensatedSum<double> sum;
    for (std::size_t t = 0; t < thresholds.size(); ++t) {
      ap[t] = mean_over_categories(groups, thresholds[t]);
      sum += ap[t];
    }
    const double mean = sum.value() / 10.0;
    if (kind == IouKind::mask) {
      m.seg_map = mean;
      m.seg_ap50 = ap[0];
      m.seg_ap75 = ap[5];
    } else {
      m.box_map = mean;
      m.box_ap50 = ap[0];
      m.box_ap75 = ap[5];
    }
  }

  // Precision / recall: per image, per category, then pooled counts.
  m.iou_threshold = iou_threshold;
  std::size_t tp = 0, fp = 0, fn = 0;
  using Lists = std::pair<std::vector<const InstanceMask*>, std::vector<const InstanceMask*>>;
  std::map<std::pair<std::int64_t, std::int64_t>, Lists> keyed;
  for (const auto& p : preds) keyed[{p.image_id, p.category_id}].first.push_back(&p);
  for (const auto& g : gts) keyed[{g.image_id, g.category_id}].second.push_back(&g);
  for (const auto& [key, lists] : keyed) {
    const auto order = score_order(lists.first);
    std::vector<const InstanceMask*> sorted;
    for (auto k : order) sorted.push_back(lists.first[k]);
    const IouMatrix ious = iou_matrix(sorted, lists.second, IouKind::mask);
    const auto r = build_result(sorted, lists.second, ious, greedy_assign(ious, iou_threshold));
    tp += r.pairs.size();
    fp += r.unmatched_preds.size();
    fn += r.unmatched_gts.size();
  }
  m.precision = tp + fp > 0 ? double(tp) / double(tp + fp) : 0.0;
  m.recall = tp + fn > 0 ? double(tp) / double(tp + fn) : 0.0;
  return m;
}

double acc_vis(std::int64_t tp_vis, std::int64_t n_g) {
  if (n_g <= 0) throw ValidationError("visual accuracy needs at least one ground-truth leaf");
  if (tp_vis < 0 || tp_vis > n_g) throw ValidationError("visual true positives outside [0, N_G]");
  return 100.0 * double(tp_vis) / double(n_g);
}

RegressionMetrics regression_metrics(std::span<const double> pred, std::span<const double> gt) {
  if (pred.size() != gt.size()) throw ValidationError("prediction and ground-truth lengths differ");
  if (gt.empty()) throw ValidationError("regression metrics need at least one sample");
  const double n = double(gt.size());
  CompensatedSum<double> gt_sum;
  for (double g : gt) gt_sum += g;
  const double gt_mean = gt_sum.value() / n;

  CompensatedSum<double> ss_res, ss_tot, abs_err;
  for (std::size_t i = 0; i < gt.size(); ++i) {
    const double e = pred[i] - gt[i];
    ss_res += e * e;
    abs_err += std::abs(e);
    ss_tot += (gt[i] - gt_mean) * (gt[i] - gt_mean);
  }
  RegressionMetrics m;
  m.rmse = std::sqrt(ss_res.value() / n);
  m.mae = abs_err.value() / n;
  if (ss_tot.value() == 0.0) {
    m.degenerate = true;
    m.r2 = 0.0;
  } else {
    m.r2 = 1.0 - ss_res.value() / ss_tot.value();
  }
  return m;
}

}  // namespace leafkit
