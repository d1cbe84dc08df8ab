#include "leafkit/verify/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

namespace leafkit::oracle {

namespace {

using Pixel = std::pair<Eigen::Index, Eigen::Index>;

std::set<Pixel> pixel_set(const Mask& m) {
  std::set<Pixel> s;
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      if (m(r, c)) s.insert({r, c});
  return s;
}

struct Ranked {
  const InstanceMask* inst;
  std::size_t input_index;
};

FeatureMap<double> make(Eigen::Index c, Eigen::Index h, Eigen::Index w) {
  FeatureMap<double> t(c, h, w);
  t.setZero();
  return t;
}

FeatureMap<double> channel_slice(const FeatureMap<double>& x, Eigen::Index first, Eigen::Index count) {
  FeatureMap<double> out = make(count, x.dimension(1), x.dimension(2));
  for (Eigen::Index c = 0; c < count; ++c)
    for (Eigen::Index i = 0; i < x.dimension(1); ++i)
      for (Eigen::Index j = 0; j < x.dimension(2); ++j) out(c, i, j) = x(first + c, i, j);
  return out;
}

FeatureMap<double> affine_relu(const FeatureMap<double>& x, const kernels::ChannelAffine<double>& a) {
  FeatureMap<double> out = make(x.dimension(0), x.dimension(1), x.dimension(2));
  for (Eigen::Index c = 0; c < x.dimension(0); ++c)
    for (Eigen::Index i = 0; i < x.dimension(1); ++i)
      for (Eigen::Index j = 0; j < x.dimension(2); ++j) {
        const double v = a.scale(c) * x(c, i, j) + a.shift(c);
        out(c, i, j) = v > 0 ? v : 0.0;
      }
  return out;
}

FeatureMap<double> conv(const FeatureMap<double>& x, const kernels::ConvParams<double>& p) {
  return direct_conv(x, p.weight, p.bias, p.stride, p.groups);
}

}  // namespace

double pixel_set_iou(const Mask& a, const Mask& b) {
  const auto sa = pixel_set(a), sb = pixel_set(b);
  std::vector<Pixel> inter, uni;
  std::set_intersection(sa.begin(), sa.end(), sb.begin(), sb.end(), std::back_inserter(inter));
  std::set_union(sa.begin(), sa.end(), sb.begin(), sb.end(), std::back_inserter(uni));
  return uni.empty() ? 0.0 : double(inter.size()) / double(uni.size());
}

double cell_count_iou(const BoundingBox& a, const BoundingBox& b) {
  long inter = 0, uni = 0;
  const int x0 = std::min(a.x_min, b.x_min), x1 = std::max(a.x_max, b.x_max);
  const int y0 = std::min(a.y_min, b.y_min), y1 = std::max(a.y_max, b.y_max);
  for (int y = y0; y <= y1; ++y)
    for (int x = x0; x <= x1; ++x) {
      const bool in_a = x >= a.x_min && x <= a.x_max && y >= a.y_min && y <= a.y_max;
      const bool in_b = x >= b.x_min && x <= b.x_max && y >= b.y_min && y <= b.y_max;
      inter += in_a && in_b;
      uni += in_a || in_b;
    }
  return uni == 0 ? 0.0 : double(inter) / double(uni);
}

std::vector<double> brute_force_ap_sweep(std::span<const InstanceMask> preds, std::span<const InstanceMask> gts,
                                         std::span<const double> thresholds, IouKind kind, int max_detections) {
  std::set<std::int64_t> categories;
  for (const auto& g : gts) categories.insert(g.category_id);
  std::vector<double> ap(thresholds.size(), 0.0);
  if (categories.empty()) return ap;

  std::vector<double> recall_points;
  for (int i = 0; i <= 100; ++i) recall_points.push_back(i == 100 ? 1.0 : i * (1.0 / 100.0));

  std::vector<std::set<Pixel>> pred_pixels, gt_pixels;
  for (const auto& p : preds) pred_pixels.push_back(pixel_set(p.grid));
  for (const auto& g : gts) gt_pixels.push_back(pixel_set(g.grid));
  auto overlap = [&](std::size_t p, std::size_t g) {
    if (kind == IouKind::box) return cell_count_iou(preds[p].bbox, gts[g].bbox);
    std::vector<Pixel> inter, uni;
    std::set_intersection(pred_pixels[p].begin(), pred_pixels[p].end(), gt_pixels[g].begin(), gt_pixels[g].end(),
                          std::back_inserter(inter));
    std::set_union(pred_pixels[p].begin(), pred_pixels[p].end(), gt_pixels[g].begin(), gt_pixels[g].end(),
                   std::back_inserter(uni));
    return uni.empty() ? 0.0 : double(inter.size()) / double(uni.size());
  };

  for (const std::int64_t cat : categories) {
    // Rank: score descending, then image id, then input order; cap per image.
    std::vector<Ranked> all;
    for (std::size_t i = 0; i < preds.size(); ++i)
      if (preds[i].category_id == cat) all.push_back({&preds[i], i});
    std::sort(all.begin(), all.end(), [](const Ranked& a, const Ranked& b) {
      const double sa = a.inst->score_or_default(), sb = b.inst->score_or_default();
      if (sa != sb) return sa > sb;
      if (a.inst->image_id != b.inst->image_id) return a.inst->image_id < b.inst->image_id;
      return a.input_index < b.input_index;
    });
    std::map<std::int64_t, int> kept_per_image;
    std::vector<Ranked> ranking;
    for (const auto& r : all)
      if (kept_per_image[r.inst->image_id]++ < max_detections) ranking.push_back(r);

    std::vector<std::size_t> cat_gts;
    for (std::size_t g = 0; g < gts.size(); ++g)
      if (gts[g].category_id == cat) cat_gts.push_back(g);
    std::map<std::pair<std::size_t, std::size_t>, double> ious;
    for (const auto& r : ranking)
      for (const std::size_t g : cat_gts)
        if (gts[g].image_id == r.inst->image_id) ious[{r.input_index, g}] = overlap(r.input_index, g);

    for (std::size_t t = 0; t < thresholds.size(); ++t) {
      std::vector<double> precision, recall;
      for (std::size_t k = 1; k <= ranking.size(); ++k) {
        std::vector<bool> taken(cat_gts.size(), false);
        std::size_t tp = 0;
        for (std::size_t d = 0; d < k; ++d) {
          const InstanceMask& p = *ranking[d].inst;
          int best = -1;
          double best_iou = thresholds[t];
          for (std::size_t g = 0; g < cat_gts.size(); ++g) {
            if (taken[g] || gts[cat_gts[g]].image_id != p.image_id) continue;
            const double v = ious.at({ranking[d].input_index, cat_gts[g]});
            if (v >= best_iou && (best < 0 || v > best_iou)) {
              best = int(g);
              best_iou = v;
            }
          }
          if (best >= 0) {
            taken[std::size_t(best)] = true;
            ++tp;
          }
        }
        precision.push_back(double(tp) / double(k));
        recall.push_back(double(tp) / double(cat_gts.size()));
      }
      double sum = 0;
      for (const double r : recall_points) {
        double best = 0;
        for (std::size_t k = 0; k < precision.size(); ++k)
          if (recall[k] >= r) best = std::max(best, precision[k]);
        sum += best;
      }
      ap[t] += sum / 101.0 / double(categories.size());
    }
  }
  return ap;
}

double brute_force_ap(std::span<const InstanceMask> preds, std::span<const InstanceMask> gts, double threshold,
                      IouKind kind, int max_detections) {
  const double t[1] = {threshold};
  return brute_force_ap_sweep(preds, gts, t, kind, max_detections)[0];
}

Mask pnpoly_rasterize(std::span<const Point2> poly, int height, int width) {
  Mask m = Mask::Zero(height, width);
  const std::size_t n = poly.size();
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) {
      const double px = x + 0.5, py = y + 0.5;
      bool inside = false, on_edge = false;
      for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const Point2 &a = poly[i], &b = poly[j];
        const double cross = (b.x - a.x) * (py - a.y) - (b.y - a.y) * (px - a.x);
        if (cross == 0 && px >= std::min(a.x, b.x) && px <= std::max(a.x, b.x) && py >= std::min(a.y, b.y) &&
            py <= std::max(a.y, b.y))
          on_edge = true;
        if ((a.y > py) != (b.y > py) && px < (b.x - a.x) * (py - a.y) / (b.y - a.y) + a.x) inside = !inside;
      }
      m(y, x) = (inside || on_edge) ? 1 : 0;
    }
  return m;
}

std::vector<std::pair<int, int>> boundary_pixels(const Mask& mask) {
  const int h = int(mask.rows()), w = int(mask.cols());
  std::vector<int> label(std::size_t(h) * std::size_t(w), -1);
  int best_label = -1;
  std::size_t best_size = 0;
  int next = 0;
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) {
      if (!mask(y, x) || label[std::size_t(y * w + x)] >= 0) continue;
      std::vector<std::pair<int, int>> queue{{y, x}};
      label[std::size_t(y * w + x)] = next;
      for (std::size_t q = 0; q < queue.size(); ++q)
        for (int dy = -1; dy <= 1; ++dy)
          for (int dx = -1; dx <= 1; ++dx) {
            const int ny = queue[q].first + dy, nx = queue[q].second + dx;
            if (ny < 0 || nx < 0 || ny >= h || nx >= w || !mask(ny, nx) || label[std::size_t(ny * w + nx)] >= 0)
              continue;
            label[std::size_t(ny * w + nx)] = next;
            queue.push_back({ny, nx});
          }
      if (queue.size() > best_size) {
        best_size = queue.size();
        best_label = next;
      }
      ++next;
    }
  std::vector<std::pair<int, int>> out;
  auto unset = [&](int y, int x) { return y < 0 || x < 0 || y >= h || x >= w || !mask(y, x); };
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x)
      if (label[std::size_t(y * w + x)] == best_label && best_label >= 0 &&
          (unset(y - 1, x) || unset(y + 1, x) || unset(y, x - 1) || unset(y, x + 1)))
        out.push_back({x, y});
  return out;
}

FeatureMap<double> direct_conv(const FeatureMap<double>& x, const Kernel<double>& w, const Vector<double>& bias,
                               int stride, int groups) {
  const Eigen::Index c_in = x.dimension(0), h = x.dimension(1), wd = x.dimension(2);
  const Eigen::Index c_out = w.dimension(0), per_in = w.dimension(1), kh = w.dimension(2), kw = w.dimension(3);
  const Eigen::Index top = (kh - 1) / 2, left = (kw - 1) / 2;
  FeatureMap<double> padded = make(c_in, h + kh - 1, wd + kw - 1);
  for (Eigen::Index c = 0; c < c_in; ++c)
    for (Eigen::Index i = 0; i < h; ++i)
      for (Eigen::Index j = 0; j < wd; ++j) padded(c, i + top, j + left) = x(c, i, j);
  const Eigen::Index oh = (padded.dimension(1) - kh) / stride + 1;
  const Eigen::Index ow = (padded.dimension(2) - kw) / stride + 1;
  const Eigen::Index per_out = c_out / groups;
  FeatureMap<double> out = make(c_out, oh, ow);
  for (Eigen::Index o = 0; o < c_out; ++o)
    for (Eigen::Index i = 0; i < oh; ++i)
      for (Eigen::Index j = 0; j < ow; ++j) {
        double acc = bias.size() ? bias(o) : 0.0;
        for (Eigen::Index ci = 0; ci < per_in; ++ci)
          for (Eigen::Index a = 0; a < kh; ++a)
            for (Eigen::Index b = 0; b < kw; ++b)
              acc += w(o, ci, a, b) * padded((o / per_out) * per_in + ci, i * stride + a, j * stride + b);
        out(o, i, j) = acc;
      }
  return out;
}

FeatureMap<double> direct_deform_conv(const FeatureMap<double>& x, const Kernel<double>& w,
                                      const Vector<double>& bias, const FeatureMap<double>& offsets) {
  const Eigen::Index h = x.dimension(1), wd = x.dimension(2);
  const Eigen::Index c_out = w.dimension(0), per_in = w.dimension(1), kh = w.dimension(2), kw = w.dimension(3);
  const Eigen::Index groups = x.dimension(0) / per_in, per_out = c_out / groups;
  FeatureMap<double> out = make(c_out, h, wd);
  for (Eigen::Index o = 0; o < c_out; ++o)
    for (Eigen::Index i = 0; i < h; ++i)
      for (Eigen::Index j = 0; j < wd; ++j) {
        double acc = bias.size() ? bias(o) : 0.0;
        for (Eigen::Index a = 0; a < kh; ++a)
          for (Eigen::Index b = 0; b < kw; ++b) {
            const Eigen::Index k = a * kw + b;
            const double py = double(i - (kh - 1) / 2 + a) + offsets(2 * k, i, j);
            const double px = double(j - (kw - 1) / 2 + b) + offsets(2 * k + 1, i, j);
            const auto y0 = Eigen::Index(std::floor(py)), x0 = Eigen::Index(std::floor(px));
            for (Eigen::Index ci = 0; ci < per_in; ++ci) {
              double v = 0;
              for (Eigen::Index yy = y0; yy <= y0 + 1; ++yy)
                for (Eigen::Index xx = x0; xx <= x0 + 1; ++xx) {
                  if (yy < 0 || xx < 0 || yy >= h || xx >= wd) continue;
                  const double tent = std::max(0.0, 1 - std::abs(py - double(yy))) *
                                      std::max(0.0, 1 - std::abs(px - double(xx)));
                  v += tent * x((o / per_out) * per_in + ci, yy, xx);
                }
              acc += w(o, ci, a, b) * v;
            }
          }
        out(o, i, j) = acc;
      }
  return out;
}

FeatureMap<double> matrix_bilinear_upsample(const FeatureMap<double>& x, int factor) {
  auto interp = [factor](Eigen::Index n) {
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n * factor, n);
    for (Eigen::Index o = 0; o < n * factor; ++o) {
      const double src = std::max(0.0, (double(o) + 0.5) / factor - 0.5);
      const Eigen::Index lo = std::min(Eigen::Index(src), n - 1);
      const Eigen::Index hi = std::min(lo + 1, n - 1);
      a(o, lo) += 1 - (src - double(lo));
      a(o, hi) += src - double(lo);
    }
    return a;
  };
  const Eigen::MatrixXd ah = interp(x.dimension(1)), aw = interp(x.dimension(2));
  FeatureMap<double> out = make(x.dimension(0), ah.rows(), aw.rows());
  for (Eigen::Index c = 0; c < x.dimension(0); ++c) {
    Eigen::MatrixXd plane(x.dimension(1), x.dimension(2));
    for (Eigen::Index i = 0; i < plane.rows(); ++i)
      for (Eigen::Index j = 0; j < plane.cols(); ++j) plane(i, j) = x(c, i, j);
    const Eigen::MatrixXd up = ah * plane * aw.transpose();
    for (Eigen::Index i = 0; i < up.rows(); ++i)
      for (Eigen::Index j = 0; j < up.cols(); ++j) out(c, i, j) = up(i, j);
  }
  return out;
}

FeatureMap<double> dasp_oracle(const FeatureMap<double>& x_up, const kernels::DaspParams<double>& p, double alpha) {
  const Eigen::Index quarter = x_up.dimension(0) / 4;
  const FeatureMap<double> g0 = channel_slice(x_up, 0, quarter), g1 = channel_slice(x_up, quarter, quarter),
                           g2 = channel_slice(x_up, 2 * quarter, quarter),
                           g3 = channel_slice(x_up, 3 * quarter, quarter);
  const FeatureMap<double> offsets = conv(g3, p.offset);
  const std::vector<FeatureMap<double>> branches{conv(g0, p.horizontal), conv(g1, p.vertical), conv(g2, p.deep),
                                                 direct_deform_conv(g3, p.deform.weight, p.deform.bias, offsets)};
  Eigen::Index total = 0;
  for (const auto& b : branches) total += b.dimension(0);
  FeatureMap<double> cat = make(total, x_up.dimension(1), x_up.dimension(2));
  Eigen::Index at = 0;
  for (const auto& b : branches)
    for (Eigen::Index c = 0; c < b.dimension(0); ++c, ++at)
      for (Eigen::Index i = 0; i < b.dimension(1); ++i)
        for (Eigen::Index j = 0; j < b.dimension(2); ++j) cat(at, i, j) = b(c, i, j);
  const FeatureMap<double> proj = conv(cat, p.projection);
  FeatureMap<double> out = make(x_up.dimension(0), x_up.dimension(1), x_up.dimension(2));
  for (Eigen::Index c = 0; c < out.dimension(0); ++c)
    for (Eigen::Index i = 0; i < out.dimension(1); ++i)
      for (Eigen::Index j = 0; j < out.dimension(2); ++j) out(c, i, j) = alpha * x_up(c, i, j) + proj(c, i, j);
  return out;
}

FeatureMap<double> darh_oracle(const FeatureMap<double>& x, const kernels::DarhParams<double>& p,
                               const kernels::ResidualGains<double>& gains) {
  const FeatureMap<double> x_up = affine_relu(conv(conv(x, p.expand.depthwise), p.expand.pointwise), p.expand.norm);
  const FeatureMap<double> x_t = dasp_oracle(x_up, p.dasp, 0.0);
  FeatureMap<double> inner = make(x_up.dimension(0), x_up.dimension(1), x_up.dimension(2));
  for (Eigen::Index c = 0; c < inner.dimension(0); ++c)
    for (Eigen::Index i = 0; i < inner.dimension(1); ++i)
      for (Eigen::Index j = 0; j < inner.dimension(2); ++j)
        inner(c, i, j) = x_up(c, i, j) + gains.alpha * x_t(c, i, j);
  const FeatureMap<double> head = affine_relu(conv(inner, p.delta), p.norm);
  FeatureMap<double> out = make(x.dimension(0), x.dimension(1), x.dimension(2));
  for (Eigen::Index c = 0; c < out.dimension(0); ++c)
    for (Eigen::Index i = 0; i < out.dimension(1); ++i)
      for (Eigen::Index j = 0; j < out.dimension(2); ++j) out(c, i, j) = gains.beta * x(c, i, j) + head(c, i, j);
  return out;
}

}  // namespace leafkit::oracle
