#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "leafkit/error.hpp"
#include "leafkit/numeric.hpp"
#include "leafkit/types.hpp"

namespace leafkit::losses {

struct LossConfig {
  double lambda_cls = 0.5;
  double lambda_bbox = 2.0;
  double lambda_cent = 0.5;
  double lambda_mask = 2.0;
  double focal_alpha = 0.25;
  double focal_gamma = 2.0;
  double dice_epsilon = 1e-6;
  double log_clamp = 1e-7;  // floor on probabilities passed to log

  void validate() const {
    if (!(lambda_cls > 0) || !(lambda_bbox > 0) || !(lambda_cent > 0) || !(lambda_mask > 0))
      throw ValidationError("loss config: every lambda must be > 0");
    if (!(focal_alpha > 0 && focal_alpha < 1)) throw ValidationError("loss config: focal alpha must be in (0, 1)");
    if (!(focal_gamma >= 0) || !std::isfinite(focal_gamma))
      throw ValidationError("loss config: focal gamma must be >= 0");
    if (!(dice_epsilon > 0)) throw ValidationError("loss config: dice epsilon must be > 0");
    if (!(log_clamp > 0 && log_clamp < 0.5)) throw ValidationError("loss config: log clamp must be in (0, 0.5)");
  }
};

/// Loss value plus whether any input had to be clamped away from a log singularity.
template <typename Scalar>
struct LossValue {
  Scalar value{0};
  bool clamped{false};
};

namespace detail {

template <typename Scalar>
void require_nonempty(std::span<const Scalar> v, const char* what) {
  if (v.empty()) throw ValidationError(std::string(what) + ": empty input");
}

template <typename Scalar>
void require_same_size(std::span<const Scalar> a, std::span<const Scalar> b, const char* what) {
  if (a.size() != b.size()) throw ValidationError(std::string(what) + ": length mismatch");
}

template <typename Scalar>
void require_unit(Scalar v, const char* what, bool allow_zero = true) {
  if (!(v >= Scalar(0) && v <= Scalar(1)) || (!allow_zero && v == Scalar(0)))
    throw ValidationError(std::string(what) + ": values must lie in [0, 1]");
}

// (1 - p)^gamma and its derivative in p; 0^0 = 1 and 0^(negative) is never needed
// because the derivative term carries a factor gamma.
template <typename Scalar>
std::array<Scalar, 2> modulating(Scalar p, Scalar gamma) {
  const Scalar q = Scalar(1) - p;
  const Scalar f = std::pow(q, gamma);
  const Scalar df = gamma == Scalar(0) ? Scalar(0) : -gamma * std::pow(q, gamma - Scalar(1));
  return {f, df};
}

}  // namespace detail

/// -(1/N) sum alpha (1 - p)^gamma log p, p the probability of the true class.
template <typename Scalar>
LossValue<Scalar> focal_loss(std::span<const Scalar> p, const LossConfig& cfg = {}) {
  detail::require_nonempty(p, "focal_loss");
  LossValue<Scalar> out;
  CompensatedSum<Scalar> acc;
  for (Scalar v : p) {
    detail::require_unit(v, "focal_loss");
    if (v < Scalar(cfg.log_clamp)) {
      v = Scalar(cfg.log_clamp);
      out.clamped = true;
    }
    acc += Scalar(cfg.focal_alpha) * detail::modulating(v, Scalar(cfg.focal_gamma))[0] * std::log(v);
  }
  out.value = -acc.value() / Scalar(p.size());
  return out;
}

/// d focal_loss / d p_i. Clamped entries have zero gradient.
template <typename Scalar>
std::vector<Scalar> focal_loss_gradient(std::span<const Scalar> p, const LossConfig& cfg = {}) {
  detail::require_nonempty(p, "focal_loss_gradient");
  std::vector<Scalar> g(p.size());
  const Scalar n = Scalar(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    detail::require_unit(p[i], "focal_loss_gradient");
    if (p[i] < Scalar(cfg.log_clamp)) continue;
    const auto [f, df] = detail::modulating(p[i], Scalar(cfg.focal_gamma));
    g[i] = -Scalar(cfg.focal_alpha) * (df * std::log(p[i]) + f / p[i]) / n;
  }
  return g;
}

template <typename Scalar>
void check_box(const Box<Scalar>& b, const char* what) {
  if (!std::isfinite(double(b.x_min)) || !std::isfinite(double(b.y_min)) || !std::isfinite(double(b.x_max)) ||
      !std::isfinite(double(b.y_max)))
    throw ValidationError(std::string(what) + ": box has non-finite coordinates");
  if (!(b.width() > Scalar(0)) || !(b.height() > Scalar(0)))
    throw ValidationError(std::string(what) + ": box has zero area");
}

/// IoU - |C \ (A u B)| / |C| with C the smallest enclosing box.
template <typename Scalar>
Scalar giou(const Box<Scalar>& a, const Box<Scalar>& b) {
  check_box(a, "giou");
  check_box(b, "giou");
  const Scalar iw = std::max(Scalar(0), std::min(a.x_max, b.x_max) - std::max(a.x_min, b.x_min));
  const Scalar ih = std::max(Scalar(0), std::min(a.y_max, b.y_max) - std::max(a.y_min, b.y_min));
  const Scalar inter = iw * ih;
  const Scalar uni = a.area() + b.area() - inter;
  const Scalar hull = (std::max(a.x_max, b.x_max) - std::min(a.x_min, b.x_min)) *
                      (std::max(a.y_max, b.y_max) - std::min(a.y_min, b.y_min));
  return inter / uni - (hull - uni) / hull;
}

template <typename Scalar>
Scalar giou_loss(const Box<Scalar>& pred, const Box<Scalar>& target) {
  return Scalar(1) - giou(pred, target);
}

/// d giou_loss / d (x_min, y_min, x_max, y_max) of the predicted box. At ties
/// between min/max branches the target's edge is taken as active.
template <typename Scalar>
std::array<Scalar, 4> giou_loss_gradient(const Box<Scalar>& p, const Box<Scalar>& t) {
  check_box(p, "giou_loss_gradient");
  check_box(t, "giou_loss_gradient");
  const Scalar iw_raw = std::min(p.x_max, t.x_max) - std::max(p.x_min, t.x_min);
  const Scalar ih_raw = std::min(p.y_max, t.y_max) - std::max(p.y_min, t.y_min);
  const bool overlap = iw_raw > Scalar(0) && ih_raw > Scalar(0);
  const Scalar iw = overlap ? iw_raw : Scalar(0), ih = overlap ? ih_raw : Scalar(0);
  const Scalar cw = std::max(p.x_max, t.x_max) - std::min(p.x_min, t.x_min);
  const Scalar ch = std::max(p.y_max, t.y_max) - std::min(p.y_min, t.y_min);
  const Scalar inter = iw * ih, uni = p.area() + t.area() - inter, hull = cw * ch;

  // Partials of the intersection extents, predicted area and hull extents.
  const std::array<Scalar, 4> d_iw{overlap && p.x_min > t.x_min ? Scalar(-1) : Scalar(0), Scalar(0),
                                   overlap && p.x_max < t.x_max ? Scalar(1) : Scalar(0), Scalar(0)};
  const std::array<Scalar, 4> d_ih{Scalar(0), overlap && p.y_min > t.y_min ? Scalar(-1) : Scalar(0),
                                   Scalar(0), overlap && p.y_max < t.y_max ? Scalar(1) : Scalar(0)};
  const std::array<Scalar, 4> d_area{-p.height(), -p.width(), p.height(), p.width()};
  const std::array<Scalar, 4> d_cw{p.x_min < t.x_min ? Scalar(-1) : Scalar(0), Scalar(0),
                                   p.x_max > t.x_max ? Scalar(1) : Scalar(0), Scalar(0)};
  const std::array<Scalar, 4> d_ch{Scalar(0), p.y_min < t.y_min ? Scalar(-1) : Scalar(0), Scalar(0),
                                   p.y_max > t.y_max ? Scalar(1) : Scalar(0)};
  std::array<Scalar, 4> g{};
  for (int k = 0; k < 4; ++k) {
    const Scalar d_inter = d_iw[k] * ih + iw * d_ih[k];
    const Scalar d_uni = d_area[k] - d_inter;
    const Scalar d_hull = d_cw[k] * ch + cw * d_ch[k];
    const Scalar d_giou = (d_inter * uni - inter * d_uni) / (uni * uni) + (d_uni * hull - uni * d_hull) / (hull * hull);
    g[k] = -d_giou;
  }
  return g;
}

/// Mean GIoU loss over paired boxes.
template <typename Scalar>
Scalar giou_loss(std::span<const Box<Scalar>> pred, std::span<const Box<Scalar>> target) {
  if (pred.empty() || pred.size() != target.size())
    throw ValidationError("giou_loss: need equally many nonzero predicted and target boxes");
  CompensatedSum<Scalar> acc;
  for (std::size_t i = 0; i < pred.size(); ++i) acc += giou_loss(pred[i], target[i]);
  return acc.value() / Scalar(pred.size());
}

/// Mean binary cross-entropy between centerness targets and predictions.
template <typename Scalar>
LossValue<Scalar> centerness_loss(std::span<const Scalar> target, std::span<const Scalar> pred,
                                  const LossConfig& cfg = {}) {
  detail::require_nonempty(target, "centerness_loss");
  detail::require_same_size(target, pred, "centerness_loss");
  LossValue<Scalar> out;
  CompensatedSum<Scalar> acc;
  const Scalar lo = Scalar(cfg.log_clamp), hi = Scalar(1) - Scalar(cfg.log_clamp);
  for (std::size_t i = 0; i < target.size(); ++i) {
    detail::require_unit(target[i], "centerness_loss");
    detail::require_unit(pred[i], "centerness_loss");
    const Scalar c = target[i];
    Scalar q = pred[i];
    if (q < lo || q > hi) {
      q = std::clamp(q, lo, hi);
      out.clamped = true;
    }
    acc += c * std::log(q) + (Scalar(1) - c) * std::log(Scalar(1) - q);
  }
  out.value = -acc.value() / Scalar(target.size());
  return out;
}

/// d centerness_loss / d pred_i. Clamped entries have zero gradient.
template <typename Scalar>
std::vector<Scalar> centerness_loss_gradient(std::span<const Scalar> target, std::span<const Scalar> pred,
                                             const LossConfig& cfg = {}) {
  detail::require_nonempty(target, "centerness_loss_gradient");
  detail::require_same_size(target, pred, "centerness_loss_gradient");
  const Scalar lo = Scalar(cfg.log_clamp), hi = Scalar(1) - Scalar(cfg.log_clamp);
  std::vector<Scalar> g(pred.size());
  for (std::size_t i = 0; i < pred.size(); ++i) {
    detail::require_unit(target[i], "centerness_loss_gradient");
    detail::require_unit(pred[i], "centerness_loss_gradient");
    const Scalar c = target[i], q = pred[i];
    if (q < lo || q > hi) continue;
    g[i] = -(c / q - (Scalar(1) - c) / (Scalar(1) - q)) / Scalar(pred.size());
  }
  return g;
}

/// 1 - (2 sum m_hat m + eps) / (sum m_hat^2 + sum m^2 + eps).
template <typename Scalar>
Scalar dice_loss(std::span<const Scalar> truth, std::span<const Scalar> pred, const LossConfig& cfg = {}) {
  detail::require_same_size(truth, pred, "dice_loss");
  CompensatedSum<Scalar> num, den;
  for (std::size_t j = 0; j < truth.size(); ++j) {
    detail::require_unit(truth[j], "dice_loss");
    detail::require_unit(pred[j], "dice_loss");
    num += Scalar(2) * pred[j] * truth[j];
    den += pred[j] * pred[j] + truth[j] * truth[j];
  }
  const Scalar eps = Scalar(cfg.dice_epsilon);
  return Scalar(1) - (num.value() + eps) / (den.value() + eps);
}

/// d dice_loss / d pred_j.
template <typename Scalar>
std::vector<Scalar> dice_loss_gradient(std::span<const Scalar> truth, std::span<const Scalar> pred,
                                       const LossConfig& cfg = {}) {
  detail::require_same_size(truth, pred, "dice_loss_gradient");
  CompensatedSum<Scalar> num, den;
  for (std::size_t j = 0; j < truth.size(); ++j) {
    num += Scalar(2) * pred[j] * truth[j];
    den += pred[j] * pred[j] + truth[j] * truth[j];
  }
  const Scalar eps = Scalar(cfg.dice_epsilon);
  const Scalar n = num.value() + eps, d = den.value() + eps;
  std::vector<Scalar> g(pred.size());
  for (std::size_t j = 0; j < pred.size(); ++j)
    g[j] = -(Scalar(2) * truth[j] * d - n * Scalar(2) * pred[j]) / (d * d);
  return g;
}

struct LossComponents {
  double cls{0};
  double bbox{0};
  double cent{0};
  double mask{0};
};

inline double total_loss(const LossComponents& c, const LossConfig& cfg = {}) {
  return cfg.lambda_cls * c.cls + cfg.lambda_bbox * c.bbox + cfg.lambda_cent * c.cent + cfg.lambda_mask * c.mask;
}

using ScalarFunction = std::function<double(std::span<const double>)>;
using GradientFunction = std::function<std::vector<double>(std::span<const double>)>;

inline constexpr double kGradCheckStep = 1e-5;

/// |a - n| / max(|a|, |n|, floor): relative, but absolute near zero.
inline double gradient_relative_error(double analytic, double numeric, double floor = 1e-6) {
  return std::abs(analytic - numeric) / std::max({std::abs(analytic), std::abs(numeric), floor});
}

/// Max relative error between `gradient(point)` and central differences of `loss`.
inline double grad_check(const ScalarFunction& loss, const GradientFunction& gradient,
                         std::span<const double> point, double step = kGradCheckStep) {
  if (point.empty()) throw ValidationError("grad_check: empty point");
  const std::vector<double> analytic = gradient(point);
  if (analytic.size() != point.size()) throw ValidationError("grad_check: gradient has the wrong length");
  std::vector<double> x(point.begin(), point.end());
  double worst = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double x0 = x[i];
    x[i] = x0 + step;
    const double up = loss(x);
    x[i] = x0 - step;
    const double down = loss(x);
    x[i] = x0;
    if (!std::isfinite(up) || !std::isfinite(down) || !std::isfinite(analytic[i]))
      throw ValidationError("grad_check: non-finite evaluation near the point");
    worst = std::max(worst, gradient_relative_error(analytic[i], (up - down) / (2 * step)));
  }
  return worst;
}

}  // namespace leafkit::losses
