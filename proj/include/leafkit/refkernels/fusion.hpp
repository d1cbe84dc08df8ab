#pragma once

#include <algorithm>
#include <span>
#include <vector>

#include "leafkit/refkernels/conv.hpp"

namespace leafkit::kernels {

enum class AlignMode { up, down };

namespace detail {

inline bool is_power_of_two(Eigen::Index v) { return v > 0 && (v & (v - 1)) == 0; }

inline Eigen::Index level_ratio(Extent from, Extent to, AlignMode mode) {
  const Extent big = mode == AlignMode::up ? to : from;
  const Extent small = mode == AlignMode::up ? from : to;
  if (small.rows < 1 || small.cols < 1 || big.rows % small.rows != 0 || big.cols % small.cols != 0)
    throw ValidationError("align_level: resolutions are not an integral ratio apart");
  const Eigen::Index r = big.rows / small.rows;
  if (big.cols / small.cols != r || !is_power_of_two(r))
    throw ValidationError("align_level: ratio must be the same power of two on both axes");
  return r;
}

}  // namespace detail

/// Bilinear resize by an integer factor with half-pixel centres and edge
/// clamping (corner pixels keep their value).
template <typename Scalar>
FeatureMap<Scalar> upsample_bilinear(const FeatureMap<Scalar>& x, Eigen::Index factor) {
  const Eigen::Index h = x.dimension(1), w = x.dimension(2);
  FeatureMap<Scalar> out(channels(x), h * factor, w * factor);
  auto source = [&](Eigen::Index o, Eigen::Index n, Eigen::Index& lo, Eigen::Index& hi, Scalar& frac) {
    const Scalar s = std::max(Scalar(0), (Scalar(o) + Scalar(0.5)) / Scalar(factor) - Scalar(0.5));
    lo = std::min(Eigen::Index(std::floor(s)), n - 1);
    hi = std::min(lo + 1, n - 1);
    frac = s - Scalar(lo);
  };
  for (Eigen::Index i = 0; i < h * factor; ++i) {
    Eigen::Index y0, y1;
    Scalar ly;
    source(i, h, y0, y1, ly);
    for (Eigen::Index j = 0; j < w * factor; ++j) {
      Eigen::Index x0, x1;
      Scalar lx;
      source(j, w, x0, x1, lx);
      for (Eigen::Index c = 0; c < channels(x); ++c)
        out(c, i, j) = (Scalar(1) - ly) * ((Scalar(1) - lx) * x(c, y0, x0) + lx * x(c, y0, x1)) +
                       ly * ((Scalar(1) - lx) * x(c, y1, x0) + lx * x(c, y1, x1));
    }
  }
  return out;
}

/// Non-overlapping max pooling with window = stride = factor.
template <typename Scalar>
FeatureMap<Scalar> max_pool(const FeatureMap<Scalar>& x, Eigen::Index factor) {
  const Eigen::Index h = x.dimension(1) / factor, w = x.dimension(2) / factor;
  FeatureMap<Scalar> out(channels(x), h, w);
  for (Eigen::Index c = 0; c < channels(x); ++c)
    for (Eigen::Index i = 0; i < h; ++i)
      for (Eigen::Index j = 0; j < w; ++j) {
        Scalar m = x(c, i * factor, j * factor);
        for (Eigen::Index a = 0; a < factor; ++a)
          for (Eigen::Index b = 0; b < factor; ++b) m = std::max(m, x(c, i * factor + a, j * factor + b));
        out(c, i, j) = m;
      }
  return out;
}

/// Brings a pyramid level to `target`: bilinear when going up, max pooling when
/// going down. Equal extents return the input unchanged.
template <typename Scalar>
FeatureMap<Scalar> align_level(const FeatureMap<Scalar>& src, Extent target, AlignMode mode) {
  if (extent(src) == target) return src;
  const Eigen::Index r = detail::level_ratio(extent(src), target, mode);
  return mode == AlignMode::up ? upsample_bilinear(src, r) : max_pool(src, r);
}

/// Same, with the direction inferred from the extents.
template <typename Scalar>
FeatureMap<Scalar> align_level(const FeatureMap<Scalar>& src, Extent target) {
  return align_level(src, target, src.dimension(1) < target.rows ? AlignMode::up : AlignMode::down);
}

/// Per-source mixing weights for one target level, nonnegative and summing to 1.
template <typename Scalar>
class AsffWeights {
 public:
  /// Softmax over raw learned logits.
  static AsffWeights from_logits(const Vector<Scalar>& logits) {
    if (logits.size() == 0) throw ValidationError("ASFF weights: empty");
    const Scalar m = logits.maxCoeff();
    Vector<Scalar> e = (logits.array() - m).exp();
    return AsffWeights(e / e.sum());
  }

  /// Nonnegative weights rescaled to sum 1.
  static AsffWeights from_nonnegative(const Vector<Scalar>& w) {
    if (w.size() == 0 || (w.array() < Scalar(0)).any() || !(w.sum() > Scalar(0)))
      throw ValidationError("ASFF weights: need nonnegative values with a positive sum");
    return AsffWeights(w / w.sum());
  }

  const Vector<Scalar>& values() const { return w_; }
  Eigen::Index size() const { return w_.size(); }

 private:
  explicit AsffWeights(Vector<Scalar> w) : w_(std::move(w)) {}
  Vector<Scalar> w_;
};

template <typename Scalar>
FeatureMap<Scalar> asff_fuse(std::span<const FeatureMap<Scalar>> sources,
                             const AsffWeights<Scalar>& weights, Extent target) {
  if (sources.empty() || Eigen::Index(sources.size()) != weights.size())
    throw ValidationError("asff_fuse: need one weight per source level");
  const Eigen::Index c = channels(sources.front());
  FeatureMap<Scalar> out = zeros<Scalar>(c, target.rows, target.cols);
  for (std::size_t k = 0; k < sources.size(); ++k) {
    if (channels(sources[k]) != c) throw ValidationError("asff_fuse: channel counts differ");
    out += align_level(sources[k], target) * weights.values()(Eigen::Index(k));
  }
  return out;
}

/// Top-down pixel-wise addition: bilinear x2 of the coarser map plus the finer one.
template <typename Scalar>
FeatureMap<Scalar> tafu_fuse(const FeatureMap<Scalar>& low, const FeatureMap<Scalar>& high) {
  if (channels(low) != channels(high)) throw ValidationError("tafu_fuse: channel counts differ");
  if (high.dimension(1) != 2 * low.dimension(1) || high.dimension(2) != 2 * low.dimension(2))
    throw ValidationError("tafu_fuse: the coarse map must be exactly one pyramid step smaller");
  return upsample_bilinear(low, 2) + high;
}

template <typename Scalar>
struct TcfuParams {
  ConvParams<Scalar> reduce;               // C -> C/2, expected 1x1
  TransposedConvParams<Scalar> upsample;   // C/2 -> C/2, doubles the extent
};

/// Top-down concatenation: reduce the coarse map to C/2 channels, upsample it
/// with a transposed convolution and concatenate the finer map after it.
template <typename Scalar>
FeatureMap<Scalar> tcfu_fuse(const FeatureMap<Scalar>& low, const FeatureMap<Scalar>& high,
                             const TcfuParams<Scalar>& params) {
  const Eigen::Index c = channels(low);
  if (c % 2 != 0) throw ValidationError("tcfu_fuse: coarse map needs an even channel count");
  if (params.reduce.out_channels() != c / 2)
    throw ValidationError("tcfu_fuse: reduction must produce C/2 channels");
  const FeatureMap<Scalar> reduced = conv2d(low, params.reduce);
  const FeatureMap<Scalar> up = transposed_conv2d(reduced, params.upsample);
  if (!(extent(up) == extent(high)))
    throw ValidationError("tcfu_fuse: upsampled map does not match the finer level");
  return concat_channels(up, high);
}

/// Recursive top-down chain. `levels` runs coarse to fine; stage k fuses the
/// running result with levels[k + 1] using params[k].
template <typename Scalar>
FeatureMap<Scalar> tcfu_pyramid(std::span<const FeatureMap<Scalar>> levels,
                                std::span<const TcfuParams<Scalar>> params) {
  if (levels.empty() || params.size() + 1 != levels.size())
    throw ValidationError("tcfu_pyramid: need one parameter set per fusion stage");
  FeatureMap<Scalar> running = levels.front();
  for (std::size_t k = 0; k < params.size(); ++k) running = tcfu_fuse(running, levels[k + 1], params[k]);
  return running;
}

}  // namespace leafkit::kernels
