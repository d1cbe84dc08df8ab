#pragma once

#include <array>
#include <cmath>
#include <optional>
#include <span>

#include "leafkit/refkernels/conv.hpp"

namespace leafkit::kernels {

/// Depthwise KxK, then pointwise 1x1, then folded normalization and ReLU.
template <typename Scalar>
struct DepthwiseSeparableParams {
  ConvParams<Scalar> depthwise;  // (C, 1, K, K), groups = C
  ConvParams<Scalar> pointwise;  // (C_out, C, 1, 1)
  ChannelAffine<Scalar> norm;    // C_out
};

template <typename Scalar>
FeatureMap<Scalar> dwconv_block(const FeatureMap<Scalar>& x, const DepthwiseSeparableParams<Scalar>& p) {
  const auto& dw = p.depthwise;
  if (dw.groups != channels(x) || dw.weight.dimension(1) != 1 || dw.out_channels() != channels(x))
    throw ValidationError("dwconv_block: depthwise kernel must be (C, 1, K, K) with groups = C");
  if (dw.stride != 1 || p.pointwise.stride != 1)
    throw ValidationError("dwconv_block: stride must be 1 to preserve the extent");
  if (p.pointwise.kernel_rows() != 1 || p.pointwise.kernel_cols() != 1)
    throw ValidationError("dwconv_block: pointwise kernel must be 1x1");
  return relu(p.norm.apply(conv2d(conv2d(x, dw), p.pointwise)));
}

enum class ShapeKind { horizontal, vertical, deep, deform };

/// One DASP branch. Horizontal takes a 1xK kernel, vertical Kx1, deep a
/// depthwise KxK, deform a KxK kernel plus an offset field (2*K*K, H, W).
template <typename Scalar>
FeatureMap<Scalar> shape_conv(const FeatureMap<Scalar>& x, ShapeKind kind, const ConvParams<Scalar>& p,
                              const FeatureMap<Scalar>* offsets = nullptr) {
  const Eigen::Index kh = p.kernel_rows(), kw = p.kernel_cols();
  if (p.stride != 1) throw ValidationError("shape_conv: stride must be 1");
  if (kind != ShapeKind::deform && offsets)
    throw ValidationError("shape_conv: offsets are only accepted by the deformable branch");
  switch (kind) {
    case ShapeKind::horizontal:
      if (kh != 1) throw ValidationError("shape_conv: horizontal branch needs a 1xK kernel");
      return conv2d(x, p);
    case ShapeKind::vertical:
      if (kw != 1) throw ValidationError("shape_conv: vertical branch needs a Kx1 kernel");
      return conv2d(x, p);
    case ShapeKind::deep:
      if (kh != kw || p.groups != channels(x) || p.weight.dimension(1) != 1)
        throw ValidationError("shape_conv: deep branch needs a depthwise KxK kernel");
      return conv2d(x, p);
    case ShapeKind::deform:
      if (kh != kw) throw ValidationError("shape_conv: deformable branch needs a KxK kernel");
      if (!offsets) throw ValidationError("shape_conv: deformable branch needs an offset field");
      return deform_conv2d(x, p, *offsets);
  }
  throw ValidationError("shape_conv: unknown branch kind");
}

inline constexpr double kDaspResidualGain = 0.3;

template <typename Scalar>
struct DaspParams {
  ConvParams<Scalar> horizontal;
  ConvParams<Scalar> vertical;
  ConvParams<Scalar> deep;
  ConvParams<Scalar> deform;
  ConvParams<Scalar> offset;      // predicts the deformable offsets from its group
  ConvParams<Scalar> projection;  // 1x1, concat channels -> input channels
};

/// Split into four channel groups, run the four branches, concatenate and
/// project back to the input depth.
template <typename Scalar>
FeatureMap<Scalar> dasp_transform(const FeatureMap<Scalar>& x_up, const DaspParams<Scalar>& p) {
  if (channels(x_up) % 4 != 0)
    throw ValidationError("dasp: channel count must be divisible by 4");
  const auto groups = split_channels(x_up, 4);
  const FeatureMap<Scalar> offsets = conv2d(groups[3], p.offset);
  const std::array<FeatureMap<Scalar>, 4> branches{
      shape_conv(groups[0], ShapeKind::horizontal, p.horizontal),
      shape_conv(groups[1], ShapeKind::vertical, p.vertical),
      shape_conv(groups[2], ShapeKind::deep, p.deep),
      shape_conv(groups[3], ShapeKind::deform, p.deform, &offsets)};
  const FeatureMap<Scalar> cat = concat_channels<Scalar>(std::span<const FeatureMap<Scalar>>(branches));
  if (p.projection.kernel_rows() != 1 || p.projection.kernel_cols() != 1 ||
      p.projection.out_channels() != channels(x_up))
    throw ValidationError("dasp: projection must be 1x1 and restore the input channel count");
  return conv2d(cat, p.projection);
}

/// alpha * x_up + projection.
template <typename Scalar>
FeatureMap<Scalar> dasp_forward(const FeatureMap<Scalar>& x_up, const DaspParams<Scalar>& p,
                                Scalar alpha = Scalar(kDaspResidualGain)) {
  return x_up * alpha + dasp_transform(x_up, p);
}

template <typename Scalar>
struct ResidualGains {
  Scalar alpha{1};                          // weight of the DASP features inside the head
  Scalar beta{1};                           // outer residual on the head input
  Scalar dasp_alpha{Scalar(kDaspResidualGain)};
};

template <typename Scalar>
struct DarhParams {
  DepthwiseSeparableParams<Scalar> expand;  // C -> C_up
  DaspParams<Scalar> dasp;                  // on C_up
  ConvParams<Scalar> delta;                 // C_up -> C
  ChannelAffine<Scalar> norm;               // C
};

/// beta * x + ReLU(norm(delta(x_up + alpha * x_T))), with x_up the expanded
/// input and x_T the projected DASP branch features.
template <typename Scalar>
FeatureMap<Scalar> darh_forward(const FeatureMap<Scalar>& x, const DarhParams<Scalar>& p,
                                const ResidualGains<Scalar>& gains) {
  const FeatureMap<Scalar> x_up = dwconv_block(x, p.expand);
  const FeatureMap<Scalar> x_t = dasp_transform(x_up, p.dasp);
  const FeatureMap<Scalar> inner = x_up + x_t * gains.alpha;
  const FeatureMap<Scalar> restored = conv2d(inner, p.delta);
  if (restored.dimensions() != x.dimensions())
    throw ValidationError("darh: delta convolution must restore the input shape");
  return x * gains.beta + relu(p.norm.apply(restored));
}

/// sqrt(min(l,r)/max(l,r) * min(t,b)/max(t,b)).
template <typename Scalar>
Scalar centerness_target(Scalar l, Scalar r, Scalar t, Scalar b) {
  if (l < 0 || r < 0 || t < 0 || b < 0)
    throw ValidationError("centerness: distances must be nonnegative");
  if (!(l + r > 0) || !(t + b > 0)) throw ValidationError("centerness: degenerate box");
  return std::sqrt((std::min(l, r) / std::max(l, r)) * (std::min(t, b) / std::max(t, b)));
}

/// Three pointwise layers of the instance mask head: 10 -> 8 -> 8 -> 1.
template <typename Scalar>
struct DynamicMaskParams {
  static constexpr Eigen::Index kInputChannels = 10;  // 8 mask features + 2 coordinates
  static constexpr Eigen::Index kHidden = 8;
  static constexpr std::array<Eigen::Index, 3> kLayerSizes{kHidden * kInputChannels + kHidden,
                                                           kHidden * kHidden + kHidden, kHidden + 1};
  static constexpr Eigen::Index kTotal = kLayerSizes[0] + kLayerSizes[1] + kLayerSizes[2];

  Eigen::Matrix<Scalar, kHidden, kInputChannels, Eigen::RowMajor> w1;
  Eigen::Matrix<Scalar, kHidden, 1> b1;
  Eigen::Matrix<Scalar, kHidden, kHidden, Eigen::RowMajor> w2;
  Eigen::Matrix<Scalar, kHidden, 1> b2;
  Eigen::Matrix<Scalar, 1, kHidden> w3;
  Scalar b3{0};
};

static_assert(DynamicMaskParams<double>::kTotal == 169);

/// Order-preserving split: each layer takes its weights (row-major, out x in)
/// followed by its biases, layer 1 first.
template <typename Scalar>
DynamicMaskParams<Scalar> controller_split(std::span<const Scalar> theta) {
  using P = DynamicMaskParams<Scalar>;
  if (Eigen::Index(theta.size()) != P::kTotal)
    throw ValidationError("controller_split: expected " + std::to_string(P::kTotal) +
                          " parameters, got " + std::to_string(theta.size()));
  P p;
  std::size_t at = 0;
  auto take = [&](auto& dst) {
    for (Eigen::Index i = 0; i < dst.rows(); ++i)
      for (Eigen::Index j = 0; j < dst.cols(); ++j) dst(i, j) = theta[at++];
  };
  take(p.w1);
  take(p.b1);
  take(p.w2);
  take(p.b2);
  take(p.w3);
  p.b3 = theta[at++];
  return p;
}

/// Mask features with two coordinate channels appended: (x - cx) / scale and
/// (y - cy) / scale in pixel units of the feature map.
template <typename Scalar>
FeatureMap<Scalar> append_relative_coords(const FeatureMap<Scalar>& features, Scalar cx, Scalar cy,
                                          Scalar scale) {
  const Eigen::Index h = features.dimension(1), w = features.dimension(2);
  FeatureMap<Scalar> coords(2, h, w);
  for (Eigen::Index i = 0; i < h; ++i)
    for (Eigen::Index j = 0; j < w; ++j) {
      coords(0, i, j) = (Scalar(j) - cx) / scale;
      coords(1, i, j) = (Scalar(i) - cy) / scale;
    }
  return concat_channels(features, coords);
}

template <typename Scalar>
FeatureMap<Scalar> dynamic_mask_head(const FeatureMap<Scalar>& features,
                                     const DynamicMaskParams<Scalar>& p) {
  using P = DynamicMaskParams<Scalar>;
  if (channels(features) != P::kInputChannels)
    throw ValidationError("dynamic_mask_head: expected 10 input channels");
  const Eigen::Index h = features.dimension(1), w = features.dimension(2);
  using Plane = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  const Eigen::Map<const Plane> x(features.data(), P::kInputChannels, h * w);
  const Plane h1 = ((p.w1 * x).colwise() + p.b1).cwiseMax(Scalar(0));
  const Plane h2 = ((p.w2 * h1).colwise() + p.b2).cwiseMax(Scalar(0));
  const Plane logits = (p.w3 * h2).array() + p.b3;
  FeatureMap<Scalar> out(1, h, w);
  Eigen::Map<Plane>(out.data(), 1, h * w) =
      logits.unaryExpr([](Scalar v) { return Scalar(1) / (Scalar(1) + std::exp(-v)); });
  return out;
}

}  // namespace leafkit::kernels
