#pragma once

#include <cmath>
#include <optional>
#include <string>

#include "leafkit/refkernels/tensor.hpp"

namespace leafkit::kernels {

/// Grouped 2-D convolution with "same" zero padding: (k-1)/2 before, the rest
/// after, so stride 1 preserves the spatial extent.
template <typename Scalar>
struct ConvParams {
  Kernel<Scalar> weight;
  Vector<Scalar> bias;  // empty means no bias
  int stride = 1;
  int groups = 1;

  Eigen::Index out_channels() const { return weight.dimension(0); }
  Eigen::Index in_channels() const { return weight.dimension(1) * groups; }
  Eigen::Index kernel_rows() const { return weight.dimension(2); }
  Eigen::Index kernel_cols() const { return weight.dimension(3); }

  void validate(const char* what = "convolution") const {
    const std::string w(what);
    if (weight.size() == 0) throw ValidationError(w + ": empty kernel");
    if (stride < 1) throw ValidationError(w + ": stride must be >= 1");
    if (groups < 1 || out_channels() % groups != 0)
      throw ValidationError(w + ": output channels not divisible by groups");
    if (bias.size() != 0 && bias.size() != out_channels())
      throw ValidationError(w + ": bias length does not match output channels");
  }
};

/// Zero kernel of the given geometry.
template <typename Scalar>
ConvParams<Scalar> zero_conv(Eigen::Index out, Eigen::Index in_per_group, Eigen::Index kh,
                             Eigen::Index kw, int groups = 1) {
  ConvParams<Scalar> p;
  p.weight = Kernel<Scalar>(out, in_per_group, kh, kw);
  p.weight.setZero();
  p.bias = Vector<Scalar>::Zero(out);
  p.groups = groups;
  return p;
}

/// Kernel that copies channel c to channel c through its centre tap.
template <typename Scalar>
ConvParams<Scalar> identity_conv(Eigen::Index c, Eigen::Index kh, Eigen::Index kw,
                                 bool depthwise = false) {
  ConvParams<Scalar> p = zero_conv<Scalar>(c, depthwise ? 1 : c, kh, kw, depthwise ? int(c) : 1);
  for (Eigen::Index o = 0; o < c; ++o) p.weight(o, depthwise ? 0 : o, (kh - 1) / 2, (kw - 1) / 2) = 1;
  return p;
}

/// Inference-mode normalization folded into y = scale * x + shift per channel.
template <typename Scalar>
struct ChannelAffine {
  Vector<Scalar> scale;
  Vector<Scalar> shift;

  static ChannelAffine identity(Eigen::Index c) {
    return {Vector<Scalar>::Ones(c), Vector<Scalar>::Zero(c)};
  }

  /// Folds batch statistics: scale = gamma / sqrt(var + eps), shift = beta - mean * scale.
  static ChannelAffine from_batch_norm(const Vector<Scalar>& gamma, const Vector<Scalar>& beta,
                                       const Vector<Scalar>& mean, const Vector<Scalar>& var,
                                       Scalar eps = Scalar(1e-5)) {
    ChannelAffine a;
    a.scale = gamma.array() / (var.array() + eps).sqrt();
    a.shift = beta.array() - mean.array() * a.scale.array();
    return a;
  }

  FeatureMap<Scalar> apply(const FeatureMap<Scalar>& x) const {
    if (scale.size() != channels(x) || shift.size() != channels(x))
      throw ValidationError("affine normalization: channel count mismatch");
    FeatureMap<Scalar> out(x.dimensions());
    for (Eigen::Index c = 0; c < channels(x); ++c)
      for (Eigen::Index i = 0; i < x.dimension(1); ++i)
        for (Eigen::Index j = 0; j < x.dimension(2); ++j)
          out(c, i, j) = scale(c) * x(c, i, j) + shift(c);
    return out;
  }
};

inline Eigen::Index same_output_size(Eigen::Index in, Eigen::Index stride) {
  return (in - 1) / stride + 1;
}

namespace detail {

template <typename Scalar>
void check_conv_input(const FeatureMap<Scalar>& x, const ConvParams<Scalar>& p, const char* what) {
  p.validate(what);
  if (channels(x) != p.in_channels())
    throw ValidationError(std::string(what) + ": input has " + std::to_string(channels(x)) +
                          " channels, kernel expects " + std::to_string(p.in_channels()));
}

// Zero outside the map; DCN-style bilinear read at fractional (y, x).
template <typename Scalar>
Scalar bilinear_zero_pad(const FeatureMap<Scalar>& x, Eigen::Index c, Scalar y, Scalar xx) {
  const Eigen::Index h = x.dimension(1), w = x.dimension(2);
  if (y <= Scalar(-1) || y >= Scalar(h) || xx <= Scalar(-1) || xx >= Scalar(w)) return Scalar(0);
  const Eigen::Index y0 = Eigen::Index(std::floor(y));
  const Eigen::Index x0 = Eigen::Index(std::floor(xx));
  const Scalar ly = y - Scalar(y0), lx = xx - Scalar(x0);
  auto at = [&](Eigen::Index r, Eigen::Index q) {
    return (r >= 0 && r < h && q >= 0 && q < w) ? x(c, r, q) : Scalar(0);
  };
  return (Scalar(1) - ly) * (Scalar(1) - lx) * at(y0, x0) + (Scalar(1) - ly) * lx * at(y0, x0 + 1) +
         ly * (Scalar(1) - lx) * at(y0 + 1, x0) + ly * lx * at(y0 + 1, x0 + 1);
}

// Shared loop for standard and deformable convolution. `sample` returns the
// input value for (channel, output row, output col, tap row, tap col, nominal y, nominal x).
template <typename Scalar, typename Sample>
FeatureMap<Scalar> conv_loop(const FeatureMap<Scalar>& x, const ConvParams<Scalar>& p,
                             Sample&& sample) {
  const Eigen::Index kh = p.kernel_rows(), kw = p.kernel_cols();
  const Eigen::Index oh = same_output_size(x.dimension(1), p.stride);
  const Eigen::Index ow = same_output_size(x.dimension(2), p.stride);
  const Eigen::Index pad_top = (kh - 1) / 2, pad_left = (kw - 1) / 2;
  const Eigen::Index in_per_group = p.weight.dimension(1);
  const Eigen::Index out_per_group = p.out_channels() / p.groups;
  FeatureMap<Scalar> out(p.out_channels(), oh, ow);
  for (Eigen::Index o = 0; o < p.out_channels(); ++o) {
    const Eigen::Index g = o / out_per_group;
    for (Eigen::Index oy = 0; oy < oh; ++oy)
      for (Eigen::Index ox = 0; ox < ow; ++ox) {
        Scalar acc = p.bias.size() ? p.bias(o) : Scalar(0);
        for (Eigen::Index ci = 0; ci < in_per_group; ++ci) {
          const Eigen::Index c = g * in_per_group + ci;
          for (Eigen::Index ky = 0; ky < kh; ++ky)
            for (Eigen::Index kx = 0; kx < kw; ++kx) {
              const Eigen::Index ny = oy * p.stride - pad_top + ky;
              const Eigen::Index nx = ox * p.stride - pad_left + kx;
              acc += p.weight(o, ci, ky, kx) * sample(c, oy, ox, ky, kx, ny, nx);
            }
        }
        out(o, oy, ox) = acc;
      }
  }
  return out;
}

}  // namespace detail

template <typename Scalar>
FeatureMap<Scalar> conv2d(const FeatureMap<Scalar>& x, const ConvParams<Scalar>& p) {
  detail::check_conv_input(x, p, "conv2d");
  const Eigen::Index h = x.dimension(1), w = x.dimension(2);
  return detail::conv_loop(x, p,
                           [&](Eigen::Index c, Eigen::Index, Eigen::Index, Eigen::Index,
                               Eigen::Index, Eigen::Index ny, Eigen::Index nx) {
                             return (ny >= 0 && ny < h && nx >= 0 && nx < w) ? x(c, ny, nx)
                                                                            : Scalar(0);
                           });
}

/// Deformable convolution. `offsets` has 2*kh*kw channels over the output
/// extent; channel 2k holds the row offset and 2k+1 the column offset of tap
/// k = ky*kw + kx. Samples are bilinear with zero padding.
template <typename Scalar>
FeatureMap<Scalar> deform_conv2d(const FeatureMap<Scalar>& x, const ConvParams<Scalar>& p,
                                 const FeatureMap<Scalar>& offsets) {
  detail::check_conv_input(x, p, "deform_conv2d");
  const Eigen::Index kh = p.kernel_rows(), kw = p.kernel_cols();
  const Eigen::Index oh = same_output_size(x.dimension(1), p.stride);
  const Eigen::Index ow = same_output_size(x.dimension(2), p.stride);
  if (offsets.dimension(0) != 2 * kh * kw || offsets.dimension(1) != oh || offsets.dimension(2) != ow)
    throw ValidationError("deform_conv2d: offset field must have shape (2*kh*kw, H_out, W_out)");
  return detail::conv_loop(x, p,
                           [&](Eigen::Index c, Eigen::Index oy, Eigen::Index ox, Eigen::Index ky,
                               Eigen::Index kx, Eigen::Index ny, Eigen::Index nx) {
                             const Eigen::Index k = ky * kw + kx;
                             const Scalar y = Scalar(ny) + offsets(2 * k, oy, ox);
                             const Scalar xx = Scalar(nx) + offsets(2 * k + 1, oy, ox);
                             return detail::bilinear_zero_pad(x, c, y, xx);
                           });
}

/// Transposed convolution; weight is (in, out, kh, kw). Output extent is
/// (in - 1) * stride - 2 * padding + k.
template <typename Scalar>
struct TransposedConvParams {
  Kernel<Scalar> weight;
  Vector<Scalar> bias;
  int stride = 2;
  int padding = 0;

  Eigen::Index in_channels() const { return weight.dimension(0); }
  Eigen::Index out_channels() const { return weight.dimension(1); }

  void validate() const {
    if (weight.size() == 0) throw ValidationError("transposed convolution: empty kernel");
    if (stride < 1 || padding < 0)
      throw ValidationError("transposed convolution: invalid stride or padding");
    if (bias.size() != 0 && bias.size() != out_channels())
      throw ValidationError("transposed convolution: bias length mismatch");
  }
};

template <typename Scalar>
FeatureMap<Scalar> transposed_conv2d(const FeatureMap<Scalar>& x, const TransposedConvParams<Scalar>& p) {
  p.validate();
  if (channels(x) != p.in_channels())
    throw ValidationError("transposed convolution: input channel mismatch");
  const Eigen::Index kh = p.weight.dimension(2), kw = p.weight.dimension(3);
  const Eigen::Index oh = (x.dimension(1) - 1) * p.stride - 2 * p.padding + kh;
  const Eigen::Index ow = (x.dimension(2) - 1) * p.stride - 2 * p.padding + kw;
  if (oh < 1 || ow < 1) throw ValidationError("transposed convolution: empty output");
  FeatureMap<Scalar> out(p.out_channels(), oh, ow);
  for (Eigen::Index o = 0; o < p.out_channels(); ++o)
    for (Eigen::Index i = 0; i < oh; ++i)
      for (Eigen::Index j = 0; j < ow; ++j) out(o, i, j) = p.bias.size() ? p.bias(o) : Scalar(0);
  for (Eigen::Index c = 0; c < channels(x); ++c)
    for (Eigen::Index iy = 0; iy < x.dimension(1); ++iy)
      for (Eigen::Index ix = 0; ix < x.dimension(2); ++ix)
        for (Eigen::Index o = 0; o < p.out_channels(); ++o)
          for (Eigen::Index ky = 0; ky < kh; ++ky)
            for (Eigen::Index kx = 0; kx < kw; ++kx) {
              const Eigen::Index oy = iy * p.stride - p.padding + ky;
              const Eigen::Index ox = ix * p.stride - p.padding + kx;
              if (oy >= 0 && oy < oh && ox >= 0 && ox < ow)
                out(o, oy, ox) += x(c, iy, ix) * p.weight(c, o, ky, kx);
            }
  return out;
}

}  // namespace leafkit::kernels
