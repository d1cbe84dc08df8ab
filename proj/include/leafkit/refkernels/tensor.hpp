#pragma once

#include <array>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <unsupported/Eigen/CXX11/Tensor>

#include "leafkit/error.hpp"

namespace leafkit::kernels {

/// (channels, rows, cols), row-major.
template <typename Scalar>
using FeatureMap = Eigen::Tensor<Scalar, 3, Eigen::RowMajor>;

/// (out channels, in channels per group, kernel rows, kernel cols).
template <typename Scalar>
using Kernel = Eigen::Tensor<Scalar, 4, Eigen::RowMajor>;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

struct Extent {
  Eigen::Index rows{0};
  Eigen::Index cols{0};
  friend bool operator==(const Extent&, const Extent&) = default;
};

template <typename Scalar>
Eigen::Index channels(const FeatureMap<Scalar>& x) {
  return x.dimension(0);
}

template <typename Scalar>
Extent extent(const FeatureMap<Scalar>& x) {
  return {x.dimension(1), x.dimension(2)};
}

template <typename Scalar>
FeatureMap<Scalar> zeros(Eigen::Index c, Eigen::Index h, Eigen::Index w) {
  FeatureMap<Scalar> out(c, h, w);
  out.setZero();
  return out;
}

/// Throws ValidationError for empty dimensions or non-finite values.
template <typename Scalar>
void check_feature_map(const FeatureMap<Scalar>& x, const char* what) {
  if (x.dimension(0) < 1 || x.dimension(1) < 1 || x.dimension(2) < 1)
    throw ValidationError(std::string(what) + ": feature map dimensions must be >= 1");
  for (Eigen::Index i = 0; i < x.size(); ++i)
    if (!std::isfinite(double(x.data()[i])))
      throw ValidationError(std::string(what) + ": feature map has non-finite values");
}

/// Splits along channels into `groups` equal parts.
template <typename Scalar>
std::vector<FeatureMap<Scalar>> split_channels(const FeatureMap<Scalar>& x, Eigen::Index groups) {
  if (groups < 1 || channels(x) % groups != 0)
    throw ValidationError("channel count " + std::to_string(channels(x)) +
                          " is not divisible by " + std::to_string(groups));
  const Eigen::Index per = channels(x) / groups;
  std::vector<FeatureMap<Scalar>> parts;
  for (Eigen::Index g = 0; g < groups; ++g) {
    const Eigen::array<Eigen::Index, 3> offsets{g * per, 0, 0};
    const Eigen::array<Eigen::Index, 3> sizes{per, x.dimension(1), x.dimension(2)};
    parts.emplace_back(x.slice(offsets, sizes));
  }
  return parts;
}

/// Concatenates along channels; all parts share the spatial extent.
template <typename Scalar>
FeatureMap<Scalar> concat_channels(std::span<const FeatureMap<Scalar>> parts) {
  if (parts.empty()) throw ValidationError("concatenation of zero feature maps");
  const Extent e = extent(parts.front());
  Eigen::Index total = 0;
  for (const auto& p : parts) {
    if (!(extent(p) == e)) throw ValidationError("concatenation of maps with different extents");
    total += channels(p);
  }
  FeatureMap<Scalar> out(total, e.rows, e.cols);
  Eigen::Index at = 0;
  for (const auto& p : parts) {
    const Eigen::array<Eigen::Index, 3> offsets{at, 0, 0};
    const Eigen::array<Eigen::Index, 3> sizes{channels(p), e.rows, e.cols};
    out.slice(offsets, sizes) = p;
    at += channels(p);
  }
  return out;
}

template <typename Scalar>
FeatureMap<Scalar> concat_channels(const FeatureMap<Scalar>& a, const FeatureMap<Scalar>& b) {
  const std::array<FeatureMap<Scalar>, 2> parts{a, b};
  return concat_channels<Scalar>(std::span<const FeatureMap<Scalar>>(parts));
}

template <typename Scalar>
FeatureMap<Scalar> relu(const FeatureMap<Scalar>& x) {
  return x.cwiseMax(Scalar(0));
}

template <typename Scalar>
FeatureMap<Scalar> sigmoid(const FeatureMap<Scalar>& x) {
  return x.unaryExpr([](Scalar v) { return Scalar(1) / (Scalar(1) + std::exp(-v)); });
}

template <typename Scalar>
Scalar max_abs_difference(const FeatureMap<Scalar>& a, const FeatureMap<Scalar>& b) {
  if (a.dimensions() != b.dimensions()) return std::numeric_limits<Scalar>::infinity();
  const Eigen::Tensor<Scalar, 0, Eigen::RowMajor> m = (a - b).abs().maximum();
  return m();
}

}  // namespace leafkit::kernels
