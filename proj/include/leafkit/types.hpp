#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace leafkit {

/// Binary pixel grid, rows = image height, cols = image width. Nonzero = set.
using Mask = Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// One 8-bit image channel, same layout as Mask.
using Channel = Eigen::Matrix<std::uint8_t, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// 8-bit RGB image stored planar.
struct RgbImage {
  std::array<Channel, 3> channels;

  RgbImage() = default;
  RgbImage(int height, int width);

  int height() const { return static_cast<int>(channels[0].rows()); }
  int width() const { return static_cast<int>(channels[0].cols()); }
};

/// Continuous axis-aligned box, [x_min, x_max) x [y_min, y_max).
template <typename Scalar>
struct Box {
  Scalar x_min{0};
  Scalar y_min{0};
  Scalar x_max{0};
  Scalar y_max{0};

  Scalar width() const { return x_max - x_min; }
  Scalar height() const { return y_max - y_min; }
  Scalar area() const { return width() * height(); }
};

/// Tight pixel box with inclusive bounds; a single pixel has width = height = 1.
struct BoundingBox {
  int x_min{0};
  int y_min{0};
  int x_max{0};
  int y_max{0};

  int width() const { return x_max - x_min + 1; }
  int height() const { return y_max - y_min + 1; }
  std::int64_t area() const { return static_cast<std::int64_t>(width()) * height(); }

  /// The region covered by the pixels as a continuous box.
  Box<double> to_box() const {
    return {double(x_min), double(y_min), double(x_max + 1), double(y_max + 1)};
  }

  friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

struct ImageRef {
  std::int64_t id{0};
  int width{0};
  int height{0};
  std::filesystem::path path;
};

struct InstanceMask {
  std::int64_t id{0};
  std::int64_t image_id{0};
  std::int64_t category_id{1};
  Mask grid;
  std::optional<double> score;  // predictions only
  BoundingBox bbox;

  /// Missing scores count as 1.0.
  double score_or_default() const { return score.value_or(1.0); }
  std::int64_t area() const;
};

struct Dataset {
  std::vector<ImageRef> images;
  std::vector<InstanceMask> instances;
  std::vector<std::string> category_names;

  const ImageRef* find_image(std::int64_t id) const;
  /// Instances belonging to one image, in dataset order.
  std::vector<const InstanceMask*> instances_of(std::int64_t image_id) const;

  /// Throws ValidationError when an invariant does not hold.
  void validate() const;
};

std::int64_t count_set(const Mask& mask);

/// Tight box of the set pixels. Throws ValidationError on an empty mask.
BoundingBox tight_bbox(const Mask& mask);

/// Builds an instance and fills its bbox from the pixels.
InstanceMask make_instance(std::int64_t id, std::int64_t image_id, Mask grid,
                           std::optional<double> score = std::nullopt);

}  // namespace leafkit
