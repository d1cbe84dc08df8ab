#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

#include "leafkit/colorstats.hpp"
#include "leafkit/maskgeom.hpp"

namespace leafkit {

/// The 18 phenotype indicators in report and weight-table order.
enum class Indicator : std::size_t {
  width,
  height,
  perimeter,
  area,
  roundness,
  rectangularity,
  r_median,
  g_median,
  b_median,
  r_mean,
  g_mean,
  b_mean,
  r_lower_tertile,
  g_lower_tertile,
  b_lower_tertile,
  r_upper_tertile,
  g_upper_tertile,
  b_upper_tertile,
};

inline constexpr std::size_t kIndicatorCount = 18;
inline constexpr std::size_t kShapeIndicatorCount = 6;
inline constexpr std::size_t kColorIndicatorCount = 12;

constexpr std::size_t index_of(Indicator i) { return static_cast<std::size_t>(i); }
constexpr bool is_color(Indicator i) { return index_of(i) >= kShapeIndicatorCount; }

/// Column label used in reports and config files ("width", "R_m", "G_1/3", ...).
std::string_view indicator_name(Indicator i);
std::optional<Indicator> indicator_from_name(std::string_view name);

using IndicatorVector = std::array<double, kIndicatorCount>;

struct LeafRecord {
  std::int64_t id{0};
  ShapeIndicators shape;
  ColorIndicators color;

  IndicatorVector values() const;
  double value(Indicator i) const { return values()[index_of(i)]; }
  static LeafRecord from_values(std::int64_t id, const IndicatorVector& values);

  /// Throws ValidationError if any indicator is non-finite.
  void validate() const;
};

}  // namespace leafkit
