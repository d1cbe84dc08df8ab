#include "leafkit/record.hpp"

#include <cmath>

#include "leafkit/error.hpp"

namespace leafkit {

namespace {

constexpr std::array<std::string_view, kIndicatorCount> kNames{
    "width",  "height", "perimeter", "area",   "round",  "rect",
    "R_m",    "G_m",    "B_m",       "R_mean", "G_mean", "B_mean",
    "R_1/3",  "G_1/3",  "B_1/3",     "R_2/3",  "G_2/3",  "B_2/3"};

}  // namespace

std::string_view indicator_name(Indicator i) { return kNames[index_of(i)]; }

std::optional<Indicator> indicator_from_name(std::string_view name) {
  for (std::size_t k = 0; k < kIndicatorCount; ++k)
    if (kNames[k] == name) return static_cast<Indicator>(k);
  return std::nullopt;
}

IndicatorVector LeafRecord::values() const {
  IndicatorVector v{shape.width, shape.height,    shape.perimeter,
                    shape.area,  shape.roundness, shape.rectangularity};
  for (int c = 0; c < 3; ++c) {
    const ChannelStats& s = color.channel[c];
    v[6 + c] = s.median;
    v[9 + c] = s.mean;
    v[12 + c] = s.lower_tertile;
    v[15 + c] = s.upper_tertile;
  }
  return v;
}

LeafRecord LeafRecord::from_values(std::int64_t id, const IndicatorVector& v) {
  LeafRecord r;
  r.id = id;
  r.shape = {v[0], v[1], v[2], v[3], v[4], v[5]};
  for (int c = 0; c < 3; ++c)
    r.color.channel[c] = {v[6 + c], v[9 + c], v[12 + c], v[15 + c]};
  return r;
}

void LeafRecord::validate() const {
  const IndicatorVector v = values();
  for (std::size_t k = 0; k < kIndicatorCount; ++k)
    if (!std::isfinite(v[k]))
      throw ValidationError("record " + std::to_string(id) + ": indicator " +
                            std::string(kNames[k]) + " is not finite");
}

}  // namespace leafkit
