#pragma once

#include <array>
#include <span>

#include "leafkit/types.hpp"

namespace leafkit {

struct ChannelStats {
  double median{0};
  double mean{0};
  double lower_tertile{0};
  double upper_tertile{0};
};

/// Channels in R, G, B order.
struct ColorIndicators {
  std::array<ChannelStats, 3> channel;

  const ChannelStats& red() const { return channel[0]; }
  const ChannelStats& green() const { return channel[1]; }
  const ChannelStats& blue() const { return channel[2]; }
};

/// Linearly interpolated quantile at rank q*(n-1) of the sorted sample.
double channel_quantile(std::span<const double> values, double q);

/// Mean, median and tertiles of each channel over the set pixels of `mask`.
ColorIndicators color_indicators(const RgbImage& image, const Mask& mask);
ColorIndicators color_indicators(const RgbImage& image, const InstanceMask& mask);

}  // namespace leafkit
