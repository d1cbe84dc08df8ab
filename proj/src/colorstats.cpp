#include "leafkit/colorstats.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "leafkit/error.hpp"

namespace leafkit {

namespace {

void check_q(double q) {
  if (!(q >= 0.0 && q <= 1.0)) throw ValidationError("quantile level outside [0, 1]");
}

// Order statistic k (0-based) read off a 256-bin histogram.
double histogram_rank(const std::array<std::int64_t, 256>& hist, std::int64_t k) {
  std::int64_t seen = 0;
  for (int v = 0; v < 256; ++v) {
    seen += hist[v];
    if (seen > k) return v;
  }
  return 255;
}

double histogram_quantile(const std::array<std::int64_t, 256>& hist, std::int64_t n, double q) {
  const double rank = q * double(n - 1);
  const auto lo = std::int64_t(std::floor(rank));
  const auto hi = std::min(lo + 1, n - 1);
  const double frac = rank - double(lo);
  const double a = histogram_rank(hist, lo);
  const double b = histogram_rank(hist, hi);
  return a + (b - a) * frac;
}

}  // namespace

double channel_quantile(std::span<const double> values, double q) {
  if (values.empty()) throw ValidationError("quantile of an empty sample");
  check_q(q);
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double rank = q * double(sorted.size() - 1);
  const auto lo = std::size_t(std::floor(rank));
  const auto hi = std::min(lo + 1, sorted.size() - 1);
  return sorted[lo] + (sorted[hi] - sorted[lo]) * (rank - double(lo));
}

ColorIndicators color_indicators(const RgbImage& image, const Mask& mask) {
  if (image.height() != mask.rows() || image.width() != mask.cols())
    throw ValidationError("image and mask dimensions differ");
  const std::int64_t n = count_set(mask);
  if (n == 0) throw ValidationError("mask has no set pixels");

  ColorIndicators out;
  for (int c = 0; c < 3; ++c) {
    std::array<std::int64_t, 256> hist{};
    std::int64_t sum = 0;  // exact: 255 * pixel count fits easily
    const Channel& ch = image.channels[c];
    for (Eigen::Index y = 0; y < mask.rows(); ++y)
      for (Eigen::Index x = 0; x < mask.cols(); ++x)
        if (mask(y, x)) {
          ++hist[ch(y, x)];
          sum += ch(y, x);
        }
    ChannelStats& s = out.channel[c];
    s.mean = double(sum) / double(n);
    s.median = histogram_quantile(hist, n, 0.5);
    s.lower_tertile = histogram_quantile(hist, n, 1.0 / 3.0);
    s.upper_tertile = histogram_quantile(hist, n, 2.0 / 3.0);
  }
  return out;
}

ColorIndicators color_indicators(const RgbImage& image, const InstanceMask& mask) {
  return color_indicators(image, mask.grid);
}

}  // namespace leafkit
