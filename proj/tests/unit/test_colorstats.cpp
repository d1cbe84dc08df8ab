#include <gtest/gtest.h>

#include <vector>

#include "leafkit/error.hpp"
#include "leafkit/colorstats.hpp"

using namespace leafkit;

TEST(Quantile, InterpolatesBetweenRanks) {
  const std::vector<double> v{9, 0, 6, 3};
  EXPECT_DOUBLE_EQ(channel_quantile(v, 0.5), 4.5);
  EXPECT_DOUBLE_EQ(channel_quantile(v, 0.0), 0);
  EXPECT_DOUBLE_EQ(channel_quantile(v, 1.0), 9);
  EXPECT_DOUBLE_EQ(channel_quantile(v, 1.0 / 3.0), 3);
}

TEST(Quantile, RampTertile) {
  std::vector<double> ramp(256);
  for (int i = 0; i < 256; ++i) ramp[i] = i;
  EXPECT_NEAR(channel_quantile(ramp, 2.0 / 3.0), 170, 1e-9);
  EXPECT_NEAR(channel_quantile(ramp, 1.0 / 3.0), 85, 1e-9);
}

TEST(Quantile, RejectsBadInput) {
  EXPECT_THROW(channel_quantile(std::vector<double>{}, 0.5), ValidationError);
  EXPECT_THROW(channel_quantile(std::vector<double>{1}, 1.5), ValidationError);
}

TEST(Color, StatisticsOverMaskedPixelsOnly) {
  RgbImage img(2, 3);
  for (auto& c : img.channels) c.setConstant(200);
  img.channels[0] << 10, 20, 30, 40, 250, 250;
  img.channels[1].setConstant(100);
  Mask m = Mask::Zero(2, 3);
  m(0, 0) = m(0, 1) = m(0, 2) = m(1, 0) = 1;
  const ColorIndicators c = color_indicators(img, m);
  EXPECT_DOUBLE_EQ(c.red().mean, 25);
  EXPECT_DOUBLE_EQ(c.red().median, 25);
  EXPECT_DOUBLE_EQ(c.red().lower_tertile, 20);
  EXPECT_DOUBLE_EQ(c.red().upper_tertile, 30);
  EXPECT_DOUBLE_EQ(c.green().median, 100);
  EXPECT_DOUBLE_EQ(c.blue().mean, 200);
}

TEST(Color, ShapeMismatchAndEmptyMaskAreErrors) {
  RgbImage img(2, 2);
  for (auto& c : img.channels) c.setZero();
  EXPECT_THROW(color_indicators(img, Mask(Mask::Ones(3, 2))), ValidationError);
  EXPECT_THROW(color_indicators(img, Mask(Mask::Zero(2, 2))), ValidationError);
}
