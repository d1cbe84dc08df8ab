#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "leafkit/error.hpp"
#include "leafkit/maskgeom.hpp"
#include "leafkit/verify/synth.hpp"

using namespace leafkit;

TEST(Shape, FilledRectangleIsExactlyRectangular) {
  const Mask m = synth::rectangle_mask(60, 80, 10, 5, 49, 34);
  const ShapeIndicators s = shape_indicators(m);
  EXPECT_EQ(s.rectangularity, 1.0);
  EXPECT_EQ(s.width, 40);
  EXPECT_EQ(s.height, 30);
  EXPECT_EQ(s.area, 1200);
  // The contour runs through pixel centers: 2 * (39 + 29).
  EXPECT_DOUBLE_EQ(s.perimeter, 136);
}

TEST(Shape, LargeDiskIsRound) {
  const Mask m = synth::disk_mask(128, 128, 64, 64, 50);
  const ShapeIndicators s = shape_indicators(m);
  EXPECT_NEAR(s.roundness, 1.0, 0.1);
  EXPECT_NEAR(s.area, std::numbers::pi * 2500, 0.02 * std::numbers::pi * 2500);
}

TEST(Shape, SinglePixelUsesItsEdgeLength) {
  Mask m = Mask::Zero(3, 3);
  m(1, 1) = 1;
  const ShapeIndicators s = shape_indicators(m);
  EXPECT_EQ(s.perimeter, 4);
  EXPECT_EQ(s.area, 1);
  EXPECT_EQ(s.rectangularity, 1);
}

TEST(Shape, RoundnessOrdersDiskRectangleSliver) {
  const double disk = shape_indicators(synth::disk_mask(100, 100, 50, 50, 30)).roundness;
  const double rect = shape_indicators(synth::rectangle_mask(100, 100, 10, 10, 69, 39)).roundness;
  const double sliver = shape_indicators(synth::rectangle_mask(100, 100, 5, 50, 94, 52)).roundness;
  EXPECT_GT(disk, rect);
  EXPECT_GT(rect, sliver);
}

TEST(Shape, EmptyMaskIsRejected) {
  EXPECT_THROW(shape_indicators(Mask(Mask::Zero(4, 4))), ValidationError);
}

TEST(Shape, TranslationInvariance) {
  synth::Rng rng(3);
  std::uniform_int_distribution<int> shift(-6, 6);
  for (int trial = 0; trial < 200; ++trial) {
    const Mask m = synth::random_mask(rng, 40, 40);
    const Mask big = synth::translate(m, 12 + shift(rng), 12 + shift(rng), 64, 64);
    const ShapeIndicators a = shape_indicators(m), b = shape_indicators(big);
    EXPECT_EQ(a.width, b.width);
    EXPECT_EQ(a.height, b.height);
    EXPECT_EQ(a.area, b.area);
    EXPECT_DOUBLE_EQ(a.perimeter, b.perimeter);
    EXPECT_DOUBLE_EQ(a.roundness, b.roundness);
  }
}

TEST(Contour, ClosedEightConnectedStartingTopLeft) {
  const Mask m = synth::disk_mask(40, 40, 20, 20, 12);
  const Contour c = trace_contour(m);
  ASSERT_GT(c.points.size(), 8u);
  for (std::size_t i = 0; i < c.points.size(); ++i) {
    const auto& p = c.points[i];
    const auto& q = c.points[(i + 1) % c.points.size()];
    EXPECT_LE(std::abs(p.x - q.x), 1);
    EXPECT_LE(std::abs(p.y - q.y), 1);
    EXPECT_NE(m(p.y, p.x), 0);
  }
  const PixelPoint first = c.points.front();
  for (int y = 0; y < 40; ++y)
    for (int x = 0; x < 40; ++x)
      if (m(y, x)) {
        EXPECT_TRUE(y > first.y || (y == first.y && x >= first.x));
      }
}

TEST(Contour, LargestComponentWins) {
  Mask m = Mask::Zero(20, 20);
  m.block(1, 1, 2, 2).setOnes();
  m.block(8, 8, 5, 5).setOnes();
  const Mask big = largest_component(m);
  EXPECT_EQ(count_set(big), 25);
  EXPECT_EQ(trace_contour(m).points.front(), (PixelPoint{8, 8}));
  // Area counts every set pixel, the perimeter only the largest component.
  const ShapeIndicators s = shape_indicators(m);
  EXPECT_EQ(s.area, 29);
  EXPECT_DOUBLE_EQ(s.perimeter, 16);
}
