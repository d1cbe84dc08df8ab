#include <gtest/gtest.h>

#include <random>

#include "leafkit/error.hpp"
#include "leafkit/ingest.hpp"
#include "leafkit/verify/oracles.hpp"

using namespace leafkit;

TEST(Rasterize, LeftHalfOfSquareHasEightPixels) {
  const std::vector<Point2> poly{{0, 0}, {2, 0}, {2, 4}, {0, 4}};
  const Mask m = rasterize_polygon(poly, 4, 4);
  EXPECT_EQ(count_set(m), 8);
  for (int y = 0; y < 4; ++y)
    for (int x = 0; x < 4; ++x) EXPECT_EQ(m(y, x) != 0, x < 2) << x << "," << y;
}

TEST(Rasterize, RightTriangleCountsCentersOnTheHypotenuse) {
  // Centers (x+0.5, y+0.5) with x + y <= 7 lie inside; the line holds 4 of them.
  const std::vector<Point2> poly{{0, 0}, {8, 0}, {0, 8}};
  const Mask m = rasterize_polygon(poly, 8, 8);
  EXPECT_EQ(count_set(m), 36);
  EXPECT_EQ(count_set(rasterize_polygon(std::vector<Point2>{{0, 0}, {4, 0}, {0, 4}}, 8, 8)), 10);
}

TEST(Rasterize, AgreesWithPointInPolygonAwayFromEdges) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.3, 31.7);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<Point2> poly;
    for (int k = 0; k < 3 + trial % 6; ++k) poly.push_back({u(rng), u(rng)});
    const Mask a = rasterize_polygon(poly, 32, 32);
    const Mask b = oracle::pnpoly_rasterize(poly, 32, 32);
    // Random real vertices put no pixel center exactly on an edge.
    EXPECT_EQ(a, b) << "trial " << trial;
  }
}

TEST(Rle, DecodesColumnMajorStartingWithBackground) {
  const std::vector<std::int64_t> counts{1, 2, 1};
  const Mask m = decode_rle(counts, 2, 2);
  EXPECT_EQ(m(0, 0), 0);
  EXPECT_NE(m(1, 0), 0);
  EXPECT_NE(m(0, 1), 0);
  EXPECT_EQ(m(1, 1), 0);
}

TEST(Rle, RoundTripsRandomMasks) {
  std::mt19937_64 rng(11);
  std::bernoulli_distribution bit(0.4);
  for (int trial = 0; trial < 50; ++trial) {
    Mask m(5 + trial % 7, 3 + trial % 5);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = bit(rng);
    EXPECT_EQ(decode_rle(encode_rle(m), int(m.rows()), int(m.cols())), m);
  }
}

TEST(Rle, RejectsCountsThatDoNotCoverTheMask) {
  EXPECT_THROW(decode_rle(std::vector<std::int64_t>{1, 2}, 2, 2), ValidationError);
  EXPECT_THROW(decode_rle(std::vector<std::int64_t>{3, 2}, 2, 2), ValidationError);
}

TEST(Rle, CompactStringForm) {
  // Hand-encoded: 5 bits per char with a continuation bit, offset 48, and
  // counts from the fourth on stored as deltas against count i-2.
  EXPECT_EQ(decode_rle_string("121"), (std::vector<std::int64_t>{1, 2, 1}));
  EXPECT_EQ(decode_rle_string("1213"), (std::vector<std::int64_t>{1, 2, 1, 5}));
  EXPECT_EQ(decode_rle_string("T3"), (std::vector<std::int64_t>{100}));
}

TEST(Coco, ParsesPolygonAndRleAndRecomputesBoxes) {
  const char* doc = R"({
    "images": [{"id": 3, "width": 4, "height": 4, "file_name": "a.png"}],
    "categories": [{"id": 1, "name": "leaf"}],
    "annotations": [
      {"id": 1, "image_id": 3, "category_id": 1, "segmentation": [[0,0, 2,0, 2,4, 0,4]], "bbox": [9,9,9,9]},
      {"id": 2, "image_id": 3, "category_id": 1, "segmentation": {"size": [4,4], "counts": [15, 1]}}
    ]})";
  const Dataset d = parse_coco(doc);
  ASSERT_EQ(d.instances.size(), 2u);
  EXPECT_EQ(d.instances[0].bbox, (BoundingBox{0, 0, 1, 3}));
  EXPECT_EQ(count_set(d.instances[1].grid), 1);
  EXPECT_EQ(d.instances[1].bbox, (BoundingBox{3, 3, 3, 3}));
  EXPECT_FALSE(d.instances[0].score.has_value());
}

TEST(Coco, MalformedJsonReportsPosition) {
  try {
    parse_coco("{\n  \"images\": [,]\n}");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 2u);
    EXPECT_GT(e.column(), 0u);
  }
}

TEST(Coco, RejectsAnnotationOnUnknownImage) {
  const char* doc = R"({"images": [{"id": 1, "width": 2, "height": 2, "file_name": "a.png"}],
    "annotations": [{"id": 1, "image_id": 5, "category_id": 1, "segmentation": [[0,0,2,0,2,2]]}]})";
  EXPECT_THROW(parse_coco(doc), ValidationError);
}

TEST(LabelMe, PolygonAndRectangleShapes) {
  const char* doc = R"({"imagePath": "leaf.png", "imageHeight": 6, "imageWidth": 6,
    "shapes": [{"label": "leaf", "shape_type": "polygon", "points": [[0,0],[3,0],[3,3],[0,3]]},
               {"label": "leaf", "shape_type": "rectangle", "points": [[4,4],[6,6]]}]})";
  const Dataset d = parse_labelme(doc);
  ASSERT_EQ(d.instances.size(), 2u);
  EXPECT_EQ(count_set(d.instances[0].grid), 9);
  EXPECT_EQ(count_set(d.instances[1].grid), 4);
  EXPECT_EQ(d.images.at(0).width, 6);
}

TEST(LabelMe, UnsupportedShapeIsAnError) {
  const char* doc = R"({"imagePath": "leaf.png", "imageHeight": 6, "imageWidth": 6,
    "shapes": [{"label": "leaf", "shape_type": "circle", "points": [[1,1],[2,2]]}]})";
  EXPECT_THROW(parse_labelme(doc), Error);
}

TEST(Format, ParsesNames) {
  EXPECT_EQ(parse_format("coco"), AnnotationFormat::coco);
  EXPECT_EQ(parse_format("labelme"), AnnotationFormat::labelme);
  EXPECT_THROW(parse_format("voc"), ValidationError);
}
