#include <gtest/gtest.h>

#include <filesystem>

#include "leafkit/config.hpp"
#include "leafkit/error.hpp"

using namespace leafkit;

namespace {
const std::filesystem::path kFixtures{LEAFKIT_FIXTURES};
}

TEST(RunConfig, DefaultsAreValid) {
  const RunConfig c = parse_run_config("{}");
  EXPECT_EQ(c.iou_threshold, 0.5);
  EXPECT_EQ(c.min_area, 1000);
  EXPECT_EQ(c.workers, 1);
  EXPECT_EQ(c.weights, WeightSource::fixture);
  EXPECT_EQ(c.loss.lambda_bbox, 2.0);
}

TEST(RunConfig, ValuesAndRelativePaths) {
  const RunConfig c = parse_run_config(
      R"({"annotations": "gt.json", "out": "/tmp/x", "workers": 4, "weights": "refit",
          "format": "labelme", "loss": {"focal_gamma": 1.5}})",
      "/data/run");
  EXPECT_EQ(c.annotations, std::filesystem::path("/data/run/gt.json"));
  EXPECT_EQ(c.out, std::filesystem::path("/tmp/x"));
  EXPECT_EQ(c.workers, 4);
  EXPECT_EQ(c.weights, WeightSource::refit);
  EXPECT_EQ(c.format, AnnotationFormat::labelme);
  EXPECT_EQ(c.loss.focal_gamma, 1.5);
}

TEST(RunConfig, RejectsUnknownKeysBadTypesAndRanges) {
  EXPECT_THROW(parse_run_config(R"({"wokers": 2})"), ValidationError);
  EXPECT_THROW(parse_run_config(R"({"workers": "two"})"), ValidationError);
  EXPECT_THROW(parse_run_config(R"({"iou_threshold": 0})"), ValidationError);
  EXPECT_THROW(parse_run_config(R"({"loss": {"lambda_cls": -1}})"), ValidationError);
  EXPECT_THROW(parse_run_config(R"({"loss": {"lambda": 1}})"), ValidationError);
  EXPECT_THROW(parse_run_config("[1, 2"), ParseError);
}

TEST(Fixtures, OptimalValuesMatchTheReferenceTable) {
  const OptimalValueTable t = load_optimal_values(kFixtures / "optimal_values.json");
  EXPECT_EQ(t.values, OptimalValueTable::reference().values);
}

TEST(Fixtures, WeightsMatchTheReferenceTable) {
  const IndicatorWeights w = load_weights(kFixtures / "lgci_weights.json");
  EXPECT_EQ(w.values, IndicatorWeights::reference().values);
  EXPECT_NO_THROW(w.validate(kReferenceWeightTolerance));
}

TEST(Weights, CsvRoundTrip) {
  const IndicatorWeights w = IndicatorWeights::uniform();
  const std::string csv = render_weights_csv(w);
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "indicator,weight");
  const IndicatorWeights back = parse_weights(csv);
  EXPECT_NEAR((back.values - w.values).cwiseAbs().maxCoeff(), 0, 1e-12);
}

TEST(Weights, MissingOrUnknownNamesAreErrors) {
  EXPECT_THROW(parse_weights(R"({"width": 1})"), ValidationError);
  EXPECT_THROW(parse_optimal_values(R"({"R_m": 1})"), ValidationError);
  std::string csv = render_weights_csv(IndicatorWeights::uniform()) + "stem,0.1\n";
  EXPECT_THROW(parse_weights(csv), Error);
}

TEST(Files, MissingFileIsAnIoError) {
  EXPECT_THROW(read_text_file("/nonexistent/leafkit.json"), IoError);
  EXPECT_THROW(load_run_config("/nonexistent/leafkit.json"), IoError);
}
