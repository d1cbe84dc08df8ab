#include <gtest/gtest.h>

#include <filesystem>
#include <json.hpp>

#include "../support/process.hpp"
#include "leafkit/error.hpp"
#include "leafkit/config.hpp"
#include "leafkit/report.hpp"
#include "leafkit/verify/synth.hpp"

using namespace leafkit;
using leafkit::testing::quoted;
using leafkit::testing::run_cli;
using leafkit::testing::ScratchDir;

namespace {

nlohmann::json read_json(const std::filesystem::path& p) { return nlohmann::json::parse(read_text_file(p)); }

}  // namespace

TEST(Cli, UnknownFlagIsAnInputError) {
  EXPECT_EQ(run_cli("extract --no-such-flag").exit_code, 2);
  EXPECT_EQ(run_cli("").exit_code, 2);
}

TEST(Cli, MissingImageNamesThePathAndWritesNothing) {
  ScratchDir dir("missing");
  const auto corpus = synth::write_corpus(dir.path(), 3, 1);
  const auto victim = corpus.images / "leaf_002.png";
  std::filesystem::remove(victim);
  const auto r = run_cli("extract --annotations " + quoted(corpus.annotations) + " --images " +
                         quoted(corpus.images) + " --out " + quoted(dir / "out"));
  EXPECT_EQ(r.exit_code, 2) << r.output;
  EXPECT_NE(r.output.find("leaf_002.png"), std::string::npos) << r.output;
  EXPECT_FALSE(std::filesystem::exists(dir / "out"));
}

TEST(Cli, ExtractThenScoreWithRefitWeights) {
  ScratchDir dir("score");
  const auto corpus = synth::write_corpus(dir.path(), 5, 2);
  const auto out = dir / "out";
  auto r = run_cli("extract --annotations " + quoted(corpus.annotations) + " --images " + quoted(corpus.images) +
                   " --out " + quoted(out));
  ASSERT_EQ(r.exit_code, 0) << r.output;
  const ParsedReport records = read_report_csv(out / "records.csv");
  EXPECT_GE(records.records.size(), 10u);

  r = run_cli("score --weights refit --out " + quoted(out));
  ASSERT_EQ(r.exit_code, 0) << r.output;
  const IndicatorWeights w = load_weights(out / "weights.csv");
  EXPECT_NEAR(w.values.sum(), 1.0, 1e-9);
  const std::string lgci = read_text_file(out / "lgci.csv");
  EXPECT_EQ(lgci.substr(0, lgci.find('\n')), "ID,LGCI");
}

TEST(Cli, ScoreWithFixturesIsDeterministic) {
  ScratchDir dir("fixture");
  const auto corpus = synth::write_corpus(dir.path(), 4, 3);
  const auto out = dir / "out";
  ASSERT_EQ(run_cli("extract --annotations " + quoted(corpus.annotations) + " --images " + quoted(corpus.images) +
                    " --out " + quoted(out))
                .exit_code,
            0);
  const std::filesystem::path fixtures = LEAFKIT_FIXTURES;
  const std::string args = " --optimal-values " + quoted(fixtures / "optimal_values.json") + " --weights-file " +
                           quoted(fixtures / "lgci_weights.json");
  ASSERT_EQ(run_cli("score --out " + quoted(out) + args).exit_code, 0);
  const std::string first = read_text_file(out / "lgci.csv");
  ASSERT_EQ(run_cli("score --out " + quoted(out) + args).exit_code, 0);
  EXPECT_EQ(read_text_file(out / "lgci.csv"), first);
}

TEST(Cli, EvalAgainstItselfIsPerfect) {
  ScratchDir dir("self");
  const auto corpus = synth::write_corpus(dir.path(), 3, 4);
  const auto r = run_cli("eval --annotations " + quoted(corpus.annotations) + " --pred " +
                         quoted(corpus.annotations) + " --out " + quoted(dir / "out"));
  ASSERT_EQ(r.exit_code, 0) << r.output;
  const auto m = read_json(dir / "out" / "metrics.json");
  EXPECT_EQ(m["seg/mAP"].get<double>(), 1.0);
  EXPECT_EQ(m["box/AP75"].get<double>(), 1.0);
  EXPECT_EQ(m["recall"].get<double>(), 1.0);
}

TEST(Cli, EvalWithoutPredictionsScoresZero) {
  ScratchDir dir("empty");
  const auto corpus = synth::write_corpus(dir.path(), 2, 5);
  auto doc = read_json(corpus.annotations);
  doc["annotations"] = nlohmann::json::array();
  write_text_file(dir / "none.json", doc.dump());
  const auto r = run_cli("eval --annotations " + quoted(corpus.annotations) + " --pred " +
                         quoted(dir / "none.json") + " --out " + quoted(dir / "out"));
  ASSERT_EQ(r.exit_code, 0) << r.output;
  const auto m = read_json(dir / "out" / "metrics.json");
  EXPECT_EQ(m["seg/mAP"].get<double>(), 0.0);
  EXPECT_EQ(m["matched_pairs"].get<int>(), 0);
}

TEST(Cli, EvalRejectsPredictionsOnUnknownImages) {
  ScratchDir dir("unknown");
  const auto corpus = synth::write_corpus(dir.path(), 2, 6);
  auto doc = read_json(corpus.predictions);
  doc["images"][0]["id"] = 999;
  for (auto& a : doc["annotations"])
    if (a["image_id"] == 1) a["image_id"] = 999;
  write_text_file(dir / "bad.json", doc.dump());
  const auto r = run_cli("eval --annotations " + quoted(corpus.annotations) + " --pred " + quoted(dir / "bad.json") +
                         " --out " + quoted(dir / "out"));
  EXPECT_EQ(r.exit_code, 2) << r.output;
}

TEST(Cli, VerifyPassesAndCatchesAnInjectedFault) {
  auto r = run_cli("verify --ap-scenes 100");
  EXPECT_EQ(r.exit_code, 0) << r.output;
  EXPECT_NE(r.output.find("gradient.dice"), std::string::npos);
  r = run_cli("verify --ap-scenes 20 --inject-fault dice-gradient-sign");
  EXPECT_EQ(r.exit_code, 1) << r.output;
  EXPECT_NE(r.output.find("failed: gradient.dice"), std::string::npos) << r.output;
}
