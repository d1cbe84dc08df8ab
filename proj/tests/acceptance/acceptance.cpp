// One PASS/FAIL line per acceptance criterion; exit status 1 if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "../support/process.hpp"
#include "leafkit/config.hpp"
#include "leafkit/losses.hpp"
#include "leafkit/maskgeom.hpp"
#include "leafkit/phenotype.hpp"
#include "leafkit/refkernels.hpp"
#include "leafkit/report.hpp"
#include "leafkit/verify/checks.hpp"
#include "leafkit/verify/synth.hpp"

using namespace leafkit;
using leafkit::testing::quoted;
using leafkit::testing::run_cli;
using leafkit::testing::ScratchDir;

namespace {

struct Outcome {
  bool passed{false};
  std::string detail;
};

struct Criterion {
  int number;
  std::string title;
  double budget_seconds;  // 0: no runtime bound
  std::function<Outcome()> body;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

Outcome from_checks(const std::vector<verify::CheckResult>& checks) {
  Outcome o{true, ""};
  for (const auto& c : checks) {
    o.passed = o.passed && c.passed;
    if (!o.detail.empty()) o.detail += "; ";
    o.detail += c.name + (c.passed ? " ok" : " FAILED") + " (" + c.detail + ")";
  }
  return o;
}

verify::VerifyOptions options() { return verify::VerifyOptions{}; }

Outcome metric_oracle() {
  const auto o = options();
  return from_checks({verify::check_coco_map_oracle(o)});
}

Outcome gradient_suite() {
  const auto o = options();
  std::vector<verify::CheckResult> r;
  for (const char* loss : {"focal", "giou", "centerness", "dice"}) r.push_back(verify::check_gradient(loss, o));
  return from_checks(r);
}

Outcome kernel_collapse() {
  const auto o = options();
  return from_checks(
      {verify::check_deform_collapse(o), verify::check_asff_one_hot(o), verify::check_dasp_zero_branches(o)});
}

Outcome centerness() {
  // Box spanning pixels 0..10: the centre pixel (5, 5) is equidistant, an
  // edge pixel (0, 5) has zero distance to the left side.
  const double centre = kernels::centerness_target(5.0, 5.0, 5.0, 5.0);
  const double edge = kernels::centerness_target(0.0, 10.0, 5.0, 5.0);
  const double fixture = kernels::centerness_target(1.0, 3.0, 2.0, 2.0);
  const double err = std::abs(fixture - std::sqrt(1.0 / 3.0));
  return {centre == 1.0 && edge == 0.0 && err <= 1e-12,
          "centre " + fmt("%.17g", centre) + ", edge " + fmt("%.17g", edge) + ", (1,3,2,2) error " +
              fmt("%.2g", err)};
}

Outcome controller() {
  using P = kernels::DynamicMaskParams<double>;
  std::vector<double> theta(169);
  for (std::size_t i = 0; i < theta.size(); ++i) theta[i] = double(i);
  const P p = kernels::controller_split<double>(theta);
  // Boundaries of the three layers land where the partition says they should.
  const bool sizes = P::kLayerSizes[0] == 88 && P::kLayerSizes[1] == 72 && P::kLayerSizes[2] == 9 && P::kTotal == 169;
  const bool order = p.b1(7) == 87 && p.w2(0, 0) == 88 && p.b2(7) == 159 && p.w3(0) == 160 && p.b3 == 168;
  bool short_rejected = false;
  try {
    kernels::controller_split<double>(std::span<const double>(theta).first(168));
  } catch (const ValidationError&) {
    short_rejected = true;
  }
  return {sizes && order && short_rejected, "(88, 72, 9) sum 169, layer boundaries 87|88, 159|160, 168"};
}

Outcome geometry() {
  const ShapeIndicators rect = shape_indicators(synth::rectangle_mask(120, 160, 17, 23, 131, 88));
  const ShapeIndicators disk = shape_indicators(synth::disk_mask(128, 128, 64, 64, 50));
  const auto inv = verify::check_translation_invariance(options());
  const bool ok = rect.rectangularity == 1.0 && std::abs(disk.roundness - 1.0) <= 0.1 && inv.passed;
  return {ok, "rectangle rectangularity " + fmt("%.17g", rect.rectangularity) + ", r=50 disk roundness " +
                  fmt("%.4f", disk.roundness) + ", " + inv.detail};
}

Outcome entropy() {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(0, 1);
  double worst_sum = 0;
  bool nonnegative = true;
  for (int trial = 0; trial < 200; ++trial) {
    Eigen::MatrixXd m(3 + trial % 20, 18);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = u(rng);
    const Eigen::VectorXd w = entropy_weights(minmax_normalize(m));
    nonnegative = nonnegative && (w.array() >= 0).all();
    worst_sum = std::max(worst_sum, std::abs(w.sum() - 1));
  }
  Eigen::MatrixXd c(3, 2);
  c << 0, 1, 0.5, 1, 1, 1;
  const Eigen::VectorXd wc = entropy_weights(c);
  // Entropies of p = (0, 1/3, 2/3) and (4/7, 2/7, 1/7), evaluated at 30 digits.
  Eigen::MatrixXd h(3, 2);
  h << 0, 1, 0.5, 0.5, 1, 0.25;
  const Eigen::VectorXd wh = entropy_weights(h);
  const double fixture_err =
      std::max(std::abs(wh(0) - 0.763785267659798243685946677346), std::abs(wh(1) - 0.236214732340201756314053322654));
  const bool ok = nonnegative && worst_sum <= 1e-9 && wc(1) == 0.0 && fixture_err <= 1e-12;
  return {ok, "max |sum - 1| " + fmt("%.2g", worst_sum) + ", constant column weight " + fmt("%.17g", wc(1)) +
                  ", 3x2 fixture error " + fmt("%.2g", fixture_err)};
}

Outcome reference_fixtures() {
  const std::filesystem::path dir = LEAFKIT_FIXTURES;
  const OptimalValueTable table = load_optimal_values(dir / "optimal_values.json");
  table.validate();
  const IndicatorWeights weights = load_weights(dir / "lgci_weights.json");
  weights.validate(kReferenceWeightTolerance);
  const bool tables = table.values == OptimalValueTable::reference().values &&
                      weights.values == IndicatorWeights::reference().values;

  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> shape(100, 400), unit(0.4, 0.9), color(20, 160);
  std::vector<LeafRecord> records;
  for (int i = 0; i < 30; ++i) {
    IndicatorVector v;
    for (std::size_t k = 0; k < kIndicatorCount; ++k) v[k] = k < 4 ? shape(rng) : k < 6 ? unit(rng) : color(rng);
    records.push_back(LeafRecord::from_values(i + 1, v));
  }
  const auto a = lgci_score(records, weights, table), b = lgci_score(records, weights, table);
  bool deterministic = a.size() == b.size();
  for (std::size_t i = 0; deterministic && i < a.size(); ++i) deterministic = a[i].score == b[i].score;

  bool round_trip = true;
  for (const char* name : {"leaf306_pred.csv", "leaf306_gt.csv"}) {
    const std::string text = read_text_file(dir / name);
    const ParsedReport parsed = parse_report_csv(text);
    round_trip = round_trip && parsed.layout == ReportLayout::table5 &&
                 render_report(parsed.records, ReportFormat::csv, ReportLayout::table5) == text;
  }
  return {tables && deterministic && round_trip,
          std::string("tables ") + (tables ? "match" : "differ") + ", scoring " +
              (deterministic ? "deterministic" : "unstable") + ", leaf #306 rows " +
              (round_trip ? "byte-identical" : "changed")};
}

Outcome loss_weighting() {
  const losses::LossConfig cfg;
  const double total = losses::total_loss({1, 1, 1, 1}, cfg);
  return {total == 5.0 && cfg.lambda_cls == 0.5 && cfg.lambda_bbox == 2.0 && cfg.lambda_cent == 0.5 &&
              cfg.lambda_mask == 2.0,
          "total " + fmt("%.17g", total)};
}

Outcome end_to_end() {
  ScratchDir dir("acceptance");
  const auto corpus = synth::write_corpus(dir.path(), 50, 2024);
  const std::vector<std::string> files{"records.csv", "lgci.csv", "weights.csv", "metrics.json", "regression.csv"};
  std::vector<std::string> outputs[2];
  int k = 0;
  for (int workers : {1, 8}) {
    const auto out = dir / ("out_" + std::to_string(workers));
    const std::string common = " --workers " + std::to_string(workers) + " --out " + quoted(out);
    const std::string data = " --annotations " + quoted(corpus.annotations) + " --images " + quoted(corpus.images);
    for (const std::string& cmd : {"extract" + data + common, "score --weights refit --score-maps" + data + common,
                                   "eval --pred " + quoted(corpus.predictions) + data + common}) {
      const auto r = run_cli(cmd);
      if (r.exit_code != 0) return {false, "'" + cmd + "' exited " + std::to_string(r.exit_code) + ": " + r.output};
    }
    for (const auto& f : files) outputs[k].push_back(read_text_file(out / f));
    for (const auto& e : std::filesystem::directory_iterator(out / "score_maps"))
      outputs[k].push_back(read_text_file(e.path()));
    ++k;
  }
  const bool same = outputs[0] == outputs[1];
  return {same, std::to_string(outputs[0].size()) + " output files " + (same ? "identical" : "DIFFER") +
                    " between 1 and 8 workers"};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {1, "metric oracle equivalence", 60, metric_oracle},
      {2, "gradient suite", 10, gradient_suite},
      {3, "kernel collapse identities", 30, kernel_collapse},
      {4, "centerness targets", 0, centerness},
      {5, "controller arithmetic", 0, controller},
      {6, "geometry", 0, geometry},
      {7, "entropy weights", 0, entropy},
      {8, "reference fixtures", 0, reference_fixtures},
      {9, "loss weighting", 0, loss_weighting},
      {10, "end-to-end determinism", 120, end_to_end},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.body();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = c.budget_seconds == 0 || s < c.budget_seconds;
    const bool pass = o.passed && in_time;
    failed += !pass;
    std::printf("%s  %2d  %-28s %8.3fs%s  %s\n", pass ? "PASS" : "FAIL", c.number, c.title.c_str(), s,
                c.budget_seconds > 0 ? (in_time ? " (budget ok)" : " (OVER BUDGET)") : "", o.detail.c_str());
  }
  std::printf("%d/%zu criteria passed\n", int(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
