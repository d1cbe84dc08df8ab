#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "commands.hpp"

namespace {

using leafkit::RunConfig;
namespace cli = leafkit::cli;

// Flag values as given on the command line; unset ones leave the config alone.
struct Overrides {
  std::string config, images, annotations, pred, records, out, format, weights, optimal_values, weights_file;
  std::optional<double> iou_threshold, min_area;
  std::optional<int> workers;
  bool score_maps = false;
};

void add_common(CLI::App& app, Overrides& o) {
  app.add_option("--config", o.config, "JSON run configuration; flags override its values");
  app.add_option("--out", o.out, "Output directory");
  app.add_option("--workers", o.workers, "Worker threads (per image)");
}

void add_dataset(CLI::App& app, Overrides& o) {
  app.add_option("--images", o.images, "Directory holding the image files");
  app.add_option("--annotations", o.annotations, "Annotation file (COCO) or file/directory (LabelMe)");
  app.add_option("--format", o.format, "Annotation format: coco or labelme");
  app.add_option("--min-area", o.min_area, "Drop instances smaller than this many pixels (default 1000)");
}

RunConfig resolve(const Overrides& o) {
  RunConfig cfg = o.config.empty() ? RunConfig{} : leafkit::load_run_config(o.config);
  if (!o.images.empty()) cfg.images = o.images;
  if (!o.annotations.empty()) cfg.annotations = o.annotations;
  if (!o.pred.empty()) cfg.pred = o.pred;
  if (!o.records.empty()) cfg.records = o.records;
  if (!o.out.empty()) cfg.out = o.out;
  if (!o.format.empty()) cfg.format = leafkit::parse_format(o.format);
  if (!o.weights.empty()) cfg.weights = leafkit::parse_weight_source(o.weights);
  if (!o.optimal_values.empty()) cfg.optimal_values = o.optimal_values;
  if (!o.weights_file.empty()) cfg.weights_file = o.weights_file;
  if (o.iou_threshold) cfg.iou_threshold = *o.iou_threshold;
  if (o.min_area) cfg.min_area = *o.min_area;
  if (o.workers) cfg.workers = *o.workers;
  if (o.score_maps) cfg.score_maps = true;
  cfg.validate();
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Leaf phenotyping toolkit: indicator extraction, LGCI scoring, evaluation and verification"};
  app.require_subcommand(1);
  Overrides o;

  auto* extract = app.add_subcommand("extract", "Compute the 18 leaf indicators for every annotated instance");
  add_common(*extract, o);
  add_dataset(*extract, o);

  auto* score = app.add_subcommand("score", "Score leaves from an indicator CSV");
  add_common(*score, o);
  add_dataset(*score, o);
  score->add_option("--records", o.records, "Indicator CSV (default: <out>/records.csv)");
  score->add_option("--weights", o.weights, "Weight source: fixture or refit");
  score->add_option("--weights-file", o.weights_file, "Fixture weights (JSON or indicator,weight CSV)");
  score->add_option("--optimal-values", o.optimal_values, "Optimal color values (JSON)");
  score->add_flag("--score-maps", o.score_maps, "Write per-image score maps (needs --annotations)");

  auto* eval = app.add_subcommand("eval", "COCO metrics and indicator regression against ground truth");
  add_common(*eval, o);
  add_dataset(*eval, o);
  eval->add_option("--pred", o.pred, "Predictions in the annotation format, with scores");
  eval->add_option("--iou-threshold", o.iou_threshold, "IoU for precision/recall and matching (default 0.5)");

  leafkit::verify::VerifyOptions vo;
  std::string fault;
  auto* verify = app.add_subcommand("verify", "Run the oracle and property suite");
  add_common(*verify, o);
  verify->add_option("--seed", vo.seed, "Random seed");
  verify->add_option("--ap-scenes", vo.ap_scenes, "Scenes for the metric oracle");
  verify->add_option("--inject-fault", fault)->group("");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return e.get_exit_code() == 0 ? code : cli::kInputError;
  }

  try {
    if (*verify) {
      vo.fault = leafkit::verify::parse_fault(fault);
      return cli::cmd_verify(vo, std::cout);
    }
    const RunConfig cfg = resolve(o);
    if (*extract) return cli::cmd_extract(cfg, std::cout);
    if (*score) return cli::cmd_score(cfg, std::cout);
    return cli::cmd_eval(cfg, std::cout);
  } catch (const leafkit::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return cli::kInputError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return cli::kFailure;
  }
}
