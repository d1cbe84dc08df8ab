#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "leafkit/ingest.hpp"
#include "leafkit/losses.hpp"
#include "leafkit/phenotype.hpp"

namespace leafkit {

enum class WeightSource { fixture, refit };
WeightSource parse_weight_source(std::string_view name);

/// Everything a CLI run needs. Paths left empty are "not given".
struct RunConfig {
  std::filesystem::path images;
  std::filesystem::path annotations;
  std::filesystem::path pred;
  std::filesystem::path records;
  std::filesystem::path out;
  std::filesystem::path optimal_values;  // empty: reference table
  std::filesystem::path weights_file;    // empty: reference weights
  AnnotationFormat format{AnnotationFormat::coco};
  double iou_threshold{0.5};
  double min_area{1000.0};
  WeightSource weights{WeightSource::fixture};
  int workers{1};
  bool score_maps{false};
  losses::LossConfig loss;

  /// iou_threshold in (0, 1], min_area >= 0, workers >= 1, loss config valid.
  void validate() const;
};

/// Flat JSON object. Keys mirror the long CLI flags with '-' replaced by '_':
/// images, annotations, pred, records, out, format, iou_threshold, min_area,
/// weights, workers, optimal_values, weights_file, score_maps, and an optional
/// "loss" object with lambda_cls, lambda_bbox, lambda_cent, lambda_mask,
/// focal_alpha, focal_gamma, dice_epsilon, log_clamp. Unknown keys are errors.
/// Relative paths resolve against `base_dir`.
RunConfig parse_run_config(std::string_view text, const std::filesystem::path& base_dir = {});
RunConfig load_run_config(const std::filesystem::path& path);

/// JSON object mapping the 12 color indicator names to values.
OptimalValueTable parse_optimal_values(std::string_view text);
OptimalValueTable load_optimal_values(const std::filesystem::path& path);

/// JSON object mapping all 18 indicator names to weights, or a two-column
/// "indicator,weight" CSV as written by `score`.
IndicatorWeights parse_weights(std::string_view text);
IndicatorWeights load_weights(const std::filesystem::path& path);

std::string render_weights_csv(const IndicatorWeights& weights);

/// Reads a whole file or throws IoError.
std::string read_text_file(const std::filesystem::path& path);

}  // namespace leafkit
