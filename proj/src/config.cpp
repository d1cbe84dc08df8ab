#include "leafkit/config.hpp"

#include <charconv>
#include <cmath>
#include <set>
#include <sstream>

#include "json_support.hpp"
#include "leafkit/report.hpp"

namespace leafkit {

using nlohmann::json;

namespace {

template <typename T>
T get_as(const json& v, const std::string& key) {
  try {
    return v.get<T>();
  } catch (const json::exception&) {
    throw ValidationError("config: key '" + key + "' has the wrong type");
  }
}

std::filesystem::path resolve(const json& v, const std::string& key, const std::filesystem::path& base) {
  std::filesystem::path p = get_as<std::string>(v, key);
  if (p.empty() || p.is_absolute() || base.empty()) return p;
  return base / p;
}

double get_number(const json& v, const std::string& key) {
  if (!v.is_number()) throw ValidationError("config: key '" + key + "' must be a number");
  return v.get<double>();
}

void apply_loss(const json& obj, losses::LossConfig& loss) {
  if (!obj.is_object()) throw ValidationError("config: 'loss' must be an object");
  for (const auto& [key, v] : obj.items()) {
    const double x = get_number(v, "loss." + key);
    if (key == "lambda_cls") loss.lambda_cls = x;
    else if (key == "lambda_bbox") loss.lambda_bbox = x;
    else if (key == "lambda_cent") loss.lambda_cent = x;
    else if (key == "lambda_mask") loss.lambda_mask = x;
    else if (key == "focal_alpha") loss.focal_alpha = x;
    else if (key == "focal_gamma") loss.focal_gamma = x;
    else if (key == "dice_epsilon") loss.dice_epsilon = x;
    else if (key == "log_clamp") loss.log_clamp = x;
    else throw ValidationError("config: unknown key 'loss." + key + "'");
  }
}

}  // namespace

WeightSource parse_weight_source(std::string_view name) {
  if (name == "fixture") return WeightSource::fixture;
  if (name == "refit") return WeightSource::refit;
  throw ValidationError("unknown weight source '" + std::string(name) + "' (expected fixture or refit)");
}

void RunConfig::validate() const {
  if (!(iou_threshold > 0.0 && iou_threshold <= 1.0))
    throw ValidationError("IoU threshold must lie in (0, 1]");
  if (!(min_area >= 0.0) || !std::isfinite(min_area)) throw ValidationError("min area must be >= 0");
  if (workers < 1) throw ValidationError("worker count must be >= 1");
  loss.validate();
}

RunConfig parse_run_config(std::string_view text, const std::filesystem::path& base_dir) {
  const json doc = detail::parse_json(text, "config file");
  if (!doc.is_object()) throw ValidationError("config: top level must be an object");
  RunConfig cfg;
  for (const auto& [key, v] : doc.items()) {
    if (key == "images") cfg.images = resolve(v, key, base_dir);
    else if (key == "annotations") cfg.annotations = resolve(v, key, base_dir);
    else if (key == "pred") cfg.pred = resolve(v, key, base_dir);
    else if (key == "records") cfg.records = resolve(v, key, base_dir);
    else if (key == "out") cfg.out = resolve(v, key, base_dir);
    else if (key == "optimal_values") cfg.optimal_values = resolve(v, key, base_dir);
    else if (key == "weights_file") cfg.weights_file = resolve(v, key, base_dir);
    else if (key == "format") cfg.format = parse_format(get_as<std::string>(v, key));
    else if (key == "iou_threshold") cfg.iou_threshold = get_number(v, key);
    else if (key == "min_area") cfg.min_area = get_number(v, key);
    else if (key == "weights") cfg.weights = parse_weight_source(get_as<std::string>(v, key));
    else if (key == "workers") cfg.workers = get_as<int>(v, key);
    else if (key == "score_maps") cfg.score_maps = get_as<bool>(v, key);
    else if (key == "loss") apply_loss(v, cfg.loss);
    else throw ValidationError("config: unknown key '" + key + "'");
  }
  cfg.validate();
  return cfg;
}

RunConfig load_run_config(const std::filesystem::path& path) {
  return parse_run_config(read_text_file(path), path.parent_path());
}

OptimalValueTable parse_optimal_values(std::string_view text) {
  const json doc = detail::parse_json(text, "optimal value table");
  if (!doc.is_object()) throw ValidationError("optimal value table: expected an object");
  OptimalValueTable table;
  std::set<Indicator> seen;
  for (const auto& [key, v] : doc.items()) {
    const auto ind = indicator_from_name(key);
    if (!ind || !is_color(*ind)) throw ValidationError("optimal value table: '" + key + "' is not a color indicator");
    table[*ind] = get_number(v, key);
    seen.insert(*ind);
  }
  if (seen.size() != kColorIndicatorCount)
    throw ValidationError("optimal value table: expected all 12 color indicators");
  table.validate();
  return table;
}

OptimalValueTable load_optimal_values(const std::filesystem::path& path) {
  return parse_optimal_values(read_text_file(path));
}

IndicatorWeights parse_weights(std::string_view text) {
  IndicatorWeights w;
  std::set<Indicator> seen;
  auto assign = [&](std::string_view name, double value) {
    const auto ind = indicator_from_name(name);
    if (!ind) throw ValidationError("weights: unknown indicator '" + std::string(name) + "'");
    if (!seen.insert(*ind).second) throw ValidationError("weights: duplicate indicator '" + std::string(name) + "'");
    w.values(Eigen::Index(index_of(*ind))) = value;
  };
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string_view::npos && text[first] == '{') {
    const json doc = detail::parse_json(text, "weight table");
    for (const auto& [key, v] : doc.items()) assign(key, get_number(v, key));
  } else {
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
      ++line_no;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty()) continue;
      const auto comma = line.find(',');
      if (comma == std::string::npos) throw ParseError("weights: expected 'indicator,weight'", line_no, 1);
      const std::string_view name(line.data(), comma);
      const std::string_view field(line.data() + comma + 1, line.size() - comma - 1);
      if (line_no == 1 && name == "indicator") continue;
      double value = 0;
      const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
      if (ec != std::errc() || ptr != field.data() + field.size())
        throw ParseError("weights: invalid number '" + std::string(field) + "'", line_no, comma + 2);
      assign(name, value);
    }
  }
  if (seen.size() != kIndicatorCount) throw ValidationError("weights: expected all 18 indicators");
  return w;
}

IndicatorWeights load_weights(const std::filesystem::path& path) { return parse_weights(read_text_file(path)); }

std::string render_weights_csv(const IndicatorWeights& weights) {
  std::string out = "indicator,weight\n";
  char buf[64];
  for (std::size_t i = 0; i < kIndicatorCount; ++i) {
    std::snprintf(buf, sizeof buf, "%.12f", weights.values(Eigen::Index(i)));
    out += std::string(indicator_name(Indicator(i))) + "," + buf + "\n";
  }
  return out;
}

std::string read_text_file(const std::filesystem::path& path) { return detail::slurp(path); }

}  // namespace leafkit
