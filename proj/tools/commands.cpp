#include "commands.hpp"

#include <cstdio>
#include <map>
#include <ostream>

#include <json.hpp>

#include "leafkit/evalsuite.hpp"
#include "leafkit/image_io.hpp"
#include "leafkit/ingest.hpp"
#include "leafkit/maskgeom.hpp"
#include "leafkit/report.hpp"
#include "worker_pool.hpp"

namespace leafkit::cli {

namespace fs = std::filesystem;

namespace {

void require_path(const fs::path& p, const char* flag) {
  if (p.empty()) throw ValidationError(std::string("missing required option ") + flag);
}

fs::path image_root(const RunConfig& cfg) {
  if (!cfg.images.empty()) return cfg.images;
  if (fs::is_directory(cfg.annotations)) return cfg.annotations;
  return cfg.annotations.parent_path();
}

fs::path image_path(const fs::path& root, const ImageRef& ref) {
  if (ref.path.empty()) throw ValidationError("image " + std::to_string(ref.id) + " has no file name");
  return ref.path.is_absolute() ? ref.path : root / ref.path;
}

std::vector<const ImageRef*> images_by_id(const Dataset& ds) {
  std::vector<const ImageRef*> out;
  for (const auto& im : ds.images) out.push_back(&im);
  std::sort(out.begin(), out.end(), [](const ImageRef* a, const ImageRef* b) { return a->id < b->id; });
  return out;
}

void check_images_exist(const Dataset& ds, const fs::path& root) {
  for (const auto* im : images_by_id(ds)) {
    const fs::path p = image_path(root, *im);
    if (!fs::is_regular_file(p)) throw IoError("image not found: " + p.string());
  }
}

RgbImage load_checked(const fs::path& path, const ImageRef& ref) {
  RgbImage img = read_image(path);
  if (img.width() != ref.width || img.height() != ref.height)
    throw ValidationError("image " + path.string() + " is " + std::to_string(img.width()) + "x" +
                          std::to_string(img.height()) + ", annotations say " + std::to_string(ref.width) + "x" +
                          std::to_string(ref.height));
  return img;
}

/// Records for the kept instances of every image, merged in image-id order.
std::vector<LeafRecord> extract_records(const Dataset& ds, const fs::path& root, double min_area, int workers) {
  const auto images = images_by_id(ds);
  std::vector<std::vector<LeafRecord>> per_image(images.size());
  parallel_for(images.size(), workers, [&](std::size_t i) {
    const ImageRef& ref = *images[i];
    std::vector<InstanceMask> own;
    for (const auto* inst : ds.instances_of(ref.id)) own.push_back(*inst);
    const auto kept = filter_instances(own, min_area);
    if (kept.empty()) return;
    const RgbImage img = load_checked(image_path(root, ref), ref);
    for (const auto& inst : kept) per_image[i].push_back({inst.id, shape_indicators(inst), color_indicators(img, inst)});
  });
  std::vector<LeafRecord> records;
  for (auto& part : per_image) records.insert(records.end(), part.begin(), part.end());
  return records;
}

std::string fixed(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

OptimalValueTable optimal_table(const RunConfig& cfg) {
  OptimalValueTable t = cfg.optimal_values.empty() ? OptimalValueTable::reference() : load_optimal_values(cfg.optimal_values);
  t.validate();
  return t;
}

IndicatorWeights fixture_weights(const RunConfig& cfg) {
  if (cfg.weights_file.empty()) {
    IndicatorWeights w = IndicatorWeights::reference();
    w.validate(kReferenceWeightTolerance);
    return w;
  }
  IndicatorWeights w = load_weights(cfg.weights_file);
  w.validate(kReferenceWeightTolerance);
  return w;
}

// Grey level per leaf: 255 * (1 - score), so better leaves are darker. The
// photograph shows through at half intensity elsewhere.
RgbImage score_map(const RgbImage& img, const std::vector<std::pair<const InstanceMask*, double>>& leaves) {
  RgbImage out = img;
  for (auto& ch : out.channels) ch = (ch.cast<int>().array() / 2 + 128).cast<std::uint8_t>().matrix();
  for (const auto& [inst, score] : leaves) {
    const auto shade = std::uint8_t(std::lround(255.0 * (1.0 - score)));
    for (Eigen::Index y = 0; y < inst->grid.rows(); ++y)
      for (Eigen::Index x = 0; x < inst->grid.cols(); ++x)
        if (inst->grid(y, x))
          for (auto& ch : out.channels) ch(y, x) = shade;
  }
  return out;
}

}  // namespace

int cmd_extract(const RunConfig& cfg, std::ostream& out) {
  cfg.validate();
  require_path(cfg.annotations, "--annotations");
  require_path(cfg.out, "--out");
  const Dataset ds = load_annotations(cfg.annotations, cfg.format);
  const fs::path root = image_root(cfg);
  check_images_exist(ds, root);
  const auto records = extract_records(ds, root, cfg.min_area, cfg.workers);
  const std::string csv = render_report(records, ReportFormat::csv);

  fs::create_directories(cfg.out);
  write_text_file(cfg.out / "records.csv", csv);
  out << "extracted " << records.size() << " leaf records from " << ds.images.size() << " images (" << ds.instances.size()
      << " annotated instances, min area " << cfg.min_area << ")\n";
  return kSuccess;
}

int cmd_score(const RunConfig& cfg, std::ostream& out) {
  cfg.validate();
  require_path(cfg.out, "--out");
  const fs::path records_path = cfg.records.empty() ? cfg.out / "records.csv" : cfg.records;
  if (!fs::is_regular_file(records_path)) throw IoError("indicator CSV not found: " + records_path.string());
  const ParsedReport report = read_report_csv(records_path);
  if (report.layout != ReportLayout::full)
    throw ValidationError("scoring needs all 18 indicators; " + records_path.string() + " has no tertile columns");
  const auto& records = report.records;
  if (records.size() < 2) throw DegenerateInputError("scoring needs at least 2 leaf records");

  const OptimalValueTable table = optimal_table(cfg);
  const IndicatorWeights weights = cfg.weights == WeightSource::refit ? fit_weights(records, table) : fixture_weights(cfg);
  const auto scores = lgci_score(records, weights, table);

  std::string lgci = "ID,LGCI\n";
  for (const auto& s : scores) lgci += std::to_string(s.id) + "," + fixed("%.6f", s.score) + "\n";

  std::vector<std::pair<fs::path, RgbImage>> maps;
  if (cfg.score_maps) {
    require_path(cfg.annotations, "--annotations");
    const Dataset ds = load_annotations(cfg.annotations, cfg.format);
    const fs::path root = image_root(cfg);
    check_images_exist(ds, root);
    std::map<std::int64_t, double> by_id;
    for (const auto& s : scores) by_id[s.id] = s.score;
    std::size_t matched = 0;
    for (const auto* ref : images_by_id(ds)) {
      std::vector<std::pair<const InstanceMask*, double>> leaves;
      for (const auto* inst : ds.instances_of(ref->id))
        if (const auto it = by_id.find(inst->id); it != by_id.end()) leaves.push_back({inst, it->second});
      matched += leaves.size();
      const fs::path src = image_path(root, *ref);
      maps.push_back({fs::path(src.stem().string() + "_lgci.png"), score_map(load_checked(src, *ref), leaves)});
    }
    if (matched != scores.size())
      throw ValidationError("score maps: " + std::to_string(scores.size() - matched) +
                            " record ids have no instance in the annotations");
  }

  fs::create_directories(cfg.out);
  write_text_file(cfg.out / "lgci.csv", lgci);
  write_text_file(cfg.out / "weights.csv", render_weights_csv(weights));
  if (!maps.empty()) {
    fs::create_directories(cfg.out / "score_maps");
    for (const auto& [name, img] : maps) write_image(cfg.out / "score_maps" / name, img);
  }
  out << "scored " << scores.size() << " leaves with " << (cfg.weights == WeightSource::refit ? "refit" : "fixture")
      << " weights\n";
  return kSuccess;
}

int cmd_eval(const RunConfig& cfg, std::ostream& out) {
  cfg.validate();
  require_path(cfg.annotations, "--annotations");
  require_path(cfg.pred, "--pred");
  require_path(cfg.out, "--out");
  const Dataset gt = load_annotations(cfg.annotations, cfg.format);
  const Dataset pred = load_annotations(cfg.pred, cfg.format);
  if (gt.instances.empty()) throw ValidationError("ground truth has no instances");
  for (const auto& p : pred.instances) {
    const ImageRef* ref = gt.find_image(p.image_id);
    if (!ref) throw ValidationError("prediction " + std::to_string(p.id) + " refers to image " +
                                    std::to_string(p.image_id) + ", which is not in the ground truth");
    if (p.grid.rows() != ref->height || p.grid.cols() != ref->width)
      throw ValidationError("prediction " + std::to_string(p.id) + " does not match its image size");
  }
  const bool with_color = !cfg.images.empty();
  if (with_color) check_images_exist(gt, cfg.images);

  const DetectionMetrics m = coco_map(pred.instances, gt.instances, cfg.iou_threshold);

  // Indicator regression over one-to-one IoU matches, image by image.
  const auto images = images_by_id(gt);
  std::vector<std::vector<std::pair<IndicatorVector, IndicatorVector>>> per_image(images.size());
  parallel_for(images.size(), cfg.workers, [&](std::size_t i) {
    const ImageRef& ref = *images[i];
    std::vector<InstanceMask> g, p;
    for (const auto* inst : gt.instances_of(ref.id)) g.push_back(*inst);
    for (const auto* inst : pred.instances_of(ref.id)) p.push_back(*inst);
    if (g.empty() || p.empty()) return;
    const MatchResult match = match_by_iou(p, g, cfg.iou_threshold);
    if (match.pairs.empty()) return;
    RgbImage img;
    if (with_color) img = load_checked(image_path(cfg.images, ref), ref);
    auto find = [](const std::vector<InstanceMask>& v, std::int64_t id) {
      return *std::find_if(v.begin(), v.end(), [id](const InstanceMask& x) { return x.id == id; });
    };
    auto indicators = [&](const InstanceMask& inst) {
      LeafRecord r{inst.id, shape_indicators(inst), {}};
      if (with_color) r.color = color_indicators(img, inst);
      return r.values();
    };
    for (const auto& pair : match.pairs)
      per_image[i].push_back({indicators(find(p, pair.pred_id)), indicators(find(g, pair.gt_id))});
  });
  std::vector<std::pair<IndicatorVector, IndicatorVector>> pairs;
  for (auto& part : per_image) pairs.insert(pairs.end(), part.begin(), part.end());

  nlohmann::ordered_json doc;
  doc["seg/mAP"] = m.seg_map;
  doc["seg/AP50"] = m.seg_ap50;
  doc["seg/AP75"] = m.seg_ap75;
  doc["box/mAP"] = m.box_map;
  doc["box/AP50"] = m.box_ap50;
  doc["box/AP75"] = m.box_ap75;
  doc["iou_threshold"] = m.iou_threshold;
  doc["precision"] = m.precision;
  doc["recall"] = m.recall;
  doc["matched_pairs"] = pairs.size();
  std::string regression = "indicator,n,r2,rmse,mae\n";
  nlohmann::ordered_json reg = nlohmann::ordered_json::object();
  const std::size_t count = with_color ? kIndicatorCount : kShapeIndicatorCount;
  if (!pairs.empty()) {
    for (std::size_t k = 0; k < count; ++k) {
      std::vector<double> pv, gv;
      for (const auto& [a, b] : pairs) {
        pv.push_back(a[k]);
        gv.push_back(b[k]);
      }
      const RegressionMetrics r = regression_metrics(pv, gv);
      const std::string name(indicator_name(Indicator(k)));
      regression += name + "," + std::to_string(pairs.size()) + "," + fixed("%.3f", r.r2) + "," + fixed("%.3f", r.rmse) +
                    "," + fixed("%.3f", r.mae) + "\n";
      reg[name] = {{"r2", r.r2}, {"rmse", r.rmse}, {"mae", r.mae}, {"degenerate", r.degenerate}};
    }
  }
  doc["regression"] = reg;

  fs::create_directories(cfg.out);
  write_text_file(cfg.out / "metrics.json", doc.dump(2) + "\n");
  write_text_file(cfg.out / "regression.csv", regression);
  out << "seg/mAP " << fixed("%.4f", m.seg_map) << "  seg/AP50 " << fixed("%.4f", m.seg_ap50) << "  seg/AP75 "
      << fixed("%.4f", m.seg_ap75) << "\nbox/mAP " << fixed("%.4f", m.box_map) << "  box/AP50 "
      << fixed("%.4f", m.box_ap50) << "  box/AP75 " << fixed("%.4f", m.box_ap75) << "\n";
  return kSuccess;
}

int cmd_verify(const verify::VerifyOptions& options, std::ostream& out) {
  std::vector<verify::GradientRow> table;
  const auto results = verify::run_all(options, &table);
  out << verify::render_results(results) << "\n" << verify::render_gradient_table(table);
  bool ok = true;
  for (const auto& r : results) ok = ok && r.passed;
  if (!ok) {
    out << "failed:";
    for (const auto& r : results)
      if (!r.passed) out << " " << r.name;
    out << "\n";
  }
  return ok ? kSuccess : kFailure;
}

}  // namespace leafkit::cli
