#include "leafkit/ingest.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "json_support.hpp"
#include "leafkit/error.hpp"

namespace leafkit {

using nlohmann::json;

namespace {

void set_if_inside(Mask& mask, long x, long y) {
  if (x >= 0 && y >= 0 && x < mask.cols() && y < mask.rows()) mask(y, x) = 1;
}

// Marks pixel centers lying exactly on segment a-b.
void mark_edge_centers(Mask& mask, const Point2& a, const Point2& b) {
  const double y_lo = std::min(a.y, b.y);
  const double y_hi = std::max(a.y, b.y);
  const double x_lo = std::min(a.x, b.x);
  const double x_hi = std::max(a.x, b.x);
  const long row_first = std::max<long>(0, long(std::ceil(y_lo - 0.5)));
  const long row_last = std::min<long>(mask.rows() - 1, long(std::floor(y_hi - 0.5)));
  for (long y = row_first; y <= row_last; ++y) {
    const double yc = y + 0.5;
    if (a.y == b.y) {
      const long col_first = long(std::ceil(x_lo - 0.5));
      const long col_last = long(std::floor(x_hi - 0.5));
      for (long x = col_first; x <= col_last; ++x) set_if_inside(mask, x, y);
      continue;
    }
    const double xt = a.x + (yc - a.y) * (b.x - a.x) / (b.y - a.y);
    const long guess = long(std::floor(xt - 0.5));
    for (long x = guess - 1; x <= guess + 1; ++x) {
      const double xc = x + 0.5;
      if (xc < x_lo || xc > x_hi) continue;
      const double cross = (b.x - a.x) * (yc - a.y) - (b.y - a.y) * (xc - a.x);
      if (cross == 0.0) set_if_inside(mask, x, y);
    }
  }
}

using detail::parse_json;

std::string read_text(const std::filesystem::path& path) { return detail::slurp(path); }

template <typename T>
T required(const json& obj, const char* key, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) throw ValidationError(where + ": missing field '" + key + "'");
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw ValidationError(where + ": field '" + key + "' has the wrong type");
  }
}

std::optional<double> optional_score(const json& obj, const std::string& where) {
  auto it = obj.find("score");
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (!it->is_number()) throw ValidationError(where + ": score must be a number");
  return it->get<double>();
}

std::vector<Point2> flat_to_points(const std::vector<double>& flat, const std::string& where) {
  if (flat.size() % 2 != 0) throw ValidationError(where + ": odd polygon coordinate count");
  std::vector<Point2> pts;
  for (std::size_t i = 0; i < flat.size(); i += 2) pts.push_back({flat[i], flat[i + 1]});
  return pts;
}

Mask coco_segmentation(const json& seg, const ImageRef& image, const std::string& where) {
  if (seg.is_array()) {
    Mask mask = Mask::Zero(image.height, image.width);
    for (const auto& poly : seg) {
      std::vector<double> flat;
      try {
        flat = poly.get<std::vector<double>>();
      } catch (const json::exception&) {
        throw ValidationError(where + ": polygon must be a flat number list");
      }
      const auto pts = flat_to_points(flat, where);
      if (pts.size() < 3) throw ValidationError(where + ": polygon needs at least 3 points");
      mask = mask.cwiseMax(rasterize_polygon(pts, image.height, image.width));
    }
    return mask;
  }
  if (seg.is_object()) {
    const auto size = required<std::vector<int>>(seg, "size", where);
    if (size.size() != 2 || size[0] != image.height || size[1] != image.width)
      throw ValidationError(where + ": RLE size does not match image");
    const auto& counts = seg.at("counts");
    std::vector<std::int64_t> runs;
    if (counts.is_string()) {
      runs = decode_rle_string(counts.get<std::string>());
    } else {
      try {
        runs = counts.get<std::vector<std::int64_t>>();
      } catch (const json::exception&) {
        throw ValidationError(where + ": RLE counts must be integers");
      }
    }
    return decode_rle(runs, image.height, image.width);
  }
  throw ValidationError(where + ": unsupported segmentation");
}

}  // namespace

Mask rasterize_polygon(std::span<const Point2> polygon, int height, int width) {
  if (polygon.size() < 3) throw ValidationError("polygon needs at least 3 points");
  Mask mask = Mask::Zero(height, width);
  const std::size_t n = polygon.size();
  std::vector<double> xs;
  for (int y = 0; y < height; ++y) {
    const double yc = y + 0.5;
    xs.clear();
    for (std::size_t i = 0; i < n; ++i) {
      const Point2& a = polygon[i];
      const Point2& b = polygon[(i + 1) % n];
      if ((a.y <= yc && yc < b.y) || (b.y <= yc && yc < a.y))
        xs.push_back(a.x + (yc - a.y) * (b.x - a.x) / (b.y - a.y));
    }
    std::sort(xs.begin(), xs.end());
    for (std::size_t k = 0; k + 1 < xs.size(); k += 2) {
      const long first = std::max<long>(0, long(std::ceil(xs[k] - 0.5)));
      const long last = std::min<long>(width - 1, long(std::floor(xs[k + 1] - 0.5)));
      for (long x = first; x <= last; ++x) mask(y, x) = 1;
    }
  }
  for (std::size_t i = 0; i < n; ++i) mark_edge_centers(mask, polygon[i], polygon[(i + 1) % n]);
  return mask;
}

Mask decode_rle(std::span<const std::int64_t> counts, int height, int width) {
  const std::int64_t total = std::int64_t(height) * width;
  std::int64_t sum = 0;
  for (auto c : counts) {
    if (c < 0) throw ValidationError("negative run length");
    sum += c;
  }
  if (sum != total)
    throw ValidationError("run lengths sum to " + std::to_string(sum) + ", expected " +
                          std::to_string(total));
  Mask mask = Mask::Zero(height, width);
  std::int64_t pos = 0;
  bool value = false;
  for (auto c : counts) {
    if (value) {
      for (std::int64_t k = pos; k < pos + c; ++k) mask(k % height, k / height) = 1;
    }
    pos += c;
    value = !value;
  }
  return mask;
}

std::vector<std::int64_t> encode_rle(const Mask& mask) {
  std::vector<std::int64_t> counts;
  const std::int64_t h = mask.rows();
  const std::int64_t total = h * mask.cols();
  bool value = false;
  std::int64_t run = 0;
  for (std::int64_t k = 0; k < total; ++k) {
    const bool px = mask(k % h, k / h) != 0;
    if (px != value) {
      counts.push_back(run);
      run = 0;
      value = px;
    }
    ++run;
  }
  counts.push_back(run);
  return counts;
}

std::vector<std::int64_t> decode_rle_string(std::string_view text) {
  std::vector<std::int64_t> counts;
  std::size_t p = 0;
  while (p < text.size()) {
    std::int64_t x = 0;
    int k = 0;
    bool more = true;
    while (more) {
      if (p >= text.size()) throw ValidationError("truncated RLE string");
      const std::int64_t c = std::int64_t(text[p]) - 48;
      if (c < 0 || c > 63) throw ValidationError("invalid character in RLE string");
      x |= (c & 0x1f) << (5 * k);
      more = (c & 0x20) != 0;
      ++p;
      ++k;
      if (!more && (c & 0x10)) x |= ~std::int64_t{0} << (5 * k);
    }
    if (counts.size() > 2) x += counts[counts.size() - 2];
    counts.push_back(x);
  }
  return counts;
}

AnnotationFormat parse_format(std::string_view name) {
  if (name == "coco") return AnnotationFormat::coco;
  if (name == "labelme") return AnnotationFormat::labelme;
  throw ValidationError("unknown annotation format '" + std::string(name) + "'");
}

Dataset parse_coco(std::string_view text) {
  const json doc = parse_json(text, "COCO document");
  if (!doc.is_object()) throw ValidationError("COCO document must be an object");
  Dataset ds;

  for (const auto& im : doc.value("images", json::array())) {
    ImageRef ref;
    ref.id = required<std::int64_t>(im, "id", "image");
    const std::string where = "image " + std::to_string(ref.id);
    ref.width = required<int>(im, "width", where);
    ref.height = required<int>(im, "height", where);
    ref.path = im.value("file_name", std::string{});
    if (ref.width <= 0 || ref.height <= 0) throw ValidationError(where + ": non-positive size");
    ds.images.push_back(std::move(ref));
  }

  std::map<std::int64_t, std::string> categories;
  for (const auto& cat : doc.value("categories", json::array()))
    categories[required<std::int64_t>(cat, "id", "category")] = cat.value("name", std::string{});
  for (const auto& [id, name] : categories) ds.category_names.push_back(name);

  for (const auto& ann : doc.value("annotations", json::array())) {
    const auto id = required<std::int64_t>(ann, "id", "annotation");
    const std::string where = "annotation " + std::to_string(id);
    const auto image_id = required<std::int64_t>(ann, "image_id", where);
    const ImageRef* image = ds.find_image(image_id);
    if (!image)
      throw ValidationError(where + " references missing image id " + std::to_string(image_id));
    auto seg = ann.find("segmentation");
    if (seg == ann.end()) throw ValidationError(where + ": missing segmentation");
    Mask grid = coco_segmentation(*seg, *image, where);
    if (count_set(grid) == 0) throw ValidationError(where + ": segmentation covers no pixel");
    InstanceMask inst = make_instance(id, image_id, std::move(grid), optional_score(ann, where));
    inst.category_id = ann.value("category_id", std::int64_t{1});
    ds.instances.push_back(std::move(inst));
  }
  ds.validate();
  return ds;
}

Dataset load_coco(const std::filesystem::path& path) { return parse_coco(read_text(path)); }

Dataset parse_labelme(std::string_view text, std::int64_t image_id,
                      std::int64_t first_instance_id) {
  const json doc = parse_json(text, "LabelMe document");
  if (!doc.is_object()) throw ValidationError("LabelMe document must be an object");
  Dataset ds;
  ImageRef ref;
  ref.id = image_id;
  ref.width = required<int>(doc, "imageWidth", "LabelMe document");
  ref.height = required<int>(doc, "imageHeight", "LabelMe document");
  ref.path = doc.value("imagePath", std::string{});
  if (ref.width <= 0 || ref.height <= 0)
    throw ValidationError("LabelMe document: non-positive image size");
  ds.images.push_back(ref);

  std::int64_t next_id = first_instance_id;
  for (const auto& shape : doc.value("shapes", json::array())) {
    const std::string where = "shape " + std::to_string(next_id - first_instance_id);
    std::string type = "polygon";
    if (auto it = shape.find("shape_type"); it != shape.end() && !it->is_null())
      type = it->get<std::string>();
    const auto raw = required<std::vector<std::array<double, 2>>>(shape, "points", where);
    std::vector<Point2> pts;
    for (const auto& p : raw) pts.push_back({p[0], p[1]});
    if (type == "rectangle") {
      if (pts.size() != 2)
        throw ValidationError(where + ": rectangle needs exactly 2 points");
      const Point2 a = pts[0], b = pts[1];
      pts = {{a.x, a.y}, {b.x, a.y}, {b.x, b.y}, {a.x, b.y}};
    } else if (type != "polygon") {
      throw ValidationError(where + ": unsupported shape type '" + type + "'");
    }
    if (pts.size() < 3) throw ValidationError(where + ": polygon needs at least 3 points");

    const std::string label = shape.value("label", std::string{"leaf"});
    auto cat = std::find(ds.category_names.begin(), ds.category_names.end(), label);
    if (cat == ds.category_names.end()) cat = ds.category_names.insert(cat, label);

    Mask grid = rasterize_polygon(pts, ref.height, ref.width);
    if (count_set(grid) == 0) throw ValidationError(where + ": polygon covers no pixel");
    InstanceMask inst = make_instance(next_id++, image_id, std::move(grid), optional_score(shape, where));
    inst.category_id = std::distance(ds.category_names.begin(), cat) + 1;
    ds.instances.push_back(std::move(inst));
  }
  ds.validate();
  return ds;
}

Dataset load_labelme(const std::filesystem::path& path) { return parse_labelme(read_text(path)); }

Dataset load_labelme_dir(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
  std::sort(files.begin(), files.end());

  Dataset merged;
  std::int64_t image_id = 1;
  std::int64_t next_instance = 1;
  for (const auto& file : files) {
    Dataset one = parse_labelme(read_text(file), image_id++, next_instance);
    next_instance += std::int64_t(one.instances.size());
    merged.images.push_back(std::move(one.images.front()));
    for (auto& inst : one.instances) {
      // category ids are per-file; remap onto the merged name list
      const std::string& name = one.category_names[inst.category_id - 1];
      auto it = std::find(merged.category_names.begin(), merged.category_names.end(), name);
      if (it == merged.category_names.end()) it = merged.category_names.insert(it, name);
      inst.category_id = std::distance(merged.category_names.begin(), it) + 1;
      merged.instances.push_back(std::move(inst));
    }
  }
  merged.validate();
  return merged;
}

Dataset load_annotations(const std::filesystem::path& path, AnnotationFormat format) {
  if (format == AnnotationFormat::coco) return load_coco(path);
  if (std::filesystem::is_directory(path)) return load_labelme_dir(path);
  return load_labelme(path);
}

}  // namespace leafkit
