#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "leafkit/types.hpp"

namespace leafkit {

struct Point2 {
  double x{0};
  double y{0};
};

/// Rasterizes a simple or self-intersecting polygon given in pixel coordinates
/// (pixel (x, y) covers [x, x+1) x [y, y+1)). A pixel is set iff its center lies
/// inside by the even-odd rule; centers exactly on an edge count as inside.
Mask rasterize_polygon(std::span<const Point2> polygon, int height, int width);

/// Column-major run-length decoding; the first run is background.
Mask decode_rle(std::span<const std::int64_t> counts, int height, int width);
std::vector<std::int64_t> encode_rle(const Mask& mask);

/// Decodes the compact COCO string form of the run lengths.
std::vector<std::int64_t> decode_rle_string(std::string_view text);

enum class AnnotationFormat { coco, labelme };

AnnotationFormat parse_format(std::string_view name);

/// COCO-style document: images / annotations / categories. Segmentations may be
/// polygon lists or RLE (array or compact string counts). Boxes are recomputed
/// from pixels. A `score` field marks predictions.
Dataset load_coco(const std::filesystem::path& path);
Dataset parse_coco(std::string_view text);

/// LabelMe per-image document. Supported shapes: polygon, rectangle.
Dataset load_labelme(const std::filesystem::path& path);
Dataset parse_labelme(std::string_view text, std::int64_t image_id = 1,
                      std::int64_t first_instance_id = 1);

/// All `*.json` LabelMe files of a directory, sorted by name. Image ids are
/// 1..N in that order; instance ids run consecutively across files.
Dataset load_labelme_dir(const std::filesystem::path& dir);

/// Dispatches on format; a directory path selects load_labelme_dir.
Dataset load_annotations(const std::filesystem::path& path, AnnotationFormat format);

}  // namespace leafkit
