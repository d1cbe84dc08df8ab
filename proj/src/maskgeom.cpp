#include "leafkit/maskgeom.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <optional>

#include "leafkit/error.hpp"

namespace leafkit {

namespace {

// Clockwise on screen with y pointing down, starting west.
constexpr std::array<PixelPoint, 8> kDirs{{{-1, 0}, {-1, -1}, {0, -1}, {1, -1},
                                           {1, 0},  {1, 1},   {0, 1},  {-1, 1}}};

int dir_index(int dx, int dy) {
  for (int i = 0; i < 8; ++i)
    if (kDirs[i].x == dx && kDirs[i].y == dy) return i;
  return 0;
}

bool is_set(const Mask& m, int x, int y) {
  return x >= 0 && y >= 0 && x < m.cols() && y < m.rows() && m(y, x) != 0;
}

struct TraceStep {
  PixelPoint next;
  int backtrack;
};

std::optional<TraceStep> moore_step(const Mask& m, PixelPoint cur, int backtrack) {
  for (int k = 1; k <= 8; ++k) {
    const int d = (backtrack + k) % 8;
    const PixelPoint cand{cur.x + kDirs[d].x, cur.y + kDirs[d].y};
    if (!is_set(m, cand.x, cand.y)) continue;
    const PixelPoint& prev_dir = kDirs[(d + 7) % 8];
    const PixelPoint checked{cur.x + prev_dir.x, cur.y + prev_dir.y};
    return TraceStep{cand, dir_index(checked.x - cand.x, checked.y - cand.y)};
  }
  return std::nullopt;
}

}  // namespace

double Contour::length() const {
  if (points.size() < 2) return 0.0;
  double total = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const PixelPoint& a = points[i];
    const PixelPoint& b = points[(i + 1) % points.size()];
    const bool diagonal = a.x != b.x && a.y != b.y;
    total += diagonal ? std::numbers::sqrt2 : 1.0;
  }
  return total;
}

Mask largest_component(const Mask& mask) {
  const int h = int(mask.rows()), w = int(mask.cols());
  Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor> label =
      Eigen::Matrix<int, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>::Zero(h, w);
  int best_label = 0;
  std::int64_t best_size = 0;
  int next_label = 0;
  std::vector<PixelPoint> stack;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      if (!mask(y, x) || label(y, x)) continue;
      const int id = ++next_label;
      std::int64_t size = 0;
      stack.push_back({x, y});
      label(y, x) = id;
      while (!stack.empty()) {
        const PixelPoint p = stack.back();
        stack.pop_back();
        ++size;
        for (const auto& d : kDirs) {
          const int nx = p.x + d.x, ny = p.y + d.y;
          if (is_set(mask, nx, ny) && !label(ny, nx)) {
            label(ny, nx) = id;
            stack.push_back({nx, ny});
          }
        }
      }
      if (size > best_size) {
        best_size = size;
        best_label = id;
      }
    }
  }
  if (best_label == 0) throw ValidationError("mask has no set pixels");
  return (label.array() == best_label).cast<std::uint8_t>();
}

Contour trace_contour(const Mask& mask) {
  const Mask comp = largest_component(mask);
  PixelPoint start{-1, -1};
  for (int y = 0; y < comp.rows() && start.x < 0; ++y)
    for (int x = 0; x < comp.cols(); ++x)
      if (comp(y, x)) {
        start = {x, y};
        break;
      }

  Contour contour;
  contour.points.push_back(start);
  PixelPoint cur = start;
  int backtrack = 0;  // west of the raster-first pixel is background
  std::optional<PixelPoint> first_next;
  // Each boundary pixel is entered at most 4 times; bound the walk regardless.
  const std::size_t max_steps = 4 * std::size_t(comp.size()) + 8;
  for (std::size_t step = 0; step < max_steps; ++step) {
    const auto next = moore_step(comp, cur, backtrack);
    if (!next) break;  // isolated pixel
    if (cur == start) {
      if (first_next && next->next == *first_next) {
        contour.points.pop_back();
        break;
      }
      if (!first_next) first_next = next->next;
    }
    cur = next->next;
    backtrack = next->backtrack;
    contour.points.push_back(cur);
  }
  return contour;
}

Contour trace_contour(const InstanceMask& mask) { return trace_contour(mask.grid); }

ShapeIndicators shape_indicators(const Mask& mask) {
  const BoundingBox box = tight_bbox(mask);
  const Contour contour = trace_contour(mask);
  ShapeIndicators s;
  s.width = box.width();
  s.height = box.height();
  s.area = double(count_set(mask));
  s.perimeter = contour.points.size() == 1 ? 4.0 : contour.length();
  s.roundness = 4.0 * std::numbers::pi * s.area / (s.perimeter * s.perimeter);
  s.rectangularity = s.area / (s.width * s.height);
  return s;
}

ShapeIndicators shape_indicators(const InstanceMask& mask) { return shape_indicators(mask.grid); }

}  // namespace leafkit
