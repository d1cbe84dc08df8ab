#pragma once

#include <vector>

#include "leafkit/types.hpp"

namespace leafkit {

struct PixelPoint {
  int x{0};
  int y{0};
  friend bool operator==(const PixelPoint&, const PixelPoint&) = default;
};

/// Closed outer boundary as pixel centers; the closing step runs from the last
/// point back to the first. Consecutive points are 8-adjacent.
struct Contour {
  std::vector<PixelPoint> points;

  /// Axis steps count 1, diagonal steps sqrt(2), including the closing step.
  double length() const;
};

struct ShapeIndicators {
  double width{0};
  double height{0};
  double perimeter{0};
  double area{0};
  double roundness{0};
  double rectangularity{0};
};

/// Keeps only the largest 8-connected component. Ties go to the component
/// reached first in raster order.
Mask largest_component(const Mask& mask);

/// Moore-neighbour trace of the largest 8-connected component, clockwise on
/// screen (y down), starting at its topmost-leftmost pixel.
Contour trace_contour(const Mask& mask);
Contour trace_contour(const InstanceMask& mask);

/// Area and bbox over all set pixels; perimeter from the outer contour of the
/// largest component. A one-pixel component has perimeter 4 (its pixel edge).
ShapeIndicators shape_indicators(const Mask& mask);
ShapeIndicators shape_indicators(const InstanceMask& mask);

}  // namespace leafkit
