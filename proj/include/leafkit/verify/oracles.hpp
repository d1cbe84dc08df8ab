#pragma once

// Deliberately naive re-derivations used to cross-check the library. None of
// these call the code they check.

#include <cstdint>
#include <span>
#include <vector>

#include "leafkit/evalsuite.hpp"
#include "leafkit/ingest.hpp"
#include "leafkit/refkernels.hpp"

namespace leafkit::oracle {

/// IoU from explicit pixel-coordinate sets.
double pixel_set_iou(const Mask& a, const Mask& b);

/// IoU of integer-cornered boxes by counting unit cells.
double cell_count_iou(const BoundingBox& a, const BoundingBox& b);

/// AP by brute force: for every prefix of the global ranking, greedy matching
/// is redone from scratch; interpolated precision at r is the best precision
/// among prefixes reaching recall r.
double brute_force_ap(std::span<const InstanceMask> preds, std::span<const InstanceMask> gts,
                      double threshold, IouKind kind, int max_detections = 100);
/// Same, for several thresholds at once (IoUs computed once).
std::vector<double> brute_force_ap_sweep(std::span<const InstanceMask> preds, std::span<const InstanceMask> gts,
                                         std::span<const double> thresholds, IouKind kind,
                                         int max_detections = 100);

/// Per-pixel crossing-number test on pixel centres, centres on an edge inside.
Mask pnpoly_rasterize(std::span<const Point2> polygon, int height, int width);

/// Set pixels of the largest component that touch an unset 4-neighbour or the border.
std::vector<std::pair<int, int>> boundary_pixels(const Mask& mask);

using kernels::FeatureMap;
using kernels::Kernel;
using kernels::Vector;

/// Pads explicitly, then runs a valid convolution.
FeatureMap<double> direct_conv(const FeatureMap<double>& x, const Kernel<double>& w, const Vector<double>& bias,
                               int stride, int groups);

/// Deformable convolution with the tent-weight form of bilinear sampling.
FeatureMap<double> direct_deform_conv(const FeatureMap<double>& x, const Kernel<double>& w,
                                      const Vector<double>& bias, const FeatureMap<double>& offsets);

/// Separable interpolation matrices: out = A_h * X * A_w^T per channel.
FeatureMap<double> matrix_bilinear_upsample(const FeatureMap<double>& x, int factor);

/// Step-by-step evaluation of the shape-aware pyramid block and the head.
FeatureMap<double> dasp_oracle(const FeatureMap<double>& x_up, const kernels::DaspParams<double>& p,
                               double alpha);
FeatureMap<double> darh_oracle(const FeatureMap<double>& x, const kernels::DarhParams<double>& p,
                               const kernels::ResidualGains<double>& gains);

}  // namespace leafkit::oracle
