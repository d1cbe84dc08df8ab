#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <vector>

#include "leafkit/refkernels.hpp"
#include "leafkit/types.hpp"

namespace leafkit::synth {

using Rng = std::mt19937_64;

Mask disk_mask(int height, int width, double cx, double cy, double radius);
Mask rectangle_mask(int height, int width, int x0, int y0, int x1, int y1);  // inclusive corners
Mask ellipse_mask(int height, int width, double cx, double cy, double rx, double ry, double angle);

/// Random blob: union of a few ellipses, always non-empty.
Mask random_mask(Rng& rng, int height, int width);

/// Copy of `mask` shifted by (dx, dy) inside a canvas of the given size.
Mask translate(const Mask& mask, int dx, int dy, int height, int width);

/// A few images with up to `max_instances` ground truths and predictions in
/// total, over one or two categories. Predictions perturb ground truths or are
/// spurious; scores come from a coarse grid so ties occur.
struct Scene {
  std::vector<InstanceMask> gts;
  std::vector<InstanceMask> preds;
};
Scene random_scene(Rng& rng, int max_instances = 10);

/// Writes `n_images` PNG leaf images, `annotations.json` (ground truth) and
/// `predictions.json` (perturbed, scored) into `dir`.
struct CorpusPaths {
  std::filesystem::path images;
  std::filesystem::path annotations;
  std::filesystem::path predictions;
};
CorpusPaths write_corpus(const std::filesystem::path& dir, int n_images, std::uint64_t seed);

kernels::FeatureMap<double> random_map(Rng& rng, Eigen::Index c, Eigen::Index h, Eigen::Index w,
                                       double scale = 1.0);
kernels::ConvParams<double> random_conv(Rng& rng, Eigen::Index out, Eigen::Index in_per_group, Eigen::Index kh,
                                        Eigen::Index kw, int groups = 1, double scale = 0.5);
kernels::DaspParams<double> random_dasp(Rng& rng, Eigen::Index channels);
kernels::DarhParams<double> random_darh(Rng& rng, Eigen::Index channels, Eigen::Index expanded);

}  // namespace leafkit::synth
