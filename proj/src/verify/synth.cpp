#include "leafkit/verify/synth.hpp"

#include <cmath>
#include <numbers>

#include <json.hpp>

#include "leafkit/image_io.hpp"
#include "leafkit/ingest.hpp"
#include "leafkit/report.hpp"

namespace leafkit::synth {

namespace {

double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
int uniform_int(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

void paint_ellipse(Mask& m, double cx, double cy, double rx, double ry, double angle) {
  const double c = std::cos(angle), s = std::sin(angle);
  for (Eigen::Index y = 0; y < m.rows(); ++y)
    for (Eigen::Index x = 0; x < m.cols(); ++x) {
      const double dx = double(x) + 0.5 - cx, dy = double(y) + 0.5 - cy;
      const double u = (c * dx + s * dy) / rx, v = (-s * dx + c * dy) / ry;
      if (u * u + v * v <= 1.0) m(y, x) = 1;
    }
}

std::uint8_t clamp_byte(double v) { return std::uint8_t(std::clamp(std::lround(v), 0L, 255L)); }

kernels::Vector<double> random_vector(Rng& rng, Eigen::Index n, double lo, double hi) {
  kernels::Vector<double> v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = uniform(rng, lo, hi);
  return v;
}

nlohmann::json rle_segmentation(const Mask& m) {
  return {{"counts", encode_rle(m)}, {"size", {m.rows(), m.cols()}}};
}

}  // namespace

Mask disk_mask(int height, int width, double cx, double cy, double radius) {
  return ellipse_mask(height, width, cx, cy, radius, radius, 0.0);
}

Mask rectangle_mask(int height, int width, int x0, int y0, int x1, int y1) {
  Mask m = Mask::Zero(height, width);
  for (int y = std::max(0, y0); y <= std::min(height - 1, y1); ++y)
    for (int x = std::max(0, x0); x <= std::min(width - 1, x1); ++x) m(y, x) = 1;
  return m;
}

Mask ellipse_mask(int height, int width, double cx, double cy, double rx, double ry, double angle) {
  Mask m = Mask::Zero(height, width);
  paint_ellipse(m, cx, cy, rx, ry, angle);
  return m;
}

Mask random_mask(Rng& rng, int height, int width) {
  Mask m = Mask::Zero(height, width);
  const int parts = uniform_int(rng, 1, 3);
  for (int k = 0; k < parts; ++k)
    paint_ellipse(m, uniform(rng, 0.3, 0.7) * width, uniform(rng, 0.3, 0.7) * height,
                  uniform(rng, 1.0, 0.25 * width), uniform(rng, 1.0, 0.25 * height),
                  uniform(rng, 0.0, std::numbers::pi));
  if (count_set(m) == 0) m(height / 2, width / 2) = 1;
  return m;
}

Mask translate(const Mask& mask, int dx, int dy, int height, int width) {
  Mask out = Mask::Zero(height, width);
  for (Eigen::Index y = 0; y < mask.rows(); ++y)
    for (Eigen::Index x = 0; x < mask.cols(); ++x)
      if (mask(y, x)) {
        const Eigen::Index ny = y + dy, nx = x + dx;
        if (ny >= 0 && nx >= 0 && ny < height && nx < width) out(ny, nx) = 1;
      }
  return out;
}

Scene random_scene(Rng& rng, int max_instances) {
  Scene scene;
  const int images = uniform_int(rng, 1, 3);
  const int categories = uniform_int(rng, 1, 2);
  const int n_gt = uniform_int(rng, 0, max_instances);
  const int n_pred = uniform_int(rng, 0, max_instances);
  constexpr int kSize = 24;
  auto box_blob = [&](int h, int w) {
    // Rectangles give box IoU and mask IoU that lie on a fine grid.
    const int x0 = uniform_int(rng, 0, w - 4), y0 = uniform_int(rng, 0, h - 4);
    return rng() % 2 ? rectangle_mask(h, w, x0, y0, uniform_int(rng, x0, w - 1), uniform_int(rng, y0, h - 1))
                     : random_mask(rng, h, w);
  };
  std::int64_t next_id = 1;
  for (int k = 0; k < n_gt; ++k) {
    Mask m = box_blob(kSize, kSize);
    InstanceMask inst = make_instance(next_id++, uniform_int(rng, 1, images), std::move(m), std::nullopt);
    inst.category_id = uniform_int(rng, 1, categories);
    scene.gts.push_back(std::move(inst));
  }
  for (int k = 0; k < n_pred; ++k) {
    Mask m;
    std::int64_t image_id = uniform_int(rng, 1, images), category = uniform_int(rng, 1, categories);
    if (!scene.gts.empty() && rng() % 4 != 0) {
      const auto& src = scene.gts[std::size_t(uniform_int(rng, 0, int(scene.gts.size()) - 1))];
      m = translate(src.grid, uniform_int(rng, -2, 2), uniform_int(rng, -2, 2), kSize, kSize);
      image_id = src.image_id;
      if (rng() % 5 != 0) category = src.category_id;
    }
    if (m.size() == 0 || count_set(m) == 0) m = box_blob(kSize, kSize);
    const double score = double(uniform_int(rng, 1, 10)) / 10.0;
    InstanceMask inst = make_instance(next_id++, image_id, std::move(m), score);
    inst.category_id = category;
    scene.preds.push_back(std::move(inst));
  }
  return scene;
}

CorpusPaths write_corpus(const std::filesystem::path& dir, int n_images, std::uint64_t seed) {
  Rng rng(seed);
  CorpusPaths paths{dir / "images", dir / "annotations.json", dir / "predictions.json"};
  std::filesystem::create_directories(paths.images);
  constexpr int kH = 160, kW = 192;
  nlohmann::json gt_images = nlohmann::json::array(), gt_anns = nlohmann::json::array(),
                 pred_anns = nlohmann::json::array();
  std::int64_t ann_id = 1, pred_id = 1;
  for (int i = 1; i <= n_images; ++i) {
    const std::string name = "leaf_" + std::to_string(1000 + i).substr(1) + ".png";
    RgbImage img(kH, kW);
    std::normal_distribution<double> noise(0.0, 6.0);
    for (int y = 0; y < kH; ++y)
      for (int x = 0; x < kW; ++x) {
        img.channels[0](y, x) = clamp_byte(118 + noise(rng));
        img.channels[1](y, x) = clamp_byte(92 + noise(rng));
        img.channels[2](y, x) = clamp_byte(64 + noise(rng));
      }
    Mask occupied = Mask::Zero(kH, kW);
    const int leaves = uniform_int(rng, 2, 4);
    for (int k = 0; k < leaves; ++k) {
      Mask leaf;
      for (int attempt = 0; attempt < 20; ++attempt) {
        const double rx = uniform(rng, 16, 34), ry = uniform(rng, 10, 22);
        leaf = ellipse_mask(kH, kW, uniform(rng, 36, kW - 36), uniform(rng, 30, kH - 30), rx, ry,
                            uniform(rng, 0, std::numbers::pi));
        if ((leaf.array() != 0 && occupied.array() != 0).count() == 0) break;
        leaf.resize(0, 0);
      }
      if (leaf.size() == 0) continue;
      occupied = (occupied.array() != 0 || leaf.array() != 0).cast<std::uint8_t>();
      const double health = uniform(rng, 0, 1);
      const double base[3] = {60 + 40 * (1 - health), 100 + 25 * health, 30 + 20 * (1 - health)};
      for (int y = 0; y < kH; ++y)
        for (int x = 0; x < kW; ++x)
          if (leaf(y, x))
            for (int c = 0; c < 3; ++c) img.channels[std::size_t(c)](y, x) = clamp_byte(base[c] + noise(rng));
      gt_anns.push_back({{"id", ann_id++}, {"image_id", i}, {"category_id", 1}, {"segmentation", rle_segmentation(leaf)}});

      // Prediction: the leaf shifted by up to two pixels.
      Mask pred = translate(leaf, uniform_int(rng, -2, 2), uniform_int(rng, -2, 2), kH, kW);
      if (count_set(pred) > 0)
        pred_anns.push_back({{"id", pred_id++},
                             {"image_id", i},
                             {"category_id", 1},
                             {"score", double(uniform_int(rng, 50, 99)) / 100.0},
                             {"segmentation", rle_segmentation(pred)}});
    }
    if (rng() % 3 == 0) {
      const Mask spurious = ellipse_mask(kH, kW, uniform(rng, 20, kW - 20), uniform(rng, 20, kH - 20), 12, 8, 0.3);
      pred_anns.push_back({{"id", pred_id++},
                           {"image_id", i},
                           {"category_id", 1},
                           {"score", double(uniform_int(rng, 5, 40)) / 100.0},
                           {"segmentation", rle_segmentation(spurious)}});
    }
    write_image(paths.images / name, img);
    gt_images.push_back({{"id", i}, {"file_name", name}, {"width", kW}, {"height", kH}});
  }
  const nlohmann::json cats = nlohmann::json::array({{{"id", 1}, {"name", "leaf"}}});
  write_text_file(paths.annotations,
                  nlohmann::json{{"images", gt_images}, {"annotations", gt_anns}, {"categories", cats}}.dump() + "\n");
  write_text_file(paths.predictions,
                  nlohmann::json{{"images", gt_images}, {"annotations", pred_anns}, {"categories", cats}}.dump() + "\n");
  return paths;
}

kernels::FeatureMap<double> random_map(Rng& rng, Eigen::Index c, Eigen::Index h, Eigen::Index w, double scale) {
  kernels::FeatureMap<double> t(c, h, w);
  for (Eigen::Index i = 0; i < t.size(); ++i) t.data()[i] = uniform(rng, -scale, scale);
  return t;
}

kernels::ConvParams<double> random_conv(Rng& rng, Eigen::Index out, Eigen::Index in_per_group, Eigen::Index kh,
                                        Eigen::Index kw, int groups, double scale) {
  kernels::ConvParams<double> p;
  p.weight = kernels::Kernel<double>(out, in_per_group, kh, kw);
  for (Eigen::Index i = 0; i < p.weight.size(); ++i) p.weight.data()[i] = uniform(rng, -scale, scale);
  p.bias = kernels::Vector<double>(out);
  for (Eigen::Index i = 0; i < out; ++i) p.bias(i) = uniform(rng, -0.1, 0.1);
  p.groups = groups;
  return p;
}

kernels::DaspParams<double> random_dasp(Rng& rng, Eigen::Index channels) {
  const Eigen::Index q = channels / 4;
  kernels::DaspParams<double> p;
  p.horizontal = random_conv(rng, q, q, 1, 3);
  p.vertical = random_conv(rng, q, q, 3, 1);
  p.deep = random_conv(rng, q, 1, 3, 3, int(q));
  p.deform = random_conv(rng, q, q, 3, 3);
  p.offset = random_conv(rng, 18, q, 3, 3, 1, 0.8);
  p.projection = random_conv(rng, channels, channels, 1, 1);
  return p;
}

kernels::DarhParams<double> random_darh(Rng& rng, Eigen::Index channels, Eigen::Index expanded) {
  kernels::DarhParams<double> p;
  p.expand.depthwise = random_conv(rng, channels, 1, 3, 3, int(channels));
  p.expand.pointwise = random_conv(rng, expanded, channels, 1, 1);
  p.expand.norm.scale = random_vector(rng, expanded, 0.8, 1.2);
  p.expand.norm.shift = random_vector(rng, expanded, -0.1, 0.1);
  p.dasp = random_dasp(rng, expanded);
  p.delta = random_conv(rng, channels, expanded, 1, 1);
  p.norm.scale = kernels::Vector<double>::Constant(channels, 1.0);
  p.norm.shift = kernels::Vector<double>::Constant(channels, 0.05);
  return p;
}

}  // namespace leafkit::synth
