#include "leafkit/verify/checks.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "leafkit/evalsuite.hpp"
#include "leafkit/ingest.hpp"
#include "leafkit/losses.hpp"
#include "leafkit/maskgeom.hpp"
#include "leafkit/refkernels.hpp"
#include "leafkit/verify/oracles.hpp"
#include "leafkit/verify/synth.hpp"

namespace leafkit::verify {

namespace {

using kernels::FeatureMap;
using synth::Rng;

double uniform(Rng& rng, double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
Eigen::Index uniform_index(Rng& rng, Eigen::Index lo, Eigen::Index hi) {
  return std::uniform_int_distribution<Eigen::Index>(lo, hi)(rng);
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

// Runs `body`, which returns (passed, detail); exceptions count as failures.
template <typename Body>
CheckResult timed(const std::string& name, Body&& body) {
  const auto start = std::chrono::steady_clock::now();
  CheckResult r{name, false, "", 0};
  try {
    std::tie(r.passed, r.detail) = body();
  } catch (const std::exception& e) {
    r.passed = false;
    r.detail = std::string("exception: ") + e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

std::pair<bool, std::string> within(double err, double tol, const std::string& what = "max error") {
  return {err <= tol, what + " " + fmt("%.3g", err) + " (tolerance " + fmt("%.0e", tol) + ")"};
}

std::uint64_t stream_seed(const VerifyOptions& o, std::uint64_t salt) { return o.seed * 0x9E3779B97F4A7C15ULL + salt; }

template <typename Fn>
bool throws_validation(Fn&& fn) {
  try {
    fn();
  } catch (const ValidationError&) {
    return true;
  }
  return false;
}

}  // namespace

Fault parse_fault(const std::string& name) {
  if (name.empty() || name == "none") return Fault::none;
  if (name == "dice-gradient-sign") return Fault::dice_gradient_sign;
  throw ValidationError("unknown fault '" + name + "'");
}

CheckResult check_coco_map_oracle(const VerifyOptions& o) {
  return timed("metric.coco_map_vs_bruteforce", [&] {
    Rng rng(stream_seed(o, 1));
    const auto thresholds = coco_iou_thresholds();
    double worst = 0;
    for (int s = 0; s < o.ap_scenes; ++s) {
      const synth::Scene scene = synth::random_scene(rng, 10);
      const DetectionMetrics m = coco_map(scene.preds, scene.gts);
      for (IouKind kind : {IouKind::mask, IouKind::box}) {
        const auto ap = oracle::brute_force_ap_sweep(scene.preds, scene.gts, thresholds, kind);
        double mean = 0;
        for (double v : ap) mean += v / 10.0;
        const bool seg = kind == IouKind::mask;
        worst = std::max({worst, std::abs((seg ? m.seg_map : m.box_map) - mean),
                          std::abs((seg ? m.seg_ap50 : m.box_ap50) - ap[0]),
                          std::abs((seg ? m.seg_ap75 : m.box_ap75) - ap[5])});
        for (std::size_t t = 0; t < thresholds.size(); ++t)
          worst = std::max(worst, std::abs(average_precision(scene.preds, scene.gts, thresholds[t], kind) - ap[t]));
      }
    }
    return within(worst, 1e-9, std::to_string(o.ap_scenes) + " scenes, max |AP - oracle|");
  });
}

CheckResult check_gradient(const std::string& loss, const VerifyOptions& o, GradientRow* row) {
  return timed("gradient." + loss, [&]() -> std::pair<bool, std::string> {
    Rng rng(stream_seed(o, 2 + std::uint64_t(loss.size()) * 131 + std::uint64_t(loss.front())));
    const losses::LossConfig cfg;
    const bool flip = loss == "dice" && o.fault == Fault::dice_gradient_sign;
    double worst = 0;
    for (int k = 0; k < o.gradient_points; ++k) {
      double err = 0;
      if (loss == "focal") {
        std::vector<double> p(6);
        for (auto& v : p) v = uniform(rng, 0.1, 0.9);
        err = losses::grad_check([&](std::span<const double> x) { return losses::focal_loss(x, cfg).value; },
                                 [&](std::span<const double> x) { return losses::focal_loss_gradient(x, cfg); }, p);
      } else if (loss == "giou") {
        const Box<double> target{uniform(rng, 0, 10), uniform(rng, 0, 10), 0, 0};
        const Box<double> t{target.x_min, target.y_min, target.x_min + uniform(rng, 1, 8),
                            target.y_min + uniform(rng, 1, 8)};
        const double x0 = uniform(rng, 0, 12), y0 = uniform(rng, 0, 12);
        const std::vector<double> p{x0, y0, x0 + uniform(rng, 1, 8), y0 + uniform(rng, 1, 8)};
        auto as_box = [](std::span<const double> x) { return Box<double>{x[0], x[1], x[2], x[3]}; };
        err = losses::grad_check(
            [&](std::span<const double> x) { return losses::giou_loss(as_box(x), t); },
            [&](std::span<const double> x) {
              const auto g = losses::giou_loss_gradient(as_box(x), t);
              return std::vector<double>(g.begin(), g.end());
            },
            p);
      } else if (loss == "centerness") {
        std::vector<double> c(6), q(6);
        for (auto& v : c) v = uniform(rng, 0, 1);
        for (auto& v : q) v = uniform(rng, 0.05, 0.95);
        err = losses::grad_check(
            [&](std::span<const double> x) { return losses::centerness_loss<double>(c, x, cfg).value; },
            [&](std::span<const double> x) { return losses::centerness_loss_gradient<double>(c, x, cfg); }, q);
      } else if (loss == "dice") {
        std::vector<double> m(16), q(16);
        const bool binary = k % 2 == 0;
        for (auto& v : m) v = binary ? double(rng() % 2) : uniform(rng, 0, 1);
        for (auto& v : q) v = uniform(rng, 0.05, 0.95);
        err = losses::grad_check([&](std::span<const double> x) { return losses::dice_loss<double>(m, x, cfg); },
                                 [&](std::span<const double> x) {
                                   auto g = losses::dice_loss_gradient<double>(m, x, cfg);
                                   if (flip)
                                     for (auto& v : g) v = -v;
                                   return g;
                                 },
                                 q);
      } else {
        throw ValidationError("unknown loss '" + loss + "'");
      }
      worst = std::max(worst, err);
    }
    if (row) *row = {loss, o.gradient_points, worst};
    return within(worst, 1e-4, std::to_string(o.gradient_points) + " points, max relative error");
  });
}

CheckResult check_gradients(const VerifyOptions& o, std::vector<GradientRow>* table) {
  return timed("gradient.all", [&]() -> std::pair<bool, std::string> {
    bool ok = true;
    std::string failed;
    for (const char* name : {"focal", "giou", "centerness", "dice"}) {
      GradientRow row;
      const CheckResult r = check_gradient(name, o, &row);
      if (table) table->push_back(row);
      if (!r.passed) {
        ok = false;
        failed += std::string(failed.empty() ? "" : ", ") + name;
      }
    }
    return {ok, ok ? "all four losses within 1e-4" : "failed: " + failed};
  });
}

CheckResult check_deform_collapse(const VerifyOptions& o) {
  return timed("kernel.deform_zero_offset", [&] {
    Rng rng(stream_seed(o, 3));
    double worst = 0;
    for (int t = 0; t < o.kernel_trials; ++t) {
      const Eigen::Index groups = uniform_index(rng, 1, 2), per = uniform_index(rng, 1, 3);
      const Eigen::Index k = 2 * uniform_index(rng, 0, 2) + 1;
      const FeatureMap<double> x =
          synth::random_map(rng, groups * per, uniform_index(rng, 3, 9), uniform_index(rng, 3, 9));
      const auto p = synth::random_conv(rng, groups * uniform_index(rng, 1, 3), per, k, k, int(groups));
      const FeatureMap<double> offsets = kernels::zeros<double>(2 * k * k, x.dimension(1), x.dimension(2));
      worst = std::max(worst, kernels::max_abs_difference(kernels::deform_conv2d(x, p, offsets), kernels::conv2d(x, p)));
    }
    return within(worst, 1e-9, std::to_string(o.kernel_trials) + " trials, max |deform - conv|");
  });
}

CheckResult check_conv_oracle(const VerifyOptions& o) {
  return timed("kernel.conv_vs_direct", [&] {
    Rng rng(stream_seed(o, 4));
    double worst = 0;
    for (int t = 0; t < o.kernel_trials; ++t) {
      const Eigen::Index groups = uniform_index(rng, 1, 3), per = uniform_index(rng, 1, 2);
      const Eigen::Index kh = uniform_index(rng, 1, 4), kw = uniform_index(rng, 1, 4);
      const FeatureMap<double> x =
          synth::random_map(rng, groups * per, uniform_index(rng, 2, 9), uniform_index(rng, 2, 9));
      auto p = synth::random_conv(rng, groups * uniform_index(rng, 1, 2), per, kh, kw, int(groups));
      p.stride = int(uniform_index(rng, 1, 2));
      worst = std::max(worst, kernels::max_abs_difference(kernels::conv2d(x, p),
                                                          oracle::direct_conv(x, p.weight, p.bias, p.stride, p.groups)));
      const FeatureMap<double> offsets = synth::random_map(rng, 2 * kh * kw, x.dimension(1), x.dimension(2), 1.5);
      p.stride = 1;
      worst = std::max(worst, kernels::max_abs_difference(kernels::deform_conv2d(x, p, offsets),
                                                          oracle::direct_deform_conv(x, p.weight, p.bias, offsets)));
    }
    return within(worst, 1e-9, "standard and deformable vs direct, max error");
  });
}

CheckResult check_asff_one_hot(const VerifyOptions& o) {
  return timed("kernel.asff_one_hot", [&] {
    Rng rng(stream_seed(o, 5));
    double worst = 0;
    for (int t = 0; t < o.kernel_trials; ++t) {
      const Eigen::Index c = uniform_index(rng, 1, 4), base = uniform_index(rng, 1, 4);
      const std::vector<FeatureMap<double>> levels{synth::random_map(rng, c, base * 4, base * 4),
                                                   synth::random_map(rng, c, base * 2, base * 2),
                                                   synth::random_map(rng, c, base, base)};
      const kernels::Extent target{base * 2, base * 2};
      for (Eigen::Index hot = 0; hot < 3; ++hot) {
        kernels::Vector<double> w = kernels::Vector<double>::Zero(3);
        w(hot) = 1;
        const auto fused = kernels::asff_fuse<double>(levels, kernels::AsffWeights<double>::from_nonnegative(w), target);
        worst = std::max(worst, kernels::max_abs_difference(fused, kernels::align_level(levels[std::size_t(hot)], target)));
      }
    }
    return within(worst, 0.0, "one-hot weights, max |fused - aligned source|");
  });
}

CheckResult check_asff_homogeneous(const VerifyOptions& o) {
  return timed("kernel.asff_homogeneous", [&] {
    Rng rng(stream_seed(o, 6));
    double worst = 0;
    for (int t = 0; t < o.kernel_trials; ++t) {
      const Eigen::Index c = uniform_index(rng, 1, 3), base = uniform_index(rng, 1, 4);
      std::vector<FeatureMap<double>> levels{synth::random_map(rng, c, base * 2, base * 2),
                                             synth::random_map(rng, c, base, base)};
      kernels::Vector<double> logits(2);
      logits << uniform(rng, -2, 2), uniform(rng, -2, 2);
      const auto w = kernels::AsffWeights<double>::from_logits(logits);
      const double k = uniform(rng, 0.1, 5);
      const kernels::Extent target{base * 2, base * 2};
      const FeatureMap<double> ref = kernels::asff_fuse<double>(levels, w, target) * k;
      for (auto& l : levels) l = (l * k).eval();
      const FeatureMap<double> scaled = kernels::asff_fuse<double>(levels, w, target);
      const Eigen::Tensor<double, 0, Eigen::RowMajor> mag = ref.abs().maximum();
      worst = std::max(worst, kernels::max_abs_difference(scaled, ref) / std::max(1.0, mag()));
    }
    return within(worst, 1e-12, "asff(k x) vs k asff(x), max relative error");
  });
}

CheckResult check_bilinear_oracle(const VerifyOptions& o) {
  return timed("kernel.bilinear_vs_matrix", [&] {
    Rng rng(stream_seed(o, 7));
    double worst = 0;
    for (int t = 0; t < o.kernel_trials; ++t) {
      const FeatureMap<double> x =
          synth::random_map(rng, uniform_index(rng, 1, 3), uniform_index(rng, 1, 6), uniform_index(rng, 1, 6));
      const int f = 1 << uniform_index(rng, 1, 2);
      worst = std::max(worst, kernels::max_abs_difference(kernels::upsample_bilinear(x, f),
                                                          oracle::matrix_bilinear_upsample(x, f)));
      const FeatureMap<double> low = synth::random_map(rng, x.dimension(0), x.dimension(1), x.dimension(2));
      const FeatureMap<double> high = synth::random_map(rng, x.dimension(0), 2 * x.dimension(1), 2 * x.dimension(2));
      const FeatureMap<double> expect = oracle::matrix_bilinear_upsample(low, 2) + high;
      worst = std::max(worst, kernels::max_abs_difference(kernels::tafu_fuse(low, high), expect));
    }
    return within(worst, 1e-12, "upsample and top-down addition vs interpolation matrices");
  });
}

CheckResult check_dasp_zero_branches(const VerifyOptions& o) {
  return timed("kernel.dasp_zero_branches", [&] {
    Rng rng(stream_seed(o, 8));
    double worst = 0;
    for (int t = 0; t < o.kernel_trials; ++t) {
      const Eigen::Index c = 4 * uniform_index(rng, 1, 3);
      const FeatureMap<double> x = synth::random_map(rng, c, uniform_index(rng, 2, 8), uniform_index(rng, 2, 8));
      kernels::DaspParams<double> p = synth::random_dasp(rng, c);
      for (auto* b : {&p.horizontal, &p.vertical, &p.deep, &p.deform}) {
        b->weight.setZero();
        b->bias.setZero();
      }
      p.projection.bias.setZero();
      const FeatureMap<double> expect = x * 0.3;
      worst = std::max(worst, kernels::max_abs_difference(kernels::dasp_forward(x, p), expect));
    }
    return within(worst, 0.0, "zero branches, max |dasp - 0.3 x|");
  });
}

CheckResult check_dasp_identity(const VerifyOptions& o) {
  return timed("kernel.dasp_identity", [&] {
    Rng rng(stream_seed(o, 9));
    double worst = 0;
    for (int t = 0; t < o.kernel_trials; ++t) {
      const Eigen::Index c = 4 * uniform_index(rng, 1, 3), q = c / 4;
      const FeatureMap<double> x = synth::random_map(rng, c, uniform_index(rng, 2, 8), uniform_index(rng, 2, 8));
      kernels::DaspParams<double> p;
      p.horizontal = kernels::identity_conv<double>(q, 1, 3);
      p.vertical = kernels::identity_conv<double>(q, 3, 1);
      p.deep = kernels::identity_conv<double>(q, 3, 3, true);
      p.deform = kernels::identity_conv<double>(q, 3, 3);
      p.offset = kernels::zero_conv<double>(18, q, 3, 3);
      p.projection = kernels::identity_conv<double>(c, 1, 1);
      const FeatureMap<double> expect = x * 1.3;
      worst = std::max(worst, kernels::max_abs_difference(kernels::dasp_forward(x, p), expect));
    }
    return within(worst, 1e-15, "identity branches, max |dasp - 1.3 x|");
  });
}

CheckResult check_dasp_oracle(const VerifyOptions& o) {
  return timed("kernel.dasp_vs_stepwise", [&] {
    Rng rng(stream_seed(o, 10));
    double worst = 0;
    for (int t = 0; t < o.kernel_trials; ++t) {
      const Eigen::Index c = 4 * uniform_index(rng, 1, 2);
      const FeatureMap<double> x = synth::random_map(rng, c, uniform_index(rng, 2, 7), uniform_index(rng, 2, 7));
      const auto p = synth::random_dasp(rng, c);
      const double alpha = uniform(rng, 0, 1);
      worst = std::max(worst, kernels::max_abs_difference(kernels::dasp_forward(x, p, alpha),
                                                          oracle::dasp_oracle(x, p, alpha)));
    }
    return within(worst, 1e-9, "max |dasp - stepwise oracle|");
  });
}

CheckResult check_darh_oracle(const VerifyOptions& o) {
  return timed("kernel.darh_vs_stepwise", [&] {
    Rng rng(stream_seed(o, 11));
    double worst = 0;
    for (int t = 0; t < o.kernel_trials; ++t) {
      const Eigen::Index c = uniform_index(rng, 1, 3), up = 4 * uniform_index(rng, 1, 2);
      const FeatureMap<double> x = synth::random_map(rng, c, uniform_index(rng, 2, 6), uniform_index(rng, 2, 6));
      const auto p = synth::random_darh(rng, c, up);
      const kernels::ResidualGains<double> g{uniform(rng, -1, 1), uniform(rng, -1, 1)};
      worst = std::max(worst, kernels::max_abs_difference(kernels::darh_forward(x, p, g), oracle::darh_oracle(x, p, g)));
    }
    return within(worst, 1e-9, "max |darh - stepwise oracle|");
  });
}

CheckResult check_shape_contracts(const VerifyOptions& o) {
  return timed("kernel.shape_contracts", [&]() -> std::pair<bool, std::string> {
    Rng rng(stream_seed(o, 12));
    // P3..P7 of a 256 x 384 input.
    std::vector<kernels::Extent> levels;
    for (int s = 8; s <= 128; s *= 2) levels.push_back({256 / s, 384 / s});
    std::vector<std::string> failures;
    auto expect = [&](bool ok, const std::string& what) {
      if (!ok) failures.push_back(what);
    };
    const Eigen::Index c = 4;
    std::vector<FeatureMap<double>> maps;
    for (const auto& e : levels) maps.push_back(synth::random_map(rng, c, e.rows, e.cols));
    for (std::size_t i = 0; i < levels.size(); ++i) {
      const auto& x = maps[i];
      const std::string tag = "P" + std::to_string(i + 3);
      for (int stride : {1, 2}) {
        auto p = synth::random_conv(rng, 6, c, 3, 3);
        p.stride = stride;
        const auto y = kernels::conv2d(x, p);
        expect(y.dimension(0) == 6 && y.dimension(1) == (x.dimension(1) - 1) / stride + 1 &&
                   y.dimension(2) == (x.dimension(2) - 1) / stride + 1,
               tag + " conv stride " + std::to_string(stride));
      }
      const auto darh = synth::random_darh(rng, c, 8);
      expect(kernels::darh_forward(x, darh, {1.0, 1.0}).dimensions() == x.dimensions(), tag + " darh");
      expect(kernels::dasp_forward(kernels::dwconv_block(x, darh.expand), darh.dasp).dimension(0) == 8, tag + " dasp");
      for (std::size_t j = 0; j < levels.size(); ++j)
        expect(kernels::extent(kernels::align_level(x, levels[j])) == levels[j],
               tag + " align to P" + std::to_string(j + 3));
    }
    // Top-down concatenation chain P5 -> P4 -> P3: channels 4 -> 2+4 -> 3+4.
    std::vector<FeatureMap<double>> chain{maps[2], maps[1], maps[0]};
    std::vector<kernels::TcfuParams<double>> params;
    Eigen::Index running = c;
    for (int stage = 0; stage < 2; ++stage) {
      kernels::TcfuParams<double> tp;
      tp.reduce = synth::random_conv(rng, running / 2, running, 1, 1);
      tp.upsample.weight = kernels::Kernel<double>(running / 2, running / 2, 2, 2);
      tp.upsample.weight.setConstant(0.25);
      params.push_back(tp);
      running = running / 2 + c;
    }
    const auto stage1 = kernels::tcfu_fuse(chain[0], chain[1], params[0]);
    expect(stage1.dimension(0) == 6 && kernels::extent(stage1) == levels[1], "tcfu P5->P4");
    const auto out = kernels::tcfu_pyramid<double>(chain, params);
    expect(out.dimension(0) == 7 && kernels::extent(out) == levels[0], "tcfu P5->P4->P3");
    std::string detail = std::to_string(levels.size()) + " pyramid levels";
    for (const auto& f : failures) detail += "; bad: " + f;
    return {failures.empty(), detail};
  });
}

CheckResult check_centerness(const VerifyOptions& o) {
  return timed("kernel.centerness", [&]() -> std::pair<bool, std::string> {
    Rng rng(stream_seed(o, 13));
    const bool exact = kernels::centerness_target(3.0, 3.0, 5.0, 5.0) == 1.0 &&
                       kernels::centerness_target(0.0, 4.0, 2.0, 2.0) == 0.0;
    const double fixture = std::abs(kernels::centerness_target(1.0, 3.0, 2.0, 2.0) - std::sqrt(1.0 / 3.0));
    double scale_err = 0;
    for (int t = 0; t < o.kernel_trials; ++t) {
      const double l = uniform(rng, 0, 10), r = uniform(rng, 0.1, 10), tt = uniform(rng, 0, 10), b = uniform(rng, 0.1, 10);
      const double k = uniform(rng, 0.01, 100);
      scale_err = std::max(scale_err, std::abs(kernels::centerness_target(l, r, tt, b) -
                                               kernels::centerness_target(k * l, k * r, k * tt, k * b)));
    }
    const bool degenerate = throws_validation([] { kernels::centerness_target(0.0, 0.0, 1.0, 1.0); });
    const bool ok = exact && fixture <= 1e-12 && scale_err <= 1e-12 && degenerate;
    return {ok, "centre/edge exact " + std::string(exact ? "yes" : "no") + ", fixture error " + fmt("%.2g", fixture) +
                    ", scale error " + fmt("%.2g", scale_err)};
  });
}

CheckResult check_controller_split(const VerifyOptions&) {
  return timed("kernel.controller_split", [&]() -> std::pair<bool, std::string> {
    using P = kernels::DynamicMaskParams<double>;
    std::vector<double> theta(169);
    for (std::size_t i = 0; i < theta.size(); ++i) theta[i] = double(i + 1);
    const P p = kernels::controller_split<double>(theta);
    const bool sizes = P::kLayerSizes[0] == 88 && P::kLayerSizes[1] == 72 && P::kLayerSizes[2] == 9 &&
                       P::kLayerSizes[0] + P::kLayerSizes[1] + P::kLayerSizes[2] == 169;
    const bool order = p.w1(0, 0) == 1 && p.w1(7, 9) == 80 && p.b1(0) == 81 && p.b1(7) == 88 && p.w2(0, 0) == 89 &&
                       p.w2(7, 7) == 152 && p.b2(0) == 153 && p.b2(7) == 160 && p.w3(0) == 161 && p.w3(7) == 168 &&
                       p.b3 == 169;
    const bool short_rejected = throws_validation([] {
      const std::vector<double> bad(168);
      kernels::controller_split<double>(bad);
    });
    return {sizes && order && short_rejected, "layers (88, 72, 9), order-preserving, length 168 rejected"};
  });
}

CheckResult check_focal_nll(const VerifyOptions& o) {
  return timed("loss.focal_reduces_to_nll", [&] {
    Rng rng(stream_seed(o, 14));
    losses::LossConfig cfg;
    cfg.focal_alpha = 1.0;
    cfg.focal_gamma = 0.0;
    double worst = 0;
    for (int t = 0; t < o.gradient_points; ++t) {
      std::vector<double> p(8);
      double nll = 0;
      for (auto& v : p) {
        v = uniform(rng, 0.01, 1.0);
        nll -= std::log(v) / double(p.size());
      }
      worst = std::max(worst, std::abs(losses::focal_loss<double>(p, cfg).value - nll));
    }
    return within(worst, 1e-12, "gamma 0, alpha 1 vs mean NLL");
  });
}

CheckResult check_loss_weighting(const VerifyOptions&) {
  return timed("loss.total_weighting", [&]() -> std::pair<bool, std::string> {
    const double total = losses::total_loss({1.0, 1.0, 1.0, 1.0});
    return {total == 5.0, "unit components total " + fmt("%.17g", total)};
  });
}

CheckResult check_polygon_oracle(const VerifyOptions& o) {
  return timed("ingest.polygon_vs_pnpoly", [&]() -> std::pair<bool, std::string> {
    Rng rng(stream_seed(o, 15));
    int mismatches = 0;
    const int trials = o.kernel_trials * 2;
    for (int t = 0; t < trials; ++t) {
      const int h = int(uniform_index(rng, 4, 24)), w = int(uniform_index(rng, 4, 24));
      const bool integral = t % 2 == 0;
      std::vector<Point2> poly(std::size_t(uniform_index(rng, 3, 8)));
      for (auto& pt : poly) {
        pt = {uniform(rng, -1, w + 1), uniform(rng, -1, h + 1)};
        if (integral) pt = {std::round(pt.x), std::round(pt.y)};
      }
      if (rasterize_polygon(poly, h, w) != oracle::pnpoly_rasterize(poly, h, w)) ++mismatches;
    }
    return {mismatches == 0, std::to_string(mismatches) + " mismatching polygons of " + std::to_string(trials)};
  });
}

CheckResult check_translation_invariance(const VerifyOptions& o) {
  return timed("geometry.translation_invariance", [&]() -> std::pair<bool, std::string> {
    Rng rng(stream_seed(o, 16));
    int failures = 0;
    for (int t = 0; t < o.geometry_trials; ++t) {
      const Mask base = synth::translate(synth::random_mask(rng, 24, 24), 0, 0, 56, 56);
      const int dx = int(uniform_index(rng, 0, 32)), dy = int(uniform_index(rng, 0, 32));
      const ShapeIndicators a = shape_indicators(base);
      const ShapeIndicators b = shape_indicators(synth::translate(base, dx, dy, 56, 56));
      if (a.width != b.width || a.height != b.height || a.area != b.area || a.perimeter != b.perimeter ||
          a.roundness != b.roundness || a.rectangularity != b.rectangularity)
        ++failures;
    }
    return {failures == 0, std::to_string(failures) + " of " + std::to_string(o.geometry_trials) + " masks changed"};
  });
}

std::vector<CheckResult> run_all(const VerifyOptions& o, std::vector<GradientRow>* gradient_table) {
  std::vector<CheckResult> out;
  out.push_back(check_coco_map_oracle(o));
  for (const char* name : {"focal", "giou", "centerness", "dice"}) {
    GradientRow row;
    out.push_back(check_gradient(name, o, &row));
    if (gradient_table) gradient_table->push_back(row);
  }
  out.push_back(check_focal_nll(o));
  out.push_back(check_loss_weighting(o));
  out.push_back(check_deform_collapse(o));
  out.push_back(check_conv_oracle(o));
  out.push_back(check_asff_one_hot(o));
  out.push_back(check_asff_homogeneous(o));
  out.push_back(check_bilinear_oracle(o));
  out.push_back(check_dasp_zero_branches(o));
  out.push_back(check_dasp_identity(o));
  out.push_back(check_dasp_oracle(o));
  out.push_back(check_darh_oracle(o));
  out.push_back(check_shape_contracts(o));
  out.push_back(check_centerness(o));
  out.push_back(check_controller_split(o));
  out.push_back(check_polygon_oracle(o));
  out.push_back(check_translation_invariance(o));
  return out;
}

std::string render_results(const std::vector<CheckResult>& results) {
  std::ostringstream os;
  std::size_t width = 0;
  for (const auto& r : results) width = std::max(width, r.name.size());
  int failed = 0;
  for (const auto& r : results) {
    failed += !r.passed;
    os << (r.passed ? "PASS  " : "FAIL  ") << r.name << std::string(width - r.name.size() + 2, ' ') << r.detail
       << "  [" << fmt("%.2f", r.seconds) << " s]\n";
  }
  os << results.size() - std::size_t(failed) << "/" << results.size() << " checks passed\n";
  return os.str();
}

std::string render_gradient_table(const std::vector<GradientRow>& rows) {
  std::ostringstream os;
  os << "loss        points  max relative error\n";
  for (const auto& r : rows) {
    char line[96];
    std::snprintf(line, sizeof line, "%-10s  %6d  %.3e\n", r.loss.c_str(), r.points, r.max_relative_error);
    os << line;
  }
  return os.str();
}

}  // namespace leafkit::verify
