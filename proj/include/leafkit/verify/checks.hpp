#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace leafkit::verify {

struct CheckResult {
  std::string name;
  bool passed{false};
  std::string detail;
  double seconds{0};
};

/// Deliberate defects for exercising the harness itself.
enum class Fault { none, dice_gradient_sign };
Fault parse_fault(const std::string& name);

struct VerifyOptions {
  std::uint64_t seed{20240917};
  int ap_scenes{1000};
  int gradient_points{100};
  int kernel_trials{100};
  int geometry_trials{1000};
  Fault fault{Fault::none};
};

struct GradientRow {
  std::string loss;
  int points{0};
  double max_relative_error{0};
};

CheckResult check_coco_map_oracle(const VerifyOptions& o);
CheckResult check_gradients(const VerifyOptions& o, std::vector<GradientRow>* table = nullptr);
/// One gradient family: "focal", "giou", "centerness", "dice".
CheckResult check_gradient(const std::string& loss, const VerifyOptions& o, GradientRow* row = nullptr);
CheckResult check_deform_collapse(const VerifyOptions& o);
CheckResult check_conv_oracle(const VerifyOptions& o);
CheckResult check_asff_one_hot(const VerifyOptions& o);
CheckResult check_asff_homogeneous(const VerifyOptions& o);
CheckResult check_bilinear_oracle(const VerifyOptions& o);
CheckResult check_dasp_zero_branches(const VerifyOptions& o);
CheckResult check_dasp_identity(const VerifyOptions& o);
CheckResult check_dasp_oracle(const VerifyOptions& o);
CheckResult check_darh_oracle(const VerifyOptions& o);
CheckResult check_shape_contracts(const VerifyOptions& o);
CheckResult check_centerness(const VerifyOptions& o);
CheckResult check_controller_split(const VerifyOptions& o);
CheckResult check_focal_nll(const VerifyOptions& o);
CheckResult check_loss_weighting(const VerifyOptions& o);
CheckResult check_polygon_oracle(const VerifyOptions& o);
CheckResult check_translation_invariance(const VerifyOptions& o);

/// Every check above in a fixed order. The gradient table is filled when given.
std::vector<CheckResult> run_all(const VerifyOptions& o, std::vector<GradientRow>* gradient_table = nullptr);

std::string render_results(const std::vector<CheckResult>& results);
std::string render_gradient_table(const std::vector<GradientRow>& rows);

}  // namespace leafkit::verify
