#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "leafkit/record.hpp"

namespace leafkit {

/// Optimal intensity for each color indicator, indexed like Indicator minus the
/// six shape indicators.
struct OptimalValueTable {
  std::array<double, kColorIndicatorCount> values{};

  double operator[](Indicator i) const { return values[index_of(i) - kShapeIndicatorCount]; }
  double& operator[](Indicator i) { return values[index_of(i) - kShapeIndicatorCount]; }

  /// Entries must lie in [0, 255].
  void validate() const;

  /// Expert optimal values for poplar leaves.
  static OptimalValueTable reference();
};

struct IndicatorWeights {
  Eigen::Matrix<double, kIndicatorCount, 1> values = Eigen::Matrix<double, kIndicatorCount, 1>::Zero();

  double operator[](Indicator i) const { return values(Eigen::Index(index_of(i))); }

  /// Nonnegative, finite, summing to 1 within `tolerance`.
  void validate(double tolerance = 1e-9) const;

  static IndicatorWeights uniform();

  /// Reference LGCI weights at two decimals. They sum to 1.01, so
  /// validate them with kReferenceWeightTolerance.
  static IndicatorWeights reference();
};

/// Worst-case drift of 18 weights each rounded to two decimals.
inline constexpr double kReferenceWeightTolerance = kIndicatorCount * 0.005;

struct LgciScore {
  std::int64_t id{0};
  double score{0};
};

/// max(0, 1 - |value - optimal| / scale).
double to_positive(double value, double optimal, double scale);

/// Per-column (x - min) / (max - min); constant columns map to 0.5.
Eigen::MatrixXd minmax_normalize(const Eigen::MatrixXd& matrix);

/// Entropy weight method on a normalized (rows = instances) matrix.
Eigen::VectorXd entropy_weights(const Eigen::MatrixXd& normalized);

/// Raw indicator matrix, one row per record, columns in Indicator order.
Eigen::MatrixXd indicator_matrix(std::span<const LeafRecord> records);

/// Color columns mapped to positive indicators around the optimal table. The
/// scale per column is the largest deviation from the optimum in the batch.
Eigen::MatrixXd positive_indicator_matrix(std::span<const LeafRecord> records,
                                          const OptimalValueTable& table);

/// Transform, normalize and fit entropy weights in one go.
IndicatorWeights fit_weights(std::span<const LeafRecord> records, const OptimalValueTable& table);

/// Weighted sum of normalized positive indicators, min-max mapped over the batch.
std::vector<double> lgci_raw_scores(std::span<const LeafRecord> records,
                                    const IndicatorWeights& weights,
                                    const OptimalValueTable& table);
std::vector<LgciScore> lgci_score(std::span<const LeafRecord> records,
                                  const IndicatorWeights& weights, const OptimalValueTable& table);

/// Keeps instances with area >= min_area and score >= min_score, in order.
std::vector<InstanceMask> filter_instances(std::span<const InstanceMask> instances,
                                           double min_area, double min_score = 0.0);

}  // namespace leafkit
