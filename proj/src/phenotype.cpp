#include "leafkit/phenotype.hpp"

#include <algorithm>
#include <cmath>

#include "leafkit/error.hpp"
#include "leafkit/numeric.hpp"

namespace leafkit {

void OptimalValueTable::validate() const {
  for (std::size_t k = 0; k < values.size(); ++k)
    if (!(values[k] >= 0.0 && values[k] <= 255.0))
      throw ValidationError("optimal value for " +
                            std::string(indicator_name(Indicator(k + kShapeIndicatorCount))) +
                            " outside [0, 255]");
}

OptimalValueTable OptimalValueTable::reference() {
  OptimalValueTable t;
  t[Indicator::r_median] = 80.02;
  t[Indicator::r_mean] = 82.50;
  t[Indicator::r_lower_tertile] = 73.71;
  t[Indicator::r_upper_tertile] = 87.15;
  t[Indicator::g_median] = 111.68;
  t[Indicator::g_mean] = 113.10;
  t[Indicator::g_lower_tertile] = 105.49;
  t[Indicator::g_upper_tertile] = 118.38;
  t[Indicator::b_median] = 41.39;
  t[Indicator::b_mean] = 44.45;
  t[Indicator::b_lower_tertile] = 34.40;
  t[Indicator::b_upper_tertile] = 49.36;
  return t;
}

void IndicatorWeights::validate(double tolerance) const {
  CompensatedSum<double> total;
  for (Eigen::Index k = 0; k < values.size(); ++k) {
    if (!std::isfinite(values(k)) || values(k) < 0.0)
      throw ValidationError("weight for " + std::string(indicator_name(Indicator(k))) +
                            " must be finite and nonnegative");
    total += values(k);
  }
  if (std::abs(total.value() - 1.0) > tolerance)
    throw ValidationError("weights sum to " + std::to_string(total.value()) + ", expected 1");
}

IndicatorWeights IndicatorWeights::uniform() {
  IndicatorWeights w;
  w.values.setConstant(1.0 / double(kIndicatorCount));
  return w;
}

IndicatorWeights IndicatorWeights::reference() {
  IndicatorWeights w;
  // width height perimeter area round rect, then medians, means, 1/3, 2/3 (R G B each)
  w.values << 0.15, 0.11, 0.13, 0.30, 0.06, 0.03,  //
      0.02, 0.03, 0.01,                             //
      0.02, 0.03, 0.01,                             //
      0.01, 0.02, 0.01,                             //
      0.02, 0.03, 0.02;
  return w;
}

double to_positive(double value, double optimal, double scale) {
  if (!(scale > 0.0)) throw ValidationError("positive-transform scale must be > 0");
  return std::max(0.0, 1.0 - std::abs(value - optimal) / scale);
}

Eigen::MatrixXd minmax_normalize(const Eigen::MatrixXd& matrix) {
  if (matrix.rows() < 2) throw DegenerateInputError("normalization needs at least 2 instances");
  Eigen::MatrixXd out(matrix.rows(), matrix.cols());
  for (Eigen::Index j = 0; j < matrix.cols(); ++j) {
    const double lo = matrix.col(j).minCoeff();
    const double hi = matrix.col(j).maxCoeff();
    if (hi == lo)
      out.col(j).setConstant(0.5);
    else
      out.col(j) = (matrix.col(j).array() - lo) / (hi - lo);
  }
  return out;
}

Eigen::VectorXd entropy_weights(const Eigen::MatrixXd& normalized) {
  const Eigen::Index n = normalized.rows();
  if (n < 2) throw DegenerateInputError("entropy weights need at least 2 instances");
  if (!(normalized.array() >= 0.0 && normalized.array() <= 1.0).all())
    throw ValidationError("entropy weights need entries in [0, 1]");

  const double inv_log_n = 1.0 / std::log(double(n));
  Eigen::VectorXd divergence(normalized.cols());
  for (Eigen::Index j = 0; j < normalized.cols(); ++j) {
    const auto col = normalized.col(j);
    if (col.maxCoeff() == col.minCoeff()) {
      divergence(j) = 0.0;  // uniform p, entropy exactly 1
      continue;
    }
    CompensatedSum<double> col_sum;
    for (Eigen::Index i = 0; i < n; ++i) col_sum += col(i);
    CompensatedSum<double> plogp;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double p = col(i) / col_sum.value();
      if (p > 0.0) plogp += p * std::log(p);
    }
    const double entropy = -inv_log_n * plogp.value();
    divergence(j) = std::max(0.0, 1.0 - entropy);
  }
  CompensatedSum<double> total;
  for (Eigen::Index j = 0; j < divergence.size(); ++j) total += divergence(j);
  if (!(total.value() > 0.0))
    throw DegenerateInputError(
        "every indicator column is constant; entropy weights are undefined, use uniform weights");
  return divergence / total.value();
}

Eigen::MatrixXd indicator_matrix(std::span<const LeafRecord> records) {
  Eigen::MatrixXd m(Eigen::Index(records.size()), Eigen::Index(kIndicatorCount));
  for (std::size_t i = 0; i < records.size(); ++i) {
    records[i].validate();
    const IndicatorVector v = records[i].values();
    for (std::size_t j = 0; j < kIndicatorCount; ++j) m(Eigen::Index(i), Eigen::Index(j)) = v[j];
  }
  return m;
}

Eigen::MatrixXd positive_indicator_matrix(std::span<const LeafRecord> records,
                                          const OptimalValueTable& table) {
  table.validate();
  Eigen::MatrixXd m = indicator_matrix(records);
  for (std::size_t j = kShapeIndicatorCount; j < kIndicatorCount; ++j) {
    const double optimal = table[Indicator(j)];
    auto col = m.col(Eigen::Index(j));
    const double scale = (col.array() - optimal).abs().maxCoeff();
    if (scale == 0.0) {
      col.setOnes();  // every value sits on the optimum
      continue;
    }
    for (Eigen::Index i = 0; i < col.size(); ++i) col(i) = to_positive(col(i), optimal, scale);
  }
  return m;
}

IndicatorWeights fit_weights(std::span<const LeafRecord> records, const OptimalValueTable& table) {
  IndicatorWeights w;
  w.values = entropy_weights(minmax_normalize(positive_indicator_matrix(records, table)));
  return w;
}

std::vector<double> lgci_raw_scores(std::span<const LeafRecord> records,
                                    const IndicatorWeights& weights,
                                    const OptimalValueTable& table) {
  const Eigen::MatrixXd normalized = minmax_normalize(positive_indicator_matrix(records, table));
  std::vector<double> raw(records.size());
  for (Eigen::Index i = 0; i < normalized.rows(); ++i) {
    CompensatedSum<double> s;
    for (Eigen::Index j = 0; j < normalized.cols(); ++j) s += weights.values(j) * normalized(i, j);
    raw[std::size_t(i)] = s.value();
  }
  return raw;
}

std::vector<LgciScore> lgci_score(std::span<const LeafRecord> records,
                                  const IndicatorWeights& weights, const OptimalValueTable& table) {
  for (Eigen::Index k = 0; k < weights.values.size(); ++k)
    if (!std::isfinite(weights.values(k)) || weights.values(k) < 0.0)
      throw ValidationError("weights must be finite and nonnegative");
  const std::vector<double> raw = lgci_raw_scores(records, weights, table);
  const auto [lo, hi] = std::minmax_element(raw.begin(), raw.end());
  std::vector<LgciScore> out;
  out.reserve(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    const double mapped = *hi == *lo ? 0.5 : (raw[i] - *lo) / (*hi - *lo);
    out.push_back({records[i].id, mapped});
  }
  return out;
}

std::vector<InstanceMask> filter_instances(std::span<const InstanceMask> instances,
                                           double min_area, double min_score) {
  if (min_area < 0.0) throw ValidationError("min_area must be >= 0");
  std::vector<InstanceMask> kept;
  for (const auto& inst : instances)
    if (double(inst.area()) >= min_area && inst.score_or_default() >= min_score)
      kept.push_back(inst);
  return kept;
}

}  // namespace leafkit
