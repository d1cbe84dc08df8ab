#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "leafkit/error.hpp"
#include "leafkit/phenotype.hpp"

using namespace leafkit;

namespace {

std::vector<LeafRecord> random_records(std::mt19937_64& rng, int n) {
  std::uniform_real_distribution<double> shape(50, 400), color(10, 200), unit(0.3, 0.95);
  std::vector<LeafRecord> out;
  for (int i = 0; i < n; ++i) {
    IndicatorVector v;
    for (std::size_t k = 0; k < kIndicatorCount; ++k) v[k] = k < 4 ? shape(rng) : k < 6 ? unit(rng) : color(rng);
    out.push_back(LeafRecord::from_values(i + 1, v));
  }
  return out;
}

}  // namespace

TEST(Entropy, ConstantColumnGetsZeroWeight) {
  Eigen::MatrixXd m(3, 2);
  m << 0, 1, 0.5, 1, 1, 1;
  const Eigen::VectorXd w = entropy_weights(m);
  EXPECT_DOUBLE_EQ(w(0), 1.0);
  EXPECT_EQ(w(1), 0.0);
}

TEST(Entropy, HandComputedThreeByTwo) {
  // Column sums 1.5 and 1.75; p = (0, 1/3, 2/3) and (4/7, 2/7, 1/7).
  Eigen::MatrixXd m(3, 2);
  m << 0, 1, 0.5, 0.5, 1, 0.25;
  const Eigen::VectorXd w = entropy_weights(m);
  EXPECT_NEAR(w(0), 0.763785267659798243685946677346, 1e-12);
  EXPECT_NEAR(w(1), 0.236214732340201756314053322654, 1e-12);
}

TEST(Entropy, WeightsFormADistribution) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(0, 1);
  for (int trial = 0; trial < 100; ++trial) {
    Eigen::MatrixXd m(2 + trial % 9, 1 + trial % 18);
    for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = u(rng);
    const Eigen::VectorXd w = entropy_weights(minmax_normalize(m));
    EXPECT_TRUE((w.array() >= 0).all());
    EXPECT_NEAR(w.sum(), 1.0, 1e-9);
  }
}

TEST(Entropy, DegenerateBatches) {
  EXPECT_THROW(entropy_weights(Eigen::MatrixXd::Constant(1, 3, 0.5)), DegenerateInputError);
  EXPECT_THROW(entropy_weights(Eigen::MatrixXd::Constant(4, 3, 0.5)), DegenerateInputError);
  EXPECT_THROW(entropy_weights(Eigen::MatrixXd::Constant(4, 3, 2.0)), ValidationError);
}

TEST(Transform, PositiveIndicator) {
  EXPECT_NEAR(to_positive(43, 80.02, 80.02), 1 - 37.02 / 80.02, 1e-15);
  EXPECT_NEAR(to_positive(43, 80.02, 80.02), 0.537, 5e-4);
  EXPECT_EQ(to_positive(80.02, 80.02, 10), 1.0);
  EXPECT_EQ(to_positive(0, 80, 10), 0.0);
  EXPECT_THROW(to_positive(1, 1, 0), ValidationError);
}

TEST(Transform, MinMax) {
  Eigen::MatrixXd m(3, 2);
  m << 1, 4, 2, 4, 10, 4;
  const Eigen::MatrixXd n = minmax_normalize(m);
  EXPECT_DOUBLE_EQ(n(0, 0), 0);
  EXPECT_DOUBLE_EQ(n(1, 0), 1.0 / 9.0);
  EXPECT_DOUBLE_EQ(n(2, 0), 1);
  EXPECT_EQ(n(1, 1), 0.5);
}

TEST(Tables, ReferenceValuesValidate) {
  const OptimalValueTable t = OptimalValueTable::reference();
  EXPECT_NO_THROW(t.validate());
  EXPECT_DOUBLE_EQ(t[Indicator::r_median], 80.02);
  EXPECT_DOUBLE_EQ(t[Indicator::b_upper_tertile], 49.36);
  const IndicatorWeights w = IndicatorWeights::reference();
  EXPECT_NEAR(w.values.sum(), 1.01, 1e-12);
  EXPECT_THROW(w.validate(), ValidationError);
  EXPECT_NO_THROW(w.validate(kReferenceWeightTolerance));
  EXPECT_DOUBLE_EQ(w[Indicator::area], 0.30);
}

TEST(Tables, OptimalValuesOutsideByteRangeAreRejected) {
  OptimalValueTable t = OptimalValueTable::reference();
  t[Indicator::g_mean] = 256;
  EXPECT_THROW(t.validate(), ValidationError);
}

TEST(Lgci, DominatingLeafScoresOneAndDominatedZero) {
  const OptimalValueTable t = OptimalValueTable::reference();
  IndicatorVector good, bad;
  for (std::size_t k = 0; k < kIndicatorCount; ++k) {
    const Indicator ind = Indicator(k);
    good[k] = is_color(ind) ? t[ind] : 300.0;
    bad[k] = is_color(ind) ? t[ind] + 60 : 100.0;
  }
  good[index_of(Indicator::roundness)] = good[index_of(Indicator::rectangularity)] = 0.9;
  bad[index_of(Indicator::roundness)] = bad[index_of(Indicator::rectangularity)] = 0.4;
  const std::vector<LeafRecord> r{LeafRecord::from_values(1, bad), LeafRecord::from_values(2, good)};
  const auto s = lgci_score(r, IndicatorWeights::uniform(), t);
  EXPECT_EQ(s[0].score, 0.0);
  EXPECT_EQ(s[1].score, 1.0);
  EXPECT_EQ(s[1].id, 2);
}

TEST(Lgci, ScoresLieInUnitIntervalAndRefitWeightsSumToOne) {
  std::mt19937_64 rng(9);
  const auto records = random_records(rng, 25);
  const auto t = OptimalValueTable::reference();
  const IndicatorWeights w = fit_weights(records, t);
  EXPECT_NO_THROW(w.validate());
  const auto s = lgci_score(records, w, t);
  double lo = 1, hi = 0;
  for (const auto& x : s) {
    lo = std::min(lo, x.score);
    hi = std::max(hi, x.score);
  }
  EXPECT_EQ(lo, 0.0);
  EXPECT_EQ(hi, 1.0);
}

TEST(Lgci, ScoresDoNotDependOnRecordOrder) {
  std::mt19937_64 rng(10);
  auto records = random_records(rng, 12);
  const auto t = OptimalValueTable::reference();
  const auto w = IndicatorWeights::reference();
  const auto a = lgci_score(records, w, t);
  std::reverse(records.begin(), records.end());
  const auto b = lgci_score(records, w, t);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_DOUBLE_EQ(a[i].score, b[a.size() - 1 - i].score);
}

TEST(Filter, KeepsLargeConfidentInstancesInOrder) {
  std::vector<InstanceMask> v;
  v.push_back(make_instance(1, 1, Mask::Ones(10, 10), 0.9));
  v.push_back(make_instance(2, 1, Mask::Ones(3, 3), 0.9));
  v.push_back(make_instance(3, 1, Mask::Ones(10, 12), 0.2));
  const auto kept = filter_instances(v, 50, 0.5);
  ASSERT_EQ(kept.size(), 1u);
  EXPECT_EQ(kept[0].id, 1);
  EXPECT_EQ(filter_instances(v, 50).size(), 2u);
  EXPECT_THROW(filter_instances(v, -1), ValidationError);
}
