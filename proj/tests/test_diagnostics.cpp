#include "fixnet/diagnostics.hpp"
#include "fixnet/error.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

#include <cmath>

namespace fixnet {
namespace {

using testing::pt;

TEST(RunningMin, Examples) {
  const std::vector<double> mono{5, 4, 2, 1};
  EXPECT_EQ(running_min(mono), mono);
  const std::vector<double> r{3, 1, 2, 0.5};
  EXPECT_EQ(running_min(r), (std::vector<double>{3, 1, 1, 0.5}));
}

TEST(RunningMin, FromTrace) {
  RunTrace t;
  t.agents = 1;
  for (double v : {3.0, 1.0, 2.0, 0.5}) {
    TraceRecord rec;
    rec.k = t.records.size();
    rec.residual = {v};
    t.records.push_back(rec);
  }
  EXPECT_EQ(running_min_residual(t, 0), (std::vector<double>{3, 1, 1, 0.5}));
  EXPECT_THROW(running_min_residual(t, 1), ShapeError);
}

TEST(FitRate, SyntheticPowerLaws) {
  std::vector<double> a(2000), b(2000);
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double kk = k == 0 ? 1.0 : double(k);
    a[k] = std::pow(kk, -0.5);
    b[k] = 5.0 * std::pow(kk, -1.2);
  }
  const auto ca = fit_rate(a);
  EXPECT_NEAR(ca.exponent, 0.5, 1e-6);
  const auto cb = fit_rate(b, 0.5, 1.2, 0.1);
  EXPECT_NEAR(cb.exponent, 1.2, 1e-6);
  EXPECT_NEAR(std::log(cb.constant), std::log(5.0), 1e-6);
  EXPECT_TRUE(cb.passed);
  EXPECT_GE(cb.k_first, 1000u);
  EXPECT_FALSE(fit_rate(a, 0.5, 1.0, 0.1).passed);
}

TEST(FitRate, SkipsFloorAndRejectsShortSeries) {
  std::vector<double> s(100, 0.0);
  for (std::size_t k = 1; k < 60; ++k) s[k] = 1.0 / double(k);
  EXPECT_THROW(fit_rate(s), InsufficientDataError);
  EXPECT_THROW(fit_rate(std::vector<double>{1.0}), InsufficientDataError);
  EXPECT_THROW(fit_rate(s, 0.0), std::invalid_argument);
}

TEST(SubsequenceRate, BoundedForInverseSqrt) {
  std::vector<double> s(20000);
  for (std::size_t k = 0; k < s.size(); ++k) s[k] = 1.0 / std::sqrt(double(k + 1));
  EXPECT_TRUE(subsequence_rate(s).bounded);
  std::vector<double> slow(20000);
  for (std::size_t k = 0; k < slow.size(); ++k) slow[k] = 1.0 / std::log(double(k + 3));
  EXPECT_FALSE(subsequence_rate(slow).bounded);
}

TEST(Condition17, WorkedExample) {
  const auto r = check_condition17(1, 1, 1, 0.5, 1, 0.5, 0.5, 1);
  EXPECT_NEAR(r.gamma2, 54.0, 1e-12);
  EXPECT_NEAR(r.bound, 0.5 * std::sqrt(1.0 / 108.0), 1e-12);
  EXPECT_NEAR(r.bound, 0.0481, 1e-4);
  EXPECT_FALSE(r.satisfied);
  EXPECT_LT(r.margin, 0.0);
  const auto ok = check_condition17(1, 1, 1, 0.5, 1, 0.04, 0.04, 1);
  EXPECT_TRUE(ok.satisfied);
}

TEST(Condition17, InstantMixingLimit) {
  const auto r = check_condition17(1, 1, 1, 0.0, 1, 0.3, 0.3, 2);
  EXPECT_EQ(r.gamma2, 0.0);
  EXPECT_DOUBLE_EQ(r.bound, 0.7);
}

TEST(Condition07, WorkedExample) {
  const auto r = check_condition07(1, 1, 0.5, 1, 0.05, 0.05, 1, 1);
  EXPECT_NEAR(r.bound, 0.25 / std::sqrt(18.0), 1e-12);
  EXPECT_NEAR(r.bound, 0.0589, 1e-4);
  EXPECT_TRUE(r.satisfied);
}

TEST(Condition07, LargeNuLeavesNoStep) {
  const auto r = check_condition07(1e12, 1, 0.5, 1, 0.05, 0.05, 1, 1);
  EXPECT_LT(r.bound, 1e-12);
  EXPECT_FALSE(r.satisfied);
}

TEST(Consensus, Examples) {
  EXPECT_EQ(consensus_error({pt({1, 2}), pt({1, 2})}, Eigen::Vector2d(0.3, 0.7)),
            (std::vector<double>{0, 0}));
  const auto a = consensus_error({pt({0}), pt({2})}, Eigen::Vector2d(0.5, 0.5));
  EXPECT_DOUBLE_EQ(a[0], 1.0);
  EXPECT_DOUBLE_EQ(a[1], 1.0);
  const auto b = consensus_error({pt({0}), pt({3})}, Eigen::Vector2d(2.0 / 3, 1.0 / 3));
  EXPECT_NEAR(b[0], 1.0, 1e-15);
  EXPECT_NEAR(b[1], 2.0, 1e-15);
}

TEST(WeightedSqDistance, MatchesHandValue) {
  const auto h = ops::halfspace(Eigen::VectorXd::Constant(1, 1.0), 0.0);
  OperatorSet set({h, h}, [h](const Point& x) { return h.project_fixed(x); });
  const double d = weighted_sq_distance(set, {pt({2}), pt({-1})}, Eigen::Vector2d(0.25, 0.75));
  EXPECT_DOUBLE_EQ(d, 1.0);
}

TEST(SeriesStats, MeanAndStandardError) {
  const auto s = series_stats({{1, 2, 3}, {3, 4}});
  ASSERT_EQ(s.mean.size(), 2u);
  EXPECT_DOUBLE_EQ(s.mean[0], 2.0);
  EXPECT_DOUBLE_EQ(s.mean[1], 3.0);
  EXPECT_NEAR(s.std_error[0], 1.0, 1e-15);
}

}  // namespace
}  // namespace fixnet
