#include "fixnet/error.hpp"
#include "fixnet/hilbert.hpp"
#include "fixnet/seeds.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>

namespace fixnet {
namespace {

using testing::pt;

TEST(BlockLayout, OffsetsArePrefixSums) {
  BlockLayout l({2, 1, 3});
  EXPECT_EQ(l.dim(), 6u);
  EXPECT_EQ(l.blocks(), 3u);
  EXPECT_EQ(l.offset(0), 0u);
  EXPECT_EQ(l.offset(1), 2u);
  EXPECT_EQ(l.offset(2), 3u);
}

TEST(BlockLayout, RejectsEmptyAndZeroBlocks) {
  EXPECT_THROW(BlockLayout({}), std::invalid_argument);
  EXPECT_THROW(BlockLayout({2, 0}), std::invalid_argument);
}

TEST(Point, RejectsNonFinite) {
  Eigen::VectorXd v(2);
  v << 1.0, std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(Point(BlockLayout::single(2), v), DivergenceError);
  v[1] = std::numeric_limits<double>::infinity();
  EXPECT_THROW(Point(BlockLayout::single(2), v), DivergenceError);
}

TEST(Point, RejectsLengthMismatch) {
  EXPECT_THROW(Point(BlockLayout::single(3), Eigen::VectorXd::Zero(2)), ShapeError);
}

TEST(Inner, Examples) {
  EXPECT_EQ(inner(pt({1, 2}), pt({3, 4})), 11.0);
  EXPECT_EQ(inner(pt({1.5, -2}), pt({0, 0})), 0.0);
  EXPECT_EQ(inner(pt({1, 0, 0}), pt({1, 0, 0})), 1.0);
  EXPECT_THROW(inner(pt({1, 2}), pt({1, 2, 3})), ShapeError);
}

TEST(WeightedNorm, Examples) {
  auto two = BlockLayout::scalar_blocks(2);
  EXPECT_DOUBLE_EQ(weighted_norm_sq(pt(two, {1, 1}), WeightedNorm({0.5, 1.0})), 3.0);
  EXPECT_DOUBLE_EQ(weighted_norm_sq(pt(two, {1, 2}), WeightedNorm({0.25, 0.5})), 12.0);
  const Point y = pt(two, {0.3, -7});
  EXPECT_DOUBLE_EQ(weighted_norm_sq(y, WeightedNorm({1.0, 1.0})), norm_sq(y));
}

TEST(WeightedNorm, RejectsBadProbabilities) {
  EXPECT_THROW(WeightedNorm({0.5, 0.0}), std::invalid_argument);
  EXPECT_THROW(WeightedNorm({1.5}), std::invalid_argument);
  EXPECT_THROW(weighted_norm_sq(pt({1, 2}), WeightedNorm({0.5, 0.5})), ShapeError);
}

TEST(WeightedNorm, EquivalentToStandardNorm) {
  Rng rng = make_rng(11, "norm-equivalence");
  std::uniform_real_distribution<double> p(0.05, 1.0), c(-5.0, 5.0);
  auto layout = std::make_shared<const BlockLayout>(std::vector<std::size_t>{1, 2, 3});
  for (int t = 0; t < 1000; ++t) {
    WeightedNorm w({p(rng), p(rng), p(rng)});
    Eigen::VectorXd v(6);
    for (int j = 0; j < 6; ++j) v[j] = c(rng);
    const Point y(layout, v);
    const double s = norm_sq(y), ws = weighted_norm_sq(y, w);
    EXPECT_LE(s, ws * (1 + 1e-12));
    EXPECT_LE(ws, s / w.p0() * (1 + 1e-12));
  }
}

TEST(ConvexCombine, Examples) {
  const Point x = pt({1, 2}), y = pt({5, -1});
  std::vector<Point> xy{x, y};
  std::vector<double> w{1.0, 0.0};
  EXPECT_EQ(convex_combine(w, xy).coords(), x.coords());
  std::vector<Point> p{pt({0}), pt({2})};
  std::vector<double> half{0.5, 0.5};
  EXPECT_DOUBLE_EQ(convex_combine(half, p)[0], 1.0);
  std::vector<Point> q{pt({4}), pt({0})};
  std::vector<double> w2{0.25, 0.75};
  EXPECT_DOUBLE_EQ(convex_combine(w2, q)[0], 1.0);
}

TEST(ConvexCombine, RejectsBadWeightsAndLayouts) {
  std::vector<Point> p{pt({0}), pt({2})};
  std::vector<double> w{0.5, 0.6};
  EXPECT_THROW(convex_combine(w, p), std::invalid_argument);
  std::vector<double> neg{1.5, -0.5};
  EXPECT_THROW(convex_combine(neg, p), std::invalid_argument);
  std::vector<Point> mixed{pt({0}), pt({2, 3})};
  std::vector<double> ok{0.5, 0.5};
  EXPECT_THROW(convex_combine(ok, mixed), ShapeError);
}

TEST(ConvexCombine, NonexpansiveInAggregate) {
  Rng rng = make_rng(5, "combine");
  std::uniform_real_distribution<double> u(0.0, 1.0), c(-3.0, 3.0);
  auto layout = BlockLayout::single(3);
  for (int t = 0; t < 500; ++t) {
    std::vector<double> w(4);
    double sum = 0;
    for (auto& v : w) sum += (v = u(rng));
    for (auto& v : w) v /= sum;
    std::vector<Point> xs, ys;
    double worst = 0.0;
    for (int j = 0; j < 4; ++j) {
      xs.emplace_back(layout, Eigen::Vector3d(c(rng), c(rng), c(rng)));
      ys.emplace_back(layout, Eigen::Vector3d(c(rng), c(rng), c(rng)));
      worst = std::max(worst, distance(xs.back(), ys.back()));
    }
    try {
      EXPECT_LE(distance(convex_combine(w, xs), convex_combine(w, ys)), worst + 1e-12);
    } catch (const std::invalid_argument&) {
      // normalization drift beyond the sum tolerance; not expected at n=4
      ADD_FAILURE();
    }
  }
}

TEST(ConvexIdentity, HoldsForAffineCoefficients) {
  Rng rng = make_rng(3, "identity");
  std::uniform_real_distribution<double> r(-2.0, 2.0), c(-10.0, 10.0);
  auto layout = BlockLayout::single(4);
  for (int t = 0; t < 2000; ++t) {
    const Point x(layout, Eigen::Vector4d(c(rng), c(rng), c(rng), c(rng)));
    const Point y(layout, Eigen::Vector4d(c(rng), c(rng), c(rng), c(rng)));
    const double a = r(rng);
    const double lhs = norm_sq(a * x + (1 - a) * y);
    const double rhs = a * norm_sq(x) + (1 - a) * norm_sq(y) - a * (1 - a) * norm_sq(x - y);
    EXPECT_NEAR(lhs, rhs, 1e-10 * std::max({1.0, norm_sq(x), norm_sq(y)}));
  }
}

}  // namespace
}  // namespace fixnet
