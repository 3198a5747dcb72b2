#include "fixnet/error.hpp"
#include "fixnet/graph.hpp"
#include "fixnet/mixing.hpp"

#include <gtest/gtest.h>

#include <sstream>

namespace fixnet {
namespace {

Eigen::MatrixXd m2(double a, double b, double c, double d) {
  Eigen::MatrixXd m(2, 2);
  m << a, b, c, d;
  return m;
}

TEST(JointConnectivity, CompleteGraphPasses) {
  const auto rep = check_assumption1(graphs::complete(4), 10);
  EXPECT_TRUE(rep.pass) << rep.message;
}

TEST(JointConnectivity, RotatingNeedsFullWindow) {
  const auto g = graphs::rotating(3);
  EXPECT_EQ(g.window(), 3u);
  EXPECT_TRUE(check_assumption1(g, 30).pass);
  GraphSequence short_window(3, [g](std::size_t k) { return g.matrix(k); }, 2,
                             g.weight_floor(), "rotating Q=2", 3);
  const auto rep = check_assumption1(short_window, 30);
  EXPECT_FALSE(rep.pass);
  ASSERT_TRUE(rep.first_violation.has_value());
}

TEST(JointConnectivity, DisconnectedFailsAtZero) {
  const auto rep = check_assumption1(graphs::static_graph(m2(1, 0, 0, 1)), 5);
  EXPECT_FALSE(rep.pass);
  ASSERT_TRUE(rep.first_violation.has_value());
  EXPECT_EQ(*rep.first_violation, 0u);
}

TEST(JointConnectivity, RejectsNonStochasticAndZeroDiagonal) {
  EXPECT_FALSE(check_assumption1(graphs::static_graph(m2(0.5, 0.4, 0.5, 0.5)), 3).pass);
  EXPECT_FALSE(check_assumption1(graphs::static_graph(m2(0, 1, 0.5, 0.5)), 3).pass);
  EXPECT_FALSE(check_assumption1(graphs::static_graph(m2(1.2, -0.2, 0.5, 0.5)), 3).pass);
}

TEST(Graph, RotatingMatricesAreRowStochastic) {
  const auto g = graphs::rotating(4);
  for (std::size_t k = 0; k < 8; ++k) {
    const Eigen::MatrixXd a = g.matrix(k);
    for (Eigen::Index i = 0; i < 4; ++i) EXPECT_NEAR(a.row(i).sum(), 1.0, 1e-15);
    EXPECT_GT(a((k + 1) % 4, k % 4), 0.0);
  }
}

TEST(Graph, UniformWeights) {
  const Eigen::MatrixXd w = uniform_weights(m2(0, 1, 0, 0));
  EXPECT_DOUBLE_EQ(w(0, 0), 0.5);
  EXPECT_DOUBLE_EQ(w(0, 1), 0.5);
  EXPECT_DOUBLE_EQ(w(1, 1), 1.0);
}

TEST(Graph, StronglyConnected) {
  EXPECT_TRUE(strongly_connected(m2(1, 1, 1, 1)));
  EXPECT_FALSE(strongly_connected(m2(1, 1, 0, 1)));
}

TEST(Graph, RandomPoolIsSeededAndJointlyConnected) {
  Eigen::MatrixXd e01 = Eigen::MatrixXd::Zero(3, 3), e12 = e01, e20 = e01;
  e01(1, 0) = 1;
  e12(2, 1) = 1;
  e20(0, 2) = 1;
  const auto a = graphs::random_pool({e01, e12, e20}, 5);
  const auto b = graphs::random_pool({e01, e12, e20}, 5);
  for (std::size_t k = 0; k < 30; ++k) EXPECT_EQ(a.matrix(k), b.matrix(k));
  EXPECT_EQ(a.window(), 5u);
  EXPECT_TRUE(check_assumption1(a, 60).pass);
}

TEST(BackwardProduct, Examples) {
  const Eigen::MatrixXd a = m2(0.75, 0.25, 0.5, 0.5);
  const auto g = graphs::static_graph(a);
  EXPECT_EQ(backward_product(g, 4, 4), Eigen::MatrixXd::Identity(2, 2));
  EXPECT_LT((backward_product(g, 5, 3) - a * a).norm(), 1e-15);
  const Eigen::MatrixXd p = backward_product(g, 8, 0);
  for (Eigen::Index i = 0; i < 2; ++i) {
    EXPECT_NEAR(p(i, 0), 2.0 / 3.0, 1e-3);
    EXPECT_NEAR(p(i, 1), 1.0 / 3.0, 1e-3);
  }
  EXPECT_THROW(backward_product(g, 1, 2), std::invalid_argument);
}

TEST(BackwardProduct, OrderIsLatestOnTheLeft) {
  const Eigen::MatrixXd a0 = m2(1, 0, 0.5, 0.5), a1 = m2(0.5, 0.5, 0, 1);
  const auto g = graphs::periodic({a0, a1});
  EXPECT_LT((backward_product(g, 2, 0) - a1 * a0).norm(), 1e-15);
}

TEST(MatrixList, RoundTrip) {
  const auto g = graphs::rotating(3);
  std::stringstream ss;
  write_matrix_list(ss, g, 7);
  const auto back = read_matrix_list(ss);
  ASSERT_EQ(back.size(), 8u);
  for (std::size_t k = 0; k < back.size(); ++k) EXPECT_EQ(back[k], g.matrix(k));
}

TEST(MatrixList, MalformedInputThrows) {
  std::istringstream bad("not a header\n");
  EXPECT_THROW(read_matrix_list(bad), ConfigError);
}

TEST(Mixing, DoublyStochasticGivesUniformPi) {
  Eigen::MatrixXd a(3, 3);
  a << 0.5, 0.25, 0.25, 0.25, 0.5, 0.25, 0.25, 0.25, 0.5;
  const auto mix = compute_mixing(graphs::static_graph(a), 10, 64);
  ASSERT_EQ(mix.pi.size(), 11u);
  for (const auto& pi : mix.pi)
    for (Eigen::Index j = 0; j < 3; ++j) EXPECT_NEAR(pi[j], 1.0 / 3.0, 1e-12);
}

TEST(Mixing, PerronVectorAndSecondEigenvalue) {
  const auto mix = compute_mixing(graphs::static_graph(m2(0.75, 0.25, 0.5, 0.5)), 20, 64);
  for (const auto& pi : mix.pi) {
    EXPECT_NEAR(pi[0], 2.0 / 3.0, 1e-8);
    EXPECT_NEAR(pi[1], 1.0 / 3.0, 1e-8);
  }
  EXPECT_NEAR(mix.xi, 0.25, 0.05);
  EXPECT_GT(mix.varpi, 0.0);
  EXPECT_NEAR(mix.pi_floor, 1.0 / 3.0, 1e-8);
}

TEST(Mixing, PeriodicSatisfiesRecursion) {
  const Eigen::MatrixXd a0 = m2(1, 0, 0.5, 0.5), a1 = m2(0.5, 0.5, 0, 1);
  const auto g = graphs::periodic({a0, a1});
  const auto mix = compute_mixing(g, 30, 128);
  for (std::size_t k = 0; k + 1 < mix.pi.size(); ++k) {
    const Eigen::RowVectorXd lhs = mix.pi[k].transpose();
    const Eigen::RowVectorXd rhs = mix.pi[k + 1].transpose() * g.matrix(k);
    EXPECT_LT((lhs - rhs).cwiseAbs().maxCoeff(), 1e-8) << "k=" << k;
    EXPECT_NEAR(mix.pi[k].sum(), 1.0, 1e-8);
  }
  EXPECT_LE(mix.max_stationarity_error, 1e-8);
  EXPECT_GE(mix.pi_floor, mix.pi_floor_bound - 1e-12);
}

TEST(Mixing, DisconnectedGraphDoesNotContract) {
  EXPECT_THROW(compute_mixing(graphs::static_graph(m2(1, 0, 0, 1)), 2, 32), ValidationError);
}

TEST(AbsorptionTracker, AgreesWithDirectComputation) {
  const auto g = graphs::rotating(3);
  const std::size_t h = contraction_horizon(g);
  const auto mix = compute_mixing(g, 40, h);
  AbsorptionTracker tracker(g, h);
  for (std::size_t k = 0; k <= 40; ++k)
    EXPECT_LT((tracker.at(k) - mix.pi[k]).cwiseAbs().maxCoeff(), 1e-9) << "k=" << k;
}

TEST(AbsorptionTracker, ChunkBoundariesAreConsistent) {
  Eigen::MatrixXd e01 = Eigen::MatrixXd::Zero(3, 3), e12 = e01, e20 = e01;
  e01(1, 0) = 1;
  e12(2, 1) = 1;
  e20(0, 2) = 1;
  const auto g = graphs::random_pool({e01, e12, e20}, 2);
  AbsorptionTracker tracker(g);
  const std::size_t k = AbsorptionTracker::kChunk - 1;
  const Eigen::VectorXd next = tracker.at(k + 1);
  const Eigen::VectorXd cur = tracker.at(k);
  const Eigen::VectorXd rec = g.matrix(k).transpose() * next;
  EXPECT_LT((cur - rec).cwiseAbs().maxCoeff(), 1e-9);
}

}  // namespace
}  // namespace fixnet
