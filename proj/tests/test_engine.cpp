#include "fixnet/engine.hpp"
#include "fixnet/error.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

namespace fixnet {
namespace {

using testing::pt;

NonexpansiveOp half_interval() {
  return ops::box(Eigen::VectorXd::Constant(1, 0.0), Eigen::VectorXd::Constant(1, 0.5));
}

TEST(KmStep, Examples) {
  const Point x = pt({1});
  EXPECT_EQ(km_step(half_interval(), x, 0.0, pt({0}))[0], 1.0);
  EXPECT_DOUBLE_EQ(km_step(half_interval(), x, 0.5, pt({0}))[0], 0.75);
  EXPECT_DOUBLE_EQ(km_step(half_interval(), x, 0.5, pt({0.1}))[0], 0.80);
}

TEST(KmStep, RejectsBadInputs) {
  EXPECT_THROW(km_step(half_interval(), pt({1}), 1.5, pt({0})), std::invalid_argument);
  EXPECT_THROW(km_step(half_interval(), pt({1}), 0.5, pt({0, 0})), ShapeError);
}

TEST(DikmStep, SingleAgentMatchesKm) {
  const auto op = ops::ball(Eigen::Vector2d(1, 1), 0.5);
  OperatorSet set({op});
  const auto sched = RelaxationSchedule::constant(0.3, 0.6);
  NetworkState s{0, {pt({4, -2})}, {}};
  Point x = pt({4, -2});
  const Eigen::MatrixXd one = Eigen::MatrixXd::Ones(1, 1);
  for (int k = 0; k < 50; ++k) {
    const Point eps = pt({0.01 / (k + 1), -0.02 / (k + 1)});
    s = dikm_step(set, s, one, sched, {eps});
    x = km_step(op, x, 0.6, eps);
    ASSERT_EQ(s.x[0].coords(), x.coords()) << "k=" << k;
  }
}

TEST(DikmStep, IdentityOperatorsAverage) {
  OperatorSet set({ops::identity(2), ops::identity(2)});
  const auto sched = RelaxationSchedule::constant(0.5, 0.5);
  NetworkState s{0, {pt({1, 5}), pt({3, -1})}, {}};
  const Eigen::MatrixXd a = Eigen::MatrixXd::Constant(2, 2, 0.5);
  const auto next = dikm_step(set, s, a, sched, {pt({0, 0}), pt({0, 0})});
  for (const auto& x : next.x) {
    EXPECT_DOUBLE_EQ(x[0], 2.0);
    EXPECT_DOUBLE_EQ(x[1], 2.0);
  }
  EXPECT_EQ(next.k, 1u);
}

TEST(DikmStep, HandExecutedExample) {
  OperatorSet set({ops::halfspace(Eigen::VectorXd::Constant(1, 1.0), 0.0),
                   ops::halfspace(Eigen::VectorXd::Constant(1, -1.0), 0.0)});
  const auto sched = RelaxationSchedule::constant(0.5, 0.5);
  NetworkState s{0, {pt({2}), pt({-4})}, {}};
  const Eigen::MatrixXd a = Eigen::MatrixXd::Constant(2, 2, 0.5);
  const auto next = dikm_step(set, s, a, sched, {pt({0}), pt({0})});
  EXPECT_DOUBLE_EQ(next.xhat[0][0], -1.0);
  EXPECT_DOUBLE_EQ(next.xhat[1][0], -1.0);
  EXPECT_DOUBLE_EQ(next.x[0][0], -1.0);
  EXPECT_DOUBLE_EQ(next.x[1][0], -0.5);
}

TEST(DikmStep, AgentMismatchThrows) {
  OperatorSet set({ops::identity(1), ops::identity(1)});
  const auto sched = RelaxationSchedule::constant(0.5, 0.5);
  NetworkState s{0, {pt({1})}, {}};
  EXPECT_THROW(dikm_step(set, s, Eigen::MatrixXd::Ones(1, 1), sched, {pt({0})}), ShapeError);
}

TEST(DibkmStep, HandExecutedExample) {
  auto layout = BlockLayout::scalar_blocks(2);
  NonexpansiveOp origin("origin", 2, [](const Point& x) { return Point::zeros(x.layout()); });
  OperatorSet set({origin});
  const auto sched = RelaxationSchedule::constant(0.5, 0.5);
  NetworkState s{0, {pt(layout, {2, 4})}, {}};
  const auto next = dibkm_step(set, s, Eigen::MatrixXd::Ones(1, 1), sched,
                               {Point::zeros(layout)}, {{1, 0}});
  EXPECT_DOUBLE_EQ(next.x[0][0], 1.0);
  EXPECT_EQ(next.x[0][1], 4.0);
}

TEST(DibkmStep, FullActivationMatchesDikm) {
  auto layout = BlockLayout::scalar_blocks(3);
  OperatorSet set({ops::ball(Eigen::Vector3d(0, 0, 0), 1.0),
                   ops::halfspace(Eigen::Vector3d(1, 1, 1), 0.5)});
  const auto sched = RelaxationSchedule::per_agent(0.2, {0.3, 0.7});
  const Eigen::MatrixXd a = (Eigen::MatrixXd(2, 2) << 0.6, 0.4, 0.3, 0.7).finished();
  NetworkState s1{0, {pt(layout, {3, -1, 2}), pt(layout, {-2, 2, 5})}, {}};
  NetworkState s2 = s1;
  const std::vector<Point> eps{pt(layout, {0.1, 0, -0.1}), pt(layout, {0, 0.2, 0})};
  for (int k = 0; k < 20; ++k) {
    s1 = dikm_step(set, s1, a, sched, eps);
    s2 = dibkm_step(set, s2, a, sched, eps, {{1, 1, 1}, {1, 1, 1}});
    for (std::size_t i = 0; i < 2; ++i) ASSERT_EQ(s1.x[i].coords(), s2.x[i].coords());
  }
}

TEST(DibkmStep, InactiveBlockKeepsMixedValue) {
  auto layout = std::make_shared<const BlockLayout>(std::vector<std::size_t>{2, 1});
  OperatorSet set({ops::ball(Eigen::Vector3d(0, 0, 0), 1.0),
                   ops::ball(Eigen::Vector3d(1, 0, 0), 1.0)});
  const auto sched = RelaxationSchedule::constant(0.5, 0.5);
  const Eigen::MatrixXd a = Eigen::MatrixXd::Constant(2, 2, 0.5);
  NetworkState s{0, {pt(layout, {3, -1, 2}), pt(layout, {-2, 2, 5})}, {}};
  const auto next = dibkm_step(set, s, a, sched,
                               {Point::zeros(layout), Point::zeros(layout)},
                               {{0, 1}, {1, 0}});
  EXPECT_EQ(next.x[0].block(0), next.xhat[0].block(0));
  EXPECT_NE(next.x[0][2], next.xhat[0][2]);
  EXPECT_EQ(next.x[1].block(1), next.xhat[1].block(1));
}

TEST(RelaxationSchedule, ValidatesRange) {
  EXPECT_THROW(RelaxationSchedule::constant(0.0, 0.5), ValidationError);
  EXPECT_THROW(RelaxationSchedule::constant(0.6, 0.5), ValidationError);
  EXPECT_THROW(RelaxationSchedule::constant(0.25, 0.8), ValidationError);
  EXPECT_THROW(RelaxationSchedule::constant(0.25, 0.2), ValidationError);
  const auto s = RelaxationSchedule::per_agent(0.1, {0.2, 0.9});
  EXPECT_EQ(s.at(1, 7), 0.9);
  EXPECT_EQ(s.at(3, 0), 0.9);
  EXPECT_EQ(s.cap(), 0.9);
}

TEST(ErrorModel, Magnitudes) {
  EXPECT_EQ(ErrorModel::zero().magnitude(5), 0.0);
  EXPECT_DOUBLE_EQ(ErrorModel::geometric(2, 0.5).magnitude(3), 0.25);
  EXPECT_DOUBLE_EQ(ErrorModel::power(1, 2).magnitude(1), 0.25);
  EXPECT_DOUBLE_EQ(ErrorModel::geometric(1, 0.5).l1_sum(), 2.0);
  EXPECT_TRUE(ErrorModel::power(1, 1.5).summable());
  const auto c = ErrorModel::custom({1, 2});
  EXPECT_EQ(c.magnitude(1), 2.0);
  EXPECT_EQ(c.magnitude(2), 0.0);
  EXPECT_THROW(ErrorModel::geometric(1, 1.0), ValidationError);
  EXPECT_THROW(ErrorModel::power(1, 1.0), ValidationError);
}

TEST(ErrorModel, DrawHasRequestedNorm) {
  Rng rng = make_rng(2, "draw");
  const auto m = ErrorModel::geometric(3, 0.5);
  auto layout = BlockLayout::single(4);
  for (std::size_t k = 0; k < 5; ++k) EXPECT_NEAR(norm(m.draw(k, layout, rng)), m.magnitude(k), 1e-12);
}

TEST(BlockScheme, NeverAllInactiveAndMarginals) {
  BlockScheme b({0.1, 0.2});
  Rng rng = make_rng(3, "blocks");
  std::vector<double> hits(2, 0.0);
  const int n = 20000;
  for (int t = 0; t < n; ++t) {
    const auto d = b.draw(rng);
    ASSERT_TRUE(d[0] || d[1]);
    hits[0] += d[0];
    hits[1] += d[1];
  }
  const auto m = b.effective_marginals();
  EXPECT_NEAR(hits[0] / n, m[0], 0.02);
  EXPECT_NEAR(hits[1] / n, m[1], 0.02);
  EXPECT_EQ(b.p0(), 0.1);
  EXPECT_TRUE(BlockScheme({1, 1}).always_full());
}


TEST(Run, ZeroBudgetRecordsInitialStateOnly) {
  OperatorSet set({ops::identity(1), ops::identity(1)});
  auto g = graphs::complete(2);
  Problem p;
  p.ops = &set;
  p.graph = &g;
  p.initial = {pt({0}), pt({1})};
  RunOptions o;
  o.max_iters = 0;
  const auto t = run(p, o);
  EXPECT_EQ(t.size(), 1u);
  EXPECT_EQ(t.stop_reason, "budget");
}

TEST(Run, ConsensusOnlyStopsAtTolerance) {
  OperatorSet set({ops::identity(1), ops::identity(1), ops::identity(1)});
  auto g = graphs::rotating(3);
  Problem p;
  p.ops = &set;
  p.graph = &g;
  p.initial = {pt({0}), pt({3}), pt({-6})};
  RunOptions o;
  o.max_iters = 10000;
  o.stop_tolerance = 1e-9;
  const auto t = run(p, o);
  EXPECT_EQ(t.stop_reason, "converged");
  EXPECT_LT(t.records.back().max_consensus, 1e-9);
}

TEST(Run, FeasibilityConvergesIntoBothHalfspaces) {
  const Eigen::Vector2d a1(1, 0), a2(0, 1);
  OperatorSet set({ops::halfspace(a1, 1.0), ops::halfspace(a2, 1.0)});
  auto g = graphs::complete(2);
  Problem p;
  p.ops = &set;
  p.graph = &g;
  p.initial = {pt({5, 4}), pt({3, 6})};
  RunOptions o;
  o.max_iters = 100000;
  o.stop_tolerance = 1e-8;
  o.record_states = true;
  const auto t = run(p, o);
  EXPECT_EQ(t.stop_reason, "converged");
  // The stop rule bounds each agent's own residual and its distance to the
  // weighted mean by the tolerance, so membership in the other agent's set is
  // certified to 3 tol.
  const auto& last = t.records.back();
  EXPECT_LT(last.max_residual, 1e-8);
  EXPECT_LT(last.max_consensus, 1e-8);
  for (const auto& x : t.log.states.back()) {
    EXPECT_LE(a1.dot(x) - 1.0, 3e-8);
    EXPECT_LE(a2.dot(x) - 1.0, 3e-8);
  }
}

TEST(Run, DeterministicGivenSeed) {
  OperatorSet set({ops::ball(Eigen::Vector2d(0, 0), 1), ops::ball(Eigen::Vector2d(1, 0), 1)});
  auto g = graphs::complete(2);
  Problem p;
  p.ops = &set;
  p.graph = &g;
  p.errors = ErrorModel::geometric(0.1, 0.9);
  p.initial = {pt({5, 4}), pt({3, 6})};
  RunOptions o;
  o.max_iters = 200;
  o.seed = 42;
  const auto a = run(p, o), b = run(p, o);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t k = 0; k < a.size(); ++k) EXPECT_EQ(a.records[k].residual, b.records[k].residual);
  o.repetition = 1;
  const auto c = run(p, o);
  EXPECT_NE(a.records[10].residual, c.records[10].residual);
}

TEST(Run, ValidatesProblem) {
  OperatorSet set({ops::identity(1), ops::identity(1)});
  auto g = graphs::complete(2);
  Problem p;
  p.ops = &set;
  p.graph = &g;
  p.initial = {pt({0}), pt({1})};
  RunOptions o;
  o.engine = EngineKind::km;
  EXPECT_THROW(run(p, o), ValidationError);
  o.engine = EngineKind::dibkm;
  EXPECT_THROW(run(p, o), ValidationError);
  p.initial.pop_back();
  o.engine = EngineKind::dikm;
  EXPECT_THROW(run(p, o), ValidationError);
}

TEST(Run, DivergenceGuard) {
  NonexpansiveOp blowup("blowup", 1, [](const Point& x) { return 1e7 * x; });
  OperatorSet set({blowup});
  auto g = graphs::complete(1);
  Problem p;
  p.ops = &set;
  p.graph = &g;
  p.initial = {pt({1})};
  RunOptions o;
  o.engine = EngineKind::km;
  o.max_iters = 100;
  EXPECT_THROW(run(p, o), DivergenceError);
}

TEST(Engine, ParseNames) {
  EXPECT_EQ(parse_engine("dibkm"), EngineKind::dibkm);
  EXPECT_EQ(to_string(EngineKind::km), "km");
  EXPECT_THROW(parse_engine("bogus"), ConfigError);
}

}  // namespace
}  // namespace fixnet
