#include "fixnet/lemmas.hpp"

#include "fixnet/diagnostics.hpp"
#include "fixnet/scenario.hpp"
#include "fixnet/seeds.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>

namespace fixnet {

namespace {

void record(PropertyResult& r, double margin, double tol) {
  ++r.samples;
  r.worst_margin = std::min(r.worst_margin, margin);
  if (margin < -tol) ++r.violations;
}

PropertyResult start(std::string name) {
  PropertyResult r;
  r.name = std::move(name);
  r.worst_margin = std::numeric_limits<double>::infinity();
  return r;
}

double spectral_norm(const Eigen::MatrixXd& m) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
  return svd.singularValues()(0);
}

Eigen::MatrixXd kron(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  Eigen::MatrixXd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

Scenario preset(const std::string& name, const Json& params, const Json& overrides,
                std::uint64_t seed) {
  Json ref = {{"preset", name}, {"params", params}, {"overrides", overrides}};
  return build_scenario(resolve_scenario_spec(ref), seed);
}

const Json kStrongErrors = {{"errors", {{"kind", "geometric"}, {"scale", 0.5}, {"ratio", 0.97}}}};

// Inexact runs the recursion checks walk along.
std::vector<Scenario> inexact_scenarios(std::uint64_t seed) {
  std::vector<Scenario> out;
  out.push_back(preset("feasibility-2halfspace", Json::object(), kStrongErrors, seed));
  out.push_back(preset("feasibility-2halfspace", {{"dimension", 5}}, kStrongErrors, seed));
  out.push_back(preset("linear-3x3", Json::object(), kStrongErrors, seed));
  out.push_back(preset("ball-box-3d", Json::object(), kStrongErrors, seed));
  return out;
}

RunTrace logged_run(const Scenario& s, EngineKind engine, std::size_t iters,
                    std::uint64_t seed) {
  RunOptions opt;
  opt.engine = engine;
  opt.max_iters = iters;
  opt.stop_tolerance = 0.0;
  opt.seed = seed;
  opt.record_states = true;
  return run(s.problem(), opt);
}

Scenario block_scenario(std::uint64_t seed) {
  Json over = {{"block_sizes", {1, 1, 1, 1}},
               {"blocks", {{"probs", {0.25, 0.5, 0.75, 1.0}}}},
               {"errors", {{"kind", "geometric"}, {"scale", 0.5}, {"ratio", 0.9}}}};
  return preset("feasibility-2halfspace", {{"dimension", 4}}, over, seed);
}

}  // namespace

PropertyResult check_kronecker_bound(std::size_t trials, std::uint64_t seed) {
  PropertyResult r = start("kronecker_norm_bound");
  Rng rng = make_rng(seed, "kronecker");
  std::uniform_int_distribution<int> nd(2, 5), dd(1, 4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::normal_distribution<double> g(0.0, 1.0);
  for (std::size_t t = 0; t < trials; ++t) {
    const int n = nd(rng), d = dd(rng);
    Eigen::MatrixXd a(n, n);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) a(i, j) = u(rng) < 0.3 && i != j ? 0.0 : u(rng);
      a.row(i) /= a.row(i).sum();
    }
    Eigen::MatrixXd b(d, d);
    for (int i = 0; i < d; ++i) {
      for (int j = 0; j < d; ++j) b(i, j) = g(rng);
    }
    const double lhs = spectral_norm(kron(a, b));
    const double rhs = double(n) * a.cwiseAbs().maxCoeff() * spectral_norm(b);
    record(r, rhs - lhs, 1e-9);
  }
  r.detail = "random row-stochastic A (n<=5) and Gaussian B (d<=4)";
  return r;
}

PropertyResult check_fixed_point_inner_product(std::size_t samples_per_op,
                                               std::uint64_t seed) {
  PropertyResult r = start("fixed_point_inner_product");
  const auto n = 3;
  Eigen::MatrixXd a(2, 3);
  a << 1, 2, 0, 0, 1, -1;
  const Eigen::Vector2d b(1, 0.5);
  Eigen::MatrixXd q(3, 3);
  q << 2, 1, 0, 1, 2, 0, 0, 0, 0;
  const double lq = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(q).eigenvalues().maxCoeff();
  std::vector<NonexpansiveOp> cat{
      ops::identity(n),
      ops::negation(n),
      ops::halfspace(Eigen::Vector3d(1, -1, 2), 0.5),
      ops::ball(Eigen::Vector3d(1, 0, 0), 1.5),
      ops::box(Eigen::Vector3d(-1, 0, -2), Eigen::Vector3d(1, 1, 0)),
      ops::affine(a, b),
      ops::linear_equation(a, b),
      ops::gradient_quadratic(q, Eigen::Vector3d(1, -1, 0), 2.0 / lq),
      ops::gradient_quadratic(q, Eigen::Vector3d(1, -1, 0), 0.5 / lq),
      ops::example1_interval(),
  };
  std::size_t idx = 0;
  for (const auto& op : cat) {
    if (!op.checked_nonexpansive() || !op.has_fixed_projector()) continue;
    const auto layout = BlockLayout::single(op.dim());
    DomainPredicate dom;
    if (op.has_domain()) dom = [&op](const Point& x) { return op.in_domain(x); };
    const auto ys = sample_ball(layout, 5.0, samples_per_op,
                                substream_seed(seed, "inner-product", idx++), dom);
    for (const auto& y : ys) {
      const Point z = op.project_fixed(y);
      const Point ty = op.eval(y);
      const double lhs = 2.0 * inner(y - z, y - ty);
      const double rhs = norm_sq(ty - y);
      record(r, lhs - rhs, 1e-10);
    }
  }
  r.detail = std::to_string(idx) + " catalog operators";
  return r;
}

PropertyResult check_residual_recursion(std::uint64_t seed) {
  PropertyResult r = start("residual_recursion");
  for (const auto& s : inexact_scenarios(seed)) {
    const RunTrace t = logged_run(s, EngineKind::dikm, 400, seed);
    const auto& lg = t.log;
    const auto layout = s.layout();
    for (std::size_t k = 0; k + 1 < lg.states.size(); ++k) {
      for (std::size_t i = 0; i < s.agents(); ++i) {
        const Point xn(layout, lg.states[k + 1][i]);
        const Point xh(layout, lg.mixed[k][i]);
        const double lhs = residual(s.ops()[i], xn);
        const double rhs = residual(s.ops()[i], xh) +
                           2.0 * lg.alphas[k][i] * lg.errors[k][i].norm();
        record(r, rhs - lhs, 1e-10);
      }
    }
  }
  r.detail = "every step of 400-step inexact runs on 4 scenarios";
  return r;
}

PropertyResult check_convex_identity(std::size_t samples, std::uint64_t seed) {
  PropertyResult r = start("convex_identity");
  Rng rng = make_rng(seed, "convex-identity");
  std::uniform_real_distribution<double> ur(-2.0, 2.0), uc(-10.0, 10.0);
  std::uniform_int_distribution<int> dd(1, 8);
  for (std::size_t t = 0; t < samples; ++t) {
    const int d = dd(rng);
    Eigen::VectorXd x(d), y(d);
    for (int j = 0; j < d; ++j) {
      x[j] = uc(rng);
      y[j] = uc(rng);
    }
    const double rr = ur(rng);
    const double lhs = (rr * x + (1.0 - rr) * y).squaredNorm();
    const double rhs = rr * x.squaredNorm() + (1.0 - rr) * y.squaredNorm() -
                       rr * (1.0 - rr) * (x - y).squaredNorm();
    const double scale = std::max({std::abs(lhs), std::abs(rhs), x.squaredNorm(),
                                   y.squaredNorm(), 1.0});
    // Two-sided: the identity is exact.
    record(r, -std::abs(lhs - rhs) / scale, 1e-10);
  }
  r.detail = "random x, y in R^d (d<=8), r in [-2, 2]";
  return r;
}

PropertyResult check_block_residual_bound(std::size_t draws, std::uint64_t seed) {
  PropertyResult r = start("block_residual_bound");
  const Scenario s = block_scenario(seed);
  const Problem p = s.problem();
  const WeightedNorm wn(p.blocks->probs());
  const RunTrace base = logged_run(s, EngineKind::dibkm, 40, seed);
  const auto layout = s.layout();
  const std::size_t n = s.agents();
  for (std::size_t k : {std::size_t{0}, std::size_t{3}, std::size_t{10}, std::size_t{40}}) {
    NetworkState st;
    st.k = k;
    for (const auto& x : base.log.states[k]) st.x.emplace_back(layout, x);
    const Eigen::MatrixXd a = s.graph().matrix(k);
    Rng rng = make_rng(seed, "block-residual", k);
    std::vector<std::vector<double>> diff(n);
    std::vector<double> bound(n);
    for (std::size_t t = 0; t < draws; ++t) {
      std::vector<Point> eps;
      std::vector<std::vector<std::uint8_t>> active;
      for (std::size_t i = 0; i < n; ++i) {
        eps.push_back(p.errors.draw(k, layout, rng));
        active.push_back(p.blocks->draw(rng));
      }
      const NetworkState nx = dibkm_step(s.ops(), st, a, p.schedule, eps, active);
      for (std::size_t i = 0; i < n; ++i) {
        const auto& op = s.ops()[i];
        const double alpha = p.schedule.at(i, k);
        if (t == 0) {
          bound[i] = 4.0 * weighted_norm_sq(op.eval(nx.xhat[i]) - nx.xhat[i], wn);
        }
        const double lhs = weighted_norm_sq(op.eval(nx.x[i]) - nx.x[i], wn);
        diff[i].push_back(lhs - 16.0 * alpha * alpha * weighted_norm_sq(eps[i], wn));
      }
    }
    for (std::size_t i = 0; i < n; ++i) {
      double mean = 0.0, var = 0.0;
      for (double v : diff[i]) mean += v;
      mean /= double(draws);
      for (double v : diff[i]) var += (v - mean) * (v - mean);
      const double se = std::sqrt(var / double(draws - 1) / double(draws));
      record(r, bound[i] + 3.0 * se - mean, 0.0);
    }
  }
  r.detail = std::to_string(draws) + " activation/error draws at 4 states, m=4 blocks";
  return r;
}

PropertyResult check_fejer_surrogate(std::uint64_t seed) {
  PropertyResult r = start("fejer_surrogate");
  for (const auto& s : inexact_scenarios(seed)) {
    if (!s.ops().has_common_projector()) continue;
    const RunTrace t = logged_run(s, EngineKind::dikm, 400, seed);
    const auto& lg = t.log;
    const auto layout = s.layout();
    std::vector<Eigen::VectorXd> anchors{s.ops().project_common(s.initial()[0]).coords()};
    for (const auto& y : sample_ball(layout, 10.0, 3, substream_seed(seed, "fejer"))) {
      anchors.push_back(s.ops().project_common(y).coords());
    }
    for (const auto& xs : anchors) {
      for (std::size_t k = 0; k + 1 < lg.states.size(); ++k) {
        double lhs = 0.0, rhs = 0.0;
        for (std::size_t i = 0; i < s.agents(); ++i) {
          const auto ii = Eigen::Index(i);
          lhs += lg.pi[k + 1][ii] * (lg.states[k + 1][i] - xs).norm();
          rhs += lg.pi[k][ii] * (lg.states[k][i] - xs).norm() +
                 lg.pi[k + 1][ii] * lg.alphas[k][i] * lg.errors[k][i].norm();
        }
        record(r, rhs - lhs, 1e-9);
      }
    }
  }
  r.detail = "4 anchors in X* per run, every step";
  return r;
}

PropertyResult check_solution_stationarity(std::uint64_t seed) {
  PropertyResult r = start("solution_stationarity");
  struct Case {
    Scenario s;
    EngineKind engine;
  };
  std::vector<Case> cases;
  cases.push_back({preset("feasibility-2halfspace", Json::object(), Json::object(), seed),
                   EngineKind::dikm});
  cases.push_back({preset("linear-3x3", Json::object(), Json::object(), seed),
                   EngineKind::dikm});
  cases.push_back({block_scenario(seed), EngineKind::dibkm});
  cases.push_back({block_scenario(seed), EngineKind::dikm});
  for (const auto& c : cases) {
    Problem p = c.s.problem();
    p.errors = ErrorModel::zero();
    const auto probes = sample_ball(c.s.layout(), 10.0, 3, substream_seed(seed, "stationary"));
    for (const auto& y : probes) {
      const Point xs = c.s.ops().project_common(y);
      p.initial.assign(c.s.agents(), xs);
      RunOptions opt;
      opt.engine = c.engine;
      opt.max_iters = 200;
      opt.stop_tolerance = 0.0;
      opt.seed = seed;
      opt.record_states = true;
      const RunTrace t = run(p, opt);
      const double scale = 1e-12 * (1.0 + norm(xs));
      for (const auto& states : t.log.states) {
        double worst = 0.0;
        for (const auto& x : states) worst = std::max(worst, (x - xs.coords()).norm());
        record(r, scale - worst, 0.0);
      }
    }
  }
  r.detail = "error-free runs from points of X*, 200 steps";
  return r;
}

std::vector<PropertyResult> run_lemma_suite(std::uint64_t seed) {
  return {check_kronecker_bound(1000, seed),
          check_fixed_point_inner_product(1000, seed),
          check_residual_recursion(seed),
          check_convex_identity(10000, seed),
          check_block_residual_bound(10000, seed),
          check_fejer_surrogate(seed),
          check_solution_stationarity(seed)};
}

}  // namespace fixnet
