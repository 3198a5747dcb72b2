#include "fixnet/engine.hpp"

#include "fixnet/error.hpp"
#include "fixnet/mixing.hpp"
#include "fixnet/tolerances.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

namespace fixnet {

// ---------------------------------------------------------------------------
// Relaxation schedule

RelaxationSchedule::RelaxationSchedule(double floor,
                                       std::vector<std::vector<double>> values)
    : floor_(floor), values_(std::move(values)) {
  if (!(floor_ > 0.0 && floor_ <= 0.5)) {
    throw ValidationError("relaxation floor alpha must lie in (0, 1/2], got " +
                          std::to_string(floor_));
  }
  if (values_.empty()) throw ValidationError("relaxation schedule is empty");
  const std::size_t cols = values_.front().size();
  for (const auto& row : values_) {
    if (row.empty() || row.size() != cols) {
      throw ValidationError("relaxation schedule rows must share one length");
    }
    for (double a : row) {
      if (!(a >= floor_ && a <= 1.0 - floor_)) {
        std::ostringstream msg;
        msg << "relaxation parameter " << a << " outside [alpha, 1 - alpha] = ["
            << floor_ << ", " << 1.0 - floor_ << "]";
        throw ValidationError(msg.str());
      }
      cap_ = std::max(cap_, a);
    }
  }
}

RelaxationSchedule RelaxationSchedule::constant(double floor, double value) {
  return RelaxationSchedule(floor, {{value}});
}

RelaxationSchedule RelaxationSchedule::per_agent(double floor,
                                                 std::vector<double> values) {
  std::vector<std::vector<double>> rows;
  for (double v : values) rows.push_back({v});
  return RelaxationSchedule(floor, std::move(rows));
}

double RelaxationSchedule::at(std::size_t agent, std::size_t k) const {
  const auto& row = values_[agent % values_.size()];
  return row[k % row.size()];
}

// ---------------------------------------------------------------------------
// Error model

ErrorModel ErrorModel::zero() { return ErrorModel{}; }

ErrorModel ErrorModel::geometric(double scale, double ratio) {
  if (!(scale >= 0.0) || !(ratio >= 0.0 && ratio < 1.0)) {
    throw ValidationError("geometric errors need scale >= 0 and ratio in [0, 1)");
  }
  ErrorModel m;
  m.kind_ = Kind::geometric;
  m.scale_ = scale;
  m.param_ = ratio;
  return m;
}

ErrorModel ErrorModel::power(double scale, double exponent) {
  if (!(scale >= 0.0) || !(exponent > 1.0)) {
    throw ValidationError("power errors need scale >= 0 and exponent > 1");
  }
  ErrorModel m;
  m.kind_ = Kind::power;
  m.scale_ = scale;
  m.param_ = exponent;
  return m;
}

ErrorModel ErrorModel::custom(std::vector<double> norms) {
  for (double v : norms) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw ValidationError("custom error norms must be finite and nonnegative");
    }
  }
  ErrorModel m;
  m.kind_ = Kind::custom;
  m.norms_ = std::move(norms);
  return m;
}

std::string ErrorModel::kind_name() const {
  switch (kind_) {
    case Kind::zero: return "zero";
    case Kind::geometric: return "geometric";
    case Kind::power: return "power";
    case Kind::custom: return "custom";
  }
  return "?";
}

double ErrorModel::magnitude(std::size_t k) const {
  switch (kind_) {
    case Kind::zero: return 0.0;
    case Kind::geometric: return scale_ * std::pow(param_, double(k));
    case Kind::power: return scale_ * std::pow(double(k + 1), -param_);
    case Kind::custom: return k < norms_.size() ? norms_[k] : 0.0;
  }
  return 0.0;
}

double ErrorModel::l1_sum() const {
  switch (kind_) {
    case Kind::zero: return 0.0;
    case Kind::geometric: return scale_ / (1.0 - param_);
    case Kind::power: {
      // Partial sum plus the integral bound on the tail.
      constexpr std::size_t kTerms = 100000;
      double s = 0.0;
      for (std::size_t k = 0; k < kTerms; ++k) s += magnitude(k);
      return s + scale_ * std::pow(double(kTerms), 1.0 - param_) / (param_ - 1.0);
    }
    case Kind::custom: {
      double s = 0.0;
      for (double v : norms_) s += v;
      return s;
    }
  }
  return std::numeric_limits<double>::infinity();
}

Point ErrorModel::draw(std::size_t k, const LayoutPtr& layout, Rng& rng) const {
  const double mag = magnitude(k);
  if (mag == 0.0) return Point::zeros(layout);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const auto n = Eigen::Index(layout->dim());
  Eigen::VectorXd v(n);
  double len = 0.0;
  while (len == 0.0) {
    for (Eigen::Index j = 0; j < n; ++j) v[j] = gauss(rng);
    len = v.norm();
  }
  return Point(layout, (mag / len) * v);
}

// ---------------------------------------------------------------------------
// Block scheme

BlockScheme::BlockScheme(std::vector<double> probs) : probs_(std::move(probs)) {
  if (probs_.empty()) throw ValidationError("block scheme needs at least one block");
  for (double p : probs_) {
    if (!(p > 0.0 && p <= 1.0)) {
      throw ValidationError("block activation probabilities must lie in (0, 1]");
    }
  }
}

double BlockScheme::p0() const {
  return *std::min_element(probs_.begin(), probs_.end());
}

bool BlockScheme::always_full() const {
  return std::all_of(probs_.begin(), probs_.end(),
                     [](double p) { return p == 1.0; });
}

std::vector<std::uint8_t> BlockScheme::draw(Rng& rng) const {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  std::vector<std::uint8_t> b(probs_.size());
  while (true) {
    bool any = false;
    for (std::size_t l = 0; l < probs_.size(); ++l) {
      b[l] = unif(rng) < probs_[l] ? 1 : 0;
      any = any || b[l];
    }
    if (any) return b;
  }
}

std::vector<double> BlockScheme::effective_marginals() const {
  double none = 1.0;
  for (double p : probs_) none *= (1.0 - p);
  std::vector<double> out;
  for (double p : probs_) out.push_back(p / (1.0 - none));
  return out;
}

// ---------------------------------------------------------------------------
// Steps

namespace {

// out = xhat + step * (f + eps - xhat), elementwise. Every engine funnels its
// update through here so degenerate configurations agree bit-for-bit.
void relaxed_update(const double* xhat, const double* f, const double* eps,
                    double step, double* out, std::size_t len) {
  for (std::size_t j = 0; j < len; ++j) {
    out[j] = xhat[j] + step * (f[j] + eps[j] - xhat[j]);
  }
}

void require_agents(const OperatorSet& ops, const NetworkState& state,
                    const Eigen::MatrixXd& a, const std::vector<Point>& eps) {
  const std::size_t n = ops.size();
  if (state.x.size() != n || std::size_t(a.rows()) != n ||
      std::size_t(a.cols()) != n || eps.size() != n) {
    throw ShapeError("agent count mismatch between operators, state, matrix "
                     "and errors");
  }
}

std::vector<double> row_weights(const Eigen::MatrixXd& a, Eigen::Index i) {
  std::vector<double> w(std::size_t(a.cols()));
  for (Eigen::Index j = 0; j < a.cols(); ++j) w[std::size_t(j)] = a(i, j);
  return w;
}

}  // namespace

Point km_step(const NonexpansiveOp& op, const Point& x, double alpha,
              const Point& eps) {
  if (!(alpha >= 0.0 && alpha <= 1.0)) {
    throw std::invalid_argument("KM step size must lie in [0, 1]");
  }
  if (!x.same_shape(eps)) throw ShapeError("error vector shape mismatch");
  const Point tx = op.eval(x);
  Eigen::VectorXd out(x.coords().size());
  relaxed_update(x.coords().data(), tx.coords().data(), eps.coords().data(),
                 alpha, out.data(), x.dim());
  return x.with_coords(std::move(out));
}

NetworkState dikm_step(const OperatorSet& ops, const NetworkState& state,
                       const Eigen::MatrixXd& a, const RelaxationSchedule& sched,
                       const std::vector<Point>& eps) {
  require_agents(ops, state, a, eps);
  NetworkState next;
  next.k = state.k + 1;
  next.x.reserve(ops.size());
  next.xhat.reserve(ops.size());
  for (std::size_t i = 0; i < ops.size(); ++i) {
    const auto w = row_weights(a, Eigen::Index(i));
    Point xhat = convex_combine(w, state.x);
    const Point f = ops[i].eval(xhat);
    Eigen::VectorXd out(xhat.coords().size());
    relaxed_update(xhat.coords().data(), f.coords().data(),
                   eps[i].coords().data(), sched.at(i, state.k), out.data(),
                   xhat.dim());
    next.x.push_back(xhat.with_coords(std::move(out)));
    next.xhat.push_back(std::move(xhat));
  }
  return next;
}

NetworkState dibkm_step(const OperatorSet& ops, const NetworkState& state,
                        const Eigen::MatrixXd& a, const RelaxationSchedule& sched,
                        const std::vector<Point>& eps,
                        const std::vector<std::vector<std::uint8_t>>& active) {
  require_agents(ops, state, a, eps);
  if (active.size() != ops.size()) throw ShapeError("one activation per agent");
  NetworkState next;
  next.k = state.k + 1;
  next.x.reserve(ops.size());
  next.xhat.reserve(ops.size());
  for (std::size_t i = 0; i < ops.size(); ++i) {
    const auto w = row_weights(a, Eigen::Index(i));
    Point xhat = convex_combine(w, state.x);
    const BlockLayout& layout = *xhat.layout();
    if (active[i].size() != layout.blocks()) {
      throw ShapeError("activation vector length != block count");
    }
    const Point f = ops[i].eval(xhat);
    Eigen::VectorXd out = xhat.coords();
    const double alpha = sched.at(i, state.k);
    for (std::size_t l = 0; l < layout.blocks(); ++l) {
      if (!active[i][l]) continue;
      const std::size_t off = layout.offset(l);
      relaxed_update(xhat.coords().data() + off, f.coords().data() + off,
                     eps[i].coords().data() + off, double(active[i][l]) * alpha,
                     out.data() + off, layout.size(l));
    }
    next.x.push_back(xhat.with_coords(std::move(out)));
    next.xhat.push_back(std::move(xhat));
  }
  return next;
}

std::string to_string(EngineKind e) {
  switch (e) {
    case EngineKind::km: return "km";
    case EngineKind::dikm: return "dikm";
    case EngineKind::dibkm: return "dibkm";
  }
  return "?";
}

EngineKind parse_engine(const std::string& s) {
  if (s == "km") return EngineKind::km;
  if (s == "dikm") return EngineKind::dikm;
  if (s == "dibkm") return EngineKind::dibkm;
  throw ConfigError("unknown engine '" + s + "' (expected km, dikm or dibkm)");
}

// ---------------------------------------------------------------------------
// Driver

namespace {

void validate_problem(const Problem& p, const RunOptions& opt) {
  if (!p.ops || !p.graph) throw ValidationError("problem lacks operators or graph");
  const std::size_t n = p.ops->size();
  if (p.graph->agents() != n) {
    throw ValidationError("graph has " + std::to_string(p.graph->agents()) +
                          " agents, operator set has " + std::to_string(n));
  }
  if (p.initial.size() != n) {
    throw ValidationError("need one initial point per agent");
  }
  for (const auto& x : p.initial) {
    if (x.dim() != p.ops->dim() || !x.same_shape(p.initial.front())) {
      throw ValidationError("initial points disagree with operator dimension");
    }
  }
  const std::size_t rows = p.schedule.values().size();
  if (rows != 1 && rows != n) {
    throw ValidationError("relaxation schedule needs 1 or N rows");
  }
  if (opt.engine == EngineKind::km && n != 1) {
    throw ValidationError("engine km requires exactly one agent");
  }
  if (opt.engine == EngineKind::dibkm) {
    if (!p.blocks) throw ValidationError("engine dibkm requires a block scheme");
    if (p.blocks->blocks() != p.initial.front().layout()->blocks()) {
      throw ValidationError("block scheme and point layout disagree on block count");
    }
  }
  if (!(opt.stop_tolerance >= 0.0)) {
    throw ValidationError("stop tolerance must be nonnegative");
  }
}

void guard(const std::vector<Point>& xs, std::size_t k) {
  for (const auto& x : xs) {
    if (x.coords().cwiseAbs().maxCoeff() > tol::kDivergence) {
      throw DivergenceError("iterate magnitude exceeded 1e12 at k=" +
                            std::to_string(k));
    }
  }
}

TraceRecord measure(const Problem& p, const std::vector<Point>& x,
                    const Eigen::VectorXd& pi, std::size_t k,
                    const WeightedNorm* wnorm) {
  const OperatorSet& ops = *p.ops;
  const std::size_t n = ops.size();
  TraceRecord r;
  r.k = k;
  r.residual.resize(n);
  r.consensus.resize(n);
  r.error_norm.assign(n, 0.0);
  std::vector<double> w(pi.data(), pi.data() + pi.size());
  const Point xbar = convex_combine(w, x);
  for (std::size_t i = 0; i < n; ++i) {
    r.residual[i] = residual(ops[i], x[i]);
    r.consensus[i] = distance(x[i], xbar);
  }
  r.max_residual = *std::max_element(r.residual.begin(), r.residual.end());
  r.max_consensus = *std::max_element(r.consensus.begin(), r.consensus.end());
  if (ops.has_common_projector()) {
    r.distance.resize(n);
    std::vector<Point> proj;
    proj.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      proj.push_back(ops.project_common(x[i]));
      r.distance[i] = distance(x[i], proj.back());
      r.d2 += pi[Eigen::Index(i)] * r.distance[i] * r.distance[i];
    }
    if (wnorm) {
      const Point q = convex_combine(w, proj);
      for (std::size_t i = 0; i < n; ++i) {
        r.weighted_d2 += pi[Eigen::Index(i)] * weighted_norm_sq(x[i] - q, *wnorm);
      }
    }
  }
  return r;
}

std::vector<Eigen::VectorXd> raw(const std::vector<Point>& xs) {
  std::vector<Eigen::VectorXd> out;
  out.reserve(xs.size());
  for (const auto& x : xs) out.push_back(x.coords());
  return out;
}

}  // namespace

RunTrace run(const Problem& p, const RunOptions& opt) {
  validate_problem(p, opt);
  const std::size_t n = p.ops->size();
  const LayoutPtr layout = p.initial.front().layout();

  std::vector<Rng> err_rng, act_rng;
  const std::string rep = std::to_string(opt.repetition);
  for (std::size_t i = 0; i < n; ++i) {
    err_rng.push_back(make_rng(opt.seed, "errors/" + rep, i));
    act_rng.push_back(make_rng(opt.seed, "activations/" + rep, i));
  }

  std::optional<AbsorptionTracker> tracker;
  if (n > 1) tracker.emplace(*p.graph, opt.mixing_horizon);
  const Eigen::VectorXd single = Eigen::VectorXd::Ones(1);
  auto pi_at = [&](std::size_t k) -> const Eigen::VectorXd& {
    return tracker ? tracker->at(k) : single;
  };

  std::optional<WeightedNorm> wnorm;
  if (opt.engine == EngineKind::dibkm) wnorm.emplace(p.blocks->probs());

  RunTrace trace;
  trace.agents = n;
  trace.has_distance = p.ops->has_common_projector();
  trace.has_weighted = wnorm.has_value() && trace.has_distance;
  trace.fingerprint = opt.fingerprint;

  NetworkState state;
  state.x = p.initial;
  guard(state.x, 0);

  while (true) {
    const Eigen::VectorXd& pi = pi_at(state.k);
    trace.records.push_back(
        measure(p, state.x, pi, state.k, wnorm ? &*wnorm : nullptr));
    if (opt.record_states) {
      trace.log.states.push_back(raw(state.x));
      trace.log.pi.push_back(pi);
    }
    const TraceRecord& rec = trace.records.back();
    if (rec.max_residual < opt.stop_tolerance &&
        rec.max_consensus < opt.stop_tolerance) {
      trace.stop_reason = "converged";
      break;
    }
    if (state.k >= opt.max_iters) {
      trace.stop_reason = "budget";
      break;
    }

    std::vector<Point> eps;
    eps.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
      eps.push_back(p.errors.draw(state.k, layout, err_rng[i]));
      trace.records.back().error_norm[i] = norm(eps.back());
    }
    std::vector<std::vector<std::uint8_t>> active;
    if (opt.engine == EngineKind::dibkm) {
      for (std::size_t i = 0; i < n; ++i) active.push_back(p.blocks->draw(act_rng[i]));
    }

    NetworkState next;
    switch (opt.engine) {
      case EngineKind::km:
        next.k = state.k + 1;
        next.x.push_back(km_step((*p.ops)[0], state.x[0],
                                 p.schedule.at(0, state.k), eps[0]));
        next.xhat.push_back(state.x[0]);
        break;
      case EngineKind::dikm:
        next = dikm_step(*p.ops, state, p.graph->matrix(state.k), p.schedule, eps);
        break;
      case EngineKind::dibkm:
        next = dibkm_step(*p.ops, state, p.graph->matrix(state.k), p.schedule,
                          eps, active);
        break;
    }
    guard(next.x, next.k);

    if (opt.record_states) {
      trace.log.mixed.push_back(raw(next.xhat));
      trace.log.errors.push_back(raw(eps));
      std::vector<double> alphas;
      for (std::size_t i = 0; i < n; ++i) alphas.push_back(p.schedule.at(i, state.k));
      trace.log.alphas.push_back(std::move(alphas));
      trace.log.activations.push_back(std::move(active));
    }
    state = std::move(next);
  }
  return trace;
}

}  // namespace fixnet
