#include "fixnet/regularity.hpp"

#include "fixnet/error.hpp"
#include "fixnet/seeds.hpp"
#include "fixnet/tolerances.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace fixnet {
namespace {

DomainPredicate joint_domain(const OperatorSet& ops) {
  bool any = false;
  for (const auto& op : ops.ops()) any = any || op.has_domain();
  if (!any) return {};
  return [&ops](const Point& x) {
    for (const auto& op : ops.ops()) {
      if (!op.in_domain(x)) return false;
    }
    return true;
  };
}

DomainPredicate op_domain(const NonexpansiveOp& op) {
  if (!op.has_domain()) return {};
  return [&op](const Point& x) { return op.in_domain(x); };
}

void require_positive_radius(double radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("radius must be positive");
}

}  // namespace

std::vector<Point> sample_ball(const LayoutPtr& layout, double radius,
                               std::size_t count, std::uint64_t seed,
                               const DomainPredicate& accept) {
  require_positive_radius(radius);
  Rng rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const auto n = static_cast<Eigen::Index>(layout->dim());
  std::vector<Point> out;
  out.reserve(count);
  const std::size_t budget = 1000 * std::max<std::size_t>(count, 1);
  for (std::size_t draws = 0; out.size() < count; ++draws) {
    if (draws >= budget) {
      throw InsufficientDataError("domain rejects nearly all ball samples");
    }
    Eigen::VectorXd v(n);
    for (Eigen::Index j = 0; j < n; ++j) v[j] = gauss(rng);
    const double len = v.norm();
    if (len == 0.0) continue;
    const double r = radius * std::pow(unif(rng), 1.0 / double(n));
    Point p(layout, (r / len) * v);
    if (accept && !accept(p)) continue;
    out.push_back(std::move(p));
  }
  return out;
}

double estimate_linear_regularity(const NonexpansiveOp& op, double radius,
                                  std::size_t samples, std::uint64_t seed) {
  if (!op.has_fixed_projector()) {
    throw std::invalid_argument(op.name() + " has no fixed-set projector");
  }
  const auto pts =
      sample_ball(BlockLayout::single(op.dim()), radius, samples, seed,
                  op_domain(op));
  double best = 0.0;
  std::size_t used = 0;
  for (const auto& x : pts) {
    const double res = residual(op, x);
    if (res < tol::kResidualFloor) continue;
    best = std::max(best, op.distance_to_fixed(x) / res);
    ++used;
  }
  if (used == 0) {
    throw InsufficientDataError(op.name() +
                                ": every sampled residual is below the floor");
  }
  return best;
}

double estimate_power_regularity(const OperatorSet& ops, double radius,
                                 std::size_t samples, std::uint64_t seed) {
  if (!ops.has_common_projector()) {
    throw std::invalid_argument("power regularity needs the X* projector");
  }
  const RegularityEstimate est = estimate_regularity(ops, radius, samples, seed);
  if (est.nu_used == 0) {
    throw InsufficientDataError("every sampled residual sum is below the floor");
  }
  return est.nu;
}

double estimate_set_regularity(const OperatorSet& ops, double radius,
                               std::size_t samples, std::uint64_t seed) {
  if (!ops.has_common_projector()) {
    throw std::invalid_argument("set regularity needs the X* projector");
  }
  const RegularityEstimate est = estimate_regularity(ops, radius, samples, seed);
  if (est.kappa_0_used == 0) {
    throw InsufficientDataError("every sample lies in all fixed sets");
  }
  return est.kappa_0;
}

RegularityEstimate estimate_regularity(const OperatorSet& ops, double radius,
                                       std::size_t samples, std::uint64_t seed) {
  for (const auto& op : ops.ops()) {
    if (!op.has_fixed_projector()) {
      throw std::invalid_argument(op.name() + " has no fixed-set projector");
    }
  }
  const bool have_common = ops.has_common_projector();
  const auto pts = sample_ball(BlockLayout::single(ops.dim()), radius, samples,
                               seed, joint_domain(ops));

  RegularityEstimate est;
  est.kappa_i.assign(ops.size(), 0.0);
  est.kappa_used.assign(ops.size(), 0);
  est.sample_radius = radius;
  est.sample_count = samples;
  est.seed = seed;

  for (const auto& x : pts) {
    double res_sum = 0.0;
    double max_fixed_dist = 0.0;
    for (std::size_t i = 0; i < ops.size(); ++i) {
      const double res = residual(ops[i], x);
      const double d = ops[i].distance_to_fixed(x);
      res_sum += res;
      max_fixed_dist = std::max(max_fixed_dist, d);
      if (res >= tol::kResidualFloor) {
        est.kappa_i[i] = std::max(est.kappa_i[i], d / res);
        ++est.kappa_used[i];
      }
    }
    if (!have_common) continue;
    const double dstar = ops.distance_to_common(x);
    if (max_fixed_dist >= tol::kResidualFloor) {
      est.kappa_0 = std::max(est.kappa_0, dstar / max_fixed_dist);
      ++est.kappa_0_used;
    }
    if (res_sum >= tol::kResidualFloor) {
      est.nu = std::max(est.nu, dstar / res_sum);
      ++est.nu_used;
    }
  }
  est.kappa_c = *std::max_element(est.kappa_i.begin(), est.kappa_i.end());
  return est;
}

double check_proposition1(const std::vector<double>& kappa, double mu) {
  if (mu < 0.0) throw std::invalid_argument("mu must be nonnegative");
  double kbar = 0.0;
  for (double k : kappa) {
    if (k < 0.0) throw std::invalid_argument("kappa must be nonnegative");
    kbar = std::max(kbar, k);
  }
  return mu * kbar;
}

NonexpansiveReport check_nonexpansive(const NonexpansiveOp& op, double radius,
                                      std::size_t pairs, std::uint64_t seed) {
  const auto layout = BlockLayout::single(op.dim());
  const auto xs = sample_ball(layout, radius, pairs, substream_seed(seed, "x"),
                              op_domain(op));
  const auto ys = sample_ball(layout, radius, pairs, substream_seed(seed, "y"),
                              op_domain(op));
  NonexpansiveReport rep;
  rep.pairs = pairs;
  for (std::size_t s = 0; s < pairs; ++s) {
    const double dx = distance(xs[s], ys[s]);
    const double dt = distance(op.eval(xs[s]), op.eval(ys[s]));
    if (dx > 0.0) rep.worst_ratio = std::max(rep.worst_ratio, dt / dx);
    if (dt > dx * (1.0 + 1e-10)) ++rep.violations;
  }
  return rep;
}

}  // namespace fixnet
