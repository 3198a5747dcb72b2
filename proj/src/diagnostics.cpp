#include "fixnet/diagnostics.hpp"

#include "fixnet/error.hpp"
#include "fixnet/tolerances.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace fixnet {

std::vector<double> running_min(std::span<const double> series) {
  std::vector<double> out;
  out.reserve(series.size());
  double m = std::numeric_limits<double>::infinity();
  for (double v : series) {
    m = std::min(m, v);
    out.push_back(m);
  }
  return out;
}

std::vector<double> running_min_residual(const RunTrace& trace,
                                         std::size_t agent) {
  if (trace.records.empty()) throw InsufficientDataError("empty trace");
  if (agent >= trace.agents) throw ShapeError("agent index out of range");
  const auto col = trace.column_residual(agent);
  return running_min(col);
}

RateCertificate fit_rate(std::span<const double> series, double window,
                         double target, double slack) {
  if (!(window > 0.0 && window <= 1.0)) {
    throw std::invalid_argument("fit window must lie in (0, 1]");
  }
  RateCertificate cert;
  cert.target = target;
  cert.slack = slack;
  if (series.size() < 2) throw InsufficientDataError("series too short to fit");
  const std::size_t last = series.size() - 1;
  const auto first = std::max<std::size_t>(
      1, std::size_t(std::ceil((1.0 - window) * double(last))));
  std::vector<double> xs, ys;
  for (std::size_t k = first; k <= last; ++k) {
    const double r = series[k];
    if (!(r > tol::kRateFloor) || !std::isfinite(r)) continue;
    xs.push_back(std::log(double(k)));
    ys.push_back(std::log(r));
  }
  cert.points = xs.size();
  if (xs.size() < kMinRatePoints) {
    throw InsufficientDataError("only " + std::to_string(xs.size()) +
                                " usable points in the fit window");
  }
  cert.k_first = first;
  cert.k_last = last;
  const double n = double(xs.size());
  double xm = 0.0, ym = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    xm += xs[i];
    ym += ys[i];
  }
  xm /= n;
  ym /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - xm) * (xs[i] - xm);
    sxy += (xs[i] - xm) * (ys[i] - ym);
  }
  const double slope = sxy / sxx;
  const double icpt = ym - slope * xm;
  double ss = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double r = ys[i] - (icpt + slope * xs[i]);
    ss += r * r;
  }
  cert.exponent = -slope;
  cert.constant = std::exp(icpt);
  cert.fit_residual = std::sqrt(ss / n);
  cert.passed = cert.exponent >= target - slack;
  return cert;
}

SubsequenceRateReport subsequence_rate(std::span<const double> m,
                                       std::size_t k_start) {
  if (m.size() <= k_start) {
    throw InsufficientDataError("trace ends before k = " + std::to_string(k_start));
  }
  const std::size_t end = m.size() - 1;
  const std::size_t first_hi = std::min(end, 10 * k_start - 1);
  const std::size_t last_lo = std::max(k_start, end / 10);
  SubsequenceRateReport rep;
  for (std::size_t k = k_start; k <= end; ++k) {
    const double v = std::sqrt(double(k)) * m[k];
    rep.sup_scaled = std::max(rep.sup_scaled, v);
    if (k <= first_hi) rep.first_decade_max = std::max(rep.first_decade_max, v);
    if (k >= last_lo) rep.last_decade_max = std::max(rep.last_decade_max, v);
  }
  rep.bounded = std::isfinite(rep.sup_scaled) &&
                rep.last_decade_max <= 2.0 * rep.first_decade_max;
  return rep;
}

namespace {

void require_finite_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    throw std::invalid_argument(std::string(what) + " must be finite and positive");
  }
}

ConditionReport finish(ConditionReport rep, double raw_bound, double alpha_c,
                       double alpha_floor) {
  rep.alpha_c = alpha_c;
  rep.bound = std::min(raw_bound, 1.0 - alpha_floor);
  rep.margin = rep.bound - alpha_c;
  rep.satisfied = alpha_c < rep.bound;
  return rep;
}

}  // namespace

ConditionReport check_condition17(double kappa_c, double kappa_0, double varpi,
                                  double xi, double pi_floor, double alpha_c,
                                  double alpha_floor, std::size_t agents) {
  require_finite_positive(kappa_c, "kappa_c");
  require_finite_positive(kappa_0, "kappa_0");
  require_finite_positive(varpi, "varpi");
  require_finite_positive(pi_floor, "pi_floor");
  if (!(xi >= 0.0 && xi < 1.0)) throw std::invalid_argument("xi must lie in [0, 1)");
  if (agents == 0) throw std::invalid_argument("agent count must be positive");
  const double n = double(agents);
  const double kk = kappa_c * kappa_0;
  ConditionReport rep;
  rep.gamma2 = 24.0 * n * n * n * varpi * varpi * xi * xi / ((1.0 - xi) * (1.0 - xi)) *
               (2.0 + 1.0 / (4.0 * n * kk * kk));
  const double raw = rep.gamma2 > 0.0
                         ? std::sqrt(pi_floor / (2.0 * n * rep.gamma2)) / (2.0 * kk)
                         : std::numeric_limits<double>::infinity();
  return finish(rep, raw, alpha_c, alpha_floor);
}

ConditionReport check_condition17(const RegularityEstimate& est,
                                  const MixingAnalysis& mix,
                                  const RelaxationSchedule& sched,
                                  std::size_t agents) {
  return check_condition17(est.kappa_c, est.kappa_0, mix.varpi, mix.xi,
                           mix.pi_floor, sched.cap(), sched.floor(), agents);
}

ConditionReport check_condition07(double nu, double varpi, double xi,
                                  double pi_floor, double alpha_c,
                                  double alpha_floor, std::size_t agents,
                                  double p0) {
  require_finite_positive(nu, "nu");
  require_finite_positive(varpi, "varpi");
  require_finite_positive(pi_floor, "pi_floor");
  if (!(p0 > 0.0 && p0 <= 1.0)) throw std::invalid_argument("p0 must lie in (0, 1]");
  if (!(xi >= 0.0 && xi < 1.0)) throw std::invalid_argument("xi must lie in [0, 1)");
  if (agents == 0) throw std::invalid_argument("agent count must be positive");
  const double n = double(agents);
  ConditionReport rep;
  const double raw =
      xi > 0.0 ? p0 * (1.0 - xi) / (4.0 * n * n * varpi * xi) *
                     std::sqrt(pi_floor / (2.0 * (p0 * p0 + 8.0 * n * nu * nu)))
               : std::numeric_limits<double>::infinity();
  if (p0 == 1.0) {
    rep.note = "p0 = 1: every block updates each step, the full-update iteration";
  }
  return finish(rep, raw, alpha_c, alpha_floor);
}

ConditionReport check_condition07(double nu, const MixingAnalysis& mix,
                                  const RelaxationSchedule& sched,
                                  std::size_t agents, double p0) {
  return check_condition07(nu, mix.varpi, mix.xi, mix.pi_floor, sched.cap(),
                           sched.floor(), agents, p0);
}

std::vector<double> consensus_error(const std::vector<Point>& x,
                                    const Eigen::VectorXd& pi) {
  if (x.size() != std::size_t(pi.size())) {
    throw ShapeError("consensus_error: pi and state disagree on agent count");
  }
  std::vector<double> w(pi.data(), pi.data() + pi.size());
  const Point xbar = convex_combine(w, x);
  std::vector<double> out;
  out.reserve(x.size());
  for (const auto& xi : x) out.push_back(distance(xi, xbar));
  return out;
}

double weighted_sq_distance(const OperatorSet& ops, const std::vector<Point>& x,
                            const Eigen::VectorXd& pi) {
  if (x.size() != std::size_t(pi.size())) throw ShapeError("agent count mismatch");
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = ops.distance_to_common(x[i]);
    acc += pi[Eigen::Index(i)] * d * d;
  }
  return acc;
}

SeriesStats series_stats(const std::vector<std::vector<double>>& runs) {
  if (runs.empty()) throw InsufficientDataError("no repetitions");
  std::size_t len = runs.front().size();
  for (const auto& r : runs) len = std::min(len, r.size());
  const double n = double(runs.size());
  SeriesStats s;
  s.mean.assign(len, 0.0);
  s.std_error.assign(len, 0.0);
  for (std::size_t k = 0; k < len; ++k) {
    double m = 0.0;
    for (const auto& r : runs) m += r[k];
    m /= n;
    double v = 0.0;
    for (const auto& r : runs) v += (r[k] - m) * (r[k] - m);
    s.mean[k] = m;
    s.std_error[k] = runs.size() > 1 ? std::sqrt(v / (n - 1.0) / n) : 0.0;
  }
  return s;
}

}  // namespace fixnet
