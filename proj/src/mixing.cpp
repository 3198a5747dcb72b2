#include "fixnet/mixing.hpp"

#include "fixnet/error.hpp"
#include "fixnet/tolerances.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace fixnet {
namespace {

double row_disagreement(const Eigen::MatrixXd& p) {
  const Eigen::RowVectorXd hi = p.colwise().maxCoeff();
  const Eigen::RowVectorXd lo = p.colwise().minCoeff();
  return (hi - lo).maxCoeff();
}

Eigen::VectorXd row_mean(const Eigen::MatrixXd& p) {
  return p.colwise().mean().transpose();
}

}  // namespace

MixingAnalysis compute_mixing(const GraphSequence& g, std::size_t k_max,
                              std::size_t horizon) {
  if (horizon == 0) throw std::invalid_argument("mixing horizon must be positive");
  const Eigen::Index n = Eigen::Index(g.agents());
  MixingAnalysis out;
  out.horizon = horizon;
  out.pi.reserve(k_max + 1);

  std::vector<double> ts, logs;
  // Products for the fit are cached so the deviation from pi_k is measured
  // against the final row limit.
  std::vector<Eigen::MatrixXd> partial(horizon);
  for (std::size_t k = 0; k <= k_max; ++k) {
    Eigen::MatrixXd p = Eigen::MatrixXd::Identity(n, n);
    for (std::size_t t = 1; t <= horizon; ++t) {
      p = g.matrix(k + t - 1) * p;
      partial[t - 1] = p;
    }
    if (row_disagreement(p) > tol::kContraction) {
      std::ostringstream msg;
      msg << "backward products from k=" << k << " have not contracted within "
          << horizon << " steps";
      throw ValidationError(msg.str());
    }
    Eigen::VectorXd pi = row_mean(p);
    for (std::size_t t = 1; t <= horizon; ++t) {
      const Eigen::MatrixXd dev =
          (partial[t - 1].rowwise() - pi.transpose()).cwiseAbs();
      const double d = dev.maxCoeff();
      if (d <= kMixingFitFloor) break;
      ts.push_back(double(t));
      logs.push_back(std::log(d));
    }
    out.pi.push_back(std::move(pi));
  }

  // Least squares: log d = log varpi + t log xi.
  out.fit_points = ts.size();
  bool have_slope = false;
  if (ts.size() >= 2) {
    const double tm = std::accumulate(ts.begin(), ts.end(), 0.0) / double(ts.size());
    const double lm = std::accumulate(logs.begin(), logs.end(), 0.0) / double(ts.size());
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < ts.size(); ++i) {
      sxx += (ts[i] - tm) * (ts[i] - tm);
      sxy += (ts[i] - tm) * (logs[i] - lm);
    }
    if (sxx > 0.0) {
      const double slope = sxy / sxx;
      const double icpt = lm - slope * tm;
      out.xi = std::exp(slope);
      out.varpi = std::exp(icpt);
      double ss = 0.0;
      for (std::size_t i = 0; i < ts.size(); ++i) {
        const double r = logs[i] - (icpt + slope * ts[i]);
        ss += r * r;
      }
      out.fit_residual = std::sqrt(ss / double(ts.size()));
      have_slope = true;
    }
  }
  if (!have_slope) {
    out.exact_mixing = true;
    out.xi = kMixingFitFloor;
    out.varpi = 1.0;
  }
  if (!(out.xi < 1.0)) {
    throw ValidationError("fitted mixing rate is not below 1");
  }

  out.pi_floor = 1.0;
  for (const auto& pi : out.pi) {
    out.pi_floor = std::min(out.pi_floor, pi.minCoeff());
    out.max_sum_error = std::max(out.max_sum_error, std::abs(pi.sum() - 1.0));
  }
  for (std::size_t k = 0; k + 1 < out.pi.size(); ++k) {
    const Eigen::RowVectorXd lhs = out.pi[k].transpose();
    const Eigen::RowVectorXd rhs = out.pi[k + 1].transpose() * g.matrix(k);
    out.max_stationarity_error =
        std::max(out.max_stationarity_error, (lhs - rhs).cwiseAbs().maxCoeff());
  }
  out.pi_floor_bound = std::pow(g.weight_floor(),
                                double(g.window()) * double(g.agents() - 1));
  return out;
}

std::size_t contraction_horizon(const GraphSequence& g) {
  const Eigen::Index n = Eigen::Index(g.agents());
  const std::size_t starts = std::max<std::size_t>(4, g.period().value_or(4));
  for (std::size_t h = 16; h <= (std::size_t{1} << 16); h *= 2) {
    bool ok = true;
    for (std::size_t k = 0; k < starts && ok; ++k) {
      Eigen::MatrixXd p = Eigen::MatrixXd::Identity(n, n);
      for (std::size_t t = 0; t < h; ++t) p = g.matrix(k + t) * p;
      ok = row_disagreement(p) <= 1e-3 * tol::kContraction;
    }
    if (ok) return h;
  }
  throw ValidationError("backward products do not contract within 65536 steps");
}

AbsorptionTracker::AbsorptionTracker(const GraphSequence& g, std::size_t horizon)
    : g_(g), horizon_(horizon == 0 ? contraction_horizon(g) : horizon) {
  if (auto period = g_.period()) {
    periodic_.reserve(*period);
    for (std::size_t k = 0; k < *period; ++k) periodic_.push_back(row_limit(k));
  }
}

Eigen::VectorXd AbsorptionTracker::row_limit(std::size_t k) const {
  return row_mean(backward_product(g_, k + horizon_, k));
}

const Eigen::VectorXd& AbsorptionTracker::at(std::size_t k) {
  if (!periodic_.empty()) return periodic_[k % periodic_.size()];
  const std::size_t c = k / kChunk;
  auto it = chunks_.find(c);
  if (it == chunks_.end()) {
    // Runs advance monotonically; older chunks are no longer needed.
    while (!chunks_.empty() && chunks_.begin()->first + 1 < c) {
      chunks_.erase(chunks_.begin());
    }
    std::vector<Eigen::VectorXd> chunk(kChunk);
    const std::size_t first = c * kChunk;
    chunk[kChunk - 1] = row_limit(first + kChunk - 1);
    for (std::size_t j = kChunk - 1; j > 0; --j) {
      chunk[j - 1] = g_.matrix(first + j - 1).transpose() * chunk[j];
    }
    it = chunks_.emplace(c, std::move(chunk)).first;
  }
  return it->second[k - c * kChunk];
}

}  // namespace fixnet
