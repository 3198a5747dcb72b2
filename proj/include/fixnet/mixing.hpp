#pragma once

// Absorption vectors pi_k of a graph sequence (the common row limit of the
// backward products A^{s:k}) and the empirical geometric mixing constants.

#include "fixnet/graph.hpp"

#include <Eigen/Core>

#include <cstddef>
#include <map>
#include <vector>

namespace fixnet {

struct MixingAnalysis {
  std::vector<Eigen::VectorXd> pi;  // pi[k] for k = 0..k_max
  double varpi = 0.0;               // fitted prefactor
  double xi = 0.0;                  // fitted geometric rate in (0, 1)
  double pi_floor = 0.0;            // min over k, l of pi_{l,k}
  std::size_t horizon = 0;
  // Least-squares diagnostics of log max|a^{s:k}_ij - pi_jk| vs (s - k).
  double fit_residual = 0.0;  // RMS residual in log space
  std::size_t fit_points = 0;
  /// Backward products agree to the fit floor after one step; xi is then the
  /// floor itself and varpi is 1.
  bool exact_mixing = false;
  double pi_floor_bound = 0.0;  // a^{Q(N-1)}
  double max_stationarity_error = 0.0;  // max_k ||pi_k' - pi_{k+1}' A_k||_inf
  double max_sum_error = 0.0;           // max_k |1' pi_k - 1|
};

/// Deviations below this are excluded from the (varpi, xi) fit: the row
/// limit itself is only resolved to tol::kContraction.
inline constexpr double kMixingFitFloor = 1e-8;

/// pi_k for k = 0..k_max from A^{k+horizon:k}, each computed directly.
/// Throws ValidationError when the rows of some A^{k+horizon:k} still differ
/// by more than tol::kContraction.
MixingAnalysis compute_mixing(const GraphSequence& g, std::size_t k_max,
                              std::size_t horizon);

/// Smallest power-of-two horizon (>= 16, <= 2^16) after which the backward
/// products from the first few starting steps have contracted.
std::size_t contraction_horizon(const GraphSequence& g);

/// pi_k on demand for long runs. Periodic sequences are resolved once per
/// period; otherwise pi is computed chunk-wise: the chunk's last vector from a
/// backward product, earlier ones by pi_k = A_k' pi_{k+1}.
class AbsorptionTracker {
 public:
  explicit AbsorptionTracker(const GraphSequence& g, std::size_t horizon = 0);

  const Eigen::VectorXd& at(std::size_t k);
  std::size_t horizon() const { return horizon_; }

  static constexpr std::size_t kChunk = 1024;

 private:
  Eigen::VectorXd row_limit(std::size_t k) const;

  const GraphSequence& g_;
  std::size_t horizon_;
  std::vector<Eigen::VectorXd> periodic_;
  std::map<std::size_t, std::vector<Eigen::VectorXd>> chunks_;
};

}  // namespace fixnet
