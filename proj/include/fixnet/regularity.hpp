#pragma once

// Sampling-based estimates of the regularity constants. Each constant is the
// maximum of its defining ratio over points drawn uniformly from the ball
// B(0; radius) (intersected with the operators' domain, when restricted).
// Samples whose denominator falls below tol::kResidualFloor are skipped.

#include "fixnet/operators.hpp"

#include <cstdint>
#include <vector>

namespace fixnet {

struct RegularityEstimate {
  std::vector<double> kappa_i;  // d_{Fix F_i}(x) <= kappa_i ||x - F_i(x)||
  double kappa_0 = 0.0;         // d_{X*}(x) <= kappa_0 max_i d_{Fix F_i}(x)
  double kappa_c = 0.0;         // max_i kappa_i
  double nu = 0.0;              // d_{X*}(x) <= nu sum_i ||x - F_i(x)||
  double sample_radius = 0.0;
  std::size_t sample_count = 0;
  std::uint64_t seed = 0;
  /// Per-operator count of samples that contributed to kappa_i.
  std::vector<std::size_t> kappa_used;
  std::size_t kappa_0_used = 0;
  std::size_t nu_used = 0;
};

/// Draws `count` points uniformly from B(0; radius) in R^dim that satisfy
/// `accept` (rejection sampling; gives up after 1000 * count draws).
std::vector<Point> sample_ball(const LayoutPtr& layout, double radius,
                               std::size_t count, std::uint64_t seed,
                               const DomainPredicate& accept = {});

double estimate_linear_regularity(const NonexpansiveOp& op, double radius,
                                  std::size_t samples, std::uint64_t seed);

double estimate_power_regularity(const OperatorSet& ops, double radius,
                                 std::size_t samples, std::uint64_t seed);

/// Set-collection constant (kappa_0) alone.
double estimate_set_regularity(const OperatorSet& ops, double radius,
                               std::size_t samples, std::uint64_t seed);

/// All constants on one shared sample set. Operators with no usable sample
/// (residual below the floor everywhere) get kappa_i = 0.
RegularityEstimate estimate_regularity(const OperatorSet& ops, double radius,
                                       std::size_t samples, std::uint64_t seed);

/// Power-regularity constant implied by per-operator constants and the
/// set-collection constant: mu * max_i kappa_i.
double check_proposition1(const std::vector<double>& kappa, double mu);

struct NonexpansiveReport {
  std::size_t pairs = 0;
  std::size_t violations = 0;
  double worst_ratio = 0.0;  // max ||Tx - Ty|| / ||x - y||
};

/// ||T(x) - T(y)|| <= ||x - y|| (1 + 1e-10) over random pairs in the ball.
NonexpansiveReport check_nonexpansive(const NonexpansiveOp& op, double radius,
                                      std::size_t pairs, std::uint64_t seed);

}  // namespace fixnet
