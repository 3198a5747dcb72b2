#pragma once

// Property checks for the auxiliary inequalities and identities the
// convergence analysis relies on. Each check counts violations over its
// sample set; a check passes with zero violations.

#include <cstdint>
#include <string>
#include <vector>

namespace fixnet {

struct PropertyResult {
  std::string name;
  std::size_t samples = 0;
  std::size_t violations = 0;
  double worst_margin = 0.0;  // min over samples of (rhs - lhs); negative = violated
  std::string detail;
  bool pass() const { return samples > 0 && violations == 0; }
};

/// ||A (x) B|| <= n a_max ||B|| for random row-stochastic A and square B.
PropertyResult check_kronecker_bound(std::size_t trials, std::uint64_t seed);

/// 2<y - z, y - T(y)> >= ||T(y) - y||^2 with z = P_Fix(T)(y), over every
/// catalog operator that is nonexpansive and has a fixed-set projector.
PropertyResult check_fixed_point_inner_product(std::size_t samples_per_op,
                                               std::uint64_t seed);

/// ||F_i(x_{k+1}) - x_{k+1}|| <= ||F_i(xhat_k) - xhat_k|| + 2 alpha ||eps||
/// at every step of inexact distributed runs on the preset scenarios.
PropertyResult check_residual_recursion(std::uint64_t seed);

/// ||r x + (1 - r) y||^2 = r||x||^2 + (1 - r)||y||^2 - r(1 - r)||x - y||^2
/// for r in [-2, 2], relative tolerance 1e-10.
PropertyResult check_convex_identity(std::size_t samples, std::uint64_t seed);

/// Block-coordinate step at a fixed state: over `draws` activation/error
/// draws, mean |||F_i(x+) - x+|||^2 <= 4 |||F_i(xhat) - xhat|||^2
/// + 16 alpha^2 mean |||eps|||^2 + 3 standard errors.
PropertyResult check_block_residual_bound(std::size_t draws, std::uint64_t seed);

/// sum_i pi_{i,k+1} ||x_{i,k+1} - x*|| <= sum_j pi_{j,k} ||x_{j,k} - x*||
///   + sum_i pi_{i,k+1} alpha_{i,k} ||eps_{i,k}|| along inexact runs.
PropertyResult check_fejer_surrogate(std::uint64_t seed);

/// Error-free runs started at a common point of X* never move.
PropertyResult check_solution_stationarity(std::uint64_t seed);

std::vector<PropertyResult> run_lemma_suite(std::uint64_t seed);

}  // namespace fixnet
