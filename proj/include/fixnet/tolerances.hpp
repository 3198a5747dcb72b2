#pragma once

namespace fixnet::tol {

// Weight sums and row sums.
inline constexpr double kSumAbs = 1e-12;
// Identity checks (fixed-set consistency, algebraic identities).
inline constexpr double kIdentityAbs = 1e-10;
inline constexpr double kIdentityRel = 1e-10;
// Residual floor for regularity ratios; avoids 0/0.
inline constexpr double kResidualFloor = 1e-9;
// Values below this are treated as floating-point noise in rate fits.
inline constexpr double kRateFloor = 1e-14;
// Backward products are considered contracted below this row disagreement.
inline constexpr double kContraction = 1e-10;
// Divergence guard on coordinate magnitude.
inline constexpr double kDivergence = 1e12;
// Slack on fitted rate exponents.
inline constexpr double kExponentSlack = 0.1;

}  // namespace fixnet::tol
