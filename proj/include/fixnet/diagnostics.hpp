#pragma once

#include "fixnet/engine.hpp"
#include "fixnet/mixing.hpp"
#include "fixnet/regularity.hpp"
#include "fixnet/trace.hpp"

#include <span>
#include <string>
#include <vector>

namespace fixnet {

/// m_k = min_{l <= k} r_l.
std::vector<double> running_min(std::span<const double> series);
std::vector<double> running_min_residual(const RunTrace& trace, std::size_t agent);

/// r_k ~ C k^(-e) fitted by least squares of log r_k on log k over the
/// trailing window of the series (index = k), skipping k = 0 and values at or
/// below tol::kRateFloor.
struct RateCertificate {
  double exponent = 0.0;
  double constant = 0.0;
  double target = 0.0;
  double slack = 0.0;
  double fit_residual = 0.0;  // RMS in log space
  std::size_t points = 0;
  std::size_t k_first = 0;
  std::size_t k_last = 0;
  bool passed = false;  // exponent >= target - slack
};

inline constexpr std::size_t kMinRatePoints = 20;

RateCertificate fit_rate(std::span<const double> series, double window = 0.5,
                         double target = 0.0, double slack = 0.1);

/// sqrt(k) m_k over k >= k_start, compared between the first decade
/// [k_start, 10 k_start) and the last decade [end / 10, end].
struct SubsequenceRateReport {
  double sup_scaled = 0.0;
  double first_decade_max = 0.0;
  double last_decade_max = 0.0;
  bool bounded = false;  // last_decade_max <= 2 * first_decade_max
};

SubsequenceRateReport subsequence_rate(std::span<const double> running_min,
                                       std::size_t k_start = 100);

struct ConditionReport {
  double bound = 0.0;  // admissible upper limit for alpha_c
  double alpha_c = 0.0;
  double margin = 0.0;  // bound - alpha_c
  bool satisfied = false;
  double gamma2 = 0.0;  // step-size condition for full updates only
  std::string note;
};

/// Full-update step-size condition with
///   gamma2 = 24 N^3 varpi^2 xi^2 / (1 - xi)^2 * (2 + 1 / (4 N kc^2 k0^2)),
///   bound  = min{ sqrt(pi_min / (2 N gamma2)) / (2 kc k0), 1 - alpha }.
ConditionReport check_condition17(double kappa_c, double kappa_0, double varpi,
                                  double xi, double pi_floor, double alpha_c,
                                  double alpha_floor, std::size_t agents);
ConditionReport check_condition17(const RegularityEstimate& est,
                                  const MixingAnalysis& mix,
                                  const RelaxationSchedule& sched,
                                  std::size_t agents);

/// Block-coordinate step-size condition:
///   bound = min{ p0 (1 - xi) / (4 N^2 varpi xi)
///                * sqrt(pi_min / (2 (p0^2 + 8 N nu^2))), 1 - alpha }.
ConditionReport check_condition07(double nu, double varpi, double xi,
                                  double pi_floor, double alpha_c,
                                  double alpha_floor, std::size_t agents,
                                  double p0);
ConditionReport check_condition07(double nu, const MixingAnalysis& mix,
                                  const RelaxationSchedule& sched,
                                  std::size_t agents, double p0);

/// ||x_i - sum_j pi_j x_j|| per agent.
std::vector<double> consensus_error(const std::vector<Point>& x,
                                    const Eigen::VectorXd& pi);

/// sum_i pi_i d_{X*}(x_i)^2 recomputed from raw states.
double weighted_sq_distance(const OperatorSet& ops, const std::vector<Point>& x,
                            const Eigen::VectorXd& pi);

/// Pointwise mean and standard error over repetitions, truncated to the
/// shortest series.
struct SeriesStats {
  std::vector<double> mean;
  std::vector<double> std_error;
};
SeriesStats series_stats(const std::vector<std::vector<double>>& runs);

}  // namespace fixnet
