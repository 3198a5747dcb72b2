#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace fixnet {

/// Diagnostics for one iteration index k. Per-agent vectors have length N.
struct TraceRecord {
  std::size_t k = 0;
  std::vector<double> residual;    // ||F_i(x_ik) - x_ik||
  std::vector<double> consensus;   // ||x_ik - xbar_k||, xbar_k = sum_i pi_ik x_ik
  std::vector<double> distance;    // d_{X*}(x_ik); empty without the oracle
  std::vector<double> error_norm;  // ||eps_ik|| applied in the step k -> k+1
  double d2 = 0.0;                 // sum_i pi_ik d_{X*}(x_ik)^2
  double max_residual = 0.0;
  double max_consensus = 0.0;
  double weighted_d2 = 0.0;  // sum_i pi_ik |||x_ik - q_k|||^2 (block runs)
};

/// Full iterate history, kept only when requested (tests, lemma checks).
struct StepLog {
  std::vector<std::vector<Eigen::VectorXd>> states;  // per record: x_ik
  std::vector<Eigen::VectorXd> pi;                   // per record: pi_k
  // Per step k -> k+1:
  std::vector<std::vector<Eigen::VectorXd>> mixed;   // xhat_ik
  std::vector<std::vector<Eigen::VectorXd>> errors;  // eps_ik
  std::vector<std::vector<double>> alphas;           // alpha_ik
  std::vector<std::vector<std::vector<std::uint8_t>>> activations;
};

struct RunTrace {
  std::size_t agents = 0;
  bool has_distance = false;
  bool has_weighted = false;
  std::vector<TraceRecord> records;
  std::string stop_reason;  // "converged" or "budget"
  std::string fingerprint;
  StepLog log;

  std::size_t size() const { return records.size(); }
  std::vector<double> column_max_residual() const;
  std::vector<double> column_max_consensus() const;
  std::vector<double> column_d2() const;
  std::vector<double> column_weighted_d2() const;
  std::vector<double> column_residual(std::size_t agent) const;
};

inline constexpr int kTraceFormatVersion = 1;

/// Delimited trace: a version line, a column-name line, one row per record.
/// Column order: k; residual_i; consensus_i; distance_i; error_i; d2;
/// max_residual; then max_consensus and (block runs) weighted_d2.
/// Distance columns and d2 are omitted without the X* oracle.
void write_trace(std::ostream& out, const RunTrace& trace);
RunTrace read_trace(std::istream& in);

std::vector<std::string> trace_columns(const RunTrace& trace);

}  // namespace fixnet
