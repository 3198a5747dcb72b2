#pragma once

// Time-varying digraph sequences given by their row-stochastic weight
// matrices A_k. Entry a_ij > 0 means agent i hears agent j at step k.

#include <Eigen/Core>

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace fixnet {

class GraphSequence {
 public:
  using Generator = std::function<Eigen::MatrixXd(std::size_t k)>;

  /// `window` is the declared joint-connectivity window Q and `weight_floor`
  /// the declared lower bound on nonzero weights; both are checked, not
  /// trusted, by check_assumption1.
  GraphSequence(std::size_t agents, Generator generator, std::size_t window,
                double weight_floor, std::string description,
                std::optional<std::size_t> period = std::nullopt);

  Eigen::MatrixXd matrix(std::size_t k) const;

  std::size_t agents() const { return agents_; }
  std::size_t window() const { return window_; }
  double weight_floor() const { return weight_floor_; }
  const std::string& description() const { return description_; }
  /// Set when A_{k + period} == A_k for all k.
  std::optional<std::size_t> period() const { return period_; }

 private:
  std::size_t agents_;
  Generator generator_;
  std::size_t window_;
  double weight_floor_;
  std::string description_;
  std::optional<std::size_t> period_;
};

/// Row-uniform weights over each row's support, with self-loops added.
Eigen::MatrixXd uniform_weights(const Eigen::MatrixXd& adjacency);

namespace graphs {

GraphSequence static_graph(Eigen::MatrixXd a, std::size_t window = 1);
/// Equal weights 1/N everywhere.
GraphSequence complete(std::size_t agents);
/// At step k the single edge (k mod N) -> (k+1 mod N) is active on top of the
/// self-loops. The union over any N consecutive steps is a directed cycle.
GraphSequence rotating(std::size_t agents);
/// Cycles through the given matrices; default window is the period.
GraphSequence periodic(std::vector<Eigen::MatrixXd> matrices,
                       std::optional<std::size_t> window = std::nullopt);
/// Consecutive blocks of T steps each use a seeded random permutation of the
/// T adjacency templates (uniform weights, self-loops added). If the union of
/// all templates is strongly connected, every window of 2T - 1 steps contains
/// a full block, hence Q = 2T - 1.
GraphSequence random_pool(std::vector<Eigen::MatrixXd> templates,
                          std::uint64_t seed);

}  // namespace graphs

struct Assumption1Report {
  bool pass = true;
  std::optional<std::size_t> first_violation;
  std::string rule;     // which requirement failed
  std::string message;  // human-readable detail
};

/// Checks k = 0..horizon: row-stochastic, nonnegative, positive diagonal,
/// nonzero entries at least the declared floor, and strong connectivity of
/// the union of G_{k+1}..G_{k+Q}.
Assumption1Report check_assumption1(const GraphSequence& g, std::size_t horizon);

/// Strong connectivity of the digraph whose edges are the nonzero entries.
bool strongly_connected(const Eigen::MatrixXd& support);

/// A_{s-1} ... A_k, the identity when s == k.
Eigen::MatrixXd backward_product(const GraphSequence& g, std::size_t s,
                                 std::size_t k);

/// Matrix-list export: header line, then one line per step with k followed
/// by the N*N entries in row-major order.
void write_matrix_list(std::ostream& out, const GraphSequence& g,
                       std::size_t last_k);
std::vector<Eigen::MatrixXd> read_matrix_list(std::istream& in);

}  // namespace fixnet
