#pragma once

// Iteration engines: centralized inexact KM, the distributed inexact KM
// iteration (every agent mixes its neighbours' estimates, then takes a
// relaxed operator step) and its randomized block-coordinate variant.

#include "fixnet/graph.hpp"
#include "fixnet/hilbert.hpp"
#include "fixnet/operators.hpp"
#include "fixnet/seeds.hpp"
#include "fixnet/trace.hpp"

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace fixnet {

/// alpha_{i,k} = values[i mod rows][k mod cols], every value in
/// [alpha, 1 - alpha] for a floor alpha in (0, 1/2].
class RelaxationSchedule {
 public:
  RelaxationSchedule(double floor, std::vector<std::vector<double>> values);

  static RelaxationSchedule constant(double floor, double value);
  static RelaxationSchedule per_agent(double floor, std::vector<double> values);

  double at(std::size_t agent, std::size_t k) const;
  double floor() const { return floor_; }
  /// alpha_c = sup_{i,k} alpha_{i,k}.
  double cap() const { return cap_; }
  const std::vector<std::vector<double>>& values() const { return values_; }

 private:
  double floor_;
  double cap_ = 0.0;
  std::vector<std::vector<double>> values_;
};

/// Norm schedule for the evaluation errors; directions are uniform on the
/// sphere and drawn from per-agent streams.
class ErrorModel {
 public:
  enum class Kind { zero, geometric, power, custom };

  static ErrorModel zero();
  /// ||eps_k|| = scale * ratio^k, ratio in [0, 1).
  static ErrorModel geometric(double scale, double ratio);
  /// ||eps_k|| = scale * (k + 1)^(-exponent), exponent > 1.
  static ErrorModel power(double scale, double exponent);
  /// ||eps_k|| = norms[k] for k < size, zero afterwards.
  static ErrorModel custom(std::vector<double> norms);

  Kind kind() const { return kind_; }
  std::string kind_name() const;
  double magnitude(std::size_t k) const;
  double scale() const { return scale_; }
  double parameter() const { return param_; }
  const std::vector<double>& norms() const { return norms_; }

  /// sum_k ||eps_k||; finite for every supported kind. With deterministic
  /// norms this equals sum_k sqrt(E ||eps_k||^2).
  double l1_sum() const;
  bool summable() const { return std::isfinite(l1_sum()); }

  Point draw(std::size_t k, const LayoutPtr& layout, Rng& rng) const;

 private:
  Kind kind_ = Kind::zero;
  double scale_ = 0.0;
  double param_ = 0.0;
  std::vector<double> norms_;
};

/// Independent coin flips with P(b_l = 1) = p_l, redrawn until at least one
/// block is active.
class BlockScheme {
 public:
  explicit BlockScheme(std::vector<double> probs);

  const std::vector<double>& probs() const { return probs_; }
  std::size_t blocks() const { return probs_.size(); }
  double p0() const;
  bool always_full() const;

  std::vector<std::uint8_t> draw(Rng& rng) const;
  /// P(b_l = 1) after rejecting the all-zero draw: p_l / (1 - prod_j (1 - p_j)).
  std::vector<double> effective_marginals() const;

 private:
  std::vector<double> probs_;
};

struct NetworkState {
  std::size_t k = 0;
  std::vector<Point> x;
  /// Mixed points of the step that produced x (empty at k = 0).
  std::vector<Point> xhat;
};

/// x + alpha (T(x) + eps - x).
Point km_step(const NonexpansiveOp& op, const Point& x, double alpha,
              const Point& eps);

/// One synchronous round. `eps[i]` is agent i's evaluation error.
NetworkState dikm_step(const OperatorSet& ops, const NetworkState& state,
                       const Eigen::MatrixXd& a, const RelaxationSchedule& sched,
                       const std::vector<Point>& eps);

/// Block-coordinate round; `active[i][l]` selects the blocks agent i updates.
NetworkState dibkm_step(const OperatorSet& ops, const NetworkState& state,
                        const Eigen::MatrixXd& a, const RelaxationSchedule& sched,
                        const std::vector<Point>& eps,
                        const std::vector<std::vector<std::uint8_t>>& active);

enum class EngineKind { km, dikm, dibkm };
std::string to_string(EngineKind e);
EngineKind parse_engine(const std::string& s);

struct Problem {
  const OperatorSet* ops = nullptr;
  const GraphSequence* graph = nullptr;
  RelaxationSchedule schedule = RelaxationSchedule::constant(0.5, 0.5);
  ErrorModel errors = ErrorModel::zero();
  std::optional<BlockScheme> blocks;
  std::vector<Point> initial;
};

struct RunOptions {
  EngineKind engine = EngineKind::dikm;
  std::size_t max_iters = 1000;
  double stop_tolerance = 1e-8;
  std::uint64_t seed = 0;
  /// Repetition index; selects independent error and activation streams.
  std::uint64_t repetition = 0;
  std::size_t mixing_horizon = 0;  // 0: automatic
  bool record_states = false;
  std::string fingerprint;
};

/// Iterates until max_iters or until the largest residual and the largest
/// consensus error are both below stop_tolerance. Throws DivergenceError if
/// a coordinate becomes non-finite or exceeds tol::kDivergence.
RunTrace run(const Problem& problem, const RunOptions& options);

}  // namespace fixnet
