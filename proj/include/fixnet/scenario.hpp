#pragma once

// Preset and inline experiment scenarios. A scenario is described by a JSON
// document (see docs/config.md) and built into immutable runtime objects.

#include "fixnet/engine.hpp"
#include "fixnet/graph.hpp"
#include "fixnet/json_fields.hpp"
#include "fixnet/operators.hpp"
#include "fixnet/regularity.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace fixnet {

struct ValidationSettings {
  double radius = 10.0;
  std::size_t pairs = 10000;        // nonexpansiveness property test
  std::size_t samples = 2000;       // fixed-set consistency / regularity
  std::size_t domain_starts = 1000; // domain-restricted operators
  std::size_t horizon = 0;          // graph check span; 0 picks one from Q
};

/// Closed convex set with a closed-form projection, used by feasibility
/// scenarios.
struct SetSpec {
  enum class Kind { halfspace, ball, box, affine };
  Kind kind = Kind::halfspace;
  Eigen::VectorXd a;   // halfspace normal / ball center / box lower bound
  double b = 0.0;      // halfspace offset / ball radius
  Eigen::VectorXd hi;  // box upper bound
  Eigen::MatrixXd mat; // affine: A
  Eigen::VectorXd rhs; // affine: b

  static SetSpec halfspace(Eigen::VectorXd a, double b);
  static SetSpec ball(Eigen::VectorXd center, double radius);
  static SetSpec box(Eigen::VectorXd lo, Eigen::VectorXd hi);
  static SetSpec affine(Eigen::MatrixXd a, Eigen::VectorXd b);

  Json to_json() const;
  /// Strictly inside the set by at least `margin`.
  bool interior(const Eigen::VectorXd& x, double margin) const;
  bool contains(const Eigen::VectorXd& x, double slack) const;
  double distance(const Eigen::VectorXd& x) const;
};

class Scenario {
 public:
  const std::string& name() const { return name_; }
  /// Canonical JSON description; rebuilding from it with the same seed
  /// reproduces the scenario.
  const Json& spec() const { return spec_; }
  std::uint64_t seed() const { return seed_; }

  const OperatorSet& ops() const { return ops_; }
  const GraphSequence& graph() const { return graph_; }
  const RelaxationSchedule& schedule() const { return schedule_; }
  const ErrorModel& errors() const { return errors_; }
  const std::optional<BlockScheme>& blocks() const { return blocks_; }
  const LayoutPtr& layout() const { return layout_; }
  const std::vector<Point>& initial() const { return initial_; }
  std::size_t agents() const { return ops_.size(); }

  /// Sets of a feasibility scenario (empty otherwise).
  const std::vector<SetSpec>& sets() const { return sets_; }
  /// Witness of S_m intersected with the interior of S_1..S_{m-1}, if found.
  const std::optional<Eigen::VectorXd>& interior_witness() const {
    return witness_;
  }
  /// Declared hypotheses ("assumption2", ...) the scenario intends to meet.
  const std::vector<std::string>& expects() const { return expects_; }
  const ValidationSettings& validation() const { return validation_; }

  Problem problem() const;

 private:
  friend Scenario build_scenario(const Json& spec, std::uint64_t seed);
  Scenario(OperatorSet ops, GraphSequence graph, RelaxationSchedule schedule,
           ErrorModel errors);

  std::string name_;
  Json spec_;
  std::uint64_t seed_ = 0;
  OperatorSet ops_;
  GraphSequence graph_;
  RelaxationSchedule schedule_;
  ErrorModel errors_;
  std::optional<BlockScheme> blocks_;
  LayoutPtr layout_;
  std::vector<Point> initial_;
  std::vector<SetSpec> sets_;
  std::optional<Eigen::VectorXd> witness_;
  std::vector<std::string> expects_;
  ValidationSettings validation_;
};

/// Builds runtime objects from a scenario document. Unknown keys and
/// malformed values raise ConfigError; structurally invalid content (bad
/// relaxation parameters, inconsistent systems, ...) raises ValidationError.
Scenario build_scenario(const Json& spec, std::uint64_t seed);

/// Scenario document for a named preset. `params` tunes preset-specific
/// knobs (e.g. "dimension" for the feasibility presets).
Json preset_spec(const std::string& name, const Json& params = Json::object());
std::vector<std::string> preset_names();

/// Resolves {"preset": name, "params": {...}, "overrides": {...}} (overrides
/// are a JSON merge patch on the preset document) or an inline document.
Json resolve_scenario_spec(const Json& ref);

Json graph_spec_json(const std::string& type, const Json& params = Json::object());

/// Row blocks are split contiguously and as evenly as possible over N agents;
/// agent i holds F_i(x) = x - A_i^T (A_i x - b_i) / sigma_i.
Scenario build_linear_equation_scenario(const Eigen::MatrixXd& a,
                                        const Eigen::VectorXd& b,
                                        std::size_t agents,
                                        const Json& graph_spec,
                                        std::uint64_t seed = 0);

/// One set per agent, F_i = P_{S_i}.
Scenario build_feasibility_scenario(const std::vector<SetSpec>& sets,
                                    std::size_t agents, const Json& graph_spec,
                                    std::uint64_t seed = 0);

/// T_1(x) = x^2 and T_2 = P_[0, 1/2] on [0, 1); X* = {0}.
Scenario build_example1_scenario(std::uint64_t seed = 0);

struct ValidationEntry {
  std::string check;
  bool pass = true;
  std::string detail;
};

struct ValidationReport {
  bool pass = true;
  std::vector<ValidationEntry> entries;
  std::optional<RegularityEstimate> regularity;
};

/// Joint connectivity, nonexpansiveness, fixed-set oracle consistency,
/// domain invariance and (when declared) regularity estimates.
ValidationReport validate_scenario(const Scenario& s);

}  // namespace fixnet
