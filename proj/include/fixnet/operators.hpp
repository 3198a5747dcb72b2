#pragma once

// Catalog of nonexpansive operators with optional exact fixed-set projectors.

#include "fixnet/hilbert.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace fixnet {

using PointMap = std::function<Point(const Point&)>;
using DomainPredicate = std::function<bool(const Point&)>;

class NonexpansiveOp {
 public:
  NonexpansiveOp(std::string name, std::size_t dim, PointMap map);

  /// Attach P_{Fix(T)}; enables distance-to-fixed-set queries.
  NonexpansiveOp& with_fixed_projector(PointMap projector);
  /// Restrict the domain; evaluating outside raises DomainError.
  NonexpansiveOp& with_domain(DomainPredicate domain, std::string description);
  /// Mark an operator that is not globally nonexpansive on its domain
  /// (kept in the catalog for regularity experiments). Validation skips the
  /// nonexpansiveness property for it and reports the exemption.
  NonexpansiveOp& exempt_from_nonexpansive_check();

  const std::string& name() const { return name_; }
  std::size_t dim() const { return dim_; }

  Point operator()(const Point& x) const { return eval(x); }
  Point eval(const Point& x) const;

  bool in_domain(const Point& x) const { return !domain_ || domain_(x); }
  bool has_domain() const { return static_cast<bool>(domain_); }
  const std::string& domain_description() const { return domain_text_; }

  bool has_fixed_projector() const { return static_cast<bool>(projector_); }
  Point project_fixed(const Point& x) const;
  double distance_to_fixed(const Point& x) const;

  bool checked_nonexpansive() const { return check_nonexpansive_; }

 private:
  void require_dim(const Point& x) const;

  std::string name_;
  std::size_t dim_;
  PointMap map_;
  PointMap projector_;
  DomainPredicate domain_;
  std::string domain_text_;
  bool check_nonexpansive_ = true;
};

/// The N agents' operators plus the optional projector onto X* = common fixed
/// points, which serves as the distance oracle for diagnostics.
class OperatorSet {
 public:
  explicit OperatorSet(std::vector<NonexpansiveOp> ops,
                       PointMap common_projector = {});

  std::size_t size() const { return ops_.size(); }
  std::size_t dim() const { return ops_.front().dim(); }
  const NonexpansiveOp& operator[](std::size_t i) const { return ops_.at(i); }
  const std::vector<NonexpansiveOp>& ops() const { return ops_; }

  bool has_common_projector() const { return static_cast<bool>(common_); }
  Point project_common(const Point& x) const;
  double distance_to_common(const Point& x) const;

 private:
  std::vector<NonexpansiveOp> ops_;
  PointMap common_;
};

/// x -> (1 - alpha) x + alpha T(x), alpha in (0, 1). Shares Fix(T).
NonexpansiveOp averaged(const NonexpansiveOp& op, double alpha);

/// ||T(x) - x||.
double residual(const NonexpansiveOp& op, const Point& x);

/// {y : A y = b}, projection by minimum-norm correction.
class AffineSet {
 public:
  AffineSet(Eigen::MatrixXd a, Eigen::VectorXd b);

  bool consistent() const { return consistent_; }
  Eigen::VectorXd project(const Eigen::VectorXd& x) const;
  const Eigen::MatrixXd& matrix() const { return a_; }
  const Eigen::VectorXd& rhs() const { return b_; }

 private:
  Eigen::MatrixXd a_;
  Eigen::VectorXd b_;
  Eigen::MatrixXd pinv_;
  bool consistent_ = true;
};

/// Exact Euclidean projection onto {y : A_eq y = b_eq, A_in y <= b_in} by
/// active-set enumeration. Intended for a handful of inequalities.
class PolyhedralProjector {
 public:
  PolyhedralProjector(Eigen::MatrixXd a_in, Eigen::VectorXd b_in,
                      Eigen::MatrixXd a_eq = {}, Eigen::VectorXd b_eq = {});

  Eigen::VectorXd project(const Eigen::VectorXd& x) const;
  bool contains(const Eigen::VectorXd& x, double slack = 1e-12) const;
  /// False if no candidate face is feasible, i.e. the polyhedron is empty.
  bool nonempty() const;

  static constexpr std::size_t kMaxInequalities = 12;

 private:
  Eigen::MatrixXd a_in_;
  Eigen::VectorXd b_in_;
  std::vector<AffineSet> faces_;  // indexed by subset mask of inequalities
};

namespace ops {

NonexpansiveOp identity(std::size_t n);
/// x -> -x; Fix = {0}.
NonexpansiveOp negation(std::size_t n);
/// Projection onto {x : a.x <= b}.
NonexpansiveOp halfspace(Eigen::VectorXd a, double b);
NonexpansiveOp ball(Eigen::VectorXd center, double radius);
NonexpansiveOp box(Eigen::VectorXd lo, Eigen::VectorXd hi);
/// Projection onto {x : A x = b}.
NonexpansiveOp affine(Eigen::MatrixXd a, Eigen::VectorXd b);
/// x -> x - A^T (A x - b) / sigma with sigma = largest squared singular value
/// of A. Fix = {x : A x = b} when the block is consistent.
NonexpansiveOp linear_equation(Eigen::MatrixXd a, Eigen::VectorXd b);
/// x -> x - step (Q x + c), the gradient step for f = x'Qx/2 + c'x with Q
/// symmetric positive semidefinite; nonexpansive for 0 < step <= 2/L.
NonexpansiveOp gradient_quadratic(Eigen::MatrixXd q, Eigen::VectorXd c,
                                  double step);

// Example pair on the half-open domain [0, 1) of the real line.
NonexpansiveOp example1_square();
NonexpansiveOp example1_interval();

}  // namespace ops
}  // namespace fixnet
