#include "fixnet/operators.hpp"

#include "fixnet/error.hpp"
#include "fixnet/tolerances.hpp"

#include <Eigen/SVD>

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <sstream>

namespace fixnet {

NonexpansiveOp::NonexpansiveOp(std::string name, std::size_t dim, PointMap map)
    : name_(std::move(name)), dim_(dim), map_(std::move(map)) {
  if (dim_ == 0) throw ShapeError("operator dimension must be positive");
  if (!map_) throw std::invalid_argument("operator without evaluation map");
}

NonexpansiveOp& NonexpansiveOp::with_fixed_projector(PointMap projector) {
  projector_ = std::move(projector);
  return *this;
}

NonexpansiveOp& NonexpansiveOp::with_domain(DomainPredicate domain,
                                            std::string description) {
  domain_ = std::move(domain);
  domain_text_ = std::move(description);
  return *this;
}

NonexpansiveOp& NonexpansiveOp::exempt_from_nonexpansive_check() {
  check_nonexpansive_ = false;
  return *this;
}

void NonexpansiveOp::require_dim(const Point& x) const {
  if (x.dim() != dim_) {
    throw ShapeError(name_ + ": expected dimension " + std::to_string(dim_) +
                     ", got " + std::to_string(x.dim()));
  }
}

Point NonexpansiveOp::eval(const Point& x) const {
  require_dim(x);
  if (domain_ && !domain_(x)) {
    std::ostringstream msg;
    msg << name_ << ": point outside domain " << domain_text_;
    throw DomainError(msg.str());
  }
  return map_(x);
}

Point NonexpansiveOp::project_fixed(const Point& x) const {
  require_dim(x);
  if (!projector_) {
    throw std::logic_error(name_ + " has no fixed-set projector");
  }
  return projector_(x);
}

double NonexpansiveOp::distance_to_fixed(const Point& x) const {
  return distance(x, project_fixed(x));
}

OperatorSet::OperatorSet(std::vector<NonexpansiveOp> ops,
                         PointMap common_projector)
    : ops_(std::move(ops)), common_(std::move(common_projector)) {
  if (ops_.empty()) throw ShapeError("operator set must be nonempty");
  for (const auto& op : ops_) {
    if (op.dim() != ops_.front().dim()) {
      throw ShapeError("operators act on different dimensions");
    }
  }
}

Point OperatorSet::project_common(const Point& x) const {
  if (!common_) throw std::logic_error("operator set has no X* projector");
  return common_(x);
}

double OperatorSet::distance_to_common(const Point& x) const {
  return distance(x, project_common(x));
}

NonexpansiveOp averaged(const NonexpansiveOp& op, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw std::invalid_argument("averaging parameter must lie in (0, 1)");
  }
  std::ostringstream name;
  name << "averaged(" << op.name() << ", " << alpha << ")";
  NonexpansiveOp out(name.str(), op.dim(), [op, alpha](const Point& x) {
    return x.with_coords((1.0 - alpha) * x.coords() +
                         alpha * op.eval(x).coords());
  });
  if (op.has_fixed_projector()) {
    out.with_fixed_projector(
        [op](const Point& x) { return op.project_fixed(x); });
  }
  if (op.has_domain()) {
    out.with_domain([op](const Point& x) { return op.in_domain(x); },
                    op.domain_description());
  }
  if (!op.checked_nonexpansive()) out.exempt_from_nonexpansive_check();
  return out;
}

double residual(const NonexpansiveOp& op, const Point& x) {
  return distance(op.eval(x), x);
}

// ---------------------------------------------------------------------------

AffineSet::AffineSet(Eigen::MatrixXd a, Eigen::VectorXd b)
    : a_(std::move(a)), b_(std::move(b)) {
  if (a_.rows() != b_.size()) throw ShapeError("affine set: rows(A) != len(b)");
  if (a_.rows() == 0) {
    pinv_ = Eigen::MatrixXd::Zero(a_.cols(), 0);
    return;
  }
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(a_);
  pinv_ = cod.pseudoInverse();
  const Eigen::VectorXd x0 = pinv_ * b_;
  const double scale = 1.0 + b_.norm() + a_.norm();
  consistent_ = (a_ * x0 - b_).norm() <= 1e-9 * scale;
}

Eigen::VectorXd AffineSet::project(const Eigen::VectorXd& x) const {
  if (a_.rows() == 0) return x;
  return x - pinv_ * (a_ * x - b_);
}

PolyhedralProjector::PolyhedralProjector(Eigen::MatrixXd a_in,
                                         Eigen::VectorXd b_in,
                                         Eigen::MatrixXd a_eq,
                                         Eigen::VectorXd b_eq)
    : a_in_(std::move(a_in)), b_in_(std::move(b_in)) {
  const auto m = static_cast<std::size_t>(a_in_.rows());
  if (m > kMaxInequalities) {
    throw std::invalid_argument("polyhedral projector supports at most " +
                                std::to_string(kMaxInequalities) +
                                " inequalities");
  }
  if (a_in_.rows() != b_in_.size() || a_eq.rows() != b_eq.size()) {
    throw ShapeError("polyhedron: constraint rows and rhs disagree");
  }
  const Eigen::Index n = m > 0 ? a_in_.cols() : a_eq.cols();
  if (a_eq.size() > 0 && a_eq.cols() != n) {
    throw ShapeError("polyhedron: constraint widths disagree");
  }
  faces_.reserve(std::size_t{1} << m);
  for (std::size_t mask = 0; mask < (std::size_t{1} << m); ++mask) {
    const auto active = static_cast<Eigen::Index>(std::popcount(mask));
    Eigen::MatrixXd a(a_eq.rows() + active, n);
    Eigen::VectorXd b(a_eq.rows() + active);
    if (a_eq.rows() > 0) {
      a.topRows(a_eq.rows()) = a_eq;
      b.head(a_eq.rows()) = b_eq;
    }
    Eigen::Index r = a_eq.rows();
    for (std::size_t i = 0; i < m; ++i) {
      if (mask & (std::size_t{1} << i)) {
        a.row(r) = a_in_.row(Eigen::Index(i));
        b[r] = b_in_[Eigen::Index(i)];
        ++r;
      }
    }
    faces_.emplace_back(std::move(a), std::move(b));
  }
}

bool PolyhedralProjector::contains(const Eigen::VectorXd& x,
                                   double slack) const {
  if (a_in_.rows() > 0) {
    const Eigen::VectorXd viol = a_in_ * x - b_in_;
    for (Eigen::Index i = 0; i < viol.size(); ++i) {
      const double scale = 1.0 + std::abs(b_in_[i]) + a_in_.row(i).norm();
      if (viol[i] > slack * scale) return false;
    }
  }
  const AffineSet& eq = faces_.front();
  if (eq.matrix().rows() > 0) {
    const double scale = 1.0 + eq.rhs().norm();
    if ((eq.matrix() * x - eq.rhs()).norm() > 1e-9 * scale) return false;
  }
  return true;
}

Eigen::VectorXd PolyhedralProjector::project(const Eigen::VectorXd& x) const {
  // With the active set of the true projection p, x - p is orthogonal to the
  // face's affine hull, so p is the projection onto that hull. The nearest
  // feasible face projection is therefore exact.
  if (faces_.front().consistent()) {
    Eigen::VectorXd p0 = faces_.front().project(x);
    if (contains(p0)) return p0;
  }
  double best = std::numeric_limits<double>::infinity();
  Eigen::VectorXd best_point;
  for (std::size_t mask = 1; mask < faces_.size(); ++mask) {
    const AffineSet& face = faces_[mask];
    if (!face.consistent()) continue;
    Eigen::VectorXd p = face.project(x);
    if (!contains(p, 1e-10)) continue;
    const double d = (p - x).squaredNorm();
    if (d < best) {
      best = d;
      best_point = std::move(p);
    }
  }
  if (!std::isfinite(best)) {
    throw std::runtime_error("polyhedron is empty; no feasible face");
  }
  return best_point;
}

bool PolyhedralProjector::nonempty() const {
  try {
    Eigen::VectorXd probe = Eigen::VectorXd::Zero(a_in_.rows() > 0
                                                      ? a_in_.cols()
                                                      : faces_[0].matrix().cols());
    project(probe);
    return true;
  } catch (const std::runtime_error&) {
    return false;
  }
}

// ---------------------------------------------------------------------------

namespace ops {
namespace {


void require(bool cond, const char* what) {
  if (!cond) throw std::invalid_argument(what);
}

bool in_unit_interval(const Point& x) { return x[0] >= 0.0 && x[0] < 1.0; }

}  // namespace

NonexpansiveOp identity(std::size_t n) {
  NonexpansiveOp op("identity", n, [](const Point& x) { return x; });
  op.with_fixed_projector([](const Point& x) { return x; });
  return op;
}

NonexpansiveOp negation(std::size_t n) {
  NonexpansiveOp op("negation", n,
                    [](const Point& x) { return x.with_coords(-x.coords()); });
  op.with_fixed_projector([](const Point& x) { return Point::zeros(x.layout()); });
  return op;
}

NonexpansiveOp halfspace(Eigen::VectorXd a, double b) {
  const double a2 = a.squaredNorm();
  require(a2 > 0.0, "halfspace normal must be nonzero");
  auto proj = [a, b, a2](const Point& x) {
    const double viol = a.dot(x.coords()) - b;
    if (viol <= 0.0) return x;
    return x.with_coords(x.coords() - (viol / a2) * a);
  };
  NonexpansiveOp op("halfspace", std::size_t(a.size()), proj);
  op.with_fixed_projector(proj);
  return op;
}

NonexpansiveOp ball(Eigen::VectorXd center, double radius) {
  require(radius > 0.0, "ball radius must be positive");
  auto proj = [center, radius](const Point& x) {
    const Eigen::VectorXd d = x.coords() - center;
    const double r = d.norm();
    if (r <= radius) return x;
    return x.with_coords(center + (radius / r) * d);
  };
  NonexpansiveOp op("ball", std::size_t(center.size()), proj);
  op.with_fixed_projector(proj);
  return op;
}

NonexpansiveOp box(Eigen::VectorXd lo, Eigen::VectorXd hi) {
  require(lo.size() == hi.size(), "box bounds differ in length");
  require((lo.array() <= hi.array()).all(), "box lower bound exceeds upper");
  auto proj = [lo, hi](const Point& x) {
    return x.with_coords(x.coords().cwiseMax(lo).cwiseMin(hi));
  };
  NonexpansiveOp op("box", std::size_t(lo.size()), proj);
  op.with_fixed_projector(proj);
  return op;
}

NonexpansiveOp affine(Eigen::MatrixXd a, Eigen::VectorXd b) {
  AffineSet set(std::move(a), std::move(b));
  require(set.consistent(), "affine set is empty (inconsistent system)");
  auto proj = [set](const Point& x) {
    return x.with_coords(set.project(x.coords()));
  };
  NonexpansiveOp op("affine", std::size_t(set.matrix().cols()), proj);
  op.with_fixed_projector(proj);
  return op;
}

NonexpansiveOp linear_equation(Eigen::MatrixXd a, Eigen::VectorXd b) {
  require(a.rows() > 0, "linear equation block has no rows");
  require(a.rows() == b.size(), "linear equation: rows(A) != len(b)");
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a);
  const double smax = svd.singularValues()(0);
  require(smax > 0.0, "linear equation block is identically zero");
  const double sigma = smax * smax;
  AffineSet fixed(a, b);
  require(fixed.consistent(), "linear equation block is inconsistent");
  auto map = [a, b, sigma](const Point& x) {
    return x.with_coords(x.coords() -
                         a.transpose() * (a * x.coords() - b) / sigma);
  };
  NonexpansiveOp op("linear_equation", std::size_t(a.cols()), map);
  op.with_fixed_projector([fixed](const Point& x) {
    return x.with_coords(fixed.project(x.coords()));
  });
  return op;
}

NonexpansiveOp gradient_quadratic(Eigen::MatrixXd q, Eigen::VectorXd c,
                                  double step) {
  require(q.rows() == q.cols() && q.rows() == c.size(),
          "gradient map: Q must be square and match c");
  require((q - q.transpose()).norm() <= 1e-12 * (1.0 + q.norm()),
          "gradient map: Q must be symmetric");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(q);
  const double lmin = eig.eigenvalues().minCoeff();
  const double lipschitz = eig.eigenvalues().maxCoeff();
  require(lmin >= -1e-12 * (1.0 + lipschitz),
          "gradient map: Q must be positive semidefinite");
  require(step > 0.0 && (lipschitz == 0.0 || step <= 2.0 / lipschitz),
          "gradient map: step must lie in (0, 2/L]");
  AffineSet minimizers(q, -c);
  require(minimizers.consistent(), "gradient map: f has no minimizer");
  auto map = [q, c, step](const Point& x) {
    return x.with_coords(x.coords() - step * (q * x.coords() + c));
  };
  NonexpansiveOp op("gradient_quadratic", std::size_t(q.rows()), map);
  op.with_fixed_projector([minimizers](const Point& x) {
    return x.with_coords(minimizers.project(x.coords()));
  });
  return op;
}

NonexpansiveOp example1_square() {
  NonexpansiveOp op("example1_square", 1, [](const Point& x) {
    return x.with_coords(x.coords().cwiseProduct(x.coords()));
  });
  op.with_fixed_projector([](const Point& x) { return Point::zeros(x.layout()); })
      .with_domain(in_unit_interval, "[0, 1)")
      // |x^2 - y^2| = (x + y)|x - y| exceeds |x - y| near 1.
      .exempt_from_nonexpansive_check();
  return op;
}

NonexpansiveOp example1_interval() {
  auto proj = [](const Point& x) {
    return x.with_coords(x.coords().cwiseMax(0.0).cwiseMin(0.5));
  };
  NonexpansiveOp op("example1_interval", 1, proj);
  op.with_fixed_projector(proj).with_domain(in_unit_interval, "[0, 1)");
  return op;
}

}  // namespace ops
}  // namespace fixnet
