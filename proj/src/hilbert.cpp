#include "fixnet/hilbert.hpp"

#include "fixnet/error.hpp"
#include "fixnet/tolerances.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace fixnet {

BlockLayout::BlockLayout(std::vector<std::size_t> block_sizes)
    : sizes_(std::move(block_sizes)) {
  if (sizes_.empty()) throw ShapeError("block layout needs at least one block");
  offsets_.reserve(sizes_.size() + 1);
  offsets_.push_back(0);
  for (std::size_t s : sizes_) {
    if (s == 0) throw ShapeError("block sizes must be positive");
    offsets_.push_back(offsets_.back() + s);
  }
}

LayoutPtr BlockLayout::single(std::size_t n) {
  return std::make_shared<const BlockLayout>(std::vector<std::size_t>{n});
}

LayoutPtr BlockLayout::scalar_blocks(std::size_t n) {
  return std::make_shared<const BlockLayout>(std::vector<std::size_t>(n, 1));
}

Point::Point(LayoutPtr layout, Eigen::VectorXd coords)
    : layout_(std::move(layout)), coords_(std::move(coords)) {
  if (!layout_) throw ShapeError("point without layout");
  if (static_cast<std::size_t>(coords_.size()) != layout_->dim()) {
    throw ShapeError("point has " + std::to_string(coords_.size()) +
                     " coordinates, layout expects " +
                     std::to_string(layout_->dim()));
  }
  if (!coords_.allFinite()) throw DivergenceError("non-finite coordinate");
}

Point Point::zeros(const LayoutPtr& layout) {
  return Point(layout, Eigen::VectorXd::Zero(Eigen::Index(layout->dim())));
}

bool Point::same_shape(const Point& other) const {
  return layout_ == other.layout_ || *layout_ == *other.layout_;
}

namespace {

void require_same(const Point& x, const Point& y) {
  if (!x.same_shape(y)) throw ShapeError("points have different layouts");
}

}  // namespace

Point operator+(const Point& x, const Point& y) {
  require_same(x, y);
  return x.with_coords(x.coords() + y.coords());
}

Point operator-(const Point& x, const Point& y) {
  require_same(x, y);
  return x.with_coords(x.coords() - y.coords());
}

Point operator*(double s, const Point& x) {
  return x.with_coords(s * x.coords());
}

WeightedNorm::WeightedNorm(std::vector<double> probs)
    : probs_(std::move(probs)) {
  if (probs_.empty()) throw ShapeError("weighted norm needs at least one block");
  for (double p : probs_) {
    if (!(p > 0.0 && p <= 1.0)) {
      throw std::invalid_argument("block probabilities must lie in (0, 1]");
    }
  }
}

double WeightedNorm::p0() const {
  return *std::min_element(probs_.begin(), probs_.end());
}

double inner(const Point& x, const Point& y) {
  if (x.dim() != y.dim()) throw ShapeError("inner product dimension mismatch");
  return x.coords().dot(y.coords());
}

double norm_sq(const Point& x) { return x.coords().squaredNorm(); }
double norm(const Point& x) { return x.coords().norm(); }

double distance(const Point& x, const Point& y) {
  if (x.dim() != y.dim()) throw ShapeError("distance dimension mismatch");
  return (x.coords() - y.coords()).norm();
}

double weighted_norm_sq(const Point& y, const WeightedNorm& w) {
  return weighted_inner(y, y, w);
}

double weighted_inner(const Point& y, const Point& z, const WeightedNorm& w) {
  require_same(y, z);
  const BlockLayout& layout = *y.layout();
  if (layout.blocks() != w.blocks()) {
    throw ShapeError("weighted norm has " + std::to_string(w.blocks()) +
                     " probabilities for " + std::to_string(layout.blocks()) +
                     " blocks");
  }
  double acc = 0.0;
  for (std::size_t l = 0; l < layout.blocks(); ++l) {
    acc += y.block(l).dot(z.block(l)) / w.probs()[l];
  }
  return acc;
}

Point convex_combine(std::span<const double> weights,
                     std::span<const Point> points) {
  if (weights.size() != points.size() || points.empty()) {
    throw ShapeError("convex_combine needs one weight per point");
  }
  double sum = 0.0;
  for (double w : weights) {
    if (w < 0.0) throw std::invalid_argument("negative convex weight");
    sum += w;
  }
  if (std::abs(sum - 1.0) > tol::kSumAbs) {
    throw std::invalid_argument("convex weights sum to " + std::to_string(sum));
  }
  Eigen::VectorXd acc = Eigen::VectorXd::Zero(points[0].coords().size());
  for (std::size_t j = 0; j < points.size(); ++j) {
    require_same(points[0], points[j]);
    if (weights[j] != 0.0) acc += weights[j] * points[j].coords();
  }
  return points[0].with_coords(std::move(acc));
}

}  // namespace fixnet
