#pragma once

// Finite-dimensional real coordinate space with a contiguous block
// decomposition H = H_1 + ... + H_m, plus the probability-weighted norm used
// by the block-coordinate iteration.

#include <Eigen/Core>

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace fixnet {

class BlockLayout {
 public:
  explicit BlockLayout(std::vector<std::size_t> block_sizes);

  /// One block spanning all n coordinates.
  static std::shared_ptr<const BlockLayout> single(std::size_t n);
  /// n blocks of one coordinate each.
  static std::shared_ptr<const BlockLayout> scalar_blocks(std::size_t n);

  std::size_t dim() const { return offsets_.back(); }
  std::size_t blocks() const { return sizes_.size(); }
  std::size_t offset(std::size_t l) const { return offsets_.at(l); }
  std::size_t size(std::size_t l) const { return sizes_.at(l); }
  const std::vector<std::size_t>& sizes() const { return sizes_; }

  bool operator==(const BlockLayout& other) const {
    return sizes_ == other.sizes_;
  }

 private:
  std::vector<std::size_t> sizes_;
  std::vector<std::size_t> offsets_;  // length m + 1, offsets_[m] == n
};

using LayoutPtr = std::shared_ptr<const BlockLayout>;

/// An element of the ambient space. Coordinates are always finite; a
/// non-finite value raises DivergenceError on construction.
class Point {
 public:
  Point(LayoutPtr layout, Eigen::VectorXd coords);

  static Point zeros(const LayoutPtr& layout);

  const Eigen::VectorXd& coords() const { return coords_; }
  const LayoutPtr& layout() const { return layout_; }
  std::size_t dim() const { return static_cast<std::size_t>(coords_.size()); }
  double operator[](std::size_t j) const { return coords_[Eigen::Index(j)]; }

  auto block(std::size_t l) const {
    return coords_.segment(Eigen::Index(layout_->offset(l)),
                           Eigen::Index(layout_->size(l)));
  }

  /// Same layout, new coordinates.
  Point with_coords(Eigen::VectorXd coords) const {
    return Point(layout_, std::move(coords));
  }

  bool same_shape(const Point& other) const;

 private:
  LayoutPtr layout_;
  Eigen::VectorXd coords_;
};

Point operator+(const Point& x, const Point& y);
Point operator-(const Point& x, const Point& y);
Point operator*(double s, const Point& x);

/// |||y|||^2 = sum_l ||y_l||^2 / p_l over the block decomposition.
class WeightedNorm {
 public:
  explicit WeightedNorm(std::vector<double> probs);

  const std::vector<double>& probs() const { return probs_; }
  std::size_t blocks() const { return probs_.size(); }
  /// Smallest activation probability.
  double p0() const;

 private:
  std::vector<double> probs_;
};

double inner(const Point& x, const Point& y);
double norm_sq(const Point& x);
double norm(const Point& x);
double distance(const Point& x, const Point& y);

double weighted_norm_sq(const Point& y, const WeightedNorm& w);
double weighted_inner(const Point& y, const Point& z, const WeightedNorm& w);

/// sum_j w_j x_j. Weights must be nonnegative and sum to one.
Point convex_combine(std::span<const double> weights,
                     std::span<const Point> points);

}  // namespace fixnet
