#pragma once

#include <Eigen/Core>
#include <memory>

#include "funkernel/errors.hpp"

namespace funkernel {

// Trapezoidal quadrature weights for strictly increasing sample points.
// weights[0] = (p1-p0)/2, interior weights[l] = (p_{l+1}-p_{l-1})/2,
// weights[last] = (p_last - p_{last-1})/2.
Eigen::VectorXd trapezoid_weights(const Eigen::VectorXd& points);

// Sample points of an interval together with their quadrature weights.
// Immutable after construction; shared by reference between curves.
class Grid {
 public:
  explicit Grid(Eigen::VectorXd points);

  const Eigen::VectorXd& points() const { return points_; }
  const Eigen::VectorXd& weights() const { return weights_; }
  Eigen::Index size() const { return points_.size(); }
  double span() const { return points_(points_.size() - 1) - points_(0); }

  bool operator==(const Grid& other) const {
    return points_.size() == other.points_.size() && points_ == other.points_;
  }

  static std::shared_ptr<const Grid> make(Eigen::VectorXd points);
  static std::shared_ptr<const Grid> uniform(double a, double b, Eigen::Index n);

 private:
  Eigen::VectorXd points_;
  Eigen::VectorXd weights_;
};

using GridPtr = std::shared_ptr<const Grid>;

// Real values sampled on a Grid.
struct Curve {
  GridPtr grid;
  Eigen::VectorXd values;

  Curve() = default;
  Curve(GridPtr g, Eigen::VectorXd v);
};

bool same_grid(const Grid& a, const Grid& b);
void require_same_grid(const Curve& a, const Curve& b);

// Quadrature realization of the integral over the curve's domain.
double integrate(const Curve& c);

// Quadrature-weighted L2 inner product; both curves must share a grid.
double l2_inner(const Curve& a, const Curve& b);

// Squared L2 distance ||a - b||^2 under the shared grid's weights.
double l2_distance_sq(const Curve& a, const Curve& b);

}  // namespace funkernel
