#include "funkernel/grid.hpp"

#include <cmath>
#include <string>
#include <utility>

namespace funkernel {

Eigen::VectorXd trapezoid_weights(const Eigen::VectorXd& points) {
  const Eigen::Index n = points.size();
  if (n < 2) {
    throw InvalidGridError("grid needs at least 2 points, got " + std::to_string(n));
  }
  for (Eigen::Index l = 0; l + 1 < n; ++l) {
    if (!(points(l) < points(l + 1))) {
      throw InvalidGridError("grid points must be strictly increasing at index " +
                             std::to_string(l + 1));
    }
  }
  Eigen::VectorXd w(n);
  w(0) = (points(1) - points(0)) / 2.0;
  for (Eigen::Index l = 1; l + 1 < n; ++l) {
    w(l) = (points(l + 1) - points(l - 1)) / 2.0;
  }
  w(n - 1) = (points(n - 1) - points(n - 2)) / 2.0;
  return w;
}

Grid::Grid(Eigen::VectorXd points) : points_(std::move(points)) {
  if (!points_.allFinite()) {
    throw InvalidGridError("grid points must be finite");
  }
  weights_ = trapezoid_weights(points_);
}

std::shared_ptr<const Grid> Grid::make(Eigen::VectorXd points) {
  return std::make_shared<const Grid>(std::move(points));
}

std::shared_ptr<const Grid> Grid::uniform(double a, double b, Eigen::Index n) {
  if (n < 2) {
    throw InvalidGridError("uniform grid needs at least 2 points");
  }
  return make(Eigen::VectorXd::LinSpaced(n, a, b));
}

Curve::Curve(GridPtr g, Eigen::VectorXd v) : grid(std::move(g)), values(std::move(v)) {
  if (!grid) {
    throw InvalidGridError("curve requires a grid");
  }
  if (values.size() != grid->size()) {
    throw IncompatibleError("curve has " + std::to_string(values.size()) +
                            " values for a grid of " + std::to_string(grid->size()) +
                            " points");
  }
  if (!values.allFinite()) {
    throw DataError("curve values must be finite");
  }
}

bool same_grid(const Grid& a, const Grid& b) {
  return &a == &b || a == b;
}

void require_same_grid(const Curve& a, const Curve& b) {
  if (!same_grid(*a.grid, *b.grid)) {
    throw IncompatibleError("curves live on different grids");
  }
}

double integrate(const Curve& c) {
  return c.grid->weights().dot(c.values);
}

double l2_inner(const Curve& a, const Curve& b) {
  require_same_grid(a, b);
  return (a.grid->weights().array() * a.values.array() * b.values.array()).sum();
}

double l2_distance_sq(const Curve& a, const Curve& b) {
  require_same_grid(a, b);
  const Eigen::ArrayXd d = a.values.array() - b.values.array();
  return (a.grid->weights().array() * d * d).sum();
}

}  // namespace funkernel
