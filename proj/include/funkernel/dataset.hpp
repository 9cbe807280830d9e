#pragma once

#include <Eigen/Core>
#include <optional>
#include <string>
#include <vector>

#include "funkernel/grid.hpp"

namespace funkernel {

// One observation: a vector of discrete covariates (post one-hot), a tuple of
// covariate curves on the s-grids, and optionally a response curve on the t-grid.
struct Sample {
  std::string id;
  Eigen::VectorXd xd;
  std::vector<Curve> xc;
  std::optional<Curve> y;
};

struct TrainingSet {
  std::vector<Sample> samples;
  std::vector<GridPtr> s_grids;  // one per functional covariate component
  GridPtr t_grid;

  Eigen::Index n() const { return static_cast<Eigen::Index>(samples.size()); }
  Eigen::Index m() const { return t_grid ? t_grid->size() : 0; }
  Eigen::Index p() const { return static_cast<Eigen::Index>(s_grids.size()); }
  Eigen::Index k() const { return samples.empty() ? 0 : samples.front().xd.size(); }

  // Responses as an n x m matrix, Y(i, l) = y_i(t_l).
  Eigen::MatrixXd response_matrix() const;

  // Enforces the uniformity invariants: shared k, p, grids, responses present.
  void validate() const;
};

// Checks that a covariate sample is usable against a training layout
// (same k, same p, componentwise identical s-grids).
void require_compatible(const Sample& x, const std::vector<GridPtr>& s_grids,
                        Eigen::Index k);

}  // namespace funkernel
