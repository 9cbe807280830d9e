#include "funkernel/dataset.hpp"

#include <string>

namespace funkernel {

Eigen::MatrixXd TrainingSet::response_matrix() const {
  Eigen::MatrixXd Y(n(), m());
  for (Eigen::Index i = 0; i < n(); ++i) {
    if (!samples[i].y) {
      throw DataError("sample '" + samples[i].id + "' has no response curve");
    }
    Y.row(i) = samples[i].y->values.transpose();
  }
  return Y;
}

void TrainingSet::validate() const {
  if (samples.empty()) {
    throw DataError("training set is empty");
  }
  if (!t_grid) {
    throw InvalidGridError("training set has no response grid");
  }
  const Eigen::Index kk = samples.front().xd.size();
  for (const Sample& s : samples) {
    require_compatible(s, s_grids, kk);
    if (!s.y) {
      throw DataError("sample '" + s.id + "' has no response curve");
    }
    if (!same_grid(*s.y->grid, *t_grid)) {
      throw IncompatibleError("sample '" + s.id + "' response is not on the shared t-grid");
    }
  }
}

void require_compatible(const Sample& x, const std::vector<GridPtr>& s_grids,
                        Eigen::Index k) {
  if (x.xd.size() != k) {
    throw IncompatibleError("sample '" + x.id + "' has " + std::to_string(x.xd.size()) +
                            " discrete covariates, expected " + std::to_string(k));
  }
  if (x.xc.size() != s_grids.size()) {
    throw IncompatibleError("sample '" + x.id + "' has " + std::to_string(x.xc.size()) +
                            " covariate curves, expected " +
                            std::to_string(s_grids.size()));
  }
  for (std::size_t q = 0; q < s_grids.size(); ++q) {
    if (!same_grid(*x.xc[q].grid, *s_grids[q])) {
      throw IncompatibleError("sample '" + x.id + "' covariate curve " +
                              std::to_string(q) + " is not on the shared s-grid");
    }
  }
}

}  // namespace funkernel
