#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "funkernel/dataset.hpp"
#include "funkernel/kernels.hpp"

namespace funkernel {

enum class SolverKind { automatic, cholesky, conjugate_gradient };

std::string to_string(SolverKind s);
SolverKind solver_kind_from_string(const std::string& s);

struct FitConfig {
  double lambda = 1e-3;
  KernelConfig kernel;
  SolverKind solver = SolverKind::automatic;
  double cg_tol = 1e-10;
  int cg_max_iter = 10000;
  double jitter = 0.0;
  int threads = 1;  // gram assembly parallelism; 0 = hardware concurrency

  void validate() const;
};

struct FitDiagnostics {
  double residual_norm = 0.0;      // ||(K + lambda I) alpha - Y||_2
  double relative_residual = 0.0;  // residual_norm / ||Y||_2
  int iterations = 0;              // CG iterations, 0 for Cholesky
  double jitter_used = 0.0;
  std::string solver;
};

struct FittedModel {
  std::vector<Sample> training;  // covariates only, responses stripped
  Eigen::MatrixXd alpha;         // n x m coefficient matrix
  GridPtr t_grid;
  std::vector<GridPtr> s_grids;
  KernelConfig kernel;
  double lambda = 0.0;
  // Mean response curve subtracted before fitting, added back at prediction.
  std::optional<Eigen::VectorXd> y_offset;
  FitDiagnostics diagnostics;

  Eigen::Index n() const { return alpha.rows(); }
  Eigen::Index m() const { return alpha.cols(); }
};

// The nm x nm block operator kernel matrix; block (i, j) is
// operator_block(kappa(x_i, x_j), response_gram, operator). Samples are laid
// out block-contiguously: sample i occupies rows [i*m, (i+1)*m).
Eigen::MatrixXd assemble_gram(const TrainingSet& ts, const KernelConfig& kernel,
                              int threads = 1);

// Solves (K + lambda I) alpha = Y. For the integral operator the system is
// solved in its weight-symmetrized form (WK + lambda W) alpha = W Y, which is
// symmetric positive semi-definite plus a positive diagonal.
FittedModel fit(const TrainingSet& ts, const FitConfig& cfg);

// Representer-theorem prediction. Integral operator: evaluable at arbitrary t
// via yhat(t) = sum_j kappa(x, x_j) sum_l w_l k_y(t_l, t) alpha_jl.
// Identity operator: defined only at training grid points.
Curve predict(const FittedModel& model, const Sample& x, const GridPtr& eval_grid);

std::vector<Curve> predict_all(const FittedModel& model, const std::vector<Sample>& xs,
                               const GridPtr& eval_grid);

// Discretized regularized empirical risk at a given coefficient matrix:
// sum_i ||y_i - sum_j K_ij a_j||_W^2 + lambda sum_{i,j} <K_ij a_j, a_i>_W.
// Evaluated blockwise, independently of the assembled-matrix solve path.
double objective(const TrainingSet& ts, const KernelConfig& kernel, double lambda,
                 const Eigen::MatrixXd& alpha);

struct CvRow {
  int fold = 0;
  double lambda = 0, sigma_d = 0, sigma_c = 0, sigma_y = 0;
  double ise = 0;  // mean held-out integrated squared error on this fold
  bool chosen = false;
};

struct CvResult {
  FitConfig best;
  double best_score = 0.0;  // mean held-out ISE of the chosen candidate
  std::vector<CvRow> table;
};

// K-fold cross-validation over the cartesian grid of lambdas and bandwidths,
// minimizing mean integrated squared error on held-out samples. Fold
// assignment is a seeded shuffle; ties break toward the smallest lambda, then
// the smallest sigma_d, sigma_c, sigma_y in that order.
CvResult cross_validate(const TrainingSet& ts, const FitConfig& base,
                        std::vector<double> lambdas, std::vector<double> sigma_ds,
                        std::vector<double> sigma_cs, std::vector<double> sigma_ys,
                        int folds, std::uint64_t seed);

}  // namespace funkernel
