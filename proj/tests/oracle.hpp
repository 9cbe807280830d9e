// Test-only oracles, kept independent of the solve path they check:
// an entry-by-entry Gram construction from the scalar kernels, and a
// derivative-free quadratic minimizer driven purely by objective() values.
#pragma once

#include <Eigen/Core>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <random>
#include <vector>

#include "funkernel/estimator.hpp"
#include "funkernel/kernels.hpp"

namespace funkernel::testing {

inline Eigen::VectorXd random_vector(Eigen::Index n, std::mt19937_64& rng,
                                     double sigma = 1.0) {
  std::normal_distribution<double> normal(0.0, sigma);
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v(i) = normal(rng);
  return v;
}

// Smooth-ish random curve: a few random sine/cosine terms.
inline Curve random_curve(const GridPtr& grid, std::mt19937_64& rng, double sigma = 1.0) {
  std::normal_distribution<double> normal(0.0, sigma);
  Eigen::VectorXd v = Eigen::VectorXd::Zero(grid->size());
  for (int h = 1; h <= 3; ++h) {
    const double a = normal(rng) / h;
    const double b = normal(rng) / h;
    for (Eigen::Index l = 0; l < grid->size(); ++l) {
      const double u = grid->points()(l);
      v(l) += a * std::cos(h * u * 6.283185307179586) + b * std::sin(h * u * 6.283185307179586);
    }
  }
  return Curve(grid, std::move(v));
}

inline TrainingSet random_problem(std::uint64_t seed, Eigen::Index n, Eigen::Index m,
                                  int p, Eigen::Index k) {
  std::mt19937_64 rng(seed);
  TrainingSet ts;
  ts.t_grid = Grid::uniform(0.0, 1.0, m);
  for (int q = 0; q < p; ++q) ts.s_grids.push_back(Grid::uniform(0.0, 1.0, 12 + q));
  for (Eigen::Index i = 0; i < n; ++i) {
    Sample s;
    s.id = "r" + std::to_string(i);
    s.xd = random_vector(k, rng);
    for (int q = 0; q < p; ++q) s.xc.push_back(random_curve(ts.s_grids[q], rng));
    s.y = random_curve(ts.t_grid, rng);
    ts.samples.push_back(std::move(s));
  }
  return ts;
}

// Entry-by-entry Gram matrix from the scalar kernels alone, no block algebra:
// integral: K[i*m+l, j*m+l'] = kappa_ij * k_y(t_l, t_l') * w_l'
// identity: K[i*m+l, j*m+l'] = kappa_ij * [l == l']
inline Eigen::MatrixXd brute_force_gram(const TrainingSet& ts, const KernelConfig& cfg) {
  const Eigen::Index n = ts.n();
  const Eigen::Index m = ts.m();
  Eigen::MatrixXd K(n * m, n * m);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      const double kij = kappa(ts.samples[i], ts.samples[j], cfg);
      for (Eigen::Index l = 0; l < m; ++l) {
        for (Eigen::Index lp = 0; lp < m; ++lp) {
          double v;
          if (cfg.op == OperatorType::identity) {
            v = l == lp ? kij : 0.0;
          } else {
            v = kij * k_response(ts.t_grid->points()(l), ts.t_grid->points()(lp), cfg) *
                ts.t_grid->weights()(lp);
          }
          K(i * m + l, j * m + lp) = v;
        }
      }
    }
  }
  return K;
}

// Minimizes objective() over alpha using only objective() evaluations: the
// objective is an exact quadratic in alpha, so finite differences with unit
// steps recover its gradient and Hessian to round-off, and the minimum of the
// reconstructed model is found via an eigendecomposition pseudo-inverse
// (robust to the near-singular directions a smooth response kernel creates).
// None of the production assembly or solve path is touched.
struct MinimizeResult {
  Eigen::MatrixXd alpha;
  double value = 0.0;
};

inline MinimizeResult minimize_objective(const TrainingSet& ts, const KernelConfig& cfg,
                                         double lambda) {
  const Eigen::Index n = ts.n();
  const Eigen::Index m = ts.m();
  const Eigen::Index dim = n * m;
  const auto f = [&](const Eigen::VectorXd& x) {
    Eigen::MatrixXd a(n, m);
    for (Eigen::Index i = 0; i < n; ++i) a.row(i) = x.segment(i * m, m).transpose();
    return objective(ts, cfg, lambda, a);
  };

  const double f0 = f(Eigen::VectorXd::Zero(dim));
  Eigen::VectorXd fplus(dim), fminus(dim);
  for (Eigen::Index d = 0; d < dim; ++d) {
    fplus(d) = f(Eigen::VectorXd::Unit(dim, d));
    fminus(d) = f(-Eigen::VectorXd::Unit(dim, d));
  }
  const Eigen::VectorXd g = 0.5 * (fplus - fminus);
  Eigen::MatrixXd H(dim, dim);
  H.diagonal() = fplus + fminus - 2.0 * f0 * Eigen::VectorXd::Ones(dim);
  for (Eigen::Index a = 0; a < dim; ++a) {
    for (Eigen::Index b = a + 1; b < dim; ++b) {
      const double fab =
          f(Eigen::VectorXd::Unit(dim, a) + Eigen::VectorXd::Unit(dim, b));
      H(a, b) = H(b, a) = fab - fplus(a) - fplus(b) + f0;
    }
  }

  // x* = -H^+ g; directions with negligible curvature carry no descent.
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(H);
  const double cutoff = 1e-12 * es.eigenvalues().cwiseAbs().maxCoeff();
  Eigen::VectorXd inv = es.eigenvalues();
  for (Eigen::Index d = 0; d < dim; ++d) {
    inv(d) = inv(d) > cutoff ? 1.0 / inv(d) : 0.0;
  }
  const Eigen::VectorXd x =
      -(es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose() * g);

  MinimizeResult out;
  out.alpha = Eigen::MatrixXd(n, m);
  for (Eigen::Index i = 0; i < n; ++i) out.alpha.row(i) = x.segment(i * m, m).transpose();
  out.value = f(x);
  return out;
}

}  // namespace funkernel::testing
