#include "funkernel/estimator.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <random>
#include <thread>
#include <utility>

namespace funkernel {

std::string to_string(SolverKind s) {
  switch (s) {
    case SolverKind::automatic: return "auto";
    case SolverKind::cholesky: return "cholesky";
    case SolverKind::conjugate_gradient: return "conjugate_gradient";
  }
  return "auto";
}

SolverKind solver_kind_from_string(const std::string& s) {
  if (s == "auto") return SolverKind::automatic;
  if (s == "cholesky") return SolverKind::cholesky;
  if (s == "conjugate_gradient" || s == "cg") return SolverKind::conjugate_gradient;
  throw ConfigError("unknown solver '" + s + "'");
}

void FitConfig::validate() const {
  if (!(lambda > 0)) throw ConfigError("lambda must be > 0");
  if (!(cg_tol > 0)) throw ConfigError("cg_tol must be > 0");
  if (cg_max_iter < 1) throw ConfigError("cg_max_iter must be >= 1");
  if (jitter < 0) throw ConfigError("jitter must be >= 0");
  kernel.validate();
}

namespace {

void parallel_for(Eigen::Index count, int threads,
                  const std::function<void(Eigen::Index)>& body) {
  if (threads == 0) {
    threads = static_cast<int>(std::thread::hardware_concurrency());
    if (threads == 0) threads = 1;
  }
  if (threads <= 1 || count < 2) {
    for (Eigen::Index i = 0; i < count; ++i) body(i);
    return;
  }
  const int nt = static_cast<int>(std::min<Eigen::Index>(threads, count));
  std::vector<std::thread> pool;
  pool.reserve(nt);
  for (int t = 0; t < nt; ++t) {
    pool.emplace_back([&, t] {
      for (Eigen::Index i = t; i < count; i += nt) body(i);
    });
  }
  for (auto& th : pool) th.join();
}

Eigen::MatrixXd kappa_matrix(const TrainingSet& ts, const KernelConfig& kernel) {
  const Eigen::Index n = ts.n();
  Eigen::MatrixXd kap(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i; j < n; ++j) {
      const double v = kappa(ts.samples[i], ts.samples[j], kernel);
      kap(i, j) = v;
      kap(j, i) = v;
    }
  }
  return kap;
}

// Responses flattened block-contiguously: entry i*m + l holds y_i(t_l).
Eigen::VectorXd flatten_responses(const TrainingSet& ts) {
  const Eigen::Index n = ts.n();
  const Eigen::Index m = ts.m();
  Eigen::VectorXd y(n * m);
  for (Eigen::Index i = 0; i < n; ++i) {
    y.segment(i * m, m) = ts.samples[i].y->values;
  }
  return y;
}

struct SolveOutcome {
  Eigen::VectorXd x;
  double jitter_used = 0.0;
};

// Cholesky with one round of iterative refinement per attempt and jitter
// escalation on failure. `ok` is the caller's residual acceptance test.
SolveOutcome cholesky_solve(const Eigen::MatrixXd& A, const Eigen::VectorXd& b,
                            double base_jitter,
                            const std::function<bool(const Eigen::VectorXd&)>& ok) {
  const Eigen::Index dim = A.rows();
  const double trace_jitter = 1e-8 * A.trace() / static_cast<double>(dim);
  std::vector<double> jitters{base_jitter, 1e-10, trace_jitter};
  std::sort(jitters.begin(), jitters.end());
  jitters.erase(std::unique(jitters.begin(), jitters.end()), jitters.end());

  for (double jit : jitters) {
    Eigen::MatrixXd Aj = A;
    if (jit > 0) Aj.diagonal().array() += jit;
    Eigen::LLT<Eigen::MatrixXd> llt(Aj);
    if (llt.info() != Eigen::Success) continue;
    Eigen::VectorXd x = llt.solve(b);
    for (int refine = 0; refine < 3; ++refine) {
      if (ok(x)) return {std::move(x), jit};
      x += llt.solve(b - Aj * x);
    }
    if (ok(x)) return {std::move(x), jit};
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(A, Eigen::EigenvaluesOnly);
  const double min_eig = es.eigenvalues().minCoeff();
  throw NumericalError("Cholesky solve failed after jitter escalation; min eigenvalue " +
                       std::to_string(min_eig));
}

// Plain CG on a symmetric positive (semi-)definite system.
SolveOutcome cg_solve(const Eigen::MatrixXd& A, const Eigen::VectorXd& b, double tol,
                      int max_iter, int* iterations) {
  Eigen::VectorXd x = Eigen::VectorXd::Zero(b.size());
  Eigen::VectorXd r = b;
  Eigen::VectorXd p = r;
  double rs = r.squaredNorm();
  const double bnorm = b.norm();
  const double stop = tol * (bnorm > 0 ? bnorm : 1.0);
  int it = 0;
  while (it < max_iter && std::sqrt(rs) > stop) {
    const Eigen::VectorXd Ap = A * p;
    const double denom = p.dot(Ap);
    if (!(denom > 0)) {
      throw NumericalError("CG breakdown: non-positive curvature encountered");
    }
    const double step = rs / denom;
    x += step * p;
    r -= step * Ap;
    const double rs_new = r.squaredNorm();
    p = r + (rs_new / rs) * p;
    rs = rs_new;
    ++it;
  }
  if (iterations) *iterations = it;
  if (std::sqrt(rs) > stop) {
    throw NumericalError("CG did not converge in " + std::to_string(max_iter) +
                         " iterations (residual " + std::to_string(std::sqrt(rs)) + ")");
  }
  return {std::move(x), 0.0};
}

}  // namespace

Eigen::MatrixXd assemble_gram(const TrainingSet& ts, const KernelConfig& kernel,
                              int threads) {
  ts.validate();
  kernel.validate();
  const Eigen::Index n = ts.n();
  const Eigen::Index m = ts.m();
  const ResponseGram rg = response_gram(ts.t_grid, kernel);
  const Eigen::MatrixXd kap = kappa_matrix(ts, kernel);
  // Shared action matrix; every block is a scalar multiple of it.
  const Eigen::MatrixXd action = kernel.op == OperatorType::identity
                                     ? Eigen::MatrixXd::Identity(m, m).eval()
                                     : (rg.Ky * rg.w.asDiagonal()).eval();
  Eigen::MatrixXd K(n * m, n * m);
  parallel_for(n, threads, [&](Eigen::Index i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      K.block(i * m, j * m, m, m) = kap(i, j) * action;
    }
  });
  return K;
}

FittedModel fit(const TrainingSet& ts, const FitConfig& cfg) {
  ts.validate();
  cfg.validate();
  const Eigen::Index n = ts.n();
  const Eigen::Index m = ts.m();
  const Eigen::Index nm = n * m;

  const Eigen::VectorXd y = flatten_responses(ts);
  if (!y.allFinite()) throw DataError("responses contain non-finite values");

  const Eigen::MatrixXd K = assemble_gram(ts, cfg.kernel, cfg.threads);
  const double ynorm = y.norm();
  const auto residual_ok = [&](const Eigen::VectorXd& a) {
    return (K * a + cfg.lambda * a - y).norm() <= 1e-8 * (ynorm > 0 ? ynorm : 1.0);
  };

  SolverKind solver = cfg.solver;
  if (solver == SolverKind::automatic) {
    solver = nm > 4000 ? SolverKind::conjugate_gradient : SolverKind::cholesky;
  }

  FitDiagnostics diag;
  SolveOutcome out;
  if (cfg.kernel.op == OperatorType::identity) {
    // K is symmetric here; solve (K + lambda I) alpha = Y directly.
    Eigen::MatrixXd A = K;
    A.diagonal().array() += cfg.lambda;
    if (solver == SolverKind::cholesky) {
      out = cholesky_solve(A, y, cfg.jitter, residual_ok);
    } else {
      out = cg_solve(A, y, cfg.cg_tol, cfg.cg_max_iter, &diag.iterations);
    }
  } else {
    // Weight-symmetrized system: (WK + lambda W) alpha = W Y.
    Eigen::VectorXd wtil(nm);
    for (Eigen::Index i = 0; i < n; ++i) {
      wtil.segment(i * m, m) = ts.t_grid->weights();
    }
    Eigen::MatrixXd A = wtil.asDiagonal() * K;
    A += cfg.lambda * Eigen::MatrixXd(wtil.asDiagonal());
    A = ((A + A.transpose()) / 2.0).eval();  // clear round-off asymmetry
    const Eigen::VectorXd b = wtil.asDiagonal() * y;
    if (solver == SolverKind::cholesky) {
      out = cholesky_solve(A, b, cfg.jitter, residual_ok);
    } else {
      out = cg_solve(A, b, cfg.cg_tol, cfg.cg_max_iter, &diag.iterations);
    }
  }

  diag.solver = to_string(solver);
  diag.jitter_used = out.jitter_used;
  diag.residual_norm = (K * out.x + cfg.lambda * out.x - y).norm();
  diag.relative_residual = ynorm > 0 ? diag.residual_norm / ynorm : diag.residual_norm;
  if (!out.x.allFinite()) throw NumericalError("solver produced non-finite coefficients");

  FittedModel model;
  model.training.reserve(ts.samples.size());
  for (const Sample& s : ts.samples) {
    Sample cov = s;
    cov.y.reset();
    model.training.push_back(std::move(cov));
  }
  model.alpha = Eigen::MatrixXd(n, m);
  for (Eigen::Index i = 0; i < n; ++i) {
    model.alpha.row(i) = out.x.segment(i * m, m).transpose();
  }
  model.t_grid = ts.t_grid;
  model.s_grids = ts.s_grids;
  model.kernel = cfg.kernel;
  model.lambda = cfg.lambda;
  model.diagnostics = diag;
  return model;
}

namespace {

double interp_linear(const Eigen::VectorXd& xs, const Eigen::VectorXd& ys, double x) {
  if (x <= xs(0)) return ys(0);
  const Eigen::Index n = xs.size();
  if (x >= xs(n - 1)) return ys(n - 1);
  Eigen::Index hi = 1;
  while (xs(hi) < x) ++hi;
  const double t = (x - xs(hi - 1)) / (xs(hi) - xs(hi - 1));
  return (1 - t) * ys(hi - 1) + t * ys(hi);
}

}  // namespace

Curve predict(const FittedModel& model, const Sample& x, const GridPtr& eval_grid) {
  if (!eval_grid) throw InvalidGridError("evaluation grid is null");
  const Eigen::Index k = model.training.empty() ? x.xd.size() : model.training[0].xd.size();
  require_compatible(x, model.s_grids, k);

  const Eigen::Index n = model.n();
  const Eigen::Index m = model.m();
  Eigen::VectorXd kap(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    kap(j) = kappa(x, model.training[j], model.kernel);
  }
  // beta_l = sum_j kappa(x, x_j) alpha_jl
  const Eigen::VectorXd beta = model.alpha.transpose() * kap;

  const Eigen::Index me = eval_grid->size();
  Eigen::VectorXd out(me);
  if (model.kernel.op == OperatorType::identity) {
    // Only defined at the training grid points.
    for (Eigen::Index e = 0; e < me; ++e) {
      const double t = eval_grid->points()(e);
      Eigen::Index l = -1;
      for (Eigen::Index c = 0; c < m; ++c) {
        if (model.t_grid->points()(c) == t) {
          l = c;
          break;
        }
      }
      if (l < 0) {
        throw IncompatibleError(
            "identity-operator predictions are only defined at training grid points "
            "(unsupported t = " + std::to_string(t) + ")");
      }
      out(e) = beta(l);
    }
  } else {
    const Eigen::VectorXd& w = model.t_grid->weights();
    const Eigen::VectorXd& tl = model.t_grid->points();
    for (Eigen::Index e = 0; e < me; ++e) {
      const double t = eval_grid->points()(e);
      double acc = 0.0;
      for (Eigen::Index l = 0; l < m; ++l) {
        acc += w(l) * k_response(tl(l), t, model.kernel) * beta(l);
      }
      out(e) = acc;
    }
  }
  if (model.y_offset) {
    for (Eigen::Index e = 0; e < me; ++e) {
      out(e) += interp_linear(model.t_grid->points(), *model.y_offset,
                              eval_grid->points()(e));
    }
  }
  return Curve(eval_grid, std::move(out));
}

std::vector<Curve> predict_all(const FittedModel& model, const std::vector<Sample>& xs,
                               const GridPtr& eval_grid) {
  std::vector<Curve> out;
  out.reserve(xs.size());
  for (const Sample& x : xs) out.push_back(predict(model, x, eval_grid));
  return out;
}

double objective(const TrainingSet& ts, const KernelConfig& kernel, double lambda,
                 const Eigen::MatrixXd& alpha) {
  ts.validate();
  const Eigen::Index n = ts.n();
  const Eigen::Index m = ts.m();
  if (alpha.rows() != n || alpha.cols() != m) {
    throw IncompatibleError("alpha has wrong dimensions");
  }
  const ResponseGram rg = response_gram(ts.t_grid, kernel);
  const Eigen::MatrixXd kap = kappa_matrix(ts, kernel);
  const Eigen::VectorXd& w = ts.t_grid->weights();

  // K_ij a_j accumulated per i, blockwise.
  double loss = 0.0;
  double reg = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    Eigen::VectorXd pred = Eigen::VectorXd::Zero(m);
    for (Eigen::Index j = 0; j < n; ++j) {
      const Eigen::VectorXd block_aj =
          operator_block(kap(i, j), rg, kernel.op) * alpha.row(j).transpose();
      pred += block_aj;
      reg += lambda * (alpha.row(i).transpose().array() * w.array() * block_aj.array()).sum();
    }
    const Eigen::ArrayXd r = ts.samples[i].y->values.array() - pred.array();
    loss += (w.array() * r * r).sum();
  }
  return loss + reg;
}

CvResult cross_validate(const TrainingSet& ts, const FitConfig& base,
                        std::vector<double> lambdas, std::vector<double> sigma_ds,
                        std::vector<double> sigma_cs, std::vector<double> sigma_ys,
                        int folds, std::uint64_t seed) {
  ts.validate();
  const Eigen::Index n = ts.n();
  if (folds < 2) throw ConfigError("cross-validation needs at least 2 folds");
  if (folds > n) {
    throw ConfigError("folds (" + std::to_string(folds) + ") exceed sample count (" +
                      std::to_string(n) + ")");
  }
  if (lambdas.empty()) throw ConfigError("empty lambda grid");
  if (sigma_ds.empty()) sigma_ds = {base.kernel.sigma_d};
  if (sigma_cs.empty()) sigma_cs = {base.kernel.sigma_c};
  if (sigma_ys.empty()) sigma_ys = {base.kernel.sigma_y};
  std::sort(lambdas.begin(), lambdas.end());
  std::sort(sigma_ds.begin(), sigma_ds.end());
  std::sort(sigma_cs.begin(), sigma_cs.end());
  std::sort(sigma_ys.begin(), sigma_ys.end());

  // Seeded shuffle, then round-robin fold assignment.
  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<int> fold_of(n);
  for (Eigen::Index pos = 0; pos < n; ++pos) {
    fold_of[order[pos]] = static_cast<int>(pos % folds);
  }

  CvResult result;
  double best_score = std::numeric_limits<double>::infinity();
  for (double lam : lambdas) {
    for (double sd : sigma_ds) {
      for (double sc : sigma_cs) {
        for (double sy : sigma_ys) {
          FitConfig cand = base;
          cand.lambda = lam;
          cand.kernel.sigma_d = sd;
          cand.kernel.sigma_c = sc;
          cand.kernel.sigma_y = sy;
          double total_ise = 0.0;
          Eigen::Index total_held = 0;
          const std::size_t row_base = result.table.size();
          for (int f = 0; f < folds; ++f) {
            TrainingSet train{{}, ts.s_grids, ts.t_grid};
            std::vector<Sample> held;
            for (Eigen::Index i = 0; i < n; ++i) {
              (fold_of[i] == f ? held : train.samples).push_back(ts.samples[i]);
            }
            const FittedModel model = fit(train, cand);
            double fold_ise = 0.0;
            for (const Sample& s : held) {
              const Curve yhat = predict(model, s, ts.t_grid);
              const Eigen::ArrayXd r = yhat.values.array() - s.y->values.array();
              fold_ise += (ts.t_grid->weights().array() * r * r).sum();
            }
            total_ise += fold_ise;
            total_held += static_cast<Eigen::Index>(held.size());
            result.table.push_back(
                {f, lam, sd, sc, sy,
                 held.empty() ? 0.0 : fold_ise / static_cast<double>(held.size()),
                 false});
          }
          const double score = total_ise / static_cast<double>(total_held);
          if (score < best_score) {
            best_score = score;
            result.best = cand;
            for (CvRow& row : result.table) row.chosen = false;
            for (std::size_t r = row_base; r < result.table.size(); ++r) {
              result.table[r].chosen = true;
            }
          }
        }
      }
    }
  }
  result.best_score = best_score;
  return result;
}

}  // namespace funkernel
