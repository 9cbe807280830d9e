#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>
#include <vector>

#include "funkernel/data_io.hpp"
#include "funkernel/estimator.hpp"
#include "funkernel/grid.hpp"
#include "funkernel/kernels.hpp"

namespace py = pybind11;
using namespace funkernel;

namespace {

// Rows of the numpy inputs become samples: xd is n x k (may have zero
// columns), xc holds one n x len(s_grid_q) matrix per functional covariate,
// y is n x m or absent.
std::vector<Sample> make_samples(const Eigen::MatrixXd& xd,
                                 const std::vector<Eigen::MatrixXd>& xc,
                                 const std::vector<GridPtr>& s_grids,
                                 const std::optional<Eigen::MatrixXd>& y,
                                 const GridPtr& t_grid) {
  const Eigen::Index n = xd.rows();
  if (xc.size() != s_grids.size()) {
    throw IncompatibleError("expected one covariate matrix per s-grid, got " +
                            std::to_string(xc.size()) + " matrices for " +
                            std::to_string(s_grids.size()) + " grids");
  }
  for (std::size_t q = 0; q < xc.size(); ++q) {
    if (xc[q].rows() != n || xc[q].cols() != s_grids[q]->size()) {
      throw IncompatibleError("covariate matrix " + std::to_string(q) +
                              " has shape (" + std::to_string(xc[q].rows()) + ", " +
                              std::to_string(xc[q].cols()) + "), expected (" +
                              std::to_string(n) + ", " +
                              std::to_string(s_grids[q]->size()) + ")");
    }
  }
  std::vector<Sample> out;
  out.reserve(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    Sample s;
    s.id = "s" + std::to_string(i);
    s.xd = xd.row(i).transpose();
    for (std::size_t q = 0; q < xc.size(); ++q) {
      s.xc.emplace_back(s_grids[q], xc[q].row(i).transpose());
    }
    if (y) s.y = Curve(t_grid, y->row(i).transpose());
    out.push_back(std::move(s));
  }
  return out;
}

TrainingSet make_training_set(const Eigen::MatrixXd& xd,
                              const std::vector<Eigen::MatrixXd>& xc,
                              const std::vector<Eigen::VectorXd>& s_points,
                              const Eigen::MatrixXd& y,
                              const Eigen::VectorXd& t_points) {
  TrainingSet ts;
  for (const Eigen::VectorXd& p : s_points) ts.s_grids.push_back(Grid::make(p));
  ts.t_grid = Grid::make(t_points);
  ts.samples = make_samples(xd, xc, ts.s_grids, y, ts.t_grid);
  ts.validate();
  return ts;
}

FitConfig make_fit_config(double lambda, const KernelConfig& kernel,
                          const std::string& solver, int threads) {
  FitConfig fc;
  fc.lambda = lambda;
  fc.kernel = kernel;
  fc.solver = solver_kind_from_string(solver);
  fc.threads = threads;
  fc.validate();
  return fc;
}

Eigen::MatrixXd predict_matrix(const FittedModel& model, const Eigen::MatrixXd& xd,
                               const std::vector<Eigen::MatrixXd>& xc,
                               const std::optional<Eigen::VectorXd>& t_points) {
  const GridPtr eval_grid = t_points ? Grid::make(*t_points) : model.t_grid;
  const std::vector<Sample> xs =
      make_samples(xd, xc, model.s_grids, std::nullopt, nullptr);
  Eigen::MatrixXd out(xd.rows(), eval_grid->size());
  for (Eigen::Index i = 0; i < xd.rows(); ++i) {
    out.row(i) = predict(model, xs[static_cast<std::size_t>(i)], eval_grid)
                     .values.transpose();
  }
  return out;
}

py::dict metrics_dict(const Metrics& m) {
  py::dict d;
  d["ise"] = m.ise;
  d["mean_ise"] = m.mean_ise;
  d["root_mean_ise"] = m.root_mean_ise;
  d["per_t_mse"] = m.per_t_mse;
  return d;
}

}  // namespace

PYBIND11_MODULE(_funkernel, mod) {
  mod.doc() = "Function-on-function kernel ridge regression";

  py::register_exception<ConfigError>(mod, "ConfigError", PyExc_ValueError);
  py::register_exception<IncompatibleError>(mod, "IncompatibleError", PyExc_ValueError);
  py::register_exception<InvalidGridError>(mod, "InvalidGridError", PyExc_ValueError);
  py::register_exception<DataError>(mod, "DataError", PyExc_ValueError);
  py::register_exception<NumericalError>(mod, "NumericalError", PyExc_ArithmeticError);
  py::register_exception<IoError>(mod, "IoError", PyExc_OSError);

  mod.def("trapezoid_weights", &trapezoid_weights, py::arg("points"),
          "Trapezoid quadrature weights for a strictly increasing grid.");

  py::class_<KernelConfig>(mod, "KernelConfig")
      .def(py::init([](double sigma_d, const std::string& functional, double sigma_c,
                       double sigma_y, const std::string& op) {
             KernelConfig cfg;
             cfg.sigma_d = sigma_d;
             cfg.functional = functional_kernel_from_string(functional);
             cfg.sigma_c = sigma_c;
             cfg.sigma_y = sigma_y;
             cfg.op = operator_type_from_string(op);
             cfg.validate();
             return cfg;
           }),
           py::arg("sigma_d") = 1.0, py::arg("functional") = "gaussian",
           py::arg("sigma_c") = 1.0, py::arg("sigma_y") = 1.0,
           py::arg("operator") = "integral")
      .def_readwrite("sigma_d", &KernelConfig::sigma_d)
      .def_readwrite("sigma_c", &KernelConfig::sigma_c)
      .def_readwrite("sigma_y", &KernelConfig::sigma_y)
      .def_property(
          "functional",
          [](const KernelConfig& c) { return to_string(c.functional); },
          [](KernelConfig& c, const std::string& v) {
            c.functional = functional_kernel_from_string(v);
          })
      .def_property(
          "operator", [](const KernelConfig& c) { return to_string(c.op); },
          [](KernelConfig& c, const std::string& v) {
            c.op = operator_type_from_string(v);
          });

  py::class_<FittedModel>(mod, "FittedModel")
      .def_property_readonly("alpha",
                             [](const FittedModel& m) { return m.alpha; })
      .def_property_readonly("lambda_",
                             [](const FittedModel& m) { return m.lambda; })
      .def_property_readonly("kernel",
                             [](const FittedModel& m) { return m.kernel; })
      .def_property_readonly("t_points",
                             [](const FittedModel& m) { return m.t_grid->points(); })
      .def_property_readonly("diagnostics",
                             [](const FittedModel& m) {
                               py::dict d;
                               d["residual_norm"] = m.diagnostics.residual_norm;
                               d["relative_residual"] = m.diagnostics.relative_residual;
                               d["iterations"] = m.diagnostics.iterations;
                               d["jitter_used"] = m.diagnostics.jitter_used;
                               d["solver"] = m.diagnostics.solver;
                               return d;
                             })
      .def("predict", &predict_matrix, py::arg("xd"), py::arg("xc"),
           py::arg("t") = std::nullopt,
           "Predict response curves; rows of the inputs are samples.")
      .def("save", [](const FittedModel& m, const std::string& path) {
        save_model(m, path);
      });

  mod.def(
      "fit",
      [](const Eigen::MatrixXd& xd, const std::vector<Eigen::MatrixXd>& xc,
         const std::vector<Eigen::VectorXd>& s_points, const Eigen::MatrixXd& y,
         const Eigen::VectorXd& t_points, double lambda, const KernelConfig& kernel,
         const std::string& solver, int threads) {
        const TrainingSet ts = make_training_set(xd, xc, s_points, y, t_points);
        return fit(ts, make_fit_config(lambda, kernel, solver, threads));
      },
      py::arg("xd"), py::arg("xc"), py::arg("s_points"), py::arg("y"),
      py::arg("t_points"), py::arg("lambda_") = 1e-3,
      py::arg("kernel") = KernelConfig{}, py::arg("solver") = "auto",
      py::arg("threads") = 1);

  mod.def(
      "cross_validate",
      [](const Eigen::MatrixXd& xd, const std::vector<Eigen::MatrixXd>& xc,
         const std::vector<Eigen::VectorXd>& s_points, const Eigen::MatrixXd& y,
         const Eigen::VectorXd& t_points, const std::vector<double>& lambdas,
         const KernelConfig& kernel, int folds, std::uint64_t seed, int threads) {
        const TrainingSet ts = make_training_set(xd, xc, s_points, y, t_points);
        FitConfig base = make_fit_config(lambdas.front(), kernel, "auto", threads);
        const CvResult cv = cross_validate(ts, base, lambdas, {}, {}, {}, folds, seed);
        py::list table;
        for (const CvRow& r : cv.table) {
          py::dict row;
          row["fold"] = r.fold;
          row["lambda_"] = r.lambda;
          row["ise"] = r.ise;
          row["chosen"] = r.chosen;
          table.append(row);
        }
        py::dict out;
        out["best_lambda"] = cv.best.lambda;
        out["best_score"] = cv.best_score;
        out["table"] = table;
        return out;
      },
      py::arg("xd"), py::arg("xc"), py::arg("s_points"), py::arg("y"),
      py::arg("t_points"), py::arg("lambdas"), py::arg("kernel") = KernelConfig{},
      py::arg("folds") = 5, py::arg("seed") = 0, py::arg("threads") = 1);

  mod.def("load_model", &load_model, py::arg("path"));

  mod.def(
      "evaluate",
      [](const Eigen::MatrixXd& pred, const Eigen::MatrixXd& truth,
         const Eigen::VectorXd& t_points) {
        const GridPtr grid = Grid::make(t_points);
        std::vector<Curve> p, t;
        for (Eigen::Index i = 0; i < pred.rows(); ++i) {
          p.emplace_back(grid, pred.row(i).transpose());
        }
        for (Eigen::Index i = 0; i < truth.rows(); ++i) {
          t.emplace_back(grid, truth.row(i).transpose());
        }
        return metrics_dict(evaluate(p, t));
      },
      py::arg("pred"), py::arg("truth"), py::arg("t_points"),
      "Integrated-squared-error metrics; rows are samples.");
}
