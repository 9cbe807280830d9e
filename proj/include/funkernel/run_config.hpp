#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "funkernel/estimator.hpp"
#include "funkernel/synthetic.hpp"

#include "json.hpp"

namespace funkernel {

// One JSON document drives every subcommand; flags override individual fields.
struct RunConfig {
  KernelConfig kernel;
  std::optional<double> lambda;
  std::vector<double> lambda_grid;
  std::vector<double> sigma_d_grid, sigma_c_grid, sigma_y_grid;
  SolverKind solver = SolverKind::automatic;
  double cg_tol = 1e-10;
  int cg_max_iter = 10000;
  double jitter = 0.0;
  int cv_folds = 5;
  std::uint64_t seed = 0;
  int threads = 1;
  bool center = false;
  std::vector<std::string> categorical_columns;

  struct Paths {
    std::string covariates, discrete, response, model, predictions, truth;
    std::string report, score_table, plot_data, out_dir;
  } paths;

  std::optional<SyntheticConfig> synthetic;

  // FitConfig for a single-lambda command; throws when lambda is absent.
  FitConfig fit_config() const;
};

RunConfig load_run_config(const std::string& path);
RunConfig run_config_from_json(const nlohmann::json& j);
SyntheticConfig synthetic_from_json(const nlohmann::json& j);

}  // namespace funkernel
