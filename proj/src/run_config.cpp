#include "funkernel/run_config.hpp"

#include <fstream>

#include "funkernel/data_io.hpp"

namespace funkernel {

namespace {

std::vector<double> doubles_from_json(const nlohmann::json& arr) {
  std::vector<double> out;
  for (const auto& v : arr) out.push_back(v.get<double>());
  return out;
}

GridSpec grid_spec_from_json(const nlohmann::json& j) {
  GridSpec g;
  g.a = j.at("a").get<double>();
  g.b = j.at("b").get<double>();
  g.points = j.at("points").get<Eigen::Index>();
  return g;
}

Surface surface_from_json(const nlohmann::json& j) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "gaussian_bump") {
    GaussianBumpSurface b;
    b.center_s = j.at("center_s").get<double>();
    b.center_t = j.at("center_t").get<double>();
    b.scale = j.at("scale").get<double>();
    b.amplitude = j.at("amplitude").get<double>();
    return b;
  }
  if (type == "polynomial") {
    PolynomialSurface p;
    const auto& c = j.at("coeffs");
    if (c.size() > p.coeffs.size()) {
      throw ConfigError("polynomial surface supports at most 6 coefficients (degree 2)");
    }
    for (std::size_t i = 0; i < c.size(); ++i) p.coeffs[i] = c[i].get<double>();
    return p;
  }
  throw ConfigError("unknown surface type '" + type + "'");
}

}  // namespace

SyntheticConfig synthetic_from_json(const nlohmann::json& j) {
  SyntheticConfig cfg;
  cfg.n = j.at("n").get<Eigen::Index>();
  cfg.p = j.value("p", 1);
  cfg.scalar_discrete = j.value("scalar_discrete", 0);
  cfg.categories = j.value("categories", 0);
  cfg.category_amplitude = j.value("category_amplitude", 0.0);
  if (j.contains("s_grid")) cfg.s_grid = grid_spec_from_json(j.at("s_grid"));
  if (j.contains("t_grid")) cfg.t_grid = grid_spec_from_json(j.at("t_grid"));
  if (j.contains("intercept")) cfg.intercept = doubles_from_json(j.at("intercept"));
  if (j.contains("betas")) {
    for (const auto& b : j.at("betas")) cfg.betas.push_back(surface_from_json(b));
  }
  cfg.harmonics = j.value("harmonics", 3);
  cfg.coef_sigma = j.value("coef_sigma", 1.0);
  cfg.noise_sigma = j.value("noise_sigma", 0.0);
  cfg.seed = j.value("seed", std::uint64_t{0});
  cfg.validate();
  return cfg;
}

RunConfig run_config_from_json(const nlohmann::json& j) {
  RunConfig cfg;
  try {
    if (j.contains("kernel")) cfg.kernel = kernel_from_json(j.at("kernel"));
    if (j.contains("lambda")) cfg.lambda = j.at("lambda").get<double>();
    if (j.contains("lambda_grid")) cfg.lambda_grid = doubles_from_json(j.at("lambda_grid"));
    if (j.contains("sigma_d_grid")) cfg.sigma_d_grid = doubles_from_json(j.at("sigma_d_grid"));
    if (j.contains("sigma_c_grid")) cfg.sigma_c_grid = doubles_from_json(j.at("sigma_c_grid"));
    if (j.contains("sigma_y_grid")) cfg.sigma_y_grid = doubles_from_json(j.at("sigma_y_grid"));
    if (j.contains("solver")) {
      const auto& s = j.at("solver");
      if (s.contains("type")) {
        cfg.solver = solver_kind_from_string(s.at("type").get<std::string>());
      }
      cfg.cg_tol = s.value("cg_tol", cfg.cg_tol);
      cfg.cg_max_iter = s.value("cg_max_iter", cfg.cg_max_iter);
      cfg.jitter = s.value("jitter", cfg.jitter);
    }
    cfg.cv_folds = j.value("cv_folds", cfg.cv_folds);
    cfg.seed = j.value("seed", cfg.seed);
    cfg.threads = j.value("threads", cfg.threads);
    cfg.center = j.value("center", cfg.center);
    if (j.contains("categorical_columns")) {
      for (const auto& c : j.at("categorical_columns")) {
        cfg.categorical_columns.push_back(c.get<std::string>());
      }
    }
    if (j.contains("paths")) {
      const auto& p = j.at("paths");
      cfg.paths.covariates = p.value("covariates", "");
      cfg.paths.discrete = p.value("discrete", "");
      cfg.paths.response = p.value("response", "");
      cfg.paths.model = p.value("model", "");
      cfg.paths.predictions = p.value("predictions", "");
      cfg.paths.truth = p.value("truth", "");
      cfg.paths.report = p.value("report", "");
      cfg.paths.score_table = p.value("score_table", "");
      cfg.paths.plot_data = p.value("plot_data", "");
      cfg.paths.out_dir = p.value("out_dir", "");
    }
    if (j.contains("synthetic")) {
      cfg.synthetic = synthetic_from_json(j.at("synthetic"));
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config parse error: ") + e.what());
  }
  if (cfg.lambda && !cfg.lambda_grid.empty()) {
    throw ConfigError("config sets both lambda and lambda_grid; choose one");
  }
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config '" + path + "' is not valid JSON: " + e.what());
  }
  return run_config_from_json(j);
}

FitConfig RunConfig::fit_config() const {
  if (!lambda) throw ConfigError("this command requires a single lambda in the config");
  FitConfig fc;
  fc.lambda = *lambda;
  fc.kernel = kernel;
  fc.solver = solver;
  fc.cg_tol = cg_tol;
  fc.cg_max_iter = cg_max_iter;
  fc.jitter = jitter;
  fc.threads = threads;
  fc.validate();
  return fc;
}

}  // namespace funkernel
