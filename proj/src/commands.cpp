#include "funkernel/commands.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "funkernel/data_io.hpp"
#include "funkernel/run_config.hpp"

namespace funkernel {

namespace {

namespace fs = std::filesystem;

int guarded(const std::function<void()>& body) {
  try {
    body();
    return 0;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const IoError& e) {
    std::cerr << "I/O error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
}

RunConfig load_with_overrides(const CliOptions& opts) {
  RunConfig cfg = load_run_config(opts.config_path);
  if (opts.seed) {
    cfg.seed = *opts.seed;
    if (cfg.synthetic) cfg.synthetic->seed = *opts.seed;
  }
  if (opts.threads) cfg.threads = *opts.threads;
  return cfg;
}

std::string pick_path(const std::string& override_path, const std::string& config_path,
                      const std::string& what) {
  if (!override_path.empty()) return override_path;
  if (!config_path.empty()) return config_path;
  throw ConfigError("no path configured for " + what);
}

std::vector<std::string> variable_names(int p) {
  int width = 2;
  for (int v = 100; p >= v; v *= 10) ++width;
  std::vector<std::string> names;
  for (int q = 1; q <= p; ++q) {
    std::ostringstream os;
    os << "x" << std::setw(width) << std::setfill('0') << q;
    names.push_back(os.str());
  }
  return names;
}

DatasetBundle bundle_from(const RunConfig& cfg, bool with_response) {
  if (cfg.paths.covariates.empty()) {
    throw ConfigError("paths.covariates is required");
  }
  DatasetBundle b;
  b.covariates_path = cfg.paths.covariates;
  if (!cfg.paths.discrete.empty()) b.discrete_path = cfg.paths.discrete;
  if (with_response) {
    if (cfg.paths.response.empty()) throw ConfigError("paths.response is required");
    b.response_path = cfg.paths.response;
  }
  b.categorical_columns = cfg.categorical_columns;
  return b;
}

void write_json_report(const std::string& path, const nlohmann::json& j) {
  if (path.empty()) return;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write report '" + path + "'");
  out << j.dump(2) << "\n";
}

}  // namespace

int cmd_synth(const CliOptions& opts) {
  return guarded([&] {
    const RunConfig cfg = load_with_overrides(opts);
    if (!cfg.synthetic) {
      throw ConfigError("synth requires a 'synthetic' section in the config");
    }
    const std::string out_dir =
        pick_path(opts.out, cfg.paths.out_dir, "the synth output directory");
    if (!fs::is_directory(out_dir)) {
      throw IoError("output directory '" + out_dir + "' does not exist");
    }
    const SyntheticData data = generate_synthetic(*cfg.synthetic);
    const auto names = variable_names(cfg.synthetic->p);
    save_functional_csv((fs::path(out_dir) / "covariates.csv").string(),
                        data.ts.samples, names);
    save_discrete_csv((fs::path(out_dir) / "discrete.csv").string(), data.discrete);
    std::vector<std::string> ids;
    std::vector<Curve> noisy;
    for (const Sample& s : data.ts.samples) {
      ids.push_back(s.id);
      noisy.push_back(*s.y);
    }
    save_response_csv((fs::path(out_dir) / "response.csv").string(), ids, noisy);
    save_response_csv((fs::path(out_dir) / "truth.csv").string(), ids, data.noiseless);
    if (opts.verbose) {
      std::cerr << "synth: wrote " << data.ts.samples.size() << " samples to " << out_dir
                << "\n";
    }
  });
}

int cmd_fit(const CliOptions& opts) {
  return guarded([&] {
    const RunConfig cfg = load_with_overrides(opts);
    const auto t0 = std::chrono::steady_clock::now();
    const Dataset ds = load_dataset(bundle_from(cfg, /*with_response=*/true));
    TrainingSet ts = to_training_set(ds);
    std::optional<Eigen::VectorXd> offset;
    if (cfg.center) offset = center_responses(ts);
    const FitConfig fc = cfg.fit_config();
    FittedModel model = fit(ts, fc);
    model.y_offset = offset;
    const std::string model_path = pick_path(opts.out, cfg.paths.model, "the model file");
    save_model(model, model_path);
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    const nlohmann::json report = {
        {"n", ts.n()},          {"m", ts.m()},
        {"p", ts.p()},          {"k", ts.k()},
        {"lambda", fc.lambda},  {"solver", model.diagnostics.solver},
        {"residual_norm", model.diagnostics.residual_norm},
        {"relative_residual", model.diagnostics.relative_residual},
        {"iterations", model.diagnostics.iterations},
        {"jitter_used", model.diagnostics.jitter_used},
        {"wall_time_s", wall},  {"model", model_path}};
    write_json_report(cfg.paths.report, report);
    std::cerr << "fit: n=" << ts.n() << " m=" << ts.m() << " p=" << ts.p()
              << " k=" << ts.k() << " lambda=" << fc.lambda
              << " solver=" << model.diagnostics.solver
              << " residual=" << model.diagnostics.residual_norm << " ("
              << std::fixed << std::setprecision(3) << wall << " s)\n";
  });
}

int cmd_cv(const CliOptions& opts) {
  return guarded([&] {
    const RunConfig cfg = load_with_overrides(opts);
    if (cfg.lambda_grid.empty()) {
      throw ConfigError("cv requires a lambda_grid in the config");
    }
    const Dataset ds = load_dataset(bundle_from(cfg, /*with_response=*/true));
    TrainingSet ts = to_training_set(ds);
    if (cfg.center) center_responses(ts);
    FitConfig base;
    base.kernel = cfg.kernel;
    base.solver = cfg.solver;
    base.cg_tol = cfg.cg_tol;
    base.cg_max_iter = cfg.cg_max_iter;
    base.jitter = cfg.jitter;
    base.threads = cfg.threads;
    const CvResult cv =
        cross_validate(ts, base, cfg.lambda_grid, cfg.sigma_d_grid, cfg.sigma_c_grid,
                       cfg.sigma_y_grid, cfg.cv_folds, cfg.seed);

    const std::string table_path =
        pick_path(opts.out, cfg.paths.score_table, "the CV score table");
    std::ofstream out(table_path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + table_path + "'");
    out << "fold,lambda,sigma_d,sigma_c,sigma_y,ise,chosen\n";
    for (const CvRow& r : cv.table) {
      out << r.fold << ',' << format_double(r.lambda) << ',' << format_double(r.sigma_d)
          << ',' << format_double(r.sigma_c) << ',' << format_double(r.sigma_y) << ','
          << format_double(r.ise) << ',' << (r.chosen ? 1 : 0) << '\n';
    }
    if (!out) throw IoError("write failed for '" + table_path + "'");

    const nlohmann::json report = {{"lambda", cv.best.lambda},
                                   {"kernel", kernel_to_json(cv.best.kernel)},
                                   {"mean_ise", cv.best_score},
                                   {"folds", cfg.cv_folds},
                                   {"score_table", table_path}};
    write_json_report(cfg.paths.report, report);
    std::cerr << "cv: best lambda=" << cv.best.lambda
              << " sigma_d=" << cv.best.kernel.sigma_d
              << " sigma_c=" << cv.best.kernel.sigma_c
              << " sigma_y=" << cv.best.kernel.sigma_y << " mean ISE=" << cv.best_score
              << "\n";
  });
}

int cmd_predict(const CliOptions& opts) {
  return guarded([&] {
    const RunConfig cfg = load_with_overrides(opts);
    if (cfg.paths.model.empty()) throw ConfigError("paths.model is required");
    const FittedModel model = load_model(cfg.paths.model);
    const std::string out_path =
        pick_path(opts.out, cfg.paths.predictions, "the predictions file");

    // An empty prediction set is legal: emit just the header.
    {
      std::ifstream probe(cfg.paths.covariates.empty() ? "" : cfg.paths.covariates);
      if (cfg.paths.covariates.empty()) throw ConfigError("paths.covariates is required");
      if (!probe) throw IoError("cannot open '" + cfg.paths.covariates + "'");
      std::string line;
      bool has_rows = false;
      std::getline(probe, line);  // header
      while (std::getline(probe, line)) {
        if (!line.empty() && line != "\r") {
          has_rows = true;
          break;
        }
      }
      if (!has_rows) {
        save_response_csv(out_path, {}, {});
        std::cerr << "predict: empty prediction set, wrote header only\n";
        return;
      }
    }

    const Dataset ds = load_dataset(bundle_from(cfg, /*with_response=*/false));
    if (ds.s_grids.size() != model.s_grids.size()) {
      throw IncompatibleError("dataset has " + std::to_string(ds.s_grids.size()) +
                              " functional variables, model expects " +
                              std::to_string(model.s_grids.size()));
    }
    for (std::size_t q = 0; q < ds.s_grids.size(); ++q) {
      if (!same_grid(*ds.s_grids[q], *model.s_grids[q])) {
        throw IncompatibleError("variable '" + ds.variables[q] +
                                "' is not on the model's s-grid");
      }
    }
    std::vector<std::string> ids;
    std::vector<Curve> preds;
    for (const Sample& s : ds.samples) {
      ids.push_back(s.id);
      preds.push_back(predict(model, s, model.t_grid));
    }
    save_response_csv(out_path, ids, preds);
    std::cerr << "predict: wrote " << ids.size() << " curves to " << out_path << "\n";
  });
}

int cmd_eval(const CliOptions& opts) {
  return guarded([&] {
    const RunConfig cfg = load_with_overrides(opts);
    if (cfg.paths.predictions.empty()) throw ConfigError("paths.predictions is required");
    if (cfg.paths.truth.empty()) throw ConfigError("paths.truth is required");
    auto [pred_ids, pred_curves] = load_response_csv(cfg.paths.predictions);
    auto [truth_ids, truth_curves] = load_response_csv(cfg.paths.truth);
    if (pred_ids.size() != truth_ids.size()) {
      throw IncompatibleError("prediction/truth sample counts differ");
    }
    // Align predictions to the truth file's order.
    std::vector<Curve> aligned;
    for (const std::string& id : truth_ids) {
      auto it = std::find(pred_ids.begin(), pred_ids.end(), id);
      if (it == pred_ids.end()) {
        throw DataError("sample_id '" + id + "' missing from predictions");
      }
      aligned.push_back(pred_curves[static_cast<std::size_t>(it - pred_ids.begin())]);
    }
    const Metrics m = evaluate(aligned, truth_curves);

    nlohmann::json per_sample = nlohmann::json::array();
    for (std::size_t i = 0; i < truth_ids.size(); ++i) {
      per_sample.push_back({{"id", truth_ids[i]}, {"ise", m.ise[i]}});
    }
    const nlohmann::json report = {{"mean_ise", m.mean_ise},
                                   {"root_mean_ise", m.root_mean_ise},
                                   {"samples", per_sample}};
    const std::string report_path = !opts.out.empty() ? opts.out : cfg.paths.report;
    write_json_report(report_path, report);
    if (!cfg.paths.plot_data.empty()) {
      std::ofstream out(cfg.paths.plot_data, std::ios::binary);
      if (!out) throw IoError("cannot write '" + cfg.paths.plot_data + "'");
      out << "t,mse\n";
      const GridPtr grid = truth_curves.front().grid;
      for (Eigen::Index l = 0; l < grid->size(); ++l) {
        out << format_double(grid->points()(l)) << ',' << format_double(m.per_t_mse(l))
            << '\n';
      }
    }
    std::cerr << "eval: mean ISE=" << m.mean_ise << " root mean ISE=" << m.root_mean_ise
              << " over " << truth_ids.size() << " samples\n";
  });
}

}  // namespace funkernel
