#pragma once

#include <Eigen/Core>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "funkernel/estimator.hpp"
#include "funkernel/synthetic.hpp"

#include "json.hpp"

namespace funkernel {

// Decimal text with 17 significant digits; lossless for binary64.
std::string format_double(double v);

// One-hot encodes the declared categorical columns (category order is first
// appearance), parses the rest as numbers. Returns per-sample vectors and the
// expanded column names.
std::pair<std::vector<Eigen::VectorXd>, std::vector<std::string>> encode_discrete(
    const DiscreteTable& table, const std::vector<std::string>& categorical);

struct DatasetBundle {
  std::string covariates_path;
  std::optional<std::string> discrete_path;
  std::optional<std::string> response_path;
  std::vector<std::string> categorical_columns;
};

struct Dataset {
  std::vector<Sample> samples;  // responses present iff response_path given
  std::vector<GridPtr> s_grids;
  std::vector<std::string> variables;  // functional variable names, file order
  GridPtr t_grid;                      // null when no responses loaded
  std::vector<std::string> xd_names;
};

Dataset load_dataset(const DatasetBundle& bundle);
TrainingSet to_training_set(const Dataset& ds);

// CSV writers, matching the loader's schemas.
void save_functional_csv(const std::string& path, const std::vector<Sample>& samples,
                         const std::vector<std::string>& variables);
void save_discrete_csv(const std::string& path, const DiscreteTable& table);
void save_response_csv(const std::string& path, const std::vector<std::string>& ids,
                       const std::vector<Curve>& curves);

// Reads a `sample_id,t,value` file (responses, predictions, or ground truth).
std::pair<std::vector<std::string>, std::vector<Curve>> load_response_csv(
    const std::string& path);

struct Metrics {
  std::vector<double> ise;  // per-sample integrated squared error
  double mean_ise = 0.0;
  double root_mean_ise = 0.0;
  Eigen::VectorXd per_t_mse;  // mean squared error at each grid point
};

Metrics evaluate(const std::vector<Curve>& pred, const std::vector<Curve>& truth);

// Subtracts the mean response curve in place and returns it.
Eigen::VectorXd center_responses(TrainingSet& ts);

nlohmann::json kernel_to_json(const KernelConfig& cfg);
KernelConfig kernel_from_json(const nlohmann::json& j);

// Versioned model container: magic string, format version, JSON payload,
// trailing checksum. Round-trips every numeric value exactly.
void save_model(const FittedModel& model, const std::string& path);
FittedModel load_model(const std::string& path);

}  // namespace funkernel
