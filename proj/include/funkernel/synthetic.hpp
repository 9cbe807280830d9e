#pragma once

#include <Eigen/Core>
#include <array>
#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "funkernel/dataset.hpp"
#include "funkernel/grid.hpp"

namespace funkernel {

struct GridSpec {
  double a = 0.0;
  double b = 1.0;
  Eigen::Index points = 2;
};

// amplitude * exp(-((s-cs)^2 + (t-ct)^2) / (2 scale^2))
struct GaussianBumpSurface {
  double center_s = 0.5;
  double center_t = 0.5;
  double scale = 0.2;
  double amplitude = 1.0;
};

// Degree <= 2 polynomial in (s, t): c0 + c1 s + c2 t + c3 s^2 + c4 s t + c5 t^2.
struct PolynomialSurface {
  std::array<double, 6> coeffs{};
};

using Surface = std::variant<GaussianBumpSurface, PolynomialSurface>;

double surface_eval(const Surface& beta, double s, double t);

// Noiseless response of the functional linear model at the t-grid points:
// intercept(t) + sum_k quadrature(x_k * beta_k(., t)).
Eigen::VectorXd linear_model_response(const std::vector<Curve>& xc,
                                      const std::vector<Surface>& betas,
                                      const std::vector<double>& intercept,
                                      const Grid& t_grid);

// Raw discrete covariates as a text table; categorical columns stay labels
// until one-hot encoding.
struct DiscreteTable {
  std::vector<std::string> columns;
  std::vector<std::string> sample_ids;
  std::vector<std::vector<std::string>> rows;
};

// Ground truth is the multiple functional linear model: the response is the
// intercept plus integrated covariate-curve effects plus a per-category
// offset curve plus iid Gaussian noise at each grid point.
struct SyntheticConfig {
  Eigen::Index n = 0;
  int p = 1;
  int scalar_discrete = 0;       // standard-normal nuisance columns
  int categories = 0;            // 0 = no categorical column, else >= 2
  double category_amplitude = 0.0;
  GridSpec s_grid{0.0, 1.0, 101};
  GridSpec t_grid{0.0, 1.0, 31};
  std::vector<double> intercept;  // polynomial coefficients in t
  std::vector<Surface> betas;     // one surface per functional covariate
  int harmonics = 3;              // covariate generator: random Fourier terms
  double coef_sigma = 1.0;        // scale of Fourier coefficients
  double noise_sigma = 0.0;
  std::uint64_t seed = 0;

  void validate() const;
};

struct SyntheticData {
  TrainingSet ts;                // noisy responses
  std::vector<Curve> noiseless;  // same order as ts.samples
  DiscreteTable discrete;        // raw table, categorical column as labels
};

SyntheticData generate_synthetic(const SyntheticConfig& cfg);

}  // namespace funkernel
