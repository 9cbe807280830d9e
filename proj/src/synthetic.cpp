#include "funkernel/synthetic.hpp"

#include <cmath>
#include <iomanip>
#include <numbers>
#include <random>
#include <sstream>
#include <utility>

#include "funkernel/data_io.hpp"

namespace funkernel {

double surface_eval(const Surface& beta, double s, double t) {
  return std::visit(
      [&](const auto& b) -> double {
        using T = std::decay_t<decltype(b)>;
        if constexpr (std::is_same_v<T, GaussianBumpSurface>) {
          const double ds = s - b.center_s;
          const double dt = t - b.center_t;
          return b.amplitude *
                 std::exp(-(ds * ds + dt * dt) / (2.0 * b.scale * b.scale));
        } else {
          const auto& c = b.coeffs;
          return c[0] + c[1] * s + c[2] * t + c[3] * s * s + c[4] * s * t +
                 c[5] * t * t;
        }
      },
      beta);
}

void SyntheticConfig::validate() const {
  if (n < 1) throw ConfigError("synthetic n must be >= 1");
  if (p < 1) throw ConfigError("synthetic p must be >= 1");
  if (scalar_discrete < 0) throw ConfigError("scalar_discrete must be >= 0");
  if (categories == 1 || categories < 0) {
    throw ConfigError("categories must be 0 or >= 2");
  }
  if (!betas.empty() && static_cast<int>(betas.size()) != p) {
    throw ConfigError("betas must be empty or have one surface per covariate");
  }
  if (harmonics < 1) throw ConfigError("harmonics must be >= 1");
  if (noise_sigma < 0) throw ConfigError("noise_sigma must be >= 0");
  if (s_grid.points < 2 || t_grid.points < 2) {
    throw ConfigError("grids need at least 2 points");
  }
}

namespace {

std::string sample_id(Eigen::Index i) {
  std::ostringstream os;
  os << "s" << std::setw(6) << std::setfill('0') << (i + 1);
  return os.str();
}

// Random Fourier combination on [a, b]; coefficient scale decays as sigma/h.
Eigen::VectorXd fourier_curve(const Grid& grid, int harmonics, double sigma,
                              std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  const double a = grid.points()(0);
  const double span = grid.span();
  Eigen::VectorXd v = Eigen::VectorXd::Zero(grid.size());
  for (int h = 1; h <= harmonics; ++h) {
    const double ca = normal(rng) * sigma / h;
    const double cb = normal(rng) * sigma / h;
    for (Eigen::Index l = 0; l < grid.size(); ++l) {
      const double u = (grid.points()(l) - a) / span;
      v(l) += ca * std::cos(2.0 * std::numbers::pi * h * u) +
              cb * std::sin(2.0 * std::numbers::pi * h * u);
    }
  }
  return v;
}

}  // namespace

Eigen::VectorXd linear_model_response(const std::vector<Curve>& xc,
                                      const std::vector<Surface>& betas,
                                      const std::vector<double>& intercept,
                                      const Grid& t_grid) {
  if (!betas.empty() && betas.size() != xc.size()) {
    throw ConfigError("one regression surface per covariate curve is required");
  }
  Eigen::VectorXd y = Eigen::VectorXd::Zero(t_grid.size());
  for (Eigen::Index l = 0; l < t_grid.size(); ++l) {
    const double t = t_grid.points()(l);
    double v = 0.0;
    for (std::size_t j = 0; j < intercept.size(); ++j) {
      v += intercept[j] * std::pow(t, static_cast<double>(j));
    }
    for (std::size_t q = 0; q < betas.size(); ++q) {
      const Grid& sg = *xc[q].grid;
      double integral = 0.0;
      for (Eigen::Index ls = 0; ls < sg.size(); ++ls) {
        integral += sg.weights()(ls) * xc[q].values(ls) *
                    surface_eval(betas[q], sg.points()(ls), t);
      }
      v += integral;
    }
    y(l) = v;
  }
  return y;
}

SyntheticData generate_synthetic(const SyntheticConfig& cfg) {
  cfg.validate();
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> normal(0.0, 1.0);

  GridPtr s_grid = Grid::uniform(cfg.s_grid.a, cfg.s_grid.b, cfg.s_grid.points);
  GridPtr t_grid = Grid::uniform(cfg.t_grid.a, cfg.t_grid.b, cfg.t_grid.points);
  const Eigen::Index m = t_grid->size();

  // Covariate curves, drawn in (sample, component) order.
  std::vector<std::vector<Curve>> xc(cfg.n);
  for (Eigen::Index i = 0; i < cfg.n; ++i) {
    for (int q = 0; q < cfg.p; ++q) {
      xc[i].emplace_back(s_grid, fourier_curve(*s_grid, cfg.harmonics, cfg.coef_sigma, rng));
    }
  }

  // Category assignment and per-category offset curves.
  std::vector<int> category(cfg.n, -1);
  std::vector<Eigen::VectorXd> offsets;
  if (cfg.categories > 0) {
    std::uniform_int_distribution<int> pick(0, cfg.categories - 1);
    for (Eigen::Index i = 0; i < cfg.n; ++i) category[i] = pick(rng);
    for (int c = 0; c < cfg.categories; ++c) {
      offsets.push_back(fourier_curve(*t_grid, cfg.harmonics, cfg.category_amplitude, rng));
    }
  }

  // Scalar nuisance columns.
  Eigen::MatrixXd scalars(cfg.n, cfg.scalar_discrete);
  for (Eigen::Index i = 0; i < cfg.n; ++i) {
    for (int c = 0; c < cfg.scalar_discrete; ++c) scalars(i, c) = normal(rng);
  }

  // Noiseless responses from the linear model.
  std::vector<Eigen::VectorXd> clean(cfg.n);
  for (Eigen::Index i = 0; i < cfg.n; ++i) {
    Eigen::VectorXd y = linear_model_response(xc[i], cfg.betas, cfg.intercept, *t_grid);
    if (category[i] >= 0) y += offsets[category[i]];
    clean[i] = std::move(y);
  }

  // Raw discrete table: scalar columns first, then the categorical column.
  DiscreteTable table;
  for (int c = 0; c < cfg.scalar_discrete; ++c) {
    table.columns.push_back("d" + std::to_string(c));
  }
  if (cfg.categories > 0) table.columns.push_back("group");
  for (Eigen::Index i = 0; i < cfg.n; ++i) {
    table.sample_ids.push_back(sample_id(i));
    std::vector<std::string> row;
    for (int c = 0; c < cfg.scalar_discrete; ++c) {
      row.push_back(format_double(scalars(i, c)));
    }
    if (cfg.categories > 0) row.push_back("C" + std::to_string(category[i]));
    table.rows.push_back(std::move(row));
  }

  std::vector<std::string> categorical;
  if (cfg.categories > 0) categorical.push_back("group");
  auto [xd, xd_names] = encode_discrete(table, categorical);

  SyntheticData out;
  out.ts.s_grids.assign(cfg.p, s_grid);
  out.ts.t_grid = t_grid;
  for (Eigen::Index i = 0; i < cfg.n; ++i) {
    Eigen::VectorXd noisy = clean[i];
    for (Eigen::Index l = 0; l < m; ++l) {
      noisy(l) += cfg.noise_sigma * normal(rng);
    }
    Sample s;
    s.id = table.sample_ids[i];
    s.xd = xd[i];
    s.xc = xc[i];
    s.y = Curve(t_grid, std::move(noisy));
    out.ts.samples.push_back(std::move(s));
    out.noiseless.emplace_back(t_grid, clean[i]);
  }
  out.discrete = std::move(table);
  return out;
}

}  // namespace funkernel
