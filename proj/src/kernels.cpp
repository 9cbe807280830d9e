#include "funkernel/kernels.hpp"

#include <cmath>
#include <string>

namespace funkernel {

std::string to_string(FunctionalKernel k) {
  return k == FunctionalKernel::linear ? "linear" : "gaussian";
}

std::string to_string(OperatorType op) {
  return op == OperatorType::integral ? "integral" : "identity";
}

FunctionalKernel functional_kernel_from_string(const std::string& s) {
  if (s == "linear") return FunctionalKernel::linear;
  if (s == "gaussian") return FunctionalKernel::gaussian;
  throw ConfigError("unknown functional kernel '" + s + "'");
}

OperatorType operator_type_from_string(const std::string& s) {
  if (s == "integral") return OperatorType::integral;
  if (s == "identity") return OperatorType::identity;
  throw ConfigError("unknown operator type '" + s + "'");
}

void KernelConfig::validate() const {
  if (!(sigma_d > 0)) throw ConfigError("sigma_d must be > 0");
  if (functional == FunctionalKernel::gaussian && !(sigma_c > 0)) {
    throw ConfigError("sigma_c must be > 0");
  }
  if (!(sigma_y > 0)) throw ConfigError("sigma_y must be > 0");
}

double k_discrete(const Eigen::VectorXd& u, const Eigen::VectorXd& v, double sigma_d) {
  if (u.size() != v.size()) {
    throw IncompatibleError("discrete covariate vectors have different lengths");
  }
  if (u.size() == 0) {
    return 0.0;  // absent term of the kernel sum
  }
  return std::exp(-(u - v).squaredNorm() / (2.0 * sigma_d * sigma_d));
}

double k_functional(std::span<const Curve> xc_i, std::span<const Curve> xc_j,
                    const KernelConfig& cfg) {
  if (xc_i.size() != xc_j.size()) {
    throw IncompatibleError("functional covariate tuples have different arity");
  }
  if (cfg.functional == FunctionalKernel::linear) {
    double acc = 0.0;
    for (std::size_t q = 0; q < xc_i.size(); ++q) {
      acc += l2_inner(xc_i[q], xc_j[q]);
    }
    return acc;
  }
  double d2 = 0.0;
  for (std::size_t q = 0; q < xc_i.size(); ++q) {
    d2 += l2_distance_sq(xc_i[q], xc_j[q]);
  }
  return std::exp(-d2 / (2.0 * cfg.sigma_c * cfg.sigma_c));
}

double kappa(const Sample& xi, const Sample& xj, const KernelConfig& cfg) {
  return k_discrete(xi.xd, xj.xd, cfg.sigma_d) + k_functional(xi.xc, xj.xc, cfg);
}

double k_response(double s, double t, const KernelConfig& cfg) {
  const double d = s - t;
  return std::exp(-d * d / (2.0 * cfg.sigma_y * cfg.sigma_y));
}

ResponseGram response_gram(const GridPtr& t_grid, const KernelConfig& cfg) {
  if (!t_grid) throw InvalidGridError("response grid is null");
  cfg.validate();
  const Eigen::Index m = t_grid->size();
  Eigen::MatrixXd Ky(m, m);
  for (Eigen::Index l = 0; l < m; ++l) {
    for (Eigen::Index lp = l; lp < m; ++lp) {
      const double v = k_response(t_grid->points()(l), t_grid->points()(lp), cfg);
      Ky(l, lp) = v;
      Ky(lp, l) = v;
    }
  }
  return ResponseGram{t_grid, std::move(Ky), t_grid->weights()};
}

Eigen::MatrixXd operator_block(double kappa_ij, const ResponseGram& rg, OperatorType op) {
  const Eigen::Index m = rg.Ky.rows();
  if (op == OperatorType::identity) {
    return kappa_ij * Eigen::MatrixXd::Identity(m, m);
  }
  return kappa_ij * (rg.Ky * rg.w.asDiagonal());
}

}  // namespace funkernel
