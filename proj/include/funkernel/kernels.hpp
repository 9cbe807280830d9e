#pragma once

#include <Eigen/Core>
#include <span>
#include <string>

#include "funkernel/dataset.hpp"
#include "funkernel/grid.hpp"

namespace funkernel {

enum class FunctionalKernel { linear, gaussian };
enum class OperatorType { integral, identity };

std::string to_string(FunctionalKernel k);
std::string to_string(OperatorType op);
FunctionalKernel functional_kernel_from_string(const std::string& s);
OperatorType operator_type_from_string(const std::string& s);

// Kernel choices and bandwidths. The scalar factor on inputs is always the
// sum k_{x^d} + k_{x^c}; the action on the response space is either the
// integral operator g -> \int k_y(s,.)g(s) ds or the identity.
struct KernelConfig {
  double sigma_d = 1.0;  // Gaussian bandwidth on discrete covariates
  FunctionalKernel functional = FunctionalKernel::gaussian;
  double sigma_c = 1.0;  // Gaussian bandwidth on covariate curves
  double sigma_y = 1.0;  // Gaussian bandwidth of the response kernel k_y
  OperatorType op = OperatorType::integral;

  void validate() const;
};

// exp(-||u - v||^2 / (2 sigma_d^2)); empty vectors contribute 0 to kappa.
double k_discrete(const Eigen::VectorXd& u, const Eigen::VectorXd& v, double sigma_d);

// Scalar kernel on tuples of covariate curves.
// linear: sum_q <x_iq, x_jq>_{L2};  gaussian: exp(-sum_q d_q^2 / (2 sigma_c^2)).
double k_functional(std::span<const Curve> xc_i, std::span<const Curve> xc_j,
                    const KernelConfig& cfg);

// The scalar factor of the operator-valued kernel: k_discrete + k_functional.
double kappa(const Sample& xi, const Sample& xj, const KernelConfig& cfg);

// Response-kernel Gram matrix on the t-grid plus its quadrature weights.
struct ResponseGram {
  GridPtr grid;
  Eigen::MatrixXd Ky;   // m x m, Ky(l, l') = k_y(t_l, t_{l'})
  Eigen::VectorXd w;    // diagonal of W, the grid's quadrature weights
};

ResponseGram response_gram(const GridPtr& t_grid, const KernelConfig& cfg);

// Gaussian response-kernel value at arbitrary coordinates.
double k_response(double s, double t, const KernelConfig& cfg);

// One m x m block of the operator kernel matrix.
// integral: kappa_ij * (Ky * W), the quadrature discretization of the
// integral operator applied at grid points; identity: kappa_ij * I.
Eigen::MatrixXd operator_block(double kappa_ij, const ResponseGram& rg, OperatorType op);

}  // namespace funkernel
