#pragma once

#include <Eigen/Dense>

#include "migrad/kernels.hpp"

namespace migrad::serial {

// Single-threaded reference implementations of the parallel kernels.
// Kept for correctness tests (results must match the OpenMP versions
// bitwise) and for the benchmark target.

Eigen::MatrixXd pairwise_sqdist(const Eigen::MatrixXd& X);

Eigen::MatrixXd cross_sqdist(const Eigen::MatrixXd& Q, const Eigen::MatrixXd& X);

Eigen::MatrixXd kernel_from_sqdist(const Eigen::MatrixXd& sqdist,
                                   double bandwidth);

Eigen::MatrixXd gram(const RbfKernel& kernel, const Eigen::MatrixXd& X);

// Nested-loop evaluation of the fitted score expansion
//   g(x) = sum_j beta[j,:] * psi_j(x),
//   psi_j(x) = (sqrt(M) / lambda_j) * sum_m u[m,j] k(x, x_m),
// used as an independent oracle against the GEMM-based pipeline.
Eigen::MatrixXd score_expansion(const Eigen::MatrixXd& queries,
                                const Eigen::MatrixXd& base,
                                const RbfKernel& kernel,
                                const Eigen::VectorXd& eigenvalues,
                                const Eigen::MatrixXd& eigenvectors,
                                const Eigen::MatrixXd& beta);

// Direct evaluation of the spectral coefficients
//   beta[j,:] = -(1/M) sum_m grad_x psi_j(x_m),
//   grad_x psi_j(x) = (sqrt(M) / lambda_j) * sum_m grad_x k(x, x_m) u[m,j],
// by the O(M^2 J d) nested sum. Oracle for the rearranged assembly in fit.
Eigen::MatrixXd beta_direct(const Eigen::MatrixXd& base,
                            const RbfKernel& kernel,
                            const Eigen::VectorXd& eigenvalues,
                            const Eigen::MatrixXd& eigenvectors);

}  // namespace migrad::serial
