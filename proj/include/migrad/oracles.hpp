#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <utility>

namespace migrad {

// Pair of d-dimensional standard normal variables with componentwise
// correlation rho: corr(x_i, y_j) = rho when i == j, zero otherwise.
struct ToyProblem {
  int dim = 1;
  double rho = 0.0;
};

// Draw n paired samples: x ~ N(0, I), y = rho x + sqrt(1 - rho^2) eps.
std::pair<Eigen::MatrixXd, Eigen::MatrixXd> sample_toy(const ToyProblem& p,
                                                       int n,
                                                       std::uint64_t seed);

// d I(x; y) / d rho = rho d / (1 - rho^2).
double analytic_mi_grad(const ToyProblem& p);

// I(x; y) = -(d/2) ln(1 - rho^2); its rho-derivative equals
// analytic_mi_grad exactly.
double analytic_mi(const ToyProblem& p);

// Score of a diagonal Gaussian: -(x - mean) / cov_diag, elementwise.
Eigen::VectorXd gaussian_score(const Eigen::VectorXd& x,
                               const Eigen::VectorXd& mean,
                               const Eigen::VectorXd& cov_diag);

// Closed-form MI of z = W x + eta, x ~ N(0, I), eta ~ N(0, noise_var I):
//   I(x; z) = 1/2 log det(I + W W^T / noise_var).
double linear_gaussian_mi(const Eigen::MatrixXd& W, double noise_var);

// Gradient of the above in W: (noise_var I + W W^T)^{-1} W.
Eigen::MatrixXd linear_gaussian_mi_grad(const Eigen::MatrixXd& W,
                                        double noise_var);

// Closed-form MI of the two-stage chain h = A x + eta_a, z = B h + eta_b
// with x ~ N(0, I), eta_a ~ N(0, var_a I), eta_b ~ N(0, var_b I):
//   I(h; z) = 1/2 log det(I + B Sigma_h B^T / var_b),
//   Sigma_h = A A^T + var_a I.
double linear_chain_mi(const Eigen::MatrixXd& A, double var_a,
                       const Eigen::MatrixXd& B, double var_b);

// Central finite differences of a scalar function over each coordinate.
Eigen::VectorXd finite_diff(const std::function<double(const Eigen::VectorXd&)>& f,
                            const Eigen::VectorXd& theta, double step);

}  // namespace migrad
