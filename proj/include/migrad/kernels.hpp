#pragma once

#include <Eigen/Dense>

#include "migrad/errors.hpp"

namespace migrad {

// Gaussian RBF kernel k(x, y) = exp(-||x - y||^2 / (2 sigma^2)).
class RbfKernel {
 public:
  explicit RbfKernel(double bandwidth);

  double bandwidth() const { return bandwidth_; }

  // k(x, y) in (0, 1]; 1 iff x == y.
  double eval(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const;

  // d/dx k(x, y) = -(x - y) / sigma^2 * k(x, y).
  Eigen::VectorXd grad_x(const Eigen::VectorXd& x,
                         const Eigen::VectorXd& y) const;

 private:
  double bandwidth_;
};

// Squared Euclidean distances between all row pairs of X (n x d).
// Parallelized over row pairs; every entry is computed independently so the
// result does not depend on the thread schedule. Diagonal is exactly zero
// and the matrix is exactly symmetric.
Eigen::MatrixXd pairwise_sqdist(const Eigen::MatrixXd& X);

// Squared Euclidean distances between rows of Q (q x d) and rows of X (n x d).
Eigen::MatrixXd cross_sqdist(const Eigen::MatrixXd& Q, const Eigen::MatrixXd& X);

// Elementwise exp(-sqdist / (2 bandwidth^2)), parallelized over columns.
Eigen::MatrixXd kernel_from_sqdist(const Eigen::MatrixXd& sqdist,
                                   double bandwidth);

// Gram matrix of the kernel over rows of X. Symmetric, unit diagonal,
// positive semidefinite up to roundoff. Throws InsufficientSamplesError
// when X has fewer than two rows.
Eigen::MatrixXd gram(const RbfKernel& kernel, const Eigen::MatrixXd& X);

// Median of the n(n-1)/2 pairwise Euclidean distances between rows of X.
// Falls back to 1.0 when the median is zero (all-coincident or mostly
// coincident batches) so downstream bandwidths stay positive.
double median_heuristic(const Eigen::MatrixXd& X);

// Same, reusing an already computed pairwise squared-distance matrix.
double median_heuristic_from_sqdist(const Eigen::MatrixXd& sqdist);

}  // namespace migrad
