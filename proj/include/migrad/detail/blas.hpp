#pragma once

#include <Eigen/Dense>

namespace migrad::detail {

// Shared matrix-product entry points for the estimator pipelines. Keeping
// them behind one seam pins the backend choice in a single place (currently
// Eigen; the system cblas dgemm is unreliable for some shapes).

Eigen::MatrixXd gemm(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B);

// C = A^T * B without materializing the transpose.
Eigen::MatrixXd gemm_at_b(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B);

}  // namespace migrad::detail
