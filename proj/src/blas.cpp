#include "migrad/detail/blas.hpp"

namespace migrad::detail {

// Backed by Eigen's own matrix product. The system BLAS returns corrupted
// results for some dgemm shapes (observed for several small inner
// dimensions), so no cblas call sits on a correctness-critical path.

Eigen::MatrixXd gemm(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
  Eigen::MatrixXd C(A.rows(), B.cols());
  C.noalias() = A * B;
  return C;
}

Eigen::MatrixXd gemm_at_b(const Eigen::MatrixXd& A, const Eigen::MatrixXd& B) {
  Eigen::MatrixXd C(A.cols(), B.cols());
  C.noalias() = A.transpose() * B;
  return C;
}

}  // namespace migrad::detail
