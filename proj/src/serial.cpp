#include "migrad/serial.hpp"

#include <cmath>

namespace migrad::serial {

namespace {

using RowMajorMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

}  // namespace

Eigen::MatrixXd pairwise_sqdist(const Eigen::MatrixXd& X) {
  const int n = static_cast<int>(X.rows());
  const int d = static_cast<int>(X.cols());
  RowMajorMatrix R = X;
  Eigen::MatrixXd out(n, n);
  for (int i = 0; i < n; ++i) {
    const double* xi = R.data() + static_cast<std::ptrdiff_t>(i) * d;
    out(i, i) = 0.0;
    for (int j = i + 1; j < n; ++j) {
      const double* xj = R.data() + static_cast<std::ptrdiff_t>(j) * d;
      double s = 0.0;
      for (int c = 0; c < d; ++c) {
        const double diff = xi[c] - xj[c];
        s += diff * diff;
      }
      out(i, j) = s;
      out(j, i) = s;
    }
  }
  return out;
}

Eigen::MatrixXd cross_sqdist(const Eigen::MatrixXd& Q,
                             const Eigen::MatrixXd& X) {
  if (Q.cols() != X.cols())
    throw std::invalid_argument("cross_sqdist: dimension mismatch");
  const int q = static_cast<int>(Q.rows());
  const int n = static_cast<int>(X.rows());
  const int d = static_cast<int>(X.cols());
  RowMajorMatrix RQ = Q;
  RowMajorMatrix RX = X;
  Eigen::MatrixXd out(q, n);
  for (int i = 0; i < q; ++i) {
    const double* qi = RQ.data() + static_cast<std::ptrdiff_t>(i) * d;
    for (int j = 0; j < n; ++j) {
      const double* xj = RX.data() + static_cast<std::ptrdiff_t>(j) * d;
      double s = 0.0;
      for (int c = 0; c < d; ++c) {
        const double diff = qi[c] - xj[c];
        s += diff * diff;
      }
      out(i, j) = s;
    }
  }
  return out;
}

Eigen::MatrixXd kernel_from_sqdist(const Eigen::MatrixXd& sqdist,
                                   double bandwidth) {
  if (!(bandwidth > 0.0))
    throw std::invalid_argument("kernel_from_sqdist: bandwidth must be positive");
  const double inv_2h2 = 1.0 / (2.0 * bandwidth * bandwidth);
  const int rows = static_cast<int>(sqdist.rows());
  const int cols = static_cast<int>(sqdist.cols());
  Eigen::MatrixXd out(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) out(i, j) = std::exp(-sqdist(i, j) * inv_2h2);
  return out;
}

Eigen::MatrixXd gram(const RbfKernel& kernel, const Eigen::MatrixXd& X) {
  if (X.rows() < 2)
    throw InsufficientSamplesError("gram: need at least 2 samples, got " +
                                   std::to_string(X.rows()));
  return kernel_from_sqdist(pairwise_sqdist(X), kernel.bandwidth());
}

Eigen::MatrixXd score_expansion(const Eigen::MatrixXd& queries,
                                const Eigen::MatrixXd& base,
                                const RbfKernel& kernel,
                                const Eigen::VectorXd& eigenvalues,
                                const Eigen::MatrixXd& eigenvectors,
                                const Eigen::MatrixXd& beta) {
  const int q = static_cast<int>(queries.rows());
  const int M = static_cast<int>(base.rows());
  const int d = static_cast<int>(beta.cols());
  const int J = static_cast<int>(eigenvalues.size());
  const double sqrt_m = std::sqrt(static_cast<double>(M));
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(q, d);
  for (int r = 0; r < q; ++r) {
    for (int j = 0; j < J; ++j) {
      double psi = 0.0;
      for (int m = 0; m < M; ++m)
        psi += eigenvectors(m, j) * kernel.eval(queries.row(r), base.row(m));
      psi *= sqrt_m / eigenvalues(j);
      out.row(r) += beta.row(j) * psi;
    }
  }
  return out;
}

Eigen::MatrixXd beta_direct(const Eigen::MatrixXd& base,
                            const RbfKernel& kernel,
                            const Eigen::VectorXd& eigenvalues,
                            const Eigen::MatrixXd& eigenvectors) {
  const int M = static_cast<int>(base.rows());
  const int d = static_cast<int>(base.cols());
  const int J = static_cast<int>(eigenvalues.size());
  const double sqrt_m = std::sqrt(static_cast<double>(M));
  Eigen::MatrixXd beta = Eigen::MatrixXd::Zero(J, d);
  for (int j = 0; j < J; ++j) {
    Eigen::VectorXd acc = Eigen::VectorXd::Zero(d);
    for (int m = 0; m < M; ++m) {
      Eigen::VectorXd grad_psi = Eigen::VectorXd::Zero(d);
      for (int mp = 0; mp < M; ++mp)
        grad_psi += kernel.grad_x(base.row(m), base.row(mp)) *
                    eigenvectors(mp, j);
      acc += grad_psi * (sqrt_m / eigenvalues(j));
    }
    beta.row(j) = -acc.transpose() / static_cast<double>(M);
  }
  return beta;
}

}  // namespace migrad::serial
