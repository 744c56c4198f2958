#include "migrad/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace migrad {

namespace {

using RowMajorMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

void check_same_dim(const Eigen::VectorXd& x, const Eigen::VectorXd& y) {
  if (x.size() != y.size())
    throw std::invalid_argument("kernel: point dimensions differ (" +
                                std::to_string(x.size()) + " vs " +
                                std::to_string(y.size()) + ")");
}

}  // namespace

RbfKernel::RbfKernel(double bandwidth) : bandwidth_(bandwidth) {
  if (!(bandwidth > 0.0))
    throw std::invalid_argument("RbfKernel: bandwidth must be positive");
}

double RbfKernel::eval(const Eigen::VectorXd& x,
                       const Eigen::VectorXd& y) const {
  check_same_dim(x, y);
  const double sq = (x - y).squaredNorm();
  return std::exp(-sq / (2.0 * bandwidth_ * bandwidth_));
}

Eigen::VectorXd RbfKernel::grad_x(const Eigen::VectorXd& x,
                                  const Eigen::VectorXd& y) const {
  check_same_dim(x, y);
  const double k = eval(x, y);
  return -(x - y) * (k / (bandwidth_ * bandwidth_));
}

Eigen::MatrixXd pairwise_sqdist(const Eigen::MatrixXd& X) {
  const int n = static_cast<int>(X.rows());
  const int d = static_cast<int>(X.cols());
  // Row-major copy keeps the inner loop over coordinates contiguous.
  RowMajorMatrix R = X;
  Eigen::MatrixXd out(n, n);
#pragma omp parallel for schedule(dynamic, 16)
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
#pragma omp parallel for schedule(static)
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
#pragma omp parallel for schedule(static)
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

double median_heuristic_from_sqdist(const Eigen::MatrixXd& sqdist) {
  const int n = static_cast<int>(sqdist.rows());
  if (n < 2)
    throw InsufficientSamplesError(
        "median_heuristic: need at least 2 samples, got " + std::to_string(n));
  std::vector<double> dists;
  dists.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) dists.push_back(std::sqrt(sqdist(i, j)));

  const std::size_t m = dists.size();
  const std::size_t mid = m / 2;
  std::nth_element(dists.begin(), dists.begin() + mid, dists.end());
  double median = dists[mid];
  if (m % 2 == 0) {
    // Even count: average the two middle order statistics.
    const double upper = median;
    std::nth_element(dists.begin(), dists.begin() + (mid - 1),
                     dists.begin() + mid);
    median = 0.5 * (dists[mid - 1] + upper);
  }
  return median > 0.0 ? median : 1.0;
}

double median_heuristic(const Eigen::MatrixXd& X) {
  if (X.rows() < 2)
    throw InsufficientSamplesError(
        "median_heuristic: need at least 2 samples, got " +
        std::to_string(X.rows()));
  return median_heuristic_from_sqdist(pairwise_sqdist(X));
}

}  // namespace migrad
