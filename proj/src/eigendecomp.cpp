#include "migrad/eigendecomp.hpp"

#include <lapacke.h>

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace migrad {

namespace {

void check_input(const Eigen::MatrixXd& G) {
  if (G.rows() != G.cols())
    throw std::invalid_argument("sym_eig: matrix must be square");
  if (!G.allFinite())
    throw std::invalid_argument("sym_eig: matrix has non-finite entries");
}

void apply_sign_convention(Eigen::MatrixXd* vectors) {
  for (int j = 0; j < vectors->cols(); ++j) {
    int idx = 0;
    vectors->col(j).cwiseAbs().maxCoeff(&idx);
    if ((*vectors)(idx, j) < 0.0) vectors->col(j) = -vectors->col(j);
  }
}

// Tridiagonalization + implicit QR through Eigen's self-adjoint solver.
// The system LAPACK's divide-and-conquer and MRRR drivers (and several
// blocked dgemm shapes they rely on) return corrupted eigenvectors on this
// toolchain, so the full decomposition stays on Eigen's own kernels.
EigenDecomposition full_decomposition(const Eigen::MatrixXd& G) {
  const int n = static_cast<int>(G.rows());
  const Eigen::MatrixXd A = 0.5 * (G + G.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(A);
  if (solver.info() != Eigen::Success) {
    double offdiag = 0.0;
    for (int i = 0; i + 1 < n; ++i) offdiag += A(i + 1, i) * A(i + 1, i);
    throw ConvergenceError("sym_eig: iteration cap exceeded",
                           std::sqrt(offdiag));
  }

  EigenDecomposition out;
  out.eigenvalues.resize(n);
  out.eigenvectors.resize(n, n);
  for (int j = 0; j < n; ++j) {
    out.eigenvalues(j) = solver.eigenvalues()(n - 1 - j);
    out.eigenvectors.col(j) = solver.eigenvectors().col(n - 1 - j);
  }
  apply_sign_convention(&out.eigenvectors);
  return out;
}

// Z <- Q Z where Q is the orthogonal factor assembled from the reflectors
// dsytrd('L') leaves in A's strict lower triangle: Q = H_1 H_2 ... H_{n-1},
// H_i = I - tau_i v_i v_i^T with v_i = (0..0, 1, A(i+2:n, i)). Columns are
// independent, so the loop parallelizes without changing any result.
void apply_tridiag_q(const Eigen::MatrixXd& A, const Eigen::VectorXd& tau,
                     Eigen::MatrixXd* Z) {
  const int n = static_cast<int>(A.rows());
  const int cols = static_cast<int>(Z->cols());
#pragma omp parallel for schedule(static)
  for (int c = 0; c < cols; ++c) {
    double* z = Z->data() + static_cast<std::ptrdiff_t>(c) * n;
    for (int i = n - 2; i >= 0; --i) {
      // v has an implicit unit entry at row i+1, then A(i+2:n, i).
      const double* v_tail = A.data() + static_cast<std::ptrdiff_t>(i) * n + i + 2;
      const int tail = n - i - 2;
      double dot = z[i + 1];
      for (int r = 0; r < tail; ++r) dot += v_tail[r] * z[i + 2 + r];
      const double scale = tau(i) * dot;
      z[i + 1] -= scale;
      for (int r = 0; r < tail; ++r) z[i + 2 + r] -= scale * v_tail[r];
    }
  }
}

}  // namespace

EigenDecomposition sym_eig(const Eigen::MatrixXd& G) {
  check_input(G);
  return full_decomposition(G);
}

int select_top_j(const Eigen::VectorXd& eigenvalues_descending,
                 double mass_threshold) {
  if (!(mass_threshold > 0.0) || mass_threshold > 1.0)
    throw std::invalid_argument("select_top_j: mass_threshold must be in (0, 1]");
  const int n = static_cast<int>(eigenvalues_descending.size());
  if (n == 0) throw std::invalid_argument("select_top_j: empty spectrum");

  double total = 0.0;
  int positive_count = 0;
  for (int i = 0; i < n; ++i) {
    const double v = eigenvalues_descending(i);
    if (v > 0.0) {
      total += v;
      ++positive_count;
    }
  }
  if (positive_count == 0)
    throw DegenerateSpectrumError("select_top_j: no positive eigenvalue mass");

  // Full-mass threshold: exactly the positive eigenvalues, independent of
  // how the cumulative ratio rounds.
  if (mass_threshold == 1.0) return positive_count;

  double cum = 0.0;
  for (int j = 0; j < n; ++j) {
    cum += std::max(eigenvalues_descending(j), 0.0);
    if (cum / total >= mass_threshold) return j + 1;
  }
  return positive_count;
}

EigenDecomposition sym_eig_by_mass(const Eigen::MatrixXd& G,
                                   double mass_threshold,
                                   std::optional<int> max_vectors) {
  check_input(G);
  const int n = static_cast<int>(G.rows());
  if (n < 8) {
    // Subset machinery pays off only at scale.
    EigenDecomposition full = full_decomposition(G);
    int j = select_top_j(full.eigenvalues, mass_threshold);
    if (max_vectors) j = std::min(j, *max_vectors);
    full.eigenvectors.conservativeResize(n, j);
    return full;
  }

  Eigen::MatrixXd A = 0.5 * (G + G.transpose());

  // One tridiagonalization serves both the eigenvalue scan and the
  // eigenvector subset.
  Eigen::VectorXd diag(n), offdiag(n - 1), tau(n - 1);
  int info = LAPACKE_dsytrd(LAPACK_COL_MAJOR, 'L', n, A.data(), n, diag.data(),
                            offdiag.data(), tau.data());
  if (info != 0)
    throw ConvergenceError("sym_eig_by_mass: dsytrd failed", offdiag.norm());

  Eigen::VectorXd values_asc = diag;
  Eigen::VectorXd offdiag_copy = offdiag;
  info = LAPACKE_dsterf(n, values_asc.data(), offdiag_copy.data());
  if (info != 0)
    throw ConvergenceError(
        "sym_eig_by_mass: dsterf failed with info=" + std::to_string(info),
        offdiag.norm());

  Eigen::VectorXd values_desc = values_asc.reverse();
  int j = select_top_j(values_desc, mass_threshold);
  if (max_vectors) j = std::min(j, *max_vectors);

  // Numerical-rank floor: eigenvalues at the roundoff level of the largest
  // one have no trustworthy inverse-iteration vectors, and they carry no
  // usable mass anyway.
  const double floor = values_desc(0) * n *
                       std::numeric_limits<double>::epsilon() * 16.0;
  while (j > 1 && values_desc(j - 1) <= floor) --j;

  bool subset_ok = j < n;
  Eigen::VectorXd w(n);
  Eigen::MatrixXd vectors;
  if (subset_ok) {
    // Bisection for the top-j eigenvalues, inverse iteration for their
    // tridiagonal eigenvectors.
    const double abstol = 2.0 * LAPACKE_dlamch('S');
    int found = 0, nsplit = 0;
    std::vector<int> iblock(n), isplit(n);
    info = LAPACKE_dstebz('I', 'B', n, 0.0, 0.0, n - j + 1, n, abstol,
                          diag.data(), offdiag.data(), &found, &nsplit,
                          w.data(), iblock.data(), isplit.data());
    subset_ok = info == 0 && found == j;
    if (subset_ok) {
      vectors.resize(n, j);
      std::vector<int> ifail(j);
      info = LAPACKE_dstein(LAPACK_COL_MAJOR, n, diag.data(), offdiag.data(),
                            j, w.data(), iblock.data(), isplit.data(),
                            vectors.data(), n, ifail.data());
      subset_ok = info == 0;
    }
  }
  if (subset_ok) {
    apply_tridiag_q(A, tau, &vectors);

    // dstebz orders by block; restore a global descending order.
    std::vector<int> order(j);
    for (int i = 0; i < j; ++i) order[i] = i;
    std::sort(order.begin(), order.end(),
              [&](int a, int b) { return w(a) > w(b); });
    Eigen::VectorXd sorted_w(j);
    Eigen::MatrixXd sorted_v(n, j);
    for (int i = 0; i < j; ++i) {
      sorted_w(i) = w(order[i]);
      sorted_v.col(i) = vectors.col(order[i]);
    }

    // Inverse iteration degrades inside tight clusters; verify and fall
    // back to the full solver when it does.
    Eigen::MatrixXd vtv(j, j);
    vtv.noalias() = sorted_v.transpose() * sorted_v;
    const double ortho_err =
        (vtv - Eigen::MatrixXd::Identity(j, j)).cwiseAbs().maxCoeff();
    if (ortho_err <= 1e-8) {
      EigenDecomposition out;
      out.eigenvalues = values_desc;
      out.eigenvalues.head(j) = sorted_w;
      out.eigenvectors = std::move(sorted_v);
      apply_sign_convention(&out.eigenvectors);
      return out;
    }
  }

  EigenDecomposition full = full_decomposition(G);
  full.eigenvectors.conservativeResize(n, j);
  return full;
}

}  // namespace migrad
