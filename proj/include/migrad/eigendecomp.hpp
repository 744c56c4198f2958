#pragma once

#include <Eigen/Dense>
#include <optional>

#include "migrad/errors.hpp"

namespace migrad {

// Symmetric eigendecomposition. Eigenvalues sorted descending, eigenvector
// column j paired with eigenvalue j, columns orthonormal. Truncated
// decompositions carry fewer eigenvector columns than eigenvalues.
struct EigenDecomposition {
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd eigenvectors;
};

// Full decomposition of a (near-)symmetric matrix. The input is symmetrized
// as (G + G^T) / 2 first. Each eigenvector column is flipped so its
// largest-magnitude entry is positive, which pins the output for golden
// tests. Throws std::invalid_argument on non-finite entries and
// ConvergenceError (with the off-diagonal residual) if the solver fails.
EigenDecomposition sym_eig(const Eigen::MatrixXd& G);

// Smallest J such that the top-J share of the positive eigenvalue mass
// reaches mass_threshold. Negative eigenvalues count as zero mass.
// Throws DegenerateSpectrumError when no eigenvalue is positive.
int select_top_j(const Eigen::VectorXd& eigenvalues_descending,
                 double mass_threshold);

// All eigenvalues of G plus eigenvectors for only the leading set chosen by
// select_top_j (optionally capped by max_vectors). Eigenvalues below the
// numerical-rank floor never receive vectors: they are indistinguishable
// from zero and would poison the inverse iteration that makes this cheaper
// than a full decomposition. Same error contract as sym_eig.
EigenDecomposition sym_eig_by_mass(const Eigen::MatrixXd& G,
                                   double mass_threshold,
                                   std::optional<int> max_vectors = std::nullopt);

}  // namespace migrad
