#pragma once

#include <Eigen/Dense>
#include <optional>

#include "migrad/eigendecomp.hpp"
#include "migrad/errors.hpp"
#include "migrad/kernels.hpp"

namespace migrad {

// Knobs for fitting the spectral score estimator.
struct SsgeConfig {
  std::optional<double> bandwidth;  // absent: median heuristic
  double mass_threshold = 0.94;     // retained share of positive eigenvalue mass
  std::optional<int> max_j;         // optional cap on the expansion length
};

// Frozen state of a fitted spectral Stein score estimator: base samples,
// kernel bandwidth, the retained Gram eigenpairs and the spectral
// coefficients. Immutable after construction; safe to share across threads.
class FittedScoreEstimator {
 public:
  // Estimated score d/dx log q at each query row. Queries must have the
  // same dimension the estimator was fitted on. Note the expansion simply
  // extrapolates through the kernel outside the support of the base samples.
  Eigen::MatrixXd score(const Eigen::MatrixXd& queries) const;

  int base_count() const { return static_cast<int>(features_.rows()); }
  int dim() const { return input_dim_; }
  double bandwidth() const { return bandwidth_; }
  RbfKernel kernel() const { return RbfKernel(bandwidth_); }
  int j_used() const { return static_cast<int>(eigenvalues_.size()); }
  // Share of the positive Gram eigenvalue mass retained by the truncation.
  double eigen_mass() const { return eigen_mass_; }

  // Retained eigenvalues of the Gram matrix, descending, all positive.
  const Eigen::VectorXd& eigenvalues() const { return eigenvalues_; }
  // Matching unit eigenvectors, one column per retained eigenvalue.
  const Eigen::MatrixXd& eigenvectors() const { return eigenvectors_; }
  // Spectral coefficients, row j holding the d coefficients of term j,
  // always expressed in the original input space.
  const Eigen::MatrixXd& beta() const { return beta_; }
  // Base samples as seen by the kernel (projected and rescaled when the
  // estimator was fitted through a random projection).
  const Eigen::MatrixXd& base_features() const { return features_; }

 private:
  friend FittedScoreEstimator fit_score_estimator(const Eigen::MatrixXd&,
                                                  const SsgeConfig&);
  friend FittedScoreEstimator fit_score_estimator_on_features(
      const Eigen::MatrixXd& features, int input_dim,
      std::optional<Eigen::MatrixXd> feature_map, const SsgeConfig& config);

  FittedScoreEstimator() = default;

  Eigen::MatrixXd features_;     // M x p base samples in kernel space
  std::optional<Eigen::MatrixXd> feature_map_;  // p x d, absent for identity
  int input_dim_ = 0;
  double bandwidth_ = 0.0;
  double eigen_mass_ = 0.0;
  Eigen::VectorXd eigenvalues_;  // J
  Eigen::MatrixXd eigenvectors_; // M x J
  Eigen::MatrixXd scaled_eigenvectors_;  // M x J, column j times sqrt(M)/lambda_j
  Eigen::MatrixXd beta_;         // J x d
};

// Fit the estimator on M samples (rows) of an implicit distribution.
// Throws InsufficientSamplesError for M < 2, std::invalid_argument for
// non-finite input, DegenerateSpectrumError when the Gram spectrum carries
// no positive mass.
FittedScoreEstimator fit_score_estimator(const Eigen::MatrixXd& X,
                                         const SsgeConfig& config = {});

// Shared pipeline: fit on precomputed kernel-space features. feature_map
// (p x d) is the linear map from input space to kernel space; coefficients
// are pulled back through it so scores live in the input space.
FittedScoreEstimator fit_score_estimator_on_features(
    const Eigen::MatrixXd& features, int input_dim,
    std::optional<Eigen::MatrixXd> feature_map, const SsgeConfig& config);

// Monte Carlo check of Stein's identity
//   E[h(x) grad_x log q(x)^T + grad_x h(x)] = 0
// with h(x) = (k(x, x_1), ..., k(x, x_M)) evaluated on the sample itself and
// the supplied score values. Returns the max-norm of the M x d estimate.
// Diagnostic only; small for faithful scores, large for corrupted ones.
double stein_residual(const RbfKernel& kernel, const Eigen::MatrixXd& X,
                      const Eigen::MatrixXd& score_values);

}  // namespace migrad
