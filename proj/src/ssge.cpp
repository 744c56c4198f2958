#include "migrad/ssge.hpp"

#include <cmath>
#include <string>

#include "migrad/detail/blas.hpp"

namespace migrad {

FittedScoreEstimator fit_score_estimator_on_features(
    const Eigen::MatrixXd& features, int input_dim,
    std::optional<Eigen::MatrixXd> feature_map, const SsgeConfig& config) {
  const int M = static_cast<int>(features.rows());
  if (M < 2)
    throw InsufficientSamplesError("ssge fit: need at least 2 samples, got " +
                                   std::to_string(M));
  if (!features.allFinite())
    throw std::invalid_argument("ssge fit: samples contain non-finite values");
  if (!(config.mass_threshold > 0.0) || config.mass_threshold > 1.0)
    throw std::invalid_argument("ssge fit: mass_threshold must be in (0, 1]");
  if (config.max_j && *config.max_j < 1)
    throw std::invalid_argument("ssge fit: max_j must be >= 1");
  if (config.bandwidth && !(*config.bandwidth > 0.0))
    throw std::invalid_argument("ssge fit: bandwidth must be positive");

  const Eigen::MatrixXd sqdist = pairwise_sqdist(features);
  const double h = config.bandwidth ? *config.bandwidth
                                    : median_heuristic_from_sqdist(sqdist);
  const Eigen::MatrixXd K = kernel_from_sqdist(sqdist, h);

  const EigenDecomposition eig =
      sym_eig_by_mass(K, config.mass_threshold, config.max_j);
  const int J = static_cast<int>(eig.eigenvectors.cols());

  double total_mass = 0.0, retained_mass = 0.0;
  for (int j = 0; j < M; ++j) {
    const double v = std::max(eig.eigenvalues(j), 0.0);
    total_mass += v;
    if (j < J) retained_mass += v;
  }

  FittedScoreEstimator est;
  est.features_ = features;
  est.feature_map_ = std::move(feature_map);
  est.input_dim_ = input_dim;
  est.bandwidth_ = h;
  est.eigen_mass_ = retained_mass / total_mass;
  est.eigenvalues_ = eig.eigenvalues.head(J);
  est.eigenvectors_ = eig.eigenvectors;

  const double sqrt_m = std::sqrt(static_cast<double>(M));
  est.scaled_eigenvectors_ = est.eigenvectors_;
  for (int j = 0; j < J; ++j)
    est.scaled_eigenvectors_.col(j) *= sqrt_m / est.eigenvalues_(j);

  // Spectral coefficients. For the RBF kernel the average of the analytic
  // eigenfunction gradients over the base samples collapses to
  //   beta_j = Phi^T (K u_j - rowsum(K) . u_j) / (sqrt(M) lambda_j h^2),
  // which needs only K U and one GEMM against the samples.
  const Eigen::VectorXd rowsum = K.rowwise().sum();
  Eigen::MatrixXd V = detail::gemm(K, est.eigenvectors_);
  for (int j = 0; j < J; ++j)
    V.col(j) -= rowsum.cwiseProduct(est.eigenvectors_.col(j));
  Eigen::MatrixXd beta_feat = detail::gemm_at_b(V, features);
  for (int j = 0; j < J; ++j)
    beta_feat.row(j) /= sqrt_m * est.eigenvalues_(j) * h * h;

  est.beta_ = est.feature_map_ ? detail::gemm(beta_feat, *est.feature_map_)
                               : std::move(beta_feat);
  return est;
}

FittedScoreEstimator fit_score_estimator(const Eigen::MatrixXd& X,
                                         const SsgeConfig& config) {
  return fit_score_estimator_on_features(X, static_cast<int>(X.cols()),
                                         std::nullopt, config);
}

Eigen::MatrixXd FittedScoreEstimator::score(
    const Eigen::MatrixXd& queries) const {
  if (queries.cols() != input_dim_)
    throw std::invalid_argument(
        "score: query dimension " + std::to_string(queries.cols()) +
        " does not match fitted dimension " + std::to_string(input_dim_));
  const Eigen::MatrixXd q_features =
      feature_map_
          ? detail::gemm(queries, Eigen::MatrixXd(feature_map_->transpose()))
          : queries;
  const Eigen::MatrixXd Kq =
      kernel_from_sqdist(cross_sqdist(q_features, features_), bandwidth_);
  const Eigen::MatrixXd psi = detail::gemm(Kq, scaled_eigenvectors_);
  return detail::gemm(psi, beta_);
}

double stein_residual(const RbfKernel& kernel, const Eigen::MatrixXd& X,
                      const Eigen::MatrixXd& score_values) {
  const int M = static_cast<int>(X.rows());
  if (M < 2)
    throw InsufficientSamplesError(
        "stein_residual: need at least 2 samples, got " + std::to_string(M));
  if (score_values.rows() != X.rows() || score_values.cols() != X.cols())
    throw std::invalid_argument(
        "stein_residual: score_values shape does not match X");

  const Eigen::MatrixXd K = gram(kernel, X);
  const Eigen::VectorXd rowsum = K.rowwise().sum();
  const double inv_h2 = 1.0 / (kernel.bandwidth() * kernel.bandwidth());

  // (1/M) sum_m [ k(x_m, x_r) g(x_m)^T + grad_x k(x, x_r)|_{x_m} ], an M x d
  // matrix; the second term reduces to -(K X - diag(rowsum) X) / h^2.
  Eigen::MatrixXd E = detail::gemm(K, score_values);
  E.noalias() -= inv_h2 * detail::gemm(K, X);
  E.noalias() += inv_h2 * rowsum.asDiagonal() * X;
  E /= static_cast<double>(M);
  return E.cwiseAbs().maxCoeff();
}

}  // namespace migrad
