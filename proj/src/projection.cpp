#include "migrad/projection.hpp"

#include <cmath>
#include <random>
#include <string>

#include "migrad/rng.hpp"

namespace migrad {

RandomProjector::RandomProjector(int source_dim, int target_dim,
                                 std::uint64_t seed)
    : seed_(seed) {
  if (source_dim < 1 || target_dim < 1)
    throw std::invalid_argument("RandomProjector: dimensions must be positive");
  if (target_dim > source_dim)
    throw std::invalid_argument(
        "RandomProjector: target dimension " + std::to_string(target_dim) +
        " exceeds source dimension " + std::to_string(source_dim));

  std::mt19937_64 engine(mix_seed(seed));
  std::normal_distribution<double> normal;
  directions_.resize(target_dim, source_dim);
  for (int r = 0; r < target_dim; ++r) {
    double norm_sq = 0.0;
    for (int c = 0; c < source_dim; ++c) {
      const double v = normal(engine);
      directions_(r, c) = v;
      norm_sq += v * v;
    }
    directions_.row(r) /= std::sqrt(norm_sq);
  }
}

Eigen::MatrixXd RandomProjector::project(const Eigen::MatrixXd& X) const {
  if (X.cols() != directions_.cols())
    throw std::invalid_argument("project: input dimension " +
                                std::to_string(X.cols()) + " does not match " +
                                std::to_string(directions_.cols()));
  const int n = static_cast<int>(X.rows());
  const int k = target_dim();
  const int d = source_dim();
  Eigen::MatrixXd out(n, k);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i)
    for (int r = 0; r < k; ++r) {
      double s = 0.0;
      for (int c = 0; c < d; ++c) s += directions_(r, c) * X(i, c);
      out(i, r) = s;
    }
  return out;
}

Eigen::VectorXd RandomProjector::project(const Eigen::VectorXd& x) const {
  if (x.size() != directions_.cols())
    throw std::invalid_argument("project: input dimension mismatch");
  return directions_ * x;
}

ProjectedRbfKernel::ProjectedRbfKernel(RandomProjector projector,
                                       double bandwidth)
    : projector_(std::move(projector)),
      bandwidth_(bandwidth),
      scale_(static_cast<double>(projector_.source_dim()) /
             static_cast<double>(projector_.target_dim())) {
  if (!(bandwidth > 0.0))
    throw std::invalid_argument("ProjectedRbfKernel: bandwidth must be positive");
}

double ProjectedRbfKernel::eval(const Eigen::VectorXd& x,
                                const Eigen::VectorXd& y) const {
  const Eigen::VectorXd diff = projector_.project(x) - projector_.project(y);
  return std::exp(-scale_ * diff.squaredNorm() /
                  (2.0 * bandwidth_ * bandwidth_));
}

Eigen::VectorXd ProjectedRbfKernel::grad_x(const Eigen::VectorXd& x,
                                           const Eigen::VectorXd& y) const {
  const Eigen::VectorXd projected_diff =
      projector_.project(x) - projector_.project(y);
  const double k = std::exp(-scale_ * projected_diff.squaredNorm() /
                            (2.0 * bandwidth_ * bandwidth_));
  return -(scale_ * k / (bandwidth_ * bandwidth_)) *
         (projector_.directions().transpose() * projected_diff);
}

FittedScoreEstimator fit_scalable_score_estimator(
    const Eigen::MatrixXd& X, const SsgeConfig& config,
    const RandomProjector& projector) {
  if (X.cols() != projector.source_dim())
    throw std::invalid_argument(
        "fit_scalable: projector source dimension does not match samples");
  // Folding sqrt(d/k) into the features makes the plain pipeline compute the
  // rescaled projected distances, and the pulled-back coefficients pick up
  // the matching R^T factor.
  const double root_scale =
      std::sqrt(static_cast<double>(projector.source_dim()) /
                static_cast<double>(projector.target_dim()));
  Eigen::MatrixXd features = projector.project(X);
  features *= root_scale;
  Eigen::MatrixXd feature_map = root_scale * projector.directions();
  return fit_score_estimator_on_features(features,
                                         static_cast<int>(X.cols()),
                                         std::move(feature_map), config);
}

}  // namespace migrad
