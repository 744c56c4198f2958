#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "migrad/ssge.hpp"

namespace migrad {

// Random projection onto k directions of a d-dimensional space. Each of the
// k projection directions is an i.i.d. standard normal d-vector rescaled to
// unit length; the whole matrix is a pure function of (d, k, seed). Distances
// satisfy ||x - y|| ~ sqrt(d/k) ||Rx - Ry||.
class RandomProjector {
 public:
  RandomProjector(int source_dim, int target_dim, std::uint64_t seed);

  int source_dim() const { return static_cast<int>(directions_.cols()); }
  int target_dim() const { return static_cast<int>(directions_.rows()); }
  std::uint64_t seed() const { return seed_; }

  // k x d matrix of unit-length projection directions (one per row).
  const Eigen::MatrixXd& directions() const { return directions_; }

  // Row r of the result is R x_r. Parallelized over rows.
  Eigen::MatrixXd project(const Eigen::MatrixXd& X) const;
  Eigen::VectorXd project(const Eigen::VectorXd& x) const;

 private:
  Eigen::MatrixXd directions_;
  std::uint64_t seed_;
};

inline RandomProjector make_projector(int source_dim, int target_dim,
                                      std::uint64_t seed) {
  return RandomProjector(source_dim, target_dim, seed);
}

// RBF kernel evaluated on projected, distance-rescaled inputs:
//   k(x, y)      = exp(-(d/k) ||Rx - Ry||^2 / (2 h^2))
//   grad_x(x, y) = -(d/k)/h^2 R^T R (x - y) k(x, y).
// Both are defined on original d-dimensional points, so scores estimated
// through this kernel live in the original space.
class ProjectedRbfKernel {
 public:
  ProjectedRbfKernel(RandomProjector projector, double bandwidth);

  double bandwidth() const { return bandwidth_; }
  const RandomProjector& projector() const { return projector_; }
  double distance_scale() const { return scale_; }  // d/k

  double eval(const Eigen::VectorXd& x, const Eigen::VectorXd& y) const;
  Eigen::VectorXd grad_x(const Eigen::VectorXd& x,
                         const Eigen::VectorXd& y) const;

 private:
  RandomProjector projector_;
  double bandwidth_;
  double scale_;
};

// Same pipeline as fit_score_estimator but with all kernel evaluations and
// kernel gradients taken through the projected kernel. The fitted estimator
// maps d-dimensional queries to d-dimensional scores. When the bandwidth is
// auto-selected the median heuristic runs on sqrt(d/k)-rescaled projected
// distances, so the default stays comparable across k.
FittedScoreEstimator fit_scalable_score_estimator(const Eigen::MatrixXd& X,
                                                  const SsgeConfig& config,
                                                  const RandomProjector& projector);

}  // namespace migrad
