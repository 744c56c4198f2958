#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>

#include "migrad/encoders.hpp"
#include "migrad/projection.hpp"
#include "migrad/ssge.hpp"

namespace migrad {

struct GradientDiagnostics {
  int j_used = 0;            // expansion length of the marginal score fit
  double eigen_mass = 1.0;   // retained eigenvalue-mass share of that fit
  double bandwidth = 0.0;    // its kernel bandwidth (0 when no fit ran)
  int batch_size = 0;
  std::uint64_t seed = 0;
  int joint_j_used = -1;     // -1 when no joint fit was involved
  double joint_bandwidth = 0.0;
  // Set when the fitted joint batch sits on a (numerically) exact linear
  // manifold z = W x, the known singular-support regime of deterministic
  // encoders.
  bool degenerate_joint = false;
};

// An MI or entropy gradient estimate over encoder parameters plus the
// diagnostics of the score fits that produced it.
struct GradientReport {
  Eigen::VectorXd gradient;  // length == encoder param_count
  GradientDiagnostics diagnostics;
};

// Gradient of the representation entropy H(z) over encoder parameters:
// push the batch through the encoder, fit the score estimator on the
// outputs, average -pjvp(x_i, score(z_i)). Stochastic encoders get one
// seeded noise draw per input. When marginal_projector is given the score
// fit runs through the projected kernel.
GradientReport entropy_gradient(const Encoder& encoder,
                                const Eigen::MatrixXd& X,
                                const SsgeConfig& config, std::uint64_t seed,
                                const RandomProjector* marginal_projector = nullptr);

// Gradient of the joint entropy H(x, z) for a deterministic encoder: fit
// the score estimator on concatenated (x, z) pairs and propagate only the
// z-block of each joint score (x does not depend on the parameters).
GradientReport joint_entropy_gradient(const Encoder& encoder,
                                      const Eigen::MatrixXd& X,
                                      const SsgeConfig& config,
                                      std::uint64_t seed);

// MI gradient for a deterministic encoder between input and output:
// entropy_gradient minus joint_entropy_gradient on the same batch and seed.
GradientReport mi_gradient_deterministic(const Encoder& encoder,
                                         const Eigen::MatrixXd& X,
                                         const SsgeConfig& config,
                                         std::uint64_t seed);

// MI gradient between the latent h = first(x) and the output
// z = second(first(x)) of a two-stage encoder, assembled from the three
// entropy terms H(h) + H(z) - H(h, z) with gradients chained through both
// stages. The combined parameter vector is [first params, second params].
GradientReport mi_gradient_two_stage(const Encoder& first,
                                     const Encoder& second,
                                     const Eigen::MatrixXd& X,
                                     const SsgeConfig& config,
                                     std::uint64_t seed);

// Gradient of the conditional entropy H(z | x) of a stochastic encoder.
// Each input gets noise_draws noise samples; the conditional score comes
// from the encoder's closed form when available and otherwise from a score
// fit on the per-input conditional batch (which needs noise_draws >= 2).
GradientReport conditional_entropy_gradient(const Encoder& encoder,
                                            const Eigen::MatrixXd& X,
                                            int noise_draws,
                                            const SsgeConfig& config,
                                            std::uint64_t seed);

// MI gradient for a stochastic encoder: marginal entropy term (fresh noise,
// one draw per input) minus the conditional entropy term.
GradientReport mi_gradient_stochastic(const Encoder& encoder,
                                      const Eigen::MatrixXd& X,
                                      int noise_draws,
                                      const SsgeConfig& config,
                                      std::uint64_t seed,
                                      const RandomProjector* marginal_projector = nullptr);

// Max relative error between pjvp and central finite differences of
// forward over every parameter, probed with a seeded random cotangent.
double pjvp_finite_diff_check(const Encoder& encoder, const Eigen::VectorXd& x,
                              double step = 1e-4, std::uint64_t seed = 0);
double pjvp_finite_diff_check(const Encoder& encoder, const Eigen::VectorXd& x,
                              const Eigen::VectorXd& eps, double step = 1e-4,
                              std::uint64_t seed = 0);

}  // namespace migrad
