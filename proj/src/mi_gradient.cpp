#include "migrad/mi_gradient.hpp"

#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

#include "migrad/rng.hpp"

namespace migrad {

namespace {

void check_batch(const Encoder& encoder, const Eigen::MatrixXd& X) {
  if (X.rows() < 2)
    throw InsufficientSamplesError("gradient estimate: need at least 2 samples, got " +
                                   std::to_string(X.rows()));
  if (X.cols() != encoder.input_dim())
    throw std::invalid_argument(
        "gradient estimate: batch dimension " + std::to_string(X.cols()) +
        " does not match encoder input dimension " +
        std::to_string(encoder.input_dim()));
}

GradientReport empty_report(int batch_size, std::uint64_t seed) {
  GradientReport report;
  report.gradient = Eigen::VectorXd(0);
  report.diagnostics.batch_size = batch_size;
  report.diagnostics.seed = seed;
  return report;
}

void fill_fit_diagnostics(const FittedScoreEstimator& est,
                          GradientDiagnostics* diag) {
  diag->j_used = est.j_used();
  diag->eigen_mass = est.eigen_mass();
  diag->bandwidth = est.bandwidth();
}

Eigen::MatrixXd forward_batch(const Encoder& encoder, const Eigen::MatrixXd& X,
                              const Eigen::MatrixXd* noise) {
  const int n = static_cast<int>(X.rows());
  Eigen::MatrixXd Z(n, encoder.output_dim());
  for (int i = 0; i < n; ++i) {
    if (noise)
      Z.row(i) = encoder.forward(X.row(i), noise->row(i));
    else
      Z.row(i) = encoder.forward(X.row(i));
  }
  return Z;
}

// The joint density of (x, z) is singular when z is an exact function of x.
// Detect the linear case z = W x (the regime the built-in deterministic
// encoders live in) by least squares and flag near-zero residuals.
bool joint_is_degenerate(const Eigen::MatrixXd& X, const Eigen::MatrixXd& Z) {
  if (X.rows() <= X.cols()) return false;
  const Eigen::MatrixXd Wt = X.householderQr().solve(Z);
  const double residual = (Z - X * Wt).cwiseAbs().maxCoeff();
  const double scale = std::max(1.0, Z.cwiseAbs().maxCoeff());
  return residual <= 1e-8 * scale;
}

}  // namespace

GradientReport entropy_gradient(const Encoder& encoder,
                                const Eigen::MatrixXd& X,
                                const SsgeConfig& config, std::uint64_t seed,
                                const RandomProjector* marginal_projector) {
  check_batch(encoder, X);
  const int n = static_cast<int>(X.rows());
  if (encoder.param_count() == 0) return empty_report(n, seed);

  std::optional<Eigen::MatrixXd> noise;
  if (encoder.is_stochastic())
    noise = standard_normal(n, encoder.noise_dim(), mix_seed(seed, 0));
  const Eigen::MatrixXd Z =
      forward_batch(encoder, X, noise ? &*noise : nullptr);

  if (marginal_projector &&
      marginal_projector->source_dim() != encoder.output_dim())
    throw std::invalid_argument(
        "entropy_gradient: projector does not match encoder output dimension");
  const FittedScoreEstimator est =
      marginal_projector
          ? fit_scalable_score_estimator(Z, config, *marginal_projector)
          : fit_score_estimator(Z, config);
  const Eigen::MatrixXd scores = est.score(Z);

  Eigen::VectorXd grad = Eigen::VectorXd::Zero(encoder.param_count());
  for (int i = 0; i < n; ++i) {
    if (noise)
      grad += encoder.pjvp(X.row(i), noise->row(i), scores.row(i));
    else
      grad += encoder.pjvp(X.row(i), scores.row(i));
  }
  grad /= -static_cast<double>(n);

  GradientReport report;
  report.gradient = std::move(grad);
  fill_fit_diagnostics(est, &report.diagnostics);
  report.diagnostics.batch_size = n;
  report.diagnostics.seed = seed;
  return report;
}

GradientReport joint_entropy_gradient(const Encoder& encoder,
                                      const Eigen::MatrixXd& X,
                                      const SsgeConfig& config,
                                      std::uint64_t seed) {
  check_batch(encoder, X);
  if (encoder.is_stochastic())
    throw std::invalid_argument(
        "joint_entropy_gradient: requires a deterministic encoder");
  const int n = static_cast<int>(X.rows());
  if (encoder.param_count() == 0) return empty_report(n, seed);

  const int dx = encoder.input_dim();
  const int dz = encoder.output_dim();
  const Eigen::MatrixXd Z = forward_batch(encoder, X, nullptr);
  Eigen::MatrixXd joint(n, dx + dz);
  joint.leftCols(dx) = X;
  joint.rightCols(dz) = Z;

  const FittedScoreEstimator est = fit_score_estimator(joint, config);
  const Eigen::MatrixXd scores = est.score(joint);

  // Only the z-block of the joint score reaches the parameters; the x-block
  // multiplies a zero Jacobian because x does not depend on them.
  Eigen::VectorXd grad = Eigen::VectorXd::Zero(encoder.param_count());
  for (int i = 0; i < n; ++i)
    grad += encoder.pjvp(X.row(i), scores.row(i).tail(dz));
  grad /= -static_cast<double>(n);

  GradientReport report;
  report.gradient = std::move(grad);
  fill_fit_diagnostics(est, &report.diagnostics);
  report.diagnostics.batch_size = n;
  report.diagnostics.seed = seed;
  report.diagnostics.joint_j_used = est.j_used();
  report.diagnostics.joint_bandwidth = est.bandwidth();
  report.diagnostics.degenerate_joint = joint_is_degenerate(X, Z);
  return report;
}

GradientReport mi_gradient_deterministic(const Encoder& encoder,
                                         const Eigen::MatrixXd& X,
                                         const SsgeConfig& config,
                                         std::uint64_t seed) {
  GradientReport marginal = entropy_gradient(encoder, X, config, seed);
  const GradientReport joint = joint_entropy_gradient(encoder, X, config, seed);

  GradientReport report;
  report.gradient = marginal.gradient - joint.gradient;
  report.diagnostics = marginal.diagnostics;
  report.diagnostics.joint_j_used = joint.diagnostics.joint_j_used;
  report.diagnostics.joint_bandwidth = joint.diagnostics.joint_bandwidth;
  report.diagnostics.degenerate_joint = joint.diagnostics.degenerate_joint;
  return report;
}

GradientReport mi_gradient_two_stage(const Encoder& first,
                                     const Encoder& second,
                                     const Eigen::MatrixXd& X,
                                     const SsgeConfig& config,
                                     std::uint64_t seed) {
  check_batch(first, X);
  if (second.input_dim() != first.output_dim())
    throw std::invalid_argument(
        "mi_gradient_two_stage: stage dimensions do not chain (" +
        std::to_string(first.output_dim()) + " -> " +
        std::to_string(second.input_dim()) + ")");
  const int n = static_cast<int>(X.rows());
  const int p1 = first.param_count();
  const int p2 = second.param_count();
  if (p1 + p2 == 0) return empty_report(n, seed);

  std::optional<Eigen::MatrixXd> noise1, noise2;
  if (first.is_stochastic())
    noise1 = standard_normal(n, first.noise_dim(), mix_seed(seed, 0));
  if (second.is_stochastic())
    noise2 = standard_normal(n, second.noise_dim(), mix_seed(seed, 1));

  const Eigen::MatrixXd H = forward_batch(first, X, noise1 ? &*noise1 : nullptr);
  const Eigen::MatrixXd Z = forward_batch(second, H, noise2 ? &*noise2 : nullptr);
  const int dh = static_cast<int>(H.cols());
  const int dz = static_cast<int>(Z.cols());

  Eigen::MatrixXd joint(n, dh + dz);
  joint.leftCols(dh) = H;
  joint.rightCols(dz) = Z;

  const FittedScoreEstimator est_h = fit_score_estimator(H, config);
  const FittedScoreEstimator est_z = fit_score_estimator(Z, config);
  const FittedScoreEstimator est_hz = fit_score_estimator(joint, config);
  const Eigen::MatrixXd score_h = est_h.score(H);
  const Eigen::MatrixXd score_z = est_z.score(Z);
  const Eigen::MatrixXd score_hz = est_hz.score(joint);

  const auto first_pjvp = [&](int i, const Eigen::VectorXd& v) {
    return noise1 ? first.pjvp(X.row(i), noise1->row(i), v)
                  : first.pjvp(X.row(i), v);
  };
  const auto second_pjvp = [&](int i, const Eigen::VectorXd& v) {
    return noise2 ? second.pjvp(H.row(i), noise2->row(i), v)
                  : second.pjvp(H.row(i), v);
  };
  const auto second_ijvp = [&](int i, const Eigen::VectorXd& v) {
    return noise2 ? second.ijvp(H.row(i), noise2->row(i), v)
                  : second.ijvp(H.row(i), v);
  };

  // H(h) + H(z) - H(h, z), each term reparameterized through the stages it
  // touches. The h-block of the joint score reaches the first stage
  // directly; the z-blocks chain through the second stage's input Jacobian.
  Eigen::VectorXd grad1 = Eigen::VectorXd::Zero(p1);
  Eigen::VectorXd grad2 = Eigen::VectorXd::Zero(p2);
  for (int i = 0; i < n; ++i) {
    const Eigen::VectorXd sh = score_h.row(i);
    const Eigen::VectorXd sz = score_z.row(i);
    const Eigen::VectorXd shz_h = score_hz.row(i).head(dh);
    const Eigen::VectorXd shz_z = score_hz.row(i).tail(dz);

    if (p1 > 0) {
      Eigen::VectorXd cot = sh;                      // H(h) term
      cot += second_ijvp(i, sz);                     // H(z) term
      cot -= shz_h + second_ijvp(i, shz_z);          // -H(h, z) term
      grad1 += first_pjvp(i, cot);
    }
    if (p2 > 0) grad2 += second_pjvp(i, sz - shz_z);
  }

  GradientReport report;
  report.gradient.resize(p1 + p2);
  report.gradient.head(p1) = grad1 / -static_cast<double>(n);
  report.gradient.tail(p2) = grad2 / -static_cast<double>(n);
  fill_fit_diagnostics(est_z, &report.diagnostics);
  report.diagnostics.batch_size = n;
  report.diagnostics.seed = seed;
  report.diagnostics.joint_j_used = est_hz.j_used();
  report.diagnostics.joint_bandwidth = est_hz.bandwidth();
  report.diagnostics.degenerate_joint = joint_is_degenerate(H, Z);
  return report;
}

GradientReport conditional_entropy_gradient(const Encoder& encoder,
                                            const Eigen::MatrixXd& X,
                                            int noise_draws,
                                            const SsgeConfig& config,
                                            std::uint64_t seed) {
  check_batch(encoder, X);
  if (!encoder.is_stochastic())
    throw std::invalid_argument(
        "conditional_entropy_gradient: requires a stochastic encoder");
  const bool analytic = encoder.has_conditional_score();
  if (noise_draws < 1 || (!analytic && noise_draws < 2))
    throw InsufficientConditionalSamplesError(
        "conditional_entropy_gradient: need at least " +
        std::string(analytic ? "1 noise draw" :
                               "2 noise draws to fit a conditional score") +
        ", got " + std::to_string(noise_draws));
  const int n = static_cast<int>(X.rows());
  if (encoder.param_count() == 0) return empty_report(n, seed);

  std::mt19937_64 engine(mix_seed(seed, 0));
  std::normal_distribution<double> normal;
  const int de = encoder.noise_dim();
  const int dz = encoder.output_dim();

  Eigen::VectorXd grad = Eigen::VectorXd::Zero(encoder.param_count());
  GradientDiagnostics diag;
  for (int i = 0; i < n; ++i) {
    Eigen::MatrixXd eps(noise_draws, de);
    for (int l = 0; l < noise_draws; ++l)
      for (int c = 0; c < de; ++c) eps(l, c) = normal(engine);

    Eigen::MatrixXd z(noise_draws, dz);
    for (int l = 0; l < noise_draws; ++l)
      z.row(l) = encoder.forward(X.row(i), eps.row(l));

    Eigen::MatrixXd scores(noise_draws, dz);
    if (analytic) {
      for (int l = 0; l < noise_draws; ++l)
        scores.row(l) = encoder.conditional_score(z.row(l), X.row(i));
    } else {
      const FittedScoreEstimator est = fit_score_estimator(z, config);
      scores = est.score(z);
      fill_fit_diagnostics(est, &diag);
    }

    for (int l = 0; l < noise_draws; ++l)
      grad += encoder.pjvp(X.row(i), eps.row(l), scores.row(l));
  }
  grad /= -static_cast<double>(n) * noise_draws;

  GradientReport report;
  report.gradient = std::move(grad);
  report.diagnostics = diag;
  report.diagnostics.batch_size = n;
  report.diagnostics.seed = seed;
  return report;
}

GradientReport mi_gradient_stochastic(const Encoder& encoder,
                                      const Eigen::MatrixXd& X,
                                      int noise_draws,
                                      const SsgeConfig& config,
                                      std::uint64_t seed,
                                      const RandomProjector* marginal_projector) {
  // Fresh noise for the marginal batch keeps the two score fits independent.
  const GradientReport marginal = entropy_gradient(
      encoder, X, config, mix_seed(seed, 100), marginal_projector);
  const GradientReport conditional = conditional_entropy_gradient(
      encoder, X, noise_draws, config, mix_seed(seed, 200));

  GradientReport report;
  report.gradient = marginal.gradient - conditional.gradient;
  report.diagnostics = marginal.diagnostics;
  report.diagnostics.seed = seed;
  return report;
}

namespace {

double pjvp_check_impl(const Encoder& encoder, const Eigen::VectorXd& x,
                       const Eigen::VectorXd* eps, double step,
                       std::uint64_t seed) {
  if (encoder.param_count() < 1)
    throw std::invalid_argument("pjvp check: encoder has no parameters");
  if (!(step > 0.0))
    throw std::invalid_argument("pjvp check: step must be positive");

  const Eigen::VectorXd v =
      standard_normal_vector(encoder.output_dim(), mix_seed(seed, 7));
  const Eigen::VectorXd analytic =
      eps ? encoder.pjvp(x, *eps, v) : encoder.pjvp(x, v);
  const Eigen::VectorXd theta = encoder.params();

  double max_rel = 0.0;
  Eigen::VectorXd probe = theta;
  for (int p = 0; p < theta.size(); ++p) {
    probe(p) = theta(p) + step;
    const auto enc_plus = encoder.with_params(probe);
    probe(p) = theta(p) - step;
    const auto enc_minus = encoder.with_params(probe);
    probe(p) = theta(p);
    const Eigen::VectorXd fd =
        ((eps ? enc_plus->forward(x, *eps) : enc_plus->forward(x)) -
         (eps ? enc_minus->forward(x, *eps) : enc_minus->forward(x))) /
        (2.0 * step);
    const double expected = fd.dot(v);
    const double err = std::abs(analytic(p) - expected);
    const double denom =
        std::max({std::abs(analytic(p)), std::abs(expected), 1e-8});
    max_rel = std::max(max_rel, err / denom);
  }
  return max_rel;
}

}  // namespace

double pjvp_finite_diff_check(const Encoder& encoder, const Eigen::VectorXd& x,
                              double step, std::uint64_t seed) {
  return pjvp_check_impl(encoder, x, nullptr, step, seed);
}

double pjvp_finite_diff_check(const Encoder& encoder, const Eigen::VectorXd& x,
                              const Eigen::VectorXd& eps, double step,
                              std::uint64_t seed) {
  return pjvp_check_impl(encoder, x, &eps, step, seed);
}

}  // namespace migrad
