#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "migrad/encoders.hpp"
#include "migrad/mi_gradient.hpp"
#include "migrad/rng.hpp"

using namespace migrad;

TEST_CASE("entropy gradient of a scale encoder recovers 1/sigma") {
  // z = sigma x on 1-D standard normal data: H = log(sigma) + const, so
  // dH/dsigma = 1/sigma.
  const Eigen::MatrixXd X = standard_normal(2000, 1, 401);
  SUBCASE("sigma = 1") {
    const GradientReport report =
        entropy_gradient(ScaleEncoder(1, 1.0), X, {}, 402);
    CHECK(std::abs(report.gradient(0) - 1.0) <= 0.1);
    CHECK(report.diagnostics.j_used >= 1);
    CHECK(report.diagnostics.bandwidth > 0.0);
    CHECK(report.diagnostics.batch_size == 2000);
  }
  SUBCASE("sigma = 2") {
    const GradientReport report =
        entropy_gradient(ScaleEncoder(1, 2.0), X, {}, 402);
    CHECK(std::abs(report.gradient(0) - 0.5) <= 0.08);
  }
}

TEST_CASE("zero-parameter encoders never touch score estimation") {
  // A NaN batch would make any score fit throw, so an empty gradient proves
  // the estimation path was skipped.
  Eigen::MatrixXd X = standard_normal(50, 2, 403);
  X(7, 1) = std::nan("");
  const GradientReport report = entropy_gradient(IdentityEncoder(2), X, {}, 404);
  CHECK(report.gradient.size() == 0);
  CHECK(report.diagnostics.batch_size == 50);
  CHECK(report.diagnostics.eigen_mass == 1.0);
}

TEST_CASE("gradient estimates reject undersized batches") {
  const Eigen::MatrixXd X = standard_normal(1, 2, 405);
  CHECK_THROWS_AS(entropy_gradient(ScaleEncoder(2, 1.0), X, {}, 1),
                  InsufficientSamplesError);
  CHECK_THROWS_AS(mi_gradient_deterministic(ScaleEncoder(2, 1.0), X, {}, 1),
                  InsufficientSamplesError);
}

TEST_CASE("joint entropy gradient flags exactly linear joints") {
  const Eigen::MatrixXd X = standard_normal(400, 2, 406);
  const GradientReport report =
      joint_entropy_gradient(ScaleEncoder(2, 1.5), X, {}, 407);
  CHECK(report.diagnostics.degenerate_joint);
  CHECK(report.gradient.allFinite());
  CHECK(report.diagnostics.joint_j_used >= 1);
}

TEST_CASE("joint entropy gradient stays finite for a nonlinear encoder") {
  Eigen::MatrixXd w1(4, 2), w2(2, 4);
  w1 << 1.0, 0.02, -0.03, 1.0, 0.4, -0.2, 0.1, 0.3;
  w2 << 0.9, 0.05, 0.2, -0.1, -0.04, 1.1, 0.15, 0.25;
  Eigen::VectorXd b1 = Eigen::VectorXd::Zero(4);
  Eigen::VectorXd b2 = Eigen::VectorXd::Zero(2);
  const TanhMlpEncoder encoder(w1, b1, w2, b2);
  const Eigen::MatrixXd X = standard_normal(800, 2, 408);
  const GradientReport report = joint_entropy_gradient(encoder, X, {}, 409);
  CHECK(report.gradient.allFinite());
  CHECK(report.gradient.size() == encoder.param_count());
}

TEST_CASE("joint entropy gradient rejects stochastic encoders") {
  const Eigen::MatrixXd X = standard_normal(50, 2, 410);
  CHECK_THROWS_AS(
      joint_entropy_gradient(GaussianChannelEncoder(2, 0.5), X, {}, 1),
      std::invalid_argument);
}

TEST_CASE("zero-parameter encoders yield empty gradients everywhere") {
  const Eigen::MatrixXd X = standard_normal(60, 2, 427);
  const IdentityEncoder enc(2);
  CHECK(joint_entropy_gradient(enc, X, {}, 1).gradient.size() == 0);
  CHECK(mi_gradient_deterministic(enc, X, {}, 1).gradient.size() == 0);
}

TEST_CASE("deterministic MI gradient decomposes bitwise") {
  Eigen::MatrixXd W(1, 2);
  W << 0.8, -0.5;
  const LinearEncoder encoder(W);
  const Eigen::MatrixXd X = standard_normal(200, 2, 411);
  const SsgeConfig config;
  const std::uint64_t seed = 412;

  const GradientReport whole = mi_gradient_deterministic(encoder, X, config, seed);
  const GradientReport marginal = entropy_gradient(encoder, X, config, seed);
  const GradientReport joint = joint_entropy_gradient(encoder, X, config, seed);
  CHECK((whole.gradient - (marginal.gradient - joint.gradient))
            .cwiseAbs()
            .maxCoeff() == 0.0);
  CHECK(whole.diagnostics.degenerate_joint);
}

TEST_CASE("conditional entropy gradient with the analytic conditional") {
  const Eigen::MatrixXd X = standard_normal(4000, 1, 413);
  SUBCASE("rho = 0.5 matches -rho/(1-rho^2)") {
    const GradientReport report = conditional_entropy_gradient(
        GaussianChannelEncoder(1, 0.5), X, 1, {}, 414);
    const double target = -0.5 / 0.75;
    CHECK(std::abs(report.gradient(0) - target) <= 0.1 * std::abs(target));
  }
  SUBCASE("rho = 0 gives a vanishing gradient") {
    const GradientReport report = conditional_entropy_gradient(
        GaussianChannelEncoder(1, 0.0), X, 1, {}, 415);
    CHECK(std::abs(report.gradient(0)) <= 0.05);
  }
}

namespace {

// Channel that hides its closed-form conditional, forcing the per-input
// score fit.
class OpaqueChannel : public GaussianChannelEncoder {
 public:
  using GaussianChannelEncoder::GaussianChannelEncoder;
  bool has_conditional_score() const override { return false; }
};

}  // namespace

TEST_CASE("conditional entropy gradient needs draws without a closed form") {
  const Eigen::MatrixXd X = standard_normal(100, 1, 416);
  CHECK_THROWS_AS(
      conditional_entropy_gradient(OpaqueChannel(1, 0.5), X, 1, {}, 1),
      InsufficientConditionalSamplesError);
  CHECK_THROWS_AS(
      conditional_entropy_gradient(GaussianChannelEncoder(1, 0.5), X, 0, {}, 1),
      InsufficientConditionalSamplesError);
  CHECK_THROWS_AS(
      conditional_entropy_gradient(ScaleEncoder(1, 1.0), X, 4, {}, 1),
      std::invalid_argument);
}

TEST_CASE("estimated conditional score path points the right way") {
  const Eigen::MatrixXd X = standard_normal(300, 1, 417);
  const GradientReport report =
      conditional_entropy_gradient(OpaqueChannel(1, 0.5), X, 64, {}, 418);
  const double target = -0.5 / 0.75;
  CHECK(report.gradient(0) < 0.0);
  CHECK(std::abs(report.gradient(0) - target) <= 0.3 * std::abs(target));
}

TEST_CASE("stochastic MI gradient on the correlated-Gaussian channel") {
  const int d = 5;
  const Eigen::MatrixXd X = standard_normal(1500, d, 419);
  const GaussianChannelEncoder enc_pos(d, 0.5);
  const GaussianChannelEncoder enc_neg(d, -0.5);
  const GradientReport pos = mi_gradient_stochastic(enc_pos, X, 1, {}, 420);
  const GradientReport neg = mi_gradient_stochastic(enc_neg, X, 1, {}, 420);
  const double target = 0.5 * d / 0.75;

  CHECK(std::abs(pos.gradient(0) - target) <= 0.15 * target);
  // antisymmetry in rho at matched seeds
  CHECK(pos.gradient(0) > 0.0);
  CHECK(neg.gradient(0) < 0.0);
  CHECK(std::abs(pos.gradient(0) + neg.gradient(0)) <=
        0.10 * std::abs(pos.gradient(0)));
  CHECK(pos.diagnostics.seed == 420);
}

TEST_CASE("two-stage MI gradient validates stage dimensions") {
  Eigen::MatrixXd A(3, 2), B(2, 2);
  A.setIdentity();
  B.setIdentity();
  const LinearGaussianEncoder first(A, 0.5);
  const LinearGaussianEncoder second(B, 0.5);
  const Eigen::MatrixXd X = standard_normal(50, 2, 421);
  CHECK_THROWS_AS(mi_gradient_two_stage(first, second, X, {}, 1),
                  std::invalid_argument);
}

TEST_CASE("two-stage MI gradient with an identity second stage") {
  Eigen::MatrixXd A(2, 2);
  A << 1.0, 0.3, -0.2, 0.9;
  const LinearGaussianEncoder first(A, 0.5);
  const IdentityEncoder second(2);
  const Eigen::MatrixXd X = standard_normal(400, 2, 422);
  const GradientReport report = mi_gradient_two_stage(first, second, X, {}, 423);
  // z duplicates h exactly, so the joint is flagged and only the first
  // stage's parameters appear.
  CHECK(report.gradient.size() == first.param_count());
  CHECK(report.gradient.allFinite());
  CHECK(report.diagnostics.degenerate_joint);
}

TEST_CASE("two-stage MI gradient splits parameters by stage") {
  Eigen::MatrixXd A(2, 2), B(2, 2);
  A << 0.9, 0.2, -0.3, 1.1;
  B << 1.0, -0.4, 0.5, 0.8;
  const LinearGaussianEncoder first(A, 0.5);
  const LinearGaussianEncoder second(B, 0.5);
  const Eigen::MatrixXd X = standard_normal(600, 2, 424);
  const GradientReport report = mi_gradient_two_stage(first, second, X, {}, 425);
  CHECK(report.gradient.size() == 8);
  CHECK(report.gradient.allFinite());
  CHECK(report.diagnostics.joint_j_used >= 1);
  CHECK_FALSE(report.diagnostics.degenerate_joint);
}

TEST_CASE("zero-parameter two-stage chain yields an empty gradient") {
  const IdentityEncoder first(2);
  const IdentityEncoder second(2);
  const Eigen::MatrixXd X = standard_normal(50, 2, 426);
  const GradientReport report = mi_gradient_two_stage(first, second, X, {}, 1);
  CHECK(report.gradient.size() == 0);
}
