#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "migrad/projection.hpp"
#include "migrad/rng.hpp"

using namespace migrad;

TEST_CASE("one-dimensional projector is a unit scalar") {
  for (std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
    const RandomProjector p(1, 1, seed);
    const double r = p.directions()(0, 0);
    CHECK(std::abs(std::abs(r) - 1.0) <= 1e-15);
    Eigen::VectorXd x(1);
    x << 0.37;
    CHECK(p.project(x)(0) == doctest::Approx(r * 0.37));
  }
}

TEST_CASE("projector construction is deterministic in (d, k, seed)") {
  const RandomProjector a(64, 16, 99);
  const RandomProjector b(64, 16, 99);
  CHECK((a.directions() - b.directions()).cwiseAbs().maxCoeff() == 0.0);
  const RandomProjector c(64, 16, 100);
  CHECK((a.directions() - c.directions()).cwiseAbs().maxCoeff() > 0.0);
}

TEST_CASE("projection directions have unit norm") {
  const RandomProjector p(1024, 128, 7);
  for (int r = 0; r < 128; ++r)
    CHECK(std::abs(p.directions().row(r).norm() - 1.0) <= 1e-12);
}

TEST_CASE("invalid projector shapes are rejected") {
  CHECK_THROWS_AS(RandomProjector(4, 8, 1), std::invalid_argument);
  CHECK_THROWS_AS(RandomProjector(0, 0, 1), std::invalid_argument);
  const RandomProjector p(8, 4, 1);
  CHECK_THROWS_AS(p.project(standard_normal(5, 7, 2)), std::invalid_argument);
}

TEST_CASE("projecting zeros gives zeros") {
  const RandomProjector p(32, 8, 3);
  const Eigen::MatrixXd zeros = Eigen::MatrixXd::Zero(10, 32);
  const Eigen::MatrixXd Z = p.project(zeros);
  CHECK(Z.cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("rescaled projected distances approximate original distances") {
  const int d = 1024, n = 400;
  const Eigen::MatrixXd X = standard_normal(n, d, 11);
  // k = d is looser than necessary but must sit in the same band
  for (int k : {128, d}) {
    const RandomProjector p(d, k, 12);
    const Eigen::MatrixXd P = p.project(X);
    const double root_scale = std::sqrt(static_cast<double>(d) / k);

    std::mt19937_64 engine(13);
    int preserved = 0;
    for (int pair = 0; pair < 100; ++pair) {
      const int i = static_cast<int>(engine() % n);
      int j = static_cast<int>(engine() % n);
      if (j == i) j = (j + 1) % n;
      const double original = (X.row(i) - X.row(j)).norm();
      const double projected = root_scale * (P.row(i) - P.row(j)).norm();
      if (std::abs(projected - original) <= 0.2 * original) ++preserved;
    }
    CHECK(preserved >= 95);
  }
}

TEST_CASE("distance preservation improves with the projection dimension") {
  const int d = 256, n = 300;
  const std::vector<int> ks = {8, 32, 128};
  std::vector<double> fractions(ks.size(), 0.0);
  for (int seed = 0; seed < 5; ++seed) {
    const Eigen::MatrixXd X = standard_normal(n, d, 20 + seed);
    for (std::size_t ki = 0; ki < ks.size(); ++ki) {
      const RandomProjector p(d, ks[ki], 30 + seed);
      const Eigen::MatrixXd P = p.project(X);
      const double root_scale = std::sqrt(static_cast<double>(d) / ks[ki]);
      std::mt19937_64 engine(40 + seed);
      int preserved = 0;
      for (int pair = 0; pair < 100; ++pair) {
        const int i = static_cast<int>(engine() % n);
        int j = static_cast<int>(engine() % n);
        if (j == i) j = (j + 1) % n;
        const double original = (X.row(i) - X.row(j)).norm();
        const double projected = root_scale * (P.row(i) - P.row(j)).norm();
        if (std::abs(projected - original) <= 0.2 * original) ++preserved;
      }
      fractions[ki] += preserved / 100.0 / 5.0;
    }
  }
  CHECK(fractions[0] <= fractions[1]);
  CHECK(fractions[1] <= fractions[2]);
}

TEST_CASE("projected kernel basics") {
  const RandomProjector p(20, 8, 55);
  const ProjectedRbfKernel kernel(p, 1.4);
  const Eigen::VectorXd x = standard_normal_vector(20, 56);
  CHECK(kernel.eval(x, x) == 1.0);
  CHECK(kernel.grad_x(x, x).norm() == 0.0);
  CHECK_THROWS_AS(ProjectedRbfKernel(p, 0.0), std::invalid_argument);
}

TEST_CASE("projected kernel reduces to the plain kernel at d = k = 1") {
  const RandomProjector p(1, 1, 57);
  const ProjectedRbfKernel projected(p, 0.9);
  const RbfKernel plain(0.9);
  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::VectorXd x = standard_normal_vector(1, 60 + trial);
    const Eigen::VectorXd y = standard_normal_vector(1, 70 + trial);
    CHECK(projected.eval(x, y) == doctest::Approx(plain.eval(x, y)).epsilon(1e-15));
    CHECK(projected.grad_x(x, y)(0) ==
          doctest::Approx(plain.grad_x(x, y)(0)).epsilon(1e-12));
  }
}

TEST_CASE("projected kernel gradient matches finite differences") {
  const RandomProjector p(20, 8, 58);
  const ProjectedRbfKernel kernel(p, 1.1);
  const double step = 1e-4;
  for (int trial = 0; trial < 50; ++trial) {
    const Eigen::VectorXd x = standard_normal_vector(20, 100 + trial);
    const Eigen::VectorXd y = standard_normal_vector(20, 200 + trial);
    const Eigen::VectorXd analytic = kernel.grad_x(x, y);
    for (int c = 0; c < 20; c += 5) {
      Eigen::VectorXd xp = x, xm = x;
      xp(c) += step;
      xm(c) -= step;
      const double fd = (kernel.eval(xp, y) - kernel.eval(xm, y)) / (2 * step);
      CHECK(analytic(c) ==
            doctest::Approx(fd).epsilon(1e-5).scale(std::abs(fd) + 1e-3));
    }
  }
}

TEST_CASE("scalable fit keeps scores in the original space") {
  const int d = 64, k = 32, M = 2000;
  const Eigen::MatrixXd X = standard_normal(M, d, 59);
  const RandomProjector p(d, k, 61);
  const FittedScoreEstimator est = fit_scalable_score_estimator(X, {}, p);
  CHECK(est.dim() == d);
  CHECK(est.beta().cols() == d);

  const Eigen::MatrixXd origin = Eigen::MatrixXd::Zero(1, d);
  CHECK(est.score(origin).cwiseAbs().maxCoeff() <= 0.3);
}

TEST_CASE("scalable fit at k = d tracks the plain fit") {
  // A square projector with unit-length random directions is not a
  // rotation, so pointwise scores wobble; directional agreement and the
  // accuracy against the analytic score are the stable properties.
  const int d = 64, M = 2000;
  const Eigen::MatrixXd X = standard_normal(M, d, 500);
  const RandomProjector p(d, d, 600);
  const FittedScoreEstimator plain = fit_score_estimator(X);
  const FittedScoreEstimator projected = fit_scalable_score_estimator(X, {}, p);
  const Eigen::MatrixXd Q = standard_normal(50, d, 700);
  const Eigen::MatrixXd a = plain.score(Q);
  const Eigen::MatrixXd b = projected.score(Q);
  const double cosine = (a.array() * b.array()).sum() / (a.norm() * b.norm());
  CHECK(cosine >= 0.85);
  const double rmse_projected = std::sqrt((b + Q).array().square().mean());
  CHECK(rmse_projected <= 0.6);
}

TEST_CASE("scalable fit rejects a mismatched projector") {
  const Eigen::MatrixXd X = standard_normal(100, 16, 65);
  const RandomProjector p(8, 4, 66);
  CHECK_THROWS_AS(fit_scalable_score_estimator(X, {}, p),
                  std::invalid_argument);
}
