#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "migrad/eigendecomp.hpp"
#include "migrad/rng.hpp"

using migrad::select_top_j;
using migrad::sym_eig;

TEST_CASE("identity decomposes to unit eigenvalues") {
  const auto eig = sym_eig(Eigen::MatrixXd::Identity(3, 3));
  for (int j = 0; j < 3; ++j)
    CHECK(eig.eigenvalues(j) == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("2x2 example solved by hand") {
  Eigen::MatrixXd G(2, 2);
  G << 2.0, 1.0, 1.0, 2.0;
  const auto eig = sym_eig(G);
  // characteristic polynomial (2 - l)^2 - 1 = 0 -> l in {3, 1}
  CHECK(eig.eigenvalues(0) == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(eig.eigenvalues(1) == doctest::Approx(1.0).epsilon(1e-14));
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  CHECK(eig.eigenvectors(0, 0) == doctest::Approx(inv_sqrt2).epsilon(1e-12));
  CHECK(eig.eigenvectors(1, 0) == doctest::Approx(inv_sqrt2).epsilon(1e-12));
  // sign convention puts the first of the tied-magnitude entries positive
  CHECK(eig.eigenvectors(0, 1) == doctest::Approx(inv_sqrt2).epsilon(1e-12));
  CHECK(eig.eigenvectors(1, 1) == doctest::Approx(-inv_sqrt2).epsilon(1e-12));
}

TEST_CASE("diagonal matrix keeps coordinate eigenvectors") {
  Eigen::MatrixXd G = Eigen::MatrixXd::Zero(3, 3);
  G.diagonal() << 5.0, 2.0, 0.0;
  const auto eig = sym_eig(G);
  CHECK(eig.eigenvalues(0) == doctest::Approx(5.0).epsilon(1e-14));
  CHECK(eig.eigenvalues(1) == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(eig.eigenvalues(2) == doctest::Approx(0.0).scale(1.0).epsilon(1e-14));
  CHECK(std::abs(eig.eigenvectors(0, 0)) == doctest::Approx(1.0));
  CHECK(std::abs(eig.eigenvectors(1, 1)) == doctest::Approx(1.0));
  CHECK(std::abs(eig.eigenvectors(2, 2)) == doctest::Approx(1.0));
  CHECK(eig.eigenvectors(0, 0) > 0.0);  // sign convention
}

TEST_CASE("non-finite input is rejected") {
  Eigen::MatrixXd G = Eigen::MatrixXd::Identity(2, 2);
  G(0, 1) = std::nan("");
  CHECK_THROWS_AS(sym_eig(G), std::invalid_argument);
  CHECK_THROWS_AS(sym_eig(Eigen::MatrixXd::Zero(2, 3)), std::invalid_argument);
}

TEST_CASE("round trip recovers a known spectrum") {
  // Build V diag(l) V^T from a random orthonormal basis and known spectrum.
  const Eigen::MatrixXd raw = migrad::standard_normal(12, 12, 21);
  const Eigen::MatrixXd V =
      Eigen::HouseholderQR<Eigen::MatrixXd>(raw).householderQ();
  Eigen::VectorXd lambda(12);
  for (int i = 0; i < 12; ++i) lambda(i) = 12.0 - i + 0.25 * i * i * 0.0;
  const Eigen::MatrixXd G = V * lambda.asDiagonal() * V.transpose();

  const auto eig = sym_eig(G);
  for (int i = 0; i < 12; ++i)
    CHECK(eig.eigenvalues(i) ==
          doctest::Approx(lambda(i)).epsilon(1e-8));

  const Eigen::MatrixXd reconstructed = eig.eigenvectors *
                                        eig.eigenvalues.asDiagonal() *
                                        eig.eigenvectors.transpose();
  const double scale = G.cwiseAbs().maxCoeff();
  CHECK((G - reconstructed).cwiseAbs().maxCoeff() <= 1e-6 * scale);

  const Eigen::MatrixXd gram_v =
      eig.eigenvectors.transpose() * eig.eigenvectors;
  CHECK((gram_v - Eigen::MatrixXd::Identity(12, 12)).cwiseAbs().maxCoeff() <=
        1e-8);
}

TEST_CASE("eigenvalue sum matches the trace for PSD inputs") {
  for (int trial = 0; trial < 5; ++trial) {
    const Eigen::MatrixXd A = migrad::standard_normal(15, 15, 50 + trial);
    const Eigen::MatrixXd G = A.transpose() * A;
    const auto eig = sym_eig(G);
    CHECK(eig.eigenvalues.sum() ==
          doctest::Approx(G.trace()).epsilon(1e-8));
  }
}

TEST_CASE("top-j selection follows the cumulative mass rule") {
  Eigen::VectorXd lambda(4);
  lambda << 4.0, 3.0, 2.0, 1.0;
  // cumulative fractions 0.4, 0.7, 0.9, 1.0
  CHECK(select_top_j(lambda, 0.69) == 2);
  CHECK(select_top_j(lambda, 0.4) == 1);
  CHECK(select_top_j(lambda, 0.95) == 4);
  CHECK(select_top_j(lambda, 1.0) == 4);

  Eigen::VectorXd with_negative(2);
  with_negative << 10.0, -0.001;
  CHECK(select_top_j(with_negative, 0.5) == 1);
  CHECK(select_top_j(with_negative, 1.0) == 1);

  Eigen::VectorXd flat(3);
  flat << 0.0, -1.0, -2.0;
  CHECK_THROWS_AS(select_top_j(flat, 0.5), migrad::DegenerateSpectrumError);
  CHECK_THROWS_AS(select_top_j(lambda, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(select_top_j(lambda, 1.5), std::invalid_argument);
}

TEST_CASE("top-j selection is monotone in the threshold") {
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::VectorXd lambda =
        migrad::standard_normal_vector(10, 500 + trial).cwiseAbs();
    std::sort(lambda.data(), lambda.data() + lambda.size(),
              [](double a, double b) { return a > b; });
    int previous = 0;
    for (double threshold : {0.1, 0.3, 0.5, 0.7, 0.9, 0.99, 1.0}) {
      const int j = select_top_j(lambda, threshold);
      CHECK(j >= previous);
      previous = j;
    }
  }
}
