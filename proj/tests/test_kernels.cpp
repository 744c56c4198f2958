#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "migrad/eigendecomp.hpp"
#include "migrad/kernels.hpp"
#include "migrad/rng.hpp"
#include "migrad/serial.hpp"

using migrad::RbfKernel;

namespace {

Eigen::VectorXd vec2(double a, double b) {
  Eigen::VectorXd v(2);
  v << a, b;
  return v;
}

Eigen::VectorXd vec1(double a) {
  Eigen::VectorXd v(1);
  v << a;
  return v;
}

}  // namespace

TEST_CASE("rbf eval at identical points is exactly one") {
  const RbfKernel kernel(0.8);
  const Eigen::VectorXd x = vec2(0.3, -1.2);
  CHECK(kernel.eval(x, x) == 1.0);
}

TEST_CASE("rbf eval matches the closed form") {
  // bandwidth 1, ||x - y||^2 = 2  ->  exp(-1)
  const RbfKernel unit(1.0);
  CHECK(unit.eval(vec2(1.0, 0.0), vec2(0.0, 1.0)) ==
        doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
  // bandwidth 2, ||x - y||^2 = 16  ->  exp(-2)
  const RbfKernel wide(2.0);
  CHECK(wide.eval(vec1(0.0), vec1(4.0)) ==
        doctest::Approx(std::exp(-2.0)).epsilon(1e-12));
}

TEST_CASE("rbf eval rejects mismatched dimensions and bad bandwidth") {
  const RbfKernel kernel(1.0);
  CHECK_THROWS_AS(kernel.eval(vec1(0.0), vec2(0.0, 1.0)),
                  std::invalid_argument);
  CHECK_THROWS_AS(RbfKernel(0.0), std::invalid_argument);
  CHECK_THROWS_AS(RbfKernel(-1.0), std::invalid_argument);
}

TEST_CASE("rbf gradient closed form and exact antisymmetry") {
  const RbfKernel kernel(1.0);
  CHECK(kernel.grad_x(vec1(0.5), vec1(0.5)).norm() == 0.0);
  // 1-D, bandwidth 1, x=1, y=0: -(x-y) exp(-1/2) = -exp(-0.5)
  CHECK(kernel.grad_x(vec1(1.0), vec1(0.0))(0) ==
        doctest::Approx(-std::exp(-0.5)).epsilon(1e-12));
  CHECK_THROWS_AS(kernel.grad_x(vec1(0.0), vec2(0.0, 1.0)),
                  std::invalid_argument);

  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::VectorXd x = migrad::standard_normal_vector(3, 100 + trial);
    const Eigen::VectorXd y = migrad::standard_normal_vector(3, 200 + trial);
    const Eigen::VectorXd forward = kernel.grad_x(x, y);
    const Eigen::VectorXd backward = kernel.grad_x(y, x);
    CHECK((forward + backward).cwiseAbs().maxCoeff() == 0.0);
    CHECK(std::abs(kernel.eval(x, y) - kernel.eval(y, x)) == 0.0);
  }
}

TEST_CASE("rbf gradient agrees with central finite differences") {
  for (double bandwidth : {0.5, 0.9, 2.5}) {
    const RbfKernel kernel(bandwidth);
    const double step = 1e-4;
    for (int trial = 0; trial < 10; ++trial) {
      const Eigen::VectorXd x = migrad::standard_normal_vector(4, 300 + trial);
      const Eigen::VectorXd y = migrad::standard_normal_vector(4, 400 + trial);
      const Eigen::VectorXd analytic = kernel.grad_x(x, y);
      for (int c = 0; c < 4; ++c) {
        Eigen::VectorXd xp = x, xm = x;
        xp(c) += step;
        xm(c) -= step;
        const double fd = (kernel.eval(xp, y) - kernel.eval(xm, y)) / (2 * step);
        CHECK(analytic(c) ==
              doctest::Approx(fd).epsilon(1e-5).scale(std::abs(fd) + 1e-3));
      }
    }
  }
}

TEST_CASE("gram of identical rows is all ones") {
  Eigen::MatrixXd X(2, 2);
  X << 0.4, -0.7, 0.4, -0.7;
  const Eigen::MatrixXd G = migrad::gram(RbfKernel(1.3), X);
  CHECK(G(0, 0) == 1.0);
  CHECK(G(0, 1) == 1.0);
  CHECK(G(1, 0) == 1.0);
  CHECK(G(1, 1) == 1.0);
}

TEST_CASE("gram closed form for a 1-D pair") {
  Eigen::MatrixXd X(2, 1);
  X << 0.0, 1.0;
  const Eigen::MatrixXd G = migrad::gram(RbfKernel(1.0), X);
  CHECK(G(0, 0) == 1.0);
  CHECK(G(0, 1) == doctest::Approx(std::exp(-0.5)).epsilon(1e-12));
  CHECK(G(1, 0) == G(0, 1));
}

TEST_CASE("gram requires at least two samples") {
  Eigen::MatrixXd X(1, 3);
  X.setZero();
  CHECK_THROWS_AS(migrad::gram(RbfKernel(1.0), X),
                  migrad::InsufficientSamplesError);
}

TEST_CASE("gram matrices are positive semidefinite up to roundoff") {
  for (int trial = 0; trial < 100; ++trial) {
    const Eigen::MatrixXd X = migrad::standard_normal(20, 3, 1000 + trial);
    const Eigen::MatrixXd G =
        migrad::gram(RbfKernel(migrad::median_heuristic(X)), X);
    const auto eig = migrad::sym_eig(G);
    const double lambda_max = eig.eigenvalues(0);
    const double lambda_min = eig.eigenvalues(19);
    CHECK(lambda_min >= -1e-8 * lambda_max);
  }
}

TEST_CASE("median heuristic enumerated by hand") {
  Eigen::MatrixXd X(3, 1);
  X << 0.0, 1.0, 3.0;
  // pairwise distances {1, 2, 3} -> median 2
  CHECK(migrad::median_heuristic(X) == doctest::Approx(2.0).epsilon(1e-15));

  Eigen::MatrixXd pair(2, 1);
  pair << 0.0, 2.0;
  CHECK(migrad::median_heuristic(pair) == doctest::Approx(2.0).epsilon(1e-15));

  Eigen::MatrixXd same(2, 1);
  same << 0.7, 0.7;
  CHECK(migrad::median_heuristic(same) == 1.0);

  Eigen::MatrixXd single(1, 1);
  single << 0.0;
  CHECK_THROWS_AS(migrad::median_heuristic(single),
                  migrad::InsufficientSamplesError);
}

TEST_CASE("median heuristic is invariant under row permutation") {
  const Eigen::MatrixXd X = migrad::standard_normal(40, 3, 77);
  Eigen::MatrixXd shuffled(X.rows(), X.cols());
  // deterministic permutation: reverse order, then swap halves
  for (int i = 0; i < X.rows(); ++i)
    shuffled.row(i) = X.row((static_cast<int>(X.rows()) - 1 - i + 13) %
                            X.rows());
  CHECK(migrad::median_heuristic(X) == migrad::median_heuristic(shuffled));
}

TEST_CASE("openmp kernels match the serial reference bitwise") {
  const Eigen::MatrixXd X = migrad::standard_normal(150, 7, 5);
  const Eigen::MatrixXd Q = migrad::standard_normal(60, 7, 6);

  const Eigen::MatrixXd sq_par = migrad::pairwise_sqdist(X);
  const Eigen::MatrixXd sq_ser = migrad::serial::pairwise_sqdist(X);
  CHECK((sq_par - sq_ser).cwiseAbs().maxCoeff() == 0.0);

  const Eigen::MatrixXd cross_par = migrad::cross_sqdist(Q, X);
  const Eigen::MatrixXd cross_ser = migrad::serial::cross_sqdist(Q, X);
  CHECK((cross_par - cross_ser).cwiseAbs().maxCoeff() == 0.0);

  const Eigen::MatrixXd k_par = migrad::kernel_from_sqdist(sq_par, 1.7);
  const Eigen::MatrixXd k_ser = migrad::serial::kernel_from_sqdist(sq_ser, 1.7);
  CHECK((k_par - k_ser).cwiseAbs().maxCoeff() == 0.0);

  const Eigen::MatrixXd g_par = migrad::gram(RbfKernel(0.9), X);
  const Eigen::MatrixXd g_ser = migrad::serial::gram(RbfKernel(0.9), X);
  CHECK((g_par - g_ser).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("pairwise sqdist is exactly symmetric with zero diagonal") {
  const Eigen::MatrixXd X = migrad::standard_normal(30, 4, 8);
  const Eigen::MatrixXd sq = migrad::pairwise_sqdist(X);
  CHECK((sq - sq.transpose()).cwiseAbs().maxCoeff() == 0.0);
  CHECK(sq.diagonal().cwiseAbs().maxCoeff() == 0.0);
}
