#include "migrad/oracles.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "migrad/rng.hpp"

namespace migrad {

namespace {

void check_rho(double rho) {
  if (!(std::abs(rho) < 1.0))
    throw std::invalid_argument("toy problem: |rho| must be strictly below 1, got " +
                                std::to_string(rho));
}

double logdet_spd(const Eigen::MatrixXd& S) {
  const Eigen::LLT<Eigen::MatrixXd> llt(S);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("logdet_spd: matrix is not positive definite");
  double logdet = 0.0;
  const auto& L = llt.matrixLLT();
  for (int i = 0; i < S.rows(); ++i) logdet += std::log(L(i, i));
  return 2.0 * logdet;
}

}  // namespace

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> sample_toy(const ToyProblem& p,
                                                       int n,
                                                       std::uint64_t seed) {
  check_rho(p.rho);
  if (n < 1) throw std::invalid_argument("sample_toy: n must be >= 1");
  if (p.dim < 1) throw std::invalid_argument("sample_toy: dim must be >= 1");
  Eigen::MatrixXd X = standard_normal(n, p.dim, mix_seed(seed, 0));
  Eigen::MatrixXd E = standard_normal(n, p.dim, mix_seed(seed, 1));
  Eigen::MatrixXd Y = p.rho * X + std::sqrt(1.0 - p.rho * p.rho) * E;
  return {std::move(X), std::move(Y)};
}

double analytic_mi_grad(const ToyProblem& p) {
  check_rho(p.rho);
  return p.rho * static_cast<double>(p.dim) / (1.0 - p.rho * p.rho);
}

double analytic_mi(const ToyProblem& p) {
  check_rho(p.rho);
  return -0.5 * static_cast<double>(p.dim) * std::log(1.0 - p.rho * p.rho);
}

Eigen::VectorXd gaussian_score(const Eigen::VectorXd& x,
                               const Eigen::VectorXd& mean,
                               const Eigen::VectorXd& cov_diag) {
  if (x.size() != mean.size() || x.size() != cov_diag.size())
    throw std::invalid_argument("gaussian_score: dimension mismatch");
  if ((cov_diag.array() <= 0.0).any())
    throw std::invalid_argument("gaussian_score: variances must be positive");
  return -(x - mean).cwiseQuotient(cov_diag);
}

double linear_gaussian_mi(const Eigen::MatrixXd& W, double noise_var) {
  if (!(noise_var > 0.0))
    throw std::invalid_argument("linear_gaussian_mi: noise variance must be positive");
  const int dz = static_cast<int>(W.rows());
  const Eigen::MatrixXd S =
      Eigen::MatrixXd::Identity(dz, dz) + W * W.transpose() / noise_var;
  return 0.5 * logdet_spd(S);
}

Eigen::MatrixXd linear_gaussian_mi_grad(const Eigen::MatrixXd& W,
                                        double noise_var) {
  if (!(noise_var > 0.0))
    throw std::invalid_argument("linear_gaussian_mi_grad: noise variance must be positive");
  const int dz = static_cast<int>(W.rows());
  const Eigen::MatrixXd S =
      noise_var * Eigen::MatrixXd::Identity(dz, dz) + W * W.transpose();
  return S.llt().solve(W);
}

double linear_chain_mi(const Eigen::MatrixXd& A, double var_a,
                       const Eigen::MatrixXd& B, double var_b) {
  if (!(var_a > 0.0) || !(var_b > 0.0))
    throw std::invalid_argument("linear_chain_mi: jitter variances must be positive");
  if (B.cols() != A.rows())
    throw std::invalid_argument("linear_chain_mi: stage dimensions do not chain");
  const int dh = static_cast<int>(A.rows());
  const int dz = static_cast<int>(B.rows());
  const Eigen::MatrixXd sigma_h =
      A * A.transpose() + var_a * Eigen::MatrixXd::Identity(dh, dh);
  const Eigen::MatrixXd S = Eigen::MatrixXd::Identity(dz, dz) +
                            B * sigma_h * B.transpose() / var_b;
  return 0.5 * logdet_spd(S);
}

Eigen::VectorXd finite_diff(
    const std::function<double(const Eigen::VectorXd&)>& f,
    const Eigen::VectorXd& theta, double step) {
  if (!(step > 0.0))
    throw std::invalid_argument("finite_diff: step must be positive");
  Eigen::VectorXd grad(theta.size());
  Eigen::VectorXd probe = theta;
  for (int i = 0; i < theta.size(); ++i) {
    probe(i) = theta(i) + step;
    const double f_plus = f(probe);
    probe(i) = theta(i) - step;
    const double f_minus = f(probe);
    probe(i) = theta(i);
    grad(i) = (f_plus - f_minus) / (2.0 * step);
  }
  return grad;
}

}  // namespace migrad
