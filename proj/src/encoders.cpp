#include "migrad/encoders.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace migrad {

namespace {

void check_dim(const Eigen::VectorXd& v, int expected, const char* what) {
  if (v.size() != expected)
    throw std::invalid_argument(std::string(what) + ": expected dimension " +
                                std::to_string(expected) + ", got " +
                                std::to_string(v.size()));
}

Eigen::MatrixXd unpack_row_major(const Eigen::VectorXd& flat, int rows,
                                 int cols, int offset) {
  Eigen::MatrixXd out(rows, cols);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) out(r, c) = flat(offset + r * cols + c);
  return out;
}

void pack_row_major(const Eigen::MatrixXd& m, Eigen::VectorXd* flat,
                    int offset) {
  for (int r = 0; r < m.rows(); ++r)
    for (int c = 0; c < m.cols(); ++c)
      (*flat)(offset + r * static_cast<int>(m.cols()) + c) = m(r, c);
}

}  // namespace

Eigen::VectorXd Encoder::forward(const Eigen::VectorXd&) const {
  throw std::logic_error("encoder: stochastic encoder needs a noise draw");
}

Eigen::VectorXd Encoder::forward(const Eigen::VectorXd& x,
                                 const Eigen::VectorXd&) const {
  return forward(x);
}

Eigen::VectorXd Encoder::pjvp(const Eigen::VectorXd&,
                              const Eigen::VectorXd&) const {
  throw std::logic_error("encoder: stochastic encoder needs a noise draw");
}

Eigen::VectorXd Encoder::pjvp(const Eigen::VectorXd& x, const Eigen::VectorXd&,
                              const Eigen::VectorXd& v) const {
  return pjvp(x, v);
}

Eigen::VectorXd Encoder::ijvp(const Eigen::VectorXd&,
                              const Eigen::VectorXd&) const {
  throw std::logic_error("encoder: stochastic encoder needs a noise draw");
}

Eigen::VectorXd Encoder::ijvp(const Eigen::VectorXd& x, const Eigen::VectorXd&,
                              const Eigen::VectorXd& v) const {
  return ijvp(x, v);
}

Eigen::VectorXd Encoder::conditional_score(const Eigen::VectorXd&,
                                           const Eigen::VectorXd&) const {
  throw std::logic_error("encoder: no closed-form conditional score");
}

// ---------------------------------------------------------------------------
// LinearEncoder

LinearEncoder::LinearEncoder(Eigen::MatrixXd weight)
    : weight_(std::move(weight)) {
  if (weight_.size() == 0)
    throw std::invalid_argument("LinearEncoder: empty weight");
}

Eigen::VectorXd LinearEncoder::params() const {
  Eigen::VectorXd flat(weight_.size());
  pack_row_major(weight_, &flat, 0);
  return flat;
}

std::unique_ptr<Encoder> LinearEncoder::with_params(
    const Eigen::VectorXd& params) const {
  check_dim(params, param_count(), "LinearEncoder::with_params");
  return std::make_unique<LinearEncoder>(unpack_row_major(
      params, output_dim(), input_dim(), 0));
}

Eigen::VectorXd LinearEncoder::forward(const Eigen::VectorXd& x) const {
  check_dim(x, input_dim(), "LinearEncoder::forward");
  return weight_ * x;
}

Eigen::VectorXd LinearEncoder::pjvp(const Eigen::VectorXd& x,
                                    const Eigen::VectorXd& v) const {
  check_dim(x, input_dim(), "LinearEncoder::pjvp");
  check_dim(v, output_dim(), "LinearEncoder::pjvp cotangent");
  // d z_a / d W_{bc} = delta_{ab} x_c, so the gradient is the outer product.
  Eigen::VectorXd out(param_count());
  for (int a = 0; a < output_dim(); ++a)
    for (int c = 0; c < input_dim(); ++c) out(a * input_dim() + c) = v(a) * x(c);
  return out;
}

Eigen::VectorXd LinearEncoder::ijvp(const Eigen::VectorXd& x,
                                    const Eigen::VectorXd& v) const {
  (void)x;
  check_dim(v, output_dim(), "LinearEncoder::ijvp cotangent");
  return weight_.transpose() * v;
}

// ---------------------------------------------------------------------------
// ScaleEncoder

ScaleEncoder::ScaleEncoder(int dim, double scale) : dim_(dim), scale_(scale) {
  if (dim < 1) throw std::invalid_argument("ScaleEncoder: dim must be >= 1");
}

Eigen::VectorXd ScaleEncoder::params() const {
  Eigen::VectorXd p(1);
  p(0) = scale_;
  return p;
}

std::unique_ptr<Encoder> ScaleEncoder::with_params(
    const Eigen::VectorXd& params) const {
  check_dim(params, 1, "ScaleEncoder::with_params");
  return std::make_unique<ScaleEncoder>(dim_, params(0));
}

Eigen::VectorXd ScaleEncoder::forward(const Eigen::VectorXd& x) const {
  check_dim(x, dim_, "ScaleEncoder::forward");
  return scale_ * x;
}

Eigen::VectorXd ScaleEncoder::pjvp(const Eigen::VectorXd& x,
                                   const Eigen::VectorXd& v) const {
  check_dim(x, dim_, "ScaleEncoder::pjvp");
  check_dim(v, dim_, "ScaleEncoder::pjvp cotangent");
  Eigen::VectorXd out(1);
  out(0) = v.dot(x);
  return out;
}

Eigen::VectorXd ScaleEncoder::ijvp(const Eigen::VectorXd&,
                                   const Eigen::VectorXd& v) const {
  return scale_ * v;
}

// ---------------------------------------------------------------------------
// TanhMlpEncoder

TanhMlpEncoder::TanhMlpEncoder(Eigen::MatrixXd w1, Eigen::VectorXd b1,
                               Eigen::MatrixXd w2, Eigen::VectorXd b2)
    : w1_(std::move(w1)), w2_(std::move(w2)), b1_(std::move(b1)),
      b2_(std::move(b2)) {
  if (w1_.rows() != b1_.size() || w2_.cols() != w1_.rows() ||
      w2_.rows() != b2_.size())
    throw std::invalid_argument("TanhMlpEncoder: inconsistent layer shapes");
}

int TanhMlpEncoder::param_count() const {
  return static_cast<int>(w1_.size() + b1_.size() + w2_.size() + b2_.size());
}

Eigen::VectorXd TanhMlpEncoder::params() const {
  Eigen::VectorXd flat(param_count());
  int off = 0;
  pack_row_major(w1_, &flat, off);
  off += static_cast<int>(w1_.size());
  flat.segment(off, b1_.size()) = b1_;
  off += static_cast<int>(b1_.size());
  pack_row_major(w2_, &flat, off);
  off += static_cast<int>(w2_.size());
  flat.segment(off, b2_.size()) = b2_;
  return flat;
}

std::unique_ptr<Encoder> TanhMlpEncoder::with_params(
    const Eigen::VectorXd& params) const {
  check_dim(params, param_count(), "TanhMlpEncoder::with_params");
  const int hidden = static_cast<int>(w1_.rows());
  const int in = static_cast<int>(w1_.cols());
  const int out = static_cast<int>(w2_.rows());
  int off = 0;
  Eigen::MatrixXd w1 = unpack_row_major(params, hidden, in, off);
  off += hidden * in;
  Eigen::VectorXd b1 = params.segment(off, hidden);
  off += hidden;
  Eigen::MatrixXd w2 = unpack_row_major(params, out, hidden, off);
  off += out * hidden;
  Eigen::VectorXd b2 = params.segment(off, out);
  return std::make_unique<TanhMlpEncoder>(std::move(w1), std::move(b1),
                                          std::move(w2), std::move(b2));
}

Eigen::VectorXd TanhMlpEncoder::forward(const Eigen::VectorXd& x) const {
  check_dim(x, input_dim(), "TanhMlpEncoder::forward");
  const Eigen::VectorXd hidden = (w1_ * x + b1_).array().tanh();
  return w2_ * hidden + b2_;
}

Eigen::VectorXd TanhMlpEncoder::pjvp(const Eigen::VectorXd& x,
                                     const Eigen::VectorXd& v) const {
  check_dim(x, input_dim(), "TanhMlpEncoder::pjvp");
  check_dim(v, output_dim(), "TanhMlpEncoder::pjvp cotangent");
  const Eigen::VectorXd act = (w1_ * x + b1_).array().tanh();
  // Backprop through the output layer, then the tanh nonlinearity.
  const Eigen::VectorXd u =
      (w2_.transpose() * v).cwiseProduct((1.0 - act.array().square()).matrix());

  Eigen::VectorXd flat(param_count());
  int off = 0;
  pack_row_major(u * x.transpose(), &flat, off);  // dW1
  off += static_cast<int>(w1_.size());
  flat.segment(off, b1_.size()) = u;  // db1
  off += static_cast<int>(b1_.size());
  pack_row_major(v * act.transpose(), &flat, off);  // dW2
  off += static_cast<int>(w2_.size());
  flat.segment(off, b2_.size()) = v;  // db2
  return flat;
}

Eigen::VectorXd TanhMlpEncoder::ijvp(const Eigen::VectorXd& x,
                                     const Eigen::VectorXd& v) const {
  check_dim(x, input_dim(), "TanhMlpEncoder::ijvp");
  const Eigen::VectorXd act = (w1_ * x + b1_).array().tanh();
  const Eigen::VectorXd u =
      (w2_.transpose() * v).cwiseProduct((1.0 - act.array().square()).matrix());
  return w1_.transpose() * u;
}

// ---------------------------------------------------------------------------
// GaussianChannelEncoder

GaussianChannelEncoder::GaussianChannelEncoder(int dim, double rho)
    : dim_(dim), rho_(rho) {
  if (dim < 1)
    throw std::invalid_argument("GaussianChannelEncoder: dim must be >= 1");
  if (!(std::abs(rho) < 1.0))
    throw std::invalid_argument(
        "GaussianChannelEncoder: |rho| must be strictly below 1");
}

Eigen::VectorXd GaussianChannelEncoder::params() const {
  Eigen::VectorXd p(1);
  p(0) = rho_;
  return p;
}

std::unique_ptr<Encoder> GaussianChannelEncoder::with_params(
    const Eigen::VectorXd& params) const {
  check_dim(params, 1, "GaussianChannelEncoder::with_params");
  return std::make_unique<GaussianChannelEncoder>(dim_, params(0));
}

Eigen::VectorXd GaussianChannelEncoder::forward(
    const Eigen::VectorXd& x, const Eigen::VectorXd& eps) const {
  check_dim(x, dim_, "GaussianChannelEncoder::forward");
  check_dim(eps, dim_, "GaussianChannelEncoder::forward noise");
  return rho_ * x + std::sqrt(1.0 - rho_ * rho_) * eps;
}

Eigen::VectorXd GaussianChannelEncoder::pjvp(const Eigen::VectorXd& x,
                                             const Eigen::VectorXd& eps,
                                             const Eigen::VectorXd& v) const {
  check_dim(x, dim_, "GaussianChannelEncoder::pjvp");
  check_dim(eps, dim_, "GaussianChannelEncoder::pjvp noise");
  check_dim(v, dim_, "GaussianChannelEncoder::pjvp cotangent");
  // dz/drho = x - rho / sqrt(1 - rho^2) * eps.
  const double noise_coeff = -rho_ / std::sqrt(1.0 - rho_ * rho_);
  Eigen::VectorXd out(1);
  out(0) = v.dot(x + noise_coeff * eps);
  return out;
}

Eigen::VectorXd GaussianChannelEncoder::ijvp(const Eigen::VectorXd&,
                                             const Eigen::VectorXd&,
                                             const Eigen::VectorXd& v) const {
  return rho_ * v;
}

Eigen::VectorXd GaussianChannelEncoder::conditional_score(
    const Eigen::VectorXd& z, const Eigen::VectorXd& x) const {
  check_dim(z, dim_, "GaussianChannelEncoder::conditional_score");
  check_dim(x, dim_, "GaussianChannelEncoder::conditional_score input");
  return -(z - rho_ * x) / (1.0 - rho_ * rho_);
}

// ---------------------------------------------------------------------------
// LinearGaussianEncoder

LinearGaussianEncoder::LinearGaussianEncoder(Eigen::MatrixXd weight,
                                             double noise_stddev)
    : weight_(std::move(weight)), noise_stddev_(noise_stddev) {
  if (weight_.size() == 0)
    throw std::invalid_argument("LinearGaussianEncoder: empty weight");
  if (!(noise_stddev > 0.0))
    throw std::invalid_argument(
        "LinearGaussianEncoder: noise stddev must be positive");
}

Eigen::VectorXd LinearGaussianEncoder::params() const {
  Eigen::VectorXd flat(weight_.size());
  pack_row_major(weight_, &flat, 0);
  return flat;
}

std::unique_ptr<Encoder> LinearGaussianEncoder::with_params(
    const Eigen::VectorXd& params) const {
  check_dim(params, param_count(), "LinearGaussianEncoder::with_params");
  return std::make_unique<LinearGaussianEncoder>(
      unpack_row_major(params, output_dim(), input_dim(), 0), noise_stddev_);
}

Eigen::VectorXd LinearGaussianEncoder::forward(
    const Eigen::VectorXd& x, const Eigen::VectorXd& eps) const {
  check_dim(x, input_dim(), "LinearGaussianEncoder::forward");
  check_dim(eps, output_dim(), "LinearGaussianEncoder::forward noise");
  return weight_ * x + noise_stddev_ * eps;
}

Eigen::VectorXd LinearGaussianEncoder::pjvp(const Eigen::VectorXd& x,
                                            const Eigen::VectorXd& eps,
                                            const Eigen::VectorXd& v) const {
  (void)eps;
  check_dim(x, input_dim(), "LinearGaussianEncoder::pjvp");
  check_dim(v, output_dim(), "LinearGaussianEncoder::pjvp cotangent");
  Eigen::VectorXd out(param_count());
  for (int a = 0; a < output_dim(); ++a)
    for (int c = 0; c < input_dim(); ++c) out(a * input_dim() + c) = v(a) * x(c);
  return out;
}

Eigen::VectorXd LinearGaussianEncoder::ijvp(const Eigen::VectorXd&,
                                            const Eigen::VectorXd&,
                                            const Eigen::VectorXd& v) const {
  return weight_.transpose() * v;
}

Eigen::VectorXd LinearGaussianEncoder::conditional_score(
    const Eigen::VectorXd& z, const Eigen::VectorXd& x) const {
  check_dim(z, output_dim(), "LinearGaussianEncoder::conditional_score");
  check_dim(x, input_dim(), "LinearGaussianEncoder::conditional_score input");
  return -(z - weight_ * x) / (noise_stddev_ * noise_stddev_);
}

// ---------------------------------------------------------------------------
// IdentityEncoder

std::unique_ptr<Encoder> IdentityEncoder::with_params(
    const Eigen::VectorXd& params) const {
  check_dim(params, 0, "IdentityEncoder::with_params");
  return std::make_unique<IdentityEncoder>(dim_);
}

Eigen::VectorXd IdentityEncoder::pjvp(const Eigen::VectorXd&,
                                      const Eigen::VectorXd&) const {
  return Eigen::VectorXd(0);
}

}  // namespace migrad
