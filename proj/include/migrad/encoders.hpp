#pragma once

#include <Eigen/Dense>
#include <memory>

namespace migrad {

// A parameterized differentiable map from inputs to representations.
// Implementations expose forward evaluation, the parameter-Jacobian-transpose
// product (pjvp) and the input-Jacobian-transpose product (ijvp), all at a
// fixed input (and noise draw, for stochastic encoders). Encoders are value
// objects: with_params returns a copy with replaced parameters.
class Encoder {
 public:
  virtual ~Encoder() = default;

  virtual int input_dim() const = 0;
  virtual int output_dim() const = 0;
  virtual int param_count() const = 0;
  virtual bool is_stochastic() const { return false; }
  virtual int noise_dim() const { return 0; }

  virtual Eigen::VectorXd params() const = 0;
  virtual std::unique_ptr<Encoder> with_params(
      const Eigen::VectorXd& params) const = 0;

  virtual Eigen::VectorXd forward(const Eigen::VectorXd& x) const;
  virtual Eigen::VectorXd forward(const Eigen::VectorXd& x,
                                  const Eigen::VectorXd& eps) const;

  // (dE/dpsi)^T v; linear in v.
  virtual Eigen::VectorXd pjvp(const Eigen::VectorXd& x,
                               const Eigen::VectorXd& v) const;
  virtual Eigen::VectorXd pjvp(const Eigen::VectorXd& x,
                               const Eigen::VectorXd& eps,
                               const Eigen::VectorXd& v) const;

  // (dE/dx)^T v; chains gradients through composed stages.
  virtual Eigen::VectorXd ijvp(const Eigen::VectorXd& x,
                               const Eigen::VectorXd& v) const;
  virtual Eigen::VectorXd ijvp(const Eigen::VectorXd& x,
                               const Eigen::VectorXd& eps,
                               const Eigen::VectorXd& v) const;

  // Closed-form d/dz log q(z | x) when the conditional is known.
  virtual bool has_conditional_score() const { return false; }
  virtual Eigen::VectorXd conditional_score(const Eigen::VectorXd& z,
                                            const Eigen::VectorXd& x) const;
};

// z = W x. Parameters are the entries of W in row-major order.
class LinearEncoder : public Encoder {
 public:
  explicit LinearEncoder(Eigen::MatrixXd weight);

  int input_dim() const override { return static_cast<int>(weight_.cols()); }
  int output_dim() const override { return static_cast<int>(weight_.rows()); }
  int param_count() const override {
    return static_cast<int>(weight_.size());
  }
  Eigen::VectorXd params() const override;
  std::unique_ptr<Encoder> with_params(
      const Eigen::VectorXd& params) const override;
  Eigen::VectorXd forward(const Eigen::VectorXd& x) const override;
  Eigen::VectorXd pjvp(const Eigen::VectorXd& x,
                       const Eigen::VectorXd& v) const override;
  Eigen::VectorXd ijvp(const Eigen::VectorXd& x,
                       const Eigen::VectorXd& v) const override;

  const Eigen::MatrixXd& weight() const { return weight_; }

 private:
  Eigen::MatrixXd weight_;
};

// z = sigma * x with a single trainable scale.
class ScaleEncoder : public Encoder {
 public:
  ScaleEncoder(int dim, double scale);

  int input_dim() const override { return dim_; }
  int output_dim() const override { return dim_; }
  int param_count() const override { return 1; }
  Eigen::VectorXd params() const override;
  std::unique_ptr<Encoder> with_params(
      const Eigen::VectorXd& params) const override;
  Eigen::VectorXd forward(const Eigen::VectorXd& x) const override;
  Eigen::VectorXd pjvp(const Eigen::VectorXd& x,
                       const Eigen::VectorXd& v) const override;
  Eigen::VectorXd ijvp(const Eigen::VectorXd& x,
                       const Eigen::VectorXd& v) const override;

  double scale() const { return scale_; }

 private:
  int dim_;
  double scale_;
};

// z = W2 tanh(W1 x + b1) + b2 with analytic backprop. Parameters packed as
// [W1 row-major, b1, W2 row-major, b2].
class TanhMlpEncoder : public Encoder {
 public:
  TanhMlpEncoder(Eigen::MatrixXd w1, Eigen::VectorXd b1, Eigen::MatrixXd w2,
                 Eigen::VectorXd b2);

  int input_dim() const override { return static_cast<int>(w1_.cols()); }
  int output_dim() const override { return static_cast<int>(w2_.rows()); }
  int param_count() const override;
  Eigen::VectorXd params() const override;
  std::unique_ptr<Encoder> with_params(
      const Eigen::VectorXd& params) const override;
  Eigen::VectorXd forward(const Eigen::VectorXd& x) const override;
  Eigen::VectorXd pjvp(const Eigen::VectorXd& x,
                       const Eigen::VectorXd& v) const override;
  Eigen::VectorXd ijvp(const Eigen::VectorXd& x,
                       const Eigen::VectorXd& v) const override;

 private:
  Eigen::MatrixXd w1_, w2_;
  Eigen::VectorXd b1_, b2_;
};

// Elementwise z = rho x + sqrt(1 - rho^2) eps with trainable correlation rho
// in (-1, 1). The conditional q(z | x) is Normal(rho x, (1 - rho^2) I), so
// the conditional score is available in closed form.
class GaussianChannelEncoder : public Encoder {
 public:
  GaussianChannelEncoder(int dim, double rho);

  int input_dim() const override { return dim_; }
  int output_dim() const override { return dim_; }
  int param_count() const override { return 1; }
  bool is_stochastic() const override { return true; }
  int noise_dim() const override { return dim_; }
  Eigen::VectorXd params() const override;
  std::unique_ptr<Encoder> with_params(
      const Eigen::VectorXd& params) const override;
  Eigen::VectorXd forward(const Eigen::VectorXd& x,
                          const Eigen::VectorXd& eps) const override;
  Eigen::VectorXd pjvp(const Eigen::VectorXd& x, const Eigen::VectorXd& eps,
                       const Eigen::VectorXd& v) const override;
  Eigen::VectorXd ijvp(const Eigen::VectorXd& x, const Eigen::VectorXd& eps,
                       const Eigen::VectorXd& v) const override;
  bool has_conditional_score() const override { return true; }
  Eigen::VectorXd conditional_score(const Eigen::VectorXd& z,
                                    const Eigen::VectorXd& x) const override;

  double rho() const { return rho_; }

 private:
  int dim_;
  double rho_;
};

// z = W x + noise_stddev * eps. Only W is trainable; the noise level is a
// fixed property of the channel. Conditional score available in closed form.
class LinearGaussianEncoder : public Encoder {
 public:
  LinearGaussianEncoder(Eigen::MatrixXd weight, double noise_stddev);

  int input_dim() const override { return static_cast<int>(weight_.cols()); }
  int output_dim() const override { return static_cast<int>(weight_.rows()); }
  int param_count() const override {
    return static_cast<int>(weight_.size());
  }
  bool is_stochastic() const override { return true; }
  int noise_dim() const override { return static_cast<int>(weight_.rows()); }
  Eigen::VectorXd params() const override;
  std::unique_ptr<Encoder> with_params(
      const Eigen::VectorXd& params) const override;
  Eigen::VectorXd forward(const Eigen::VectorXd& x,
                          const Eigen::VectorXd& eps) const override;
  Eigen::VectorXd pjvp(const Eigen::VectorXd& x, const Eigen::VectorXd& eps,
                       const Eigen::VectorXd& v) const override;
  Eigen::VectorXd ijvp(const Eigen::VectorXd& x, const Eigen::VectorXd& eps,
                       const Eigen::VectorXd& v) const override;
  bool has_conditional_score() const override { return true; }
  Eigen::VectorXd conditional_score(const Eigen::VectorXd& z,
                                    const Eigen::VectorXd& x) const override;

  const Eigen::MatrixXd& weight() const { return weight_; }
  double noise_stddev() const { return noise_stddev_; }

 private:
  Eigen::MatrixXd weight_;
  double noise_stddev_;
};

// z = x with no trainable parameters.
class IdentityEncoder : public Encoder {
 public:
  explicit IdentityEncoder(int dim) : dim_(dim) {}

  int input_dim() const override { return dim_; }
  int output_dim() const override { return dim_; }
  int param_count() const override { return 0; }
  Eigen::VectorXd params() const override { return Eigen::VectorXd(0); }
  std::unique_ptr<Encoder> with_params(
      const Eigen::VectorXd& params) const override;
  Eigen::VectorXd forward(const Eigen::VectorXd& x) const override { return x; }
  Eigen::VectorXd pjvp(const Eigen::VectorXd& x,
                       const Eigen::VectorXd& v) const override;
  Eigen::VectorXd ijvp(const Eigen::VectorXd& x,
                       const Eigen::VectorXd& v) const override {
    (void)x;
    return v;
  }

 private:
  int dim_;
};

}  // namespace migrad
