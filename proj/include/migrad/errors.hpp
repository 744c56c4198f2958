#pragma once

#include <stdexcept>
#include <string>

namespace migrad {

// Batch has fewer samples than the operation can work with.
class InsufficientSamplesError : public std::invalid_argument {
 public:
  explicit InsufficientSamplesError(const std::string& what)
      : std::invalid_argument(what) {}
};

// No strictly positive eigenvalue mass to truncate against.
class DegenerateSpectrumError : public std::runtime_error {
 public:
  explicit DegenerateSpectrumError(const std::string& what)
      : std::runtime_error(what) {}
};

// Eigensolver failed to converge; carries the reported residual norm.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

// Conditional score requested with too few noise draws and no analytic form.
class InsufficientConditionalSamplesError : public std::invalid_argument {
 public:
  explicit InsufficientConditionalSamplesError(const std::string& what)
      : std::invalid_argument(what) {}
};

}  // namespace migrad
