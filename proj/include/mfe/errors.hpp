#pragma once

#include <stdexcept>
#include <string>

namespace mfe {

/// Invalid argument to an evaluator (e.g. a nonpositive capacity).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Malformed or incomplete parameter input.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A numerical procedure failed to converge or hit a case that the model
/// says cannot occur for admissible inputs.
class SolverError : public std::runtime_error {
 public:
  SolverError(const std::string& what, double best_residual = -1.0,
              std::string trace = {})
      : std::runtime_error(what), best_residual_(best_residual),
        trace_(std::move(trace)) {}

  double best_residual() const noexcept { return best_residual_; }
  const std::string& trace() const noexcept { return trace_; }

 private:
  double best_residual_;
  std::string trace_;
};

/// A requested moment of the stationary law is infinite (heavy tail).
class DivergentMomentError : public std::runtime_error {
 public:
  DivergentMomentError(const std::string& what, int order, double theta2)
      : std::runtime_error(what), order_(order), theta2_(theta2) {}

  int order() const noexcept { return order_; }
  double theta2() const noexcept { return theta2_; }

 private:
  int order_;
  double theta2_;
};

}  // namespace mfe
