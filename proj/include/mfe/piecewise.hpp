#pragma once

// Exact arithmetic on the function class that every closed form in the model
// lives in: finite sums of  c * (x/s)^e * ln(x/s)^m  on consecutive intervals.
// Value functions, the stationary CDF/density and their products all stay in
// this class, so derivatives, antiderivatives and integrals (including
// integrals to infinity) are evaluated in closed form.

#include <limits>
#include <vector>

namespace mfe {

/// Exponents with |e| below this are treated as exactly zero when
/// integrating, which switches (.)^(1+e)/(1+e) to a logarithm.
inline constexpr double kDegenerateExponent = 1e-9;

struct LogPowerTerm {
  double coef = 0.0;
  double expo = 0.0;
  int log_power = 0;
};

/// Sum of terms in t = ln(x / scale).
class LogPowerSum {
 public:
  LogPowerSum() = default;
  explicit LogPowerSum(double scale, std::vector<LogPowerTerm> terms = {})
      : scale_(scale), terms_(std::move(terms)) {}

  static LogPowerSum constant(double value, double scale = 1.0) {
    return LogPowerSum(scale, {{value, 0.0, 0}});
  }

  double scale() const noexcept { return scale_; }
  const std::vector<LogPowerTerm>& terms() const noexcept { return terms_; }

  double operator()(double x) const;
  LogPowerSum derivative() const;
  /// Some antiderivative G (G' = *this); constant of integration arbitrary.
  LogPowerSum antiderivative() const;
  /// Same function expressed with a different scale.
  LogPowerSum rescaled(double new_scale) const;
  /// Multiplies by x^k.
  LogPowerSum times_power(double k) const;

  LogPowerSum& operator+=(const LogPowerSum& other);
  LogPowerSum& operator*=(double factor);
  friend LogPowerSum operator*(const LogPowerSum& f, const LogPowerSum& g);

  /// Integral over [lo, hi]; hi may be +infinity. Throws DivergentMomentError
  /// if a term does not decay at infinity.
  double integral(double lo, double hi) const;

 private:
  double scale_ = 1.0;
  std::vector<LogPowerTerm> terms_;
};

struct Piece {
  double lo = 0.0;
  double hi = std::numeric_limits<double>::infinity();
  LogPowerSum f;
};

/// Contiguous pieces covering (0, inf). A point on a breakpoint belongs to the
/// piece on its left.
class PiecewiseLogPower {
 public:
  PiecewiseLogPower() = default;
  explicit PiecewiseLogPower(std::vector<Piece> pieces);

  const std::vector<Piece>& pieces() const noexcept { return pieces_; }

  double operator()(double x) const;
  /// Derivative using the piece on the right of a breakpoint.
  double right_derivative(double x) const;
  PiecewiseLogPower derivative() const;
  /// F with F' = *this and F(anchor) = value.
  PiecewiseLogPower antiderivative(double anchor, double value) const;
  PiecewiseLogPower times_power(double k) const;

  double integral(double lo, double hi) const;
  /// Integral of f*g over [lo, hi].
  friend double integral_of_product(const PiecewiseLogPower& f,
                                    const PiecewiseLogPower& g, double lo,
                                    double hi);

 private:
  const Piece& piece_at(double x) const;
  std::vector<Piece> pieces_;
};

/// Integral of exp(k t) t^m over [t0, t1] with t1 possibly +infinity.
double integrate_exp_poly(double k, int m, double t0, double t1);

}  // namespace mfe
