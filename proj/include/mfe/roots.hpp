#pragma once

#include <array>

#include "mfe/model.hpp"

namespace mfe {

/// a x^2 + b x + c.
struct Quadratic {
  double a = 0.0, b = 0.0, c = 0.0;

  constexpr double operator()(double x) const noexcept { return (a * x + b) * x + c; }
  constexpr double derivative(double x) const noexcept { return 2.0 * a * x + b; }
};

/// first(x) * second(x) - coupling.
struct CoupledQuartic {
  Quadratic first, second;
  double coupling = 0.0;

  constexpr double operator()(double x) const noexcept {
    return first(x) * second(x) - coupling;
  }
  /// Expanded coefficients, highest degree first.
  std::array<double, 5> coefficients() const noexcept;
};

/// Residual |p(r)| of the monic-normalized polynomial, scaled by max(1,|r|^deg).
double normalized_residual(const Quadratic& q, double r) noexcept;
double normalized_residual(const CoupledQuartic& q, double r) noexcept;

struct QuadraticRoots {
  double lo = 0.0;  // negative root
  double hi = 0.0;  // positive root
  Quadratic poly;
};

struct QuarticRoots {
  std::array<double, 4> r{};  // ascending
  CoupledQuartic poly;
};

struct TailExponent {
  double theta2 = 0.0;
  bool moment_finite = false;  // 1 + theta2 < 0
};

/// Continuation-region quadratic of the stopping problem in regime r:
/// 1/2 s^2 g(g-1) - (delta - s^2) g - (rho + delta + p_r).
Quadratic stopping_quadratic(const ModelParams& params, Regime r);

/// Stationary-law quadratic 1/2 s^2 t^2 + (delta + 1/2 s^2) t - p_r.
Quadratic stationary_quadratic(const ModelParams& params, Regime r);

/// Roots of a quadratic with a > 0, c < 0 (one of each sign), computed
/// without cancellation.
QuadraticRoots opposite_sign_roots(const Quadratic& q);

QuadraticRoots gamma_roots(const ModelParams& params, Regime r = Regime::one);
QuadraticRoots alpha_roots(const ModelParams& params, Regime r = Regime::one);

/// lambda_1 < lambda_2 < 0 < lambda_3 < lambda_4.
QuarticRoots lambda_roots(const ModelParams& params);

/// theta_1 < theta_2 < theta_3 = 0 < theta_4; the zero root is exact.
QuarticRoots theta_roots(const ModelParams& params);

TailExponent tail_exponent(const ModelParams& params);

/// Bisection on [lo, hi] where f(lo), f(hi) have opposite signs. Runs until the
/// bracket cannot shrink in double precision or max_iter is reached.
template <class F>
double bisect(F&& f, double lo, double hi, int max_iter = 200) {
  double flo = f(lo);
  for (int it = 0; it < max_iter; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double fmid = f(mid);
    if (fmid == 0.0) return mid;
    if ((fmid < 0.0) == (flo < 0.0)) {
      lo = mid;
      flo = fmid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace mfe
