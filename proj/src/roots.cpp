#include "mfe/roots.hpp"

#include <cmath>
#include <string>

#include "mfe/errors.hpp"

namespace mfe {

namespace {

// Grows `edge` away from `anchor` until f(edge) has the requested sign.
template <class F>
double expand_until(F&& f, double anchor, double direction, bool want_positive) {
  double step = 1.0;
  for (int k = 0; k < 200; ++k) {
    const double x = anchor + direction * step;
    if ((f(x) > 0.0) == want_positive) return x;
    step *= 2.0;
  }
  throw SolverError("root bracket expansion failed");
}

template <class F>
double bracketed_root(F&& f, double lo, double hi) {
  const double flo = f(lo), fhi = f(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if ((flo < 0.0) == (fhi < 0.0)) {
    throw SolverError("no sign change on [" + std::to_string(lo) + ", " +
                      std::to_string(hi) + "]");
  }
  return bisect(f, lo, hi);
}

}  // namespace

std::array<double, 5> CoupledQuartic::coefficients() const noexcept {
  const Quadratic& p = first;
  const Quadratic& q = second;
  return {p.a * q.a, p.a * q.b + p.b * q.a, p.a * q.c + p.b * q.b + p.c * q.a,
          p.b * q.c + p.c * q.b, p.c * q.c - coupling};
}

double normalized_residual(const Quadratic& q, double r) noexcept {
  return std::abs(q(r) / q.a) / std::max(1.0, r * r);
}

double normalized_residual(const CoupledQuartic& q, double r) noexcept {
  const double lead = q.first.a * q.second.a;
  return std::abs(q(r) / lead) / std::max(1.0, std::pow(std::abs(r), 4));
}

Quadratic stopping_quadratic(const ModelParams& params, Regime r) {
  const double s2 = params[r].sigma * params[r].sigma;
  return {0.5 * s2, 0.5 * s2 - params.delta, -(params.rho + params.delta + params[r].p)};
}

Quadratic stationary_quadratic(const ModelParams& params, Regime r) {
  const double s2 = params[r].sigma * params[r].sigma;
  return {0.5 * s2, params.delta + 0.5 * s2, -params[r].p};
}

QuadraticRoots opposite_sign_roots(const Quadratic& q) {
  if (!(q.a > 0.0 && q.c < 0.0)) {
    throw SolverError("quadratic does not have roots of opposite sign");
  }
  const double disc = std::sqrt(q.b * q.b - 4.0 * q.a * q.c);
  const double t = -0.5 * (q.b + std::copysign(disc, q.b));
  double r1 = t / q.a;
  double r2 = q.c / t;
  if (r1 > r2) std::swap(r1, r2);
  return {r1, r2, q};
}

QuadraticRoots gamma_roots(const ModelParams& params, Regime r) {
  return opposite_sign_roots(stopping_quadratic(params, r));
}

QuadraticRoots alpha_roots(const ModelParams& params, Regime r) {
  return opposite_sign_roots(stationary_quadratic(params, r));
}

QuarticRoots lambda_roots(const ModelParams& params) {
  const CoupledQuartic poly{stopping_quadratic(params, Regime::one),
                            stopping_quadratic(params, Regime::two),
                            params[Regime::one].p * params[Regime::two].p};
  const QuadraticRoots g = opposite_sign_roots(poly.first);
  // poly(gamma^-) = poly(gamma^+) = -p1 p2 < 0 and poly(0) > 0.
  if (!(poly(g.lo) < 0.0 && poly(g.hi) < 0.0 && poly(0.0) > 0.0)) {
    throw SolverError("unexpected sign pattern of the coupled stopping quartic");
  }
  const double far_lo = expand_until(poly, g.lo, -1.0, true);
  const double far_hi = expand_until(poly, g.hi, +1.0, true);
  QuarticRoots out{{bracketed_root(poly, far_lo, g.lo), bracketed_root(poly, g.lo, 0.0),
                    bracketed_root(poly, 0.0, g.hi), bracketed_root(poly, g.hi, far_hi)},
                   poly};
  return out;
}

QuarticRoots theta_roots(const ModelParams& params) {
  const CoupledQuartic poly{stationary_quadratic(params, Regime::one),
                            stationary_quadratic(params, Regime::two),
                            params[Regime::one].p * params[Regime::two].p};
  // poly(t) = t * cubic(t): the constant terms cancel exactly.
  const auto k = poly.coefficients();
  auto cubic = [&](double t) { return ((k[0] * t + k[1]) * t + k[2]) * t + k[3]; };
  const QuadraticRoots a = opposite_sign_roots(poly.first);
  // cubic(alpha^-) > 0, cubic(0) < 0, cubic(alpha^+) < 0.
  if (!(cubic(a.lo) > 0.0 && cubic(0.0) < 0.0 && cubic(a.hi) < 0.0)) {
    throw SolverError("unexpected sign pattern of the stationary quartic");
  }
  const double far_lo = expand_until(cubic, a.lo, -1.0, false);
  const double far_hi = expand_until(cubic, a.hi, +1.0, true);
  return {{bracketed_root(cubic, far_lo, a.lo), bracketed_root(cubic, a.lo, 0.0), 0.0,
           bracketed_root(cubic, a.hi, far_hi)},
          poly};
}

TailExponent tail_exponent(const ModelParams& params) {
  const double t2 = theta_roots(params).r[1];
  return {t2, 1.0 + t2 < 0.0};
}

}  // namespace mfe
