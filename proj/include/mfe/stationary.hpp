#pragma once

// Stationary joint law of (capacity, regime) under the barrier policy.
// Regime i has CDF Pi(x, i) with Pi(inf, i) = pi_i; the marginal CDF is the sum.

#include "mfe/model.hpp"
#include "mfe/piecewise.hpp"
#include "mfe/roots.hpp"

namespace mfe {

struct StationaryLaw {
  PerRegime<double> a;     // barriers, caller's labels
  bool relabeled = false;  // regime two has the lower barrier

  // Canonical (lower barrier first) coefficients.
  double b1 = 0.0, b2 = 0.0;  // log barriers
  double A1 = 0.0, A2 = 0.0, B1 = 0.0, B2 = 0.0;
  double phi11 = 0.0, phi12 = 0.0;
  QuadraticRoots alpha;
  QuarticRoots theta;
  PerRegime<double> canonical_pi;

  ChainLaw pi;  // caller's labels

  PerRegime<PiecewiseLogPower> cdf_fn;       // caller's labels
  PerRegime<PiecewiseLogPower> pdf_fn;
  PerRegime<PiecewiseLogPower> survival_fn;  // pi_i - Pi(x, i), without cancellation

  double theta2() const noexcept { return theta.r[1]; }

  double cdf(double x, Regime r) const;
  double pdf(double x, Regime r) const;
  double marginal_cdf(double x) const;
  double marginal_pdf(double x) const;
  /// P(X > x), evaluated directly from the tail terms.
  double marginal_survival(double x) const;

  /// E[X^k]. Throws DivergentMomentError unless k + theta2 < 0.
  double moment(int k) const;
  /// E[X^k 1{eps = r}].
  double regime_moment(Regime r, int k) const;
  /// E[X 1{X <= x}].
  double partial_mean(double x) const;
  /// E[X | eps = r] from the closed-form averages.
  double conditional_mean(Regime r) const;
  /// Smallest x with marginal_cdf(x) >= q.
  double quantile(double q) const;
};

/// Builds the law for given barriers (caller's labels).
StationaryLaw solve_cdf_coeffs(const ModelParams& params, const PerRegime<double>& barriers);

}  // namespace mfe
