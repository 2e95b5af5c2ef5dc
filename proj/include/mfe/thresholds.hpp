#pragma once

// Free-boundary problem for fixed prices: investment thresholds, the marginal
// value v (optimal stopping) and the firm value V (singular control).
//
// Internally everything is solved with the regime owning the lower threshold
// called "first". When that is regime two of the caller, the parameters are
// relabeled on the way in and results are mapped back on the way out.

#include <string>

#include "mfe/model.hpp"
#include "mfe/piecewise.hpp"
#include "mfe/roots.hpp"

namespace mfe {

/// Affine particular solutions: C1 x + D1 on the corridor (first regime
/// continuing, second stopped) and L_i x + R_i above both thresholds.
struct ParticularCoeffs {
  double C1 = 0.0, D1 = 0.0;
  PerRegime<double> L, R;
  double G11 = 0.0, G12 = 0.0;  // G_1(lambda_j) / p_1, j = 1, 2
};

ParticularCoeffs particular_coeffs(const ModelParams& params, const PerRegime<double>& eta);

/// Affine maps of the smooth-fit reduction: every coefficient of v is
/// x1 + x2 * (threshold), and the two remaining conditions are written with
/// the f-rows.
struct CoefficientLadder {
  double c11 = 0, c12 = 0, c21 = 0, c22 = 0;
  double d11 = 0, d12 = 0, d21 = 0, d22 = 0;
  double e11 = 0, e12 = 0, e21 = 0, e22 = 0;
  double f11 = 0, f12 = 0, f21 = 0, f22 = 0;
};

CoefficientLadder coefficient_ladder(const ModelParams& params, const ParticularCoeffs& pc,
                                     const QuadraticRoots& gamma, const QuarticRoots& lambda);

/// Residuals of the two threshold equations at log-thresholds (u1, u2), each
/// divided by the magnitude of its terms. The first is taken after dividing
/// out the growing power of a2 / a1.
struct LadderResidual {
  std::array<double, 2> value{};
  std::array<std::array<double, 2>, 2> jacobian{};  // d value_i / d u_j
  std::array<double, 2> scale{};
};

LadderResidual ladder_residual(const CoefficientLadder& ladder, const QuadraticRoots& gamma,
                               double kappa, double u1, double u2);

struct ThresholdOptions {
  int max_newton = 100;
  double tolerance = 1e-13;    // target scaled residual
  double accept = 1e-10;       // largest scaled residual still accepted
  double max_log_step = 0.5;
  int fallback_grid = 12;      // multi-start points per axis
};

struct ThresholdSolution {
  PerRegime<double> a;          // thresholds, caller's labels
  bool relabeled = false;       // true when regime two owns the lower threshold

  // Canonical (lower-threshold-first) data.
  ModelParams canonical;
  PerRegime<double> canonical_eta;
  QuadraticRoots gamma;
  QuarticRoots lambda;
  ParticularCoeffs pc;
  CoefficientLadder ladder;
  double A = 0, B = 0, M1 = 0, M2 = 0;
  PerRegime<double> k;          // V(a_i, i), canonical labels

  double residual = 0.0;        // scaled threshold-equation residual
  int iterations = 0;

  PerRegime<PiecewiseLogPower> v_fn;  // caller's labels
  PerRegime<PiecewiseLogPower> V_fn;

  Regime lower() const noexcept { return relabeled ? Regime::two : Regime::one; }
  double v(double x, Regime r) const;
  double V(double x, Regime r) const;
};

/// Threshold of the uncoupled problem of regime r (its own sigma and price,
/// no switching).
double single_regime_threshold(const ModelParams& params, Regime r, double eta);

/// Solves the smooth-fit system. Tries the given labelling first, then the
/// relabeled one. Throws SolverError if neither yields a valid solution.
ThresholdSolution solve_thresholds(const ModelParams& params, const PerRegime<double>& eta,
                                   const ThresholdOptions& options = {});

/// Integration constants k_i = V(a_i, i), canonical labels, given the
/// canonical v on the corridor.
PerRegime<double> solve_k(const ModelParams& canonical, const PerRegime<double>& eta,
                          double a1, double a2, const PiecewiseLogPower& v_first);

}  // namespace mfe
