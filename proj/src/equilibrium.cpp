#include "mfe/equilibrium.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mfe/errors.hpp"

namespace mfe {

namespace {

PerRegime<double> means(const StationaryLaw& law) {
  return {{law.conditional_mean(Regime::one), law.conditional_mean(Regime::two)}};
}

double relative_gap(const PerRegime<double>& x, const PerRegime<double>& y) {
  double g = 0.0;
  for (Regime r : kRegimes) g = std::max(g, std::abs(x[r] - y[r]) / std::abs(y[r]));
  return g;
}

struct Run {
  PerRegime<double> Q;
  double residual = 0.0;
};

}  // namespace

BestResponse best_response(const ModelParams& params, const PerRegime<double>& Q) {
  BestResponse out;
  out.Q_in = Q;
  out.eta = inverse_demand(params, Q);
  out.thresholds = solve_thresholds(params, out.eta);
  out.law = solve_cdf_coeffs(params, out.thresholds.a);
  out.Q_out = means(out.law);
  return out;
}

EquilibriumBounds equilibrium_bounds(const ModelParams& params) {
  EquilibriumBounds b;
  const PerRegime<double> floor{{params[Regime::one].varphi, params[Regime::two].varphi}};
  const ThresholdSolution low = solve_thresholds(params, floor);
  b.a_low = low.a;
  b.Q_low = means(solve_cdf_coeffs(params, low.a));
  const ThresholdSolution high = solve_thresholds(params, inverse_demand(params, b.Q_low));
  b.a_high = high.a;
  b.Q_high = means(solve_cdf_coeffs(params, high.a));
  return b;
}

Equilibrium solve_equilibrium(const ModelParams& params, const EquilibriumOptions& options) {
  require_admissible(params);
  Equilibrium eq;
  eq.bounds = equilibrium_bounds(params);

  double omega = options.damping;
  std::ostringstream log;
  for (int attempt = 0; attempt < 4; ++attempt, omega *= 0.5) {
    eq.trace.clear();
    Run low{eq.bounds.Q_low}, high{eq.bounds.Q_high};
    bool done = false;
    int it = 0;
    for (; it < options.max_iter; ++it) {
      IterationRecord rec;
      rec.iteration = it;
      for (Run* run : {&low, &high}) {
        const PerRegime<double> R = best_response(params, run->Q).Q_out;
        run->residual = relative_gap(run->Q, R);
        for (Regime r : kRegimes) run->Q[r] = (1.0 - omega) * run->Q[r] + omega * R[r];
      }
      rec.Q_from_low = low.Q;
      rec.Q_from_high = high.Q;
      rec.residual_low = low.residual;
      rec.residual_high = high.residual;
      eq.trace.push_back(rec);
      if (std::max(low.residual, high.residual) < options.tolerance &&
          relative_gap(low.Q, high.Q) < options.agreement) {
        done = true;
        break;
      }
    }
    if (!done) {
      log << "damping " << omega << ": no convergence after " << it << " iterations, residuals "
          << low.residual << " / " << high.residual << "\n";
      continue;
    }
    eq.iterations = it + 1;
    eq.damping = omega;
    eq.run_gap = relative_gap(low.Q, high.Q);
    eq.Q_star = low.Q;
    const BestResponse at = best_response(params, eq.Q_star);
    eq.eta_star = at.eta;
    eq.thresholds = at.thresholds;
    eq.a_star = at.thresholds.a;
    eq.law = at.law;
    eq.residual = relative_gap(eq.Q_star, at.Q_out);
    return eq;
  }
  throw SolverError("mean-field fixed point did not converge", -1.0, log.str());
}

}  // namespace mfe
