#pragma once

// Mean-field closure: prices from aggregate production, best-response
// thresholds, and the stationary conditional means they induce.

#include <vector>

#include "mfe/stationary.hpp"
#include "mfe/thresholds.hpp"

namespace mfe {

struct BestResponse {
  PerRegime<double> Q_in;
  PerRegime<double> eta;
  ThresholdSolution thresholds;
  StationaryLaw law;
  PerRegime<double> Q_out;  // E[X | eps = i]
};

BestResponse best_response(const ModelParams& params, const PerRegime<double>& Q);

struct EquilibriumBounds {
  PerRegime<double> a_low, a_high;
  PerRegime<double> Q_low, Q_high;
};

/// Box containing every best response: thresholds at the floor prices give
/// the smallest means, thresholds at the prices of those means the largest.
EquilibriumBounds equilibrium_bounds(const ModelParams& params);

struct IterationRecord {
  int iteration = 0;
  PerRegime<double> Q_from_low, Q_from_high;
  double residual_low = 0.0, residual_high = 0.0;
};

struct EquilibriumOptions {
  double damping = 0.5;      // weight on the new best response
  double tolerance = 1e-11;  // componentwise relative residual
  double agreement = 1e-9;   // relative gap between the two runs
  int max_iter = 2000;
};

struct Equilibrium {
  PerRegime<double> Q_star;
  PerRegime<double> a_star;
  PerRegime<double> eta_star;
  ThresholdSolution thresholds;
  StationaryLaw law;
  EquilibriumBounds bounds;
  double residual = 0.0;    // max_i |Q_i - (RQ)_i| / Q_i at Q_star
  double run_gap = 0.0;     // max_i relative gap between the two corner runs
  int iterations = 0;
  double damping = 0.0;
  std::vector<IterationRecord> trace;
};

/// Damped fixed-point iteration started from both corners of the box.
Equilibrium solve_equilibrium(const ModelParams& params, const EquilibriumOptions& options = {});

}  // namespace mfe
