#pragma once

// Economic indicators of the stationary equilibrium: moments and
// concentration of the firm-size law, firm value and its elasticities.

#include <optional>
#include <utility>
#include <vector>

#include "mfe/equilibrium.hpp"
#include "mfe/simulator.hpp"

namespace mfe {

struct ConcentrationReport {
  double mean = 0.0;
  std::optional<double> variance;  // empty when the second moment diverges
  std::optional<double> ratio;     // variance / mean^2
  double gini_H = 0.0;             // in [0, 1/2]
  /// Normalized mean-below-quantile curve, (q, Qbar(q)).
  std::vector<std::pair<double, double>> curve;
  double theta2 = 0.0;
};

/// Lorenz-type curve Qbar(q) = E[X 1{X <= x(q)}] / E[X] and
/// H = int_0^1 (q - Qbar(q)) dq in closed form.
ConcentrationReport concentration(const StationaryLaw& law, int curve_points = 101);

/// Same index for an empirical population, with a standard error from
/// `groups` disjoint batches of paths.
struct SampleGini {
  double H = 0.0;
  double stderr_H = 0.0;
};
SampleGini sample_gini(const PathStats& stats, int groups = 20);
double sample_gini(std::vector<double> population);

/// Stationary expected firm value, sum_i int V(x, i) p(dx, i).
double v_star(const ThresholdSolution& thresholds, const StationaryLaw& law);
double v_star(const ModelParams& params);

struct ElasticityReport {
  double v_star = 0.0;
  double chi_sigma1 = 0.0;
  double chi_p1 = 0.0;
  double chi_varphi1 = 0.0;
  /// Halving the step changed every derivative by less than 10 % (or by a
  /// negligible absolute amount).
  bool step_stable = true;
  std::array<double, 3> coarse{};  // elasticities at the initial step
};

/// Model with both regimes equal to `nu` on top of the common constants of
/// `common`.
ModelParams symmetric_params(const ModelParams& common, const RegimeParams& nu);

/// Central differences of V* in sigma_1, p_1 and varphi_1 at a symmetric
/// point, one Richardson halving, every evaluation a full equilibrium solve.
ElasticityReport elasticities(const ModelParams& symmetric, double relative_step = 1e-3);

struct Table1Row {
  double sigma = 0.0, varphi = 0.0;
  ElasticityReport report;
};

/// Constants shared by all rows of the elasticity table.
ModelParams table1_base();
std::vector<Table1Row> table1();

}  // namespace mfe
