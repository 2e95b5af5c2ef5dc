#pragma once

// Monte Carlo for capacity reflected at the regime-dependent barrier, with
// lump-sum catch-up investment when a regime switch raises the barrier.

#include <cstdint>
#include <optional>
#include <vector>

#include "mfe/model.hpp"
#include "mfe/stationary.hpp"

namespace mfe {

enum class ReflectionScheme {
  /// Samples the log-increment and the barrier push of each substep jointly
  /// from their exact law (running minimum of the Brownian bridge).
  ExactIncrement,
  /// Euler step followed by projection onto the barrier.
  EulerProjection,
};

struct SimConfig {
  double dt = 1e-2;
  double horizon = 1e3;
  int n_paths = 100;
  std::uint64_t seed = 42;
  double burn_in = 0.2;         // fraction of the horizon discarded
  double record_every = 1.0;    // time between recorded samples
  PerRegime<double> barriers{{1.0, 1.0}};
  double x0 = 1.0;
  Regime i0 = Regime::one;
  ReflectionScheme scheme = ReflectionScheme::ExactIncrement;
  bool switching = true;        // false freezes the regime at i0
  std::optional<PerRegime<double>> sigma_override;
  int trajectory_paths = 0;     // number of paths whose full record is kept

  void validate() const;
};

struct TrajectoryPoint {
  double t = 0.0;
  double x = 0.0;
  Regime regime = Regime::one;
  double investment = 0.0;  // cumulative
};

struct PathStats {
  PerRegime<std::vector<double>> samples;  // recorded capacities, post burn-in
  PerRegime<double> conditional_mean;
  PerRegime<double> mean_stderr;           // batch means over paths
  PerRegime<double> occupation;            // fraction of recorded samples
  PerRegime<double> occupation_stderr;
  double corridor_probability = 0.0;       // open interval (min a, max a)
  double corridor_share = 0.0;
  double max_reflection_violation = 0.0;   // max over records of barrier - X, >= 0
  std::vector<double> path_means;          // per-path mean capacity
  PerRegime<std::vector<std::size_t>> path_counts;  // samples per path, in path order
  std::vector<std::vector<TrajectoryPoint>> trajectories;

  std::size_t size() const {
    return samples[Regime::one].size() + samples[Regime::two].size();
  }
  /// Empirical marginal CDF at x.
  double empirical_cdf(double x) const;
};

PathStats simulate(const ModelParams& params, const SimConfig& config);

/// Seeds the generator of path `path` from the run seed.
std::uint64_t path_seed(std::uint64_t seed, std::uint64_t path);

struct CorridorStats {
  double probability = 0.0;  // P(X in (min a, max a))
  double share = 0.0;        // E[X 1{X in corridor}] / E[X]
};

CorridorStats corridor_stats(const StationaryLaw& law);
CorridorStats corridor_stats(const PathStats& stats);

/// Kolmogorov-Smirnov distance between the empirical marginal and the law.
double ks_distance(const StationaryLaw& law, const PathStats& stats);

}  // namespace mfe
