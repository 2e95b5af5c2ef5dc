#include "mfe/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <thread>

#include "mfe/errors.hpp"

namespace mfe {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

struct PathResult {
  PerRegime<std::vector<double>> samples;
  PerRegime<double> sum{{0.0, 0.0}};
  double violation = 0.0;
  std::vector<TrajectoryPoint> trajectory;
};

class PathEngine {
 public:
  PathEngine(const ModelParams& params, const SimConfig& cfg, std::uint64_t seed)
      : params_(params), cfg_(cfg), rng_(seed) {
    for (Regime r : kRegimes) {
      sigma_[r] = cfg.sigma_override ? (*cfg.sigma_override)[r] : params[r].sigma;
      log_barrier_[r] = std::log(cfg.barriers[r]);
    }
  }

  PathResult run(bool keep_trajectory) {
    PathResult out;
    Regime regime = cfg_.i0;
    double z = std::log(cfg_.x0);
    double invested = 0.0;
    if (z < log_barrier_[regime]) {
      invested += cfg_.barriers[regime] - cfg_.x0;
      z = log_barrier_[regime];
    }
    const long steps = std::lround(cfg_.horizon / cfg_.dt);
    const long stride = std::max(1L, std::lround(cfg_.record_every / cfg_.dt));
    const double burn = cfg_.burn_in * cfg_.horizon;
    double next_switch = next_switch_after(0.0, regime);
    if (keep_trajectory) out.trajectory.push_back({0.0, std::exp(z), regime, invested});

    for (long s = 0; s < steps; ++s) {
      double now = s * cfg_.dt;
      const double end = (s + 1) * cfg_.dt;
      while (next_switch < end) {
        advance(z, invested, regime, next_switch - now);
        now = next_switch;
        regime = other(regime);
        if (z < log_barrier_[regime]) {
          invested += cfg_.barriers[regime] - std::exp(z);
          z = log_barrier_[regime];
        }
        next_switch = next_switch_after(now, regime);
      }
      advance(z, invested, regime, end - now);
      if ((s + 1) % stride != 0) continue;
      const double x = std::exp(z);
      if (keep_trajectory) out.trajectory.push_back({end, x, regime, invested});
      if (end <= burn) continue;
      out.samples[regime].push_back(x);
      out.sum[regime] += x;
      out.violation = std::max(out.violation, (cfg_.barriers[regime] - x) / cfg_.barriers[regime]);
    }
    return out;
  }

 private:
  double next_switch_after(double t, Regime r) {
    if (!cfg_.switching) return std::numeric_limits<double>::infinity();
    return t + std::exponential_distribution<double>(params_[r].p)(rng_);
  }

  void advance(double& z, double& invested, Regime r, double h) {
    if (!(h > 0.0)) return;
    const double s = sigma_[r];
    const double drift = -(params_.delta + 0.5 * s * s) * h;
    const double w = drift + s * std::sqrt(h) * normal_(rng_);
    const double b = log_barrier_[r];
    double push = 0.0;
    if (cfg_.scheme == ReflectionScheme::ExactIncrement) {
      // Minimum of the Brownian bridge from 0 to w over [0, h].
      const double u = 1.0 - uniform_(rng_);
      const double m = 0.5 * (w - std::sqrt(w * w - 2.0 * s * s * h * std::log(u)));
      push = std::max(0.0, b - z - m);
      z += w + push;
    } else {
      z += w;
      if (z < b) {
        push = b - z;
        z = b;
      }
    }
    // Pushes happen with capacity at the barrier.
    invested += cfg_.barriers[r] * push;
  }

  const ModelParams& params_;
  const SimConfig& cfg_;
  std::mt19937_64 rng_;
  std::normal_distribution<double> normal_;
  std::uniform_real_distribution<double> uniform_;
  PerRegime<double> sigma_, log_barrier_;
};

}  // namespace

void SimConfig::validate() const {
  if (!(dt > 0.0)) throw ConfigError("dt must be positive");
  if (!(horizon > 0.0)) throw ConfigError("horizon must be positive");
  if (!(burn_in >= 0.0 && burn_in < 1.0)) throw ConfigError("burn_in must lie in [0,1)");
  if (n_paths < 1) throw ConfigError("n_paths must be at least 1");
  if (!(x0 > 0.0)) throw ConfigError("x0 must be positive");
  if (!(record_every > 0.0)) throw ConfigError("record_every must be positive");
  if (!(barriers[Regime::one] > 0.0 && barriers[Regime::two] > 0.0)) {
    throw ConfigError("barriers must be positive");
  }
}

std::uint64_t path_seed(std::uint64_t seed, std::uint64_t path) {
  return splitmix64(splitmix64(seed) ^ splitmix64(path + 0x632be59bd9b4e019ULL));
}

double PathStats::empirical_cdf(double x) const {
  std::size_t below = 0;
  for (Regime r : kRegimes) {
    for (double s : samples[r]) below += s <= x;
  }
  return size() ? static_cast<double>(below) / size() : 0.0;
}

PathStats simulate(const ModelParams& params, const SimConfig& config) {
  config.validate();
  const int n = config.n_paths;
  std::vector<PathResult> results(n);
  const unsigned workers =
      std::max(1u, std::min<unsigned>(std::thread::hardware_concurrency(), n));
  auto work = [&](unsigned w) {
    for (int p = static_cast<int>(w); p < n; p += static_cast<int>(workers)) {
      PathEngine engine(params, config, path_seed(config.seed, p));
      results[p] = engine.run(p < config.trajectory_paths);
    }
  };
  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) pool.emplace_back(work, w);
    for (auto& t : pool) t.join();
  }

  // Merge in path order so the result does not depend on scheduling.
  PathStats stats;
  PerRegime<double> total{{0.0, 0.0}};
  const double lo = std::min(config.barriers[Regime::one], config.barriers[Regime::two]);
  const double hi = std::max(config.barriers[Regime::one], config.barriers[Regime::two]);
  double corridor_sum = 0.0, all_sum = 0.0;
  std::size_t corridor_count = 0;
  for (auto& r : results) {
    for (Regime g : kRegimes) {
      total[g] += r.sum[g];
      for (double x : r.samples[g]) {
        all_sum += x;
        if (x > lo && x < hi) {
          corridor_sum += x;
          ++corridor_count;
        }
      }
      stats.samples[g].insert(stats.samples[g].end(), r.samples[g].begin(), r.samples[g].end());
      stats.path_counts[g].push_back(r.samples[g].size());
    }
    const std::size_t m = r.samples[Regime::one].size() + r.samples[Regime::two].size();
    stats.path_means.push_back(m ? (r.sum[Regime::one] + r.sum[Regime::two]) / m : 0.0);
    stats.max_reflection_violation = std::max(stats.max_reflection_violation, r.violation);
    if (!r.trajectory.empty()) stats.trajectories.push_back(std::move(r.trajectory));
  }
  const double count = static_cast<double>(stats.size());
  for (Regime g : kRegimes) {
    const double ng = static_cast<double>(stats.samples[g].size());
    stats.conditional_mean[g] = ng > 0 ? total[g] / ng : 0.0;
    stats.occupation[g] = count > 0 ? ng / count : 0.0;
    // Batch means with one batch per path (ratio estimator).
    double var_mean = 0.0, var_occ = 0.0;
    if (n > 1 && ng > 0) {
      const double per_path = ng / n, per_path_all = count / n;
      for (const auto& r : results) {
        const double ni = static_cast<double>(r.samples[g].size());
        const double nall = static_cast<double>(r.samples[Regime::one].size() +
                                                r.samples[Regime::two].size());
        const double dm = (r.sum[g] - stats.conditional_mean[g] * ni) / per_path;
        const double dq = (ni - stats.occupation[g] * nall) / per_path_all;
        var_mean += dm * dm;
        var_occ += dq * dq;
      }
      var_mean /= (n - 1.0) * n;
      var_occ /= (n - 1.0) * n;
    }
    stats.mean_stderr[g] = std::sqrt(var_mean);
    stats.occupation_stderr[g] = std::sqrt(var_occ);
  }
  stats.corridor_probability = count > 0 ? corridor_count / count : 0.0;
  stats.corridor_share = all_sum > 0 ? corridor_sum / all_sum : 0.0;
  return stats;
}

CorridorStats corridor_stats(const StationaryLaw& law) {
  const double lo = std::min(law.a[Regime::one], law.a[Regime::two]);
  const double hi = std::max(law.a[Regime::one], law.a[Regime::two]);
  if (lo == hi) return {};
  CorridorStats out;
  out.probability = law.marginal_cdf(hi) - law.marginal_cdf(lo);
  out.share = (law.partial_mean(hi) - law.partial_mean(lo)) / law.moment(1);
  return out;
}

CorridorStats corridor_stats(const PathStats& stats) {
  return {stats.corridor_probability, stats.corridor_share};
}

double ks_distance(const StationaryLaw& law, const PathStats& stats) {
  std::vector<double> all;
  all.reserve(stats.size());
  for (Regime r : kRegimes) all.insert(all.end(), stats.samples[r].begin(), stats.samples[r].end());
  std::sort(all.begin(), all.end());
  const double n = static_cast<double>(all.size());
  double d = 0.0;
  for (std::size_t k = 0; k < all.size(); ++k) {
    const double F = law.marginal_cdf(all[k]);
    d = std::max({d, std::abs(F - (k + 1) / n), std::abs(F - k / n)});
  }
  return d;
}

}  // namespace mfe
