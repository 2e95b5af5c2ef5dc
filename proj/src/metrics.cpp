#include "mfe/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mfe/errors.hpp"
#include "mfe/parallel.hpp"

namespace mfe {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

ConcentrationReport concentration(const StationaryLaw& law, int curve_points) {
  ConcentrationReport rep;
  rep.theta2 = law.theta2();
  rep.mean = law.moment(1);
  if (2.0 + law.theta2() < 0.0) {
    rep.variance = std::max(0.0, law.moment(2) - rep.mean * rep.mean);
    rep.ratio = *rep.variance / (rep.mean * rep.mean);
  }

  // int Qbar dq = int PM(x) f(x) dx / E[X], PM the partial mean.
  const double floor = std::min(law.a[Regime::one], law.a[Regime::two]);
  double lorenz_area = 0.0;
  for (Regime i : kRegimes) {
    const PiecewiseLogPower partial = law.pdf_fn[i].times_power(1.0).antiderivative(floor, 0.0);
    for (Regime j : kRegimes) lorenz_area += integral_of_product(partial, law.pdf_fn[j], 0.0, kInf);
  }
  rep.gini_H = std::clamp(0.5 - lorenz_area / rep.mean, 0.0, 0.5);

  rep.curve.emplace_back(0.0, 0.0);
  for (int k = 1; k < curve_points - 1; ++k) {
    const double q = static_cast<double>(k) / (curve_points - 1);
    rep.curve.emplace_back(q, law.partial_mean(law.quantile(q)) / rep.mean);
  }
  rep.curve.emplace_back(1.0, 1.0);
  return rep;
}

double sample_gini(std::vector<double> population) {
  if (population.empty()) return 0.0;
  std::sort(population.begin(), population.end());
  const double n = static_cast<double>(population.size());
  double total = 0.0;
  for (double x : population) total += x;
  // Trapezoid area under the empirical Lorenz curve.
  double cum = 0.0, area = 0.0;
  for (double x : population) {
    const double prev = cum;
    cum += x / total;
    area += 0.5 * (prev + cum) / n;
  }
  return 0.5 - area;
}

SampleGini sample_gini(const PathStats& stats, int groups) {
  std::vector<double> all;
  all.reserve(stats.size());
  for (Regime r : kRegimes) all.insert(all.end(), stats.samples[r].begin(), stats.samples[r].end());
  SampleGini out;
  out.H = sample_gini(all);

  const std::size_t paths = stats.path_counts[Regime::one].size();
  groups = static_cast<int>(std::min<std::size_t>(groups, paths));
  if (groups < 2) return out;
  std::vector<double> estimates;
  PerRegime<std::size_t> offset{{0, 0}};
  for (int g = 0; g < groups; ++g) {
    const std::size_t first = paths * g / groups, last = paths * (g + 1) / groups;
    std::vector<double> batch;
    for (Regime r : kRegimes) {
      std::size_t count = 0;
      for (std::size_t p = first; p < last; ++p) count += stats.path_counts[r][p];
      batch.insert(batch.end(), stats.samples[r].begin() + offset[r],
                   stats.samples[r].begin() + offset[r] + count);
      offset[r] += count;
    }
    estimates.push_back(sample_gini(std::move(batch)));
  }
  double mean = 0.0;
  for (double e : estimates) mean += e / groups;
  double var = 0.0;
  for (double e : estimates) var += (e - mean) * (e - mean);
  var /= (groups - 1.0);
  out.stderr_H = std::sqrt(var / groups);
  return out;
}

double v_star(const ThresholdSolution& thresholds, const StationaryLaw& law) {
  if (!(2.0 + law.theta2() < 0.0)) {
    throw DivergentMomentError("firm value integral diverges: value grows quadratically", 2,
                               law.theta2());
  }
  double total = 0.0;
  for (Regime r : kRegimes) {
    total += integral_of_product(thresholds.V_fn[r], law.pdf_fn[r], 0.0, kInf);
  }
  return total;
}

double v_star(const ModelParams& params) {
  const Equilibrium eq = solve_equilibrium(params);
  return v_star(eq.thresholds, eq.law);
}

ModelParams symmetric_params(const ModelParams& common, const RegimeParams& nu) {
  ModelParams m = common;
  m.regime = {{nu, nu}};
  return m;
}

ElasticityReport elasticities(const ModelParams& sym, double h) {
  if (!(sym[Regime::one] == sym[Regime::two])) {
    throw ConfigError("elasticities are evaluated at a point with identical regimes");
  }
  ElasticityReport rep;
  rep.v_star = v_star(sym);

  // Coordinates: sigma1, p1, varphi1; each at steps h and h/2, up and down.
  const std::array<const char*, 3> names{"sigma1", "p1", "varphi1"};
  const std::array<double, 3> sign{-1.0, -1.0, 1.0};
  std::array<double, 12> values{};
  parallel_for(values.size(), [&](std::size_t idx) {
    const std::size_t coord = idx / 4;
    const double step = (idx % 4 < 2) ? h : 0.5 * h;
    const double dir = (idx % 2 == 0) ? 1.0 : -1.0;
    ModelParams m = sym;
    const double nominal = get_param(sym, names[coord]);
    set_param(m, names[coord], nominal * (1.0 + dir * step));
    values[idx] = v_star(m);
  });
  std::array<double*, 3> out{&rep.chi_sigma1, &rep.chi_p1, &rep.chi_varphi1};
  for (std::size_t coord = 0; coord < 3; ++coord) {
    const double nominal = get_param(sym, names[coord]);
    const double d_coarse = (values[4 * coord] - values[4 * coord + 1]) / (2.0 * h * nominal);
    const double d_fine = (values[4 * coord + 2] - values[4 * coord + 3]) / (h * nominal);
    const double d = (4.0 * d_fine - d_coarse) / 3.0;
    const double scale = sign[coord] * nominal / rep.v_star;
    *out[coord] = scale * d;
    rep.coarse[coord] = scale * d_coarse;
    const double change = std::abs(d_fine - d_coarse);
    if (change > 0.1 * std::abs(d_fine) && std::abs(scale * change) > 1e-6) rep.step_stable = false;
  }
  return rep;
}

ModelParams table1_base() {
  ModelParams m;
  m.delta = 0.1;
  m.rho = 0.08;
  m.kappa = 10.0;
  m.c = 0.1;
  m.alpha = 0.5;
  const RegimeParams nu{0.2, 0.1, 10.0, 1.0};
  m.regime = {{nu, nu}};
  return m;
}

std::vector<Table1Row> table1() {
  std::vector<Table1Row> rows;
  for (double sigma : {0.1, 0.2, 0.3}) {
    for (double varphi : {10.0, 15.0}) {
      const ModelParams sym = symmetric_params(table1_base(), {sigma, 0.1, varphi, 1.0});
      rows.push_back({sigma, varphi, elasticities(sym)});
    }
  }
  return rows;
}

}  // namespace mfe
