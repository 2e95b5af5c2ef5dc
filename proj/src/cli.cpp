#include "mfe/cli.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "mfe/errors.hpp"
#include "mfe/metrics.hpp"
#include "mfe/parallel.hpp"

namespace mfe {

namespace {

using ordered_json = nlohmann::ordered_json;
namespace fs = std::filesystem;

struct Options {
  std::string command;
  std::string config;
  std::string out_dir = ".";
  std::uint64_t seed = 42;
  std::string param;
  double from = 0.0, to = 0.0;
  int points = 0;
  int paths = 100;
  double horizon = 1e3;
  double dt = 1e-2;
};

std::string num(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

class CsvWriter {
 public:
  CsvWriter(const fs::path& path, const std::vector<std::string>& header) : file_(path) {
    if (!file_) throw ConfigError("cannot write '" + path.string() + "'");
    row(header);
  }
  void row(const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) file_ << (i ? "," : "") << cells[i];
    file_ << "\n";
  }

 private:
  std::ofstream file_;
};

void write_json(const fs::path& path, const ordered_json& j) {
  std::ofstream file(path);
  if (!file) throw ConfigError("cannot write '" + path.string() + "'");
  file << j.dump(2) << "\n";
}

ordered_json pair_json(const PerRegime<double>& v) {
  return ordered_json::array({v[Regime::one], v[Regime::two]});
}

ordered_json params_json(const ModelParams& m) {
  ordered_json j;
  for (const char* key : {"delta", "rho", "kappa", "c", "alpha", "sigma1", "sigma2", "p1", "p2",
                          "varphi1", "varphi2", "zeta1", "zeta2"}) {
    j[key] = get_param(m, key);
  }
  return j;
}

ordered_json warnings_json(const ModelParams& m) {
  ordered_json j = ordered_json::array();
  for (const auto& issue : validate(m).issues) {
    j.push_back({{"code", issue.code}, {"message", issue.message}});
  }
  return j;
}

ModelParams load_checked(const Options& opt) {
  if (opt.config.empty()) throw ConfigError("--config is required for '" + opt.command + "'");
  ModelParams m = load_params(opt.config);
  require_admissible(m);
  return m;
}

std::vector<double> log_grid(double lo, double hi, int n) {
  std::vector<double> x(n);
  for (int k = 0; k < n; ++k) x[k] = lo * std::pow(hi / lo, static_cast<double>(k) / (n - 1));
  return x;
}

int run_solve(const Options& opt, std::ostream& out) {
  const ModelParams m = load_checked(opt);
  const Equilibrium eq = solve_equilibrium(m);
  ordered_json j;
  j["parameters"] = params_json(m);
  j["warnings"] = warnings_json(m);
  j["Q_star"] = pair_json(eq.Q_star);
  j["a_star"] = pair_json(eq.a_star);
  j["eta_star"] = pair_json(eq.eta_star);
  j["theta2"] = eq.law.theta2();
  j["residual"] = eq.residual;
  j["corner_gap"] = eq.run_gap;
  j["iterations"] = eq.iterations;
  j["damping"] = eq.damping;
  j["lower_threshold_regime"] = eq.thresholds.lower() == Regime::one ? 1 : 2;
  j["bounds"] = {{"a_low", pair_json(eq.bounds.a_low)},
                 {"a_high", pair_json(eq.bounds.a_high)},
                 {"Q_low", pair_json(eq.bounds.Q_low)},
                 {"Q_high", pair_json(eq.bounds.Q_high)}};
  j["k"] = pair_json(eq.thresholds.relabeled ? eq.thresholds.k.swapped() : eq.thresholds.k);
  write_json(fs::path(opt.out_dir) / "equilibrium.json", j);

  CsvWriter vf(fs::path(opt.out_dir) / "value_functions.csv", {"x", "v1", "v2", "V1", "V2"});
  const double lo = 0.5 * std::min(eq.a_star[Regime::one], eq.a_star[Regime::two]);
  const double hi = 20.0 * std::max(eq.a_star[Regime::one], eq.a_star[Regime::two]);
  for (double x : log_grid(lo, hi, 400)) {
    const auto& t = eq.thresholds;
    vf.row({num(x), num(t.v(x, Regime::one)), num(t.v(x, Regime::two)), num(t.V(x, Regime::one)),
            num(t.V(x, Regime::two))});
  }
  CsvWriter tr(fs::path(opt.out_dir) / "trace.csv",
               {"iteration", "Q1_from_low", "Q2_from_low", "Q1_from_high", "Q2_from_high",
                "residual_low", "residual_high"});
  for (const auto& r : eq.trace) {
    tr.row({std::to_string(r.iteration), num(r.Q_from_low[Regime::one]),
            num(r.Q_from_low[Regime::two]), num(r.Q_from_high[Regime::one]),
            num(r.Q_from_high[Regime::two]), num(r.residual_low), num(r.residual_high)});
  }
  out << "Q* = (" << num(eq.Q_star[Regime::one]) << ", " << num(eq.Q_star[Regime::two])
      << "), a* = (" << num(eq.a_star[Regime::one]) << ", " << num(eq.a_star[Regime::two])
      << "), residual " << num(eq.residual) << "\n";
  return kExitOk;
}

int run_simulate(const Options& opt, std::ostream& out) {
  const ModelParams m = load_checked(opt);
  const Equilibrium eq = solve_equilibrium(m);
  SimConfig cfg;
  cfg.dt = opt.dt;
  cfg.horizon = opt.horizon;
  cfg.n_paths = opt.paths;
  cfg.seed = opt.seed;
  cfg.barriers = eq.a_star;
  cfg.x0 = eq.Q_star[Regime::one];
  cfg.trajectory_paths = 1;
  const PathStats stats = simulate(m, cfg);
  const CorridorStats analytic = corridor_stats(eq.law);

  ordered_json j;
  j["seed"] = opt.seed;
  j["dt"] = cfg.dt;
  j["horizon"] = cfg.horizon;
  j["paths"] = cfg.n_paths;
  j["burn_in"] = cfg.burn_in;
  j["samples"] = stats.size();
  j["barriers"] = pair_json(cfg.barriers);
  j["conditional_mean"] = pair_json(stats.conditional_mean);
  j["conditional_mean_stderr"] = pair_json(stats.mean_stderr);
  j["conditional_mean_closed_form"] = pair_json(eq.Q_star);
  j["occupation"] = pair_json(stats.occupation);
  j["occupation_stderr"] = pair_json(stats.occupation_stderr);
  j["pi"] = pair_json(eq.law.pi.pi);
  j["corridor_probability"] = {{"empirical", stats.corridor_probability},
                               {"closed_form", analytic.probability}};
  j["corridor_share"] = {{"empirical", stats.corridor_share}, {"closed_form", analytic.share}};
  j["ks_distance"] = ks_distance(eq.law, stats);
  j["max_reflection_violation"] = stats.max_reflection_violation;
  write_json(fs::path(opt.out_dir) / "stats.json", j);

  CsvWriter tr(fs::path(opt.out_dir) / "trajectory.csv", {"t", "X", "regime", "I_cumulative"});
  if (!stats.trajectories.empty()) {
    for (const auto& p : stats.trajectories.front()) {
      tr.row({num(p.t), num(p.x), p.regime == Regime::one ? "1" : "2", num(p.investment)});
    }
  }
  out << "simulated " << stats.size() << " samples, conditional means ("
      << num(stats.conditional_mean[Regime::one]) << ", "
      << num(stats.conditional_mean[Regime::two]) << ")\n";
  return kExitOk;
}

void set_sweep_param(ModelParams& m, const std::string& name, double value) {
  if (name == "inv_p1" || name == "inv_p2") {
    if (!(value > 0.0)) throw ConfigError("inverse intensity must be positive");
    set_param(m, name == "inv_p1" ? "p1" : "p2", 1.0 / value);
  } else {
    set_param(m, name, value);
  }
}

struct SweepCell {
  std::string quantity;
  double value = 0.0;
  std::string status = "ok";
};

std::vector<SweepCell> sweep_point(const ModelParams& m) {
  static const std::vector<std::string> quantities{
      "a1", "a2", "Q1", "Q2", "eta1", "eta2", "theta2", "P_corridor", "chi_inf",
      "mean", "variance", "ratio", "gini_H"};
  std::vector<SweepCell> cells;
  auto fail_all = [&](const std::string& status) {
    cells.clear();
    for (const auto& q : quantities) cells.push_back({q, std::nan(""), status});
  };
  try {
    require_admissible(m);
    const Equilibrium eq = solve_equilibrium(m);
    const CorridorStats cs = corridor_stats(eq.law);
    const ConcentrationReport cr = concentration(eq.law, 2);
    cells = {{"a1", eq.a_star[Regime::one]},   {"a2", eq.a_star[Regime::two]},
             {"Q1", eq.Q_star[Regime::one]},   {"Q2", eq.Q_star[Regime::two]},
             {"eta1", eq.eta_star[Regime::one]}, {"eta2", eq.eta_star[Regime::two]},
             {"theta2", eq.law.theta2()},      {"P_corridor", cs.probability},
             {"chi_inf", cs.share},            {"mean", cr.mean}};
    if (cr.variance) {
      cells.push_back({"variance", *cr.variance});
      cells.push_back({"ratio", *cr.ratio});
    } else {
      cells.push_back({"variance", std::nan(""), "divergent"});
      cells.push_back({"ratio", std::nan(""), "divergent"});
    }
    cells.push_back({"gini_H", cr.gini_H});
  } catch (const ConfigError&) {
    fail_all("config_error");
  } catch (const DivergentMomentError&) {
    fail_all("divergent");
  } catch (const SolverError&) {
    fail_all("solver_error");
  } catch (const DomainError&) {
    fail_all("domain_error");
  }
  return cells;
}

int run_sweep(const Options& opt, std::ostream& out) {
  if (opt.config.empty()) throw ConfigError("--config is required for 'sweep'");
  const ModelParams base = load_params(opt.config);
  if (opt.param.empty() || opt.points < 1) {
    throw ConfigError("sweep needs --param NAME --from A --to B --points K (K >= 1)");
  }
  {
    ModelParams probe = base;
    set_sweep_param(probe, opt.param, opt.from);  // rejects unknown names early
  }
  std::vector<double> grid(opt.points);
  for (int k = 0; k < opt.points; ++k) {
    grid[k] = opt.points == 1 ? opt.from : opt.from + (opt.to - opt.from) * k / (opt.points - 1);
  }
  std::vector<std::vector<SweepCell>> results(grid.size());
  parallel_for(grid.size(), [&](std::size_t k) {
    ModelParams m = base;
    set_sweep_param(m, opt.param, grid[k]);
    results[k] = sweep_point(m);
  });
  CsvWriter csv(fs::path(opt.out_dir) / "sweep.csv", {"param", "value", "quantity", "result", "status"});
  int failed = 0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    for (const auto& c : results[k]) {
      csv.row({opt.param, num(grid[k]), c.quantity, std::isnan(c.value) ? "" : num(c.value), c.status});
    }
    failed += results[k].front().status != "ok";
  }
  out << "swept " << opt.param << " over " << grid.size() << " points, " << failed
      << " failed\n";
  return kExitOk;
}

ordered_json elasticity_json(const ElasticityReport& r) {
  return {{"v_star", r.v_star},
          {"chi_sigma1", r.chi_sigma1},
          {"chi_p1", r.chi_p1},
          {"chi_varphi1", r.chi_varphi1},
          {"step_stable", r.step_stable}};
}

int run_elasticities(const Options& opt, std::ostream& out) {
  const ModelParams m = load_checked(opt);
  // Evaluated at (nu2, nu2): regime two supplies the base point.
  const ModelParams sym = symmetric_params(m, m[Regime::two]);
  const ElasticityReport r = elasticities(sym);
  ordered_json j = elasticity_json(r);
  j["nu2"] = {{"sigma", sym[Regime::two].sigma},
              {"p", sym[Regime::two].p},
              {"varphi", sym[Regime::two].varphi},
              {"zeta", sym[Regime::two].zeta}};
  write_json(fs::path(opt.out_dir) / "elasticities.json", j);
  out << "chi_sigma1 = " << num(r.chi_sigma1) << ", chi_p1 = " << num(r.chi_p1)
      << ", chi_varphi1 = " << num(r.chi_varphi1) << "\n";
  return kExitOk;
}

int run_table1(const Options& opt, std::ostream& out) {
  CsvWriter csv(fs::path(opt.out_dir) / "table1.csv",
                {"sigma2", "varphi2", "v_star", "chi_sigma1", "chi_p1", "chi_varphi1", "step_stable"});
  for (const auto& row : table1()) {
    csv.row({num(row.sigma), num(row.varphi), num(row.report.v_star), num(row.report.chi_sigma1),
             num(row.report.chi_p1), num(row.report.chi_varphi1),
             row.report.step_stable ? "1" : "0"});
    out << row.sigma << " " << row.varphi << ": " << num(row.report.chi_sigma1) << " "
        << num(row.report.chi_varphi1) << "\n";
  }
  return kExitOk;
}

int run_dist(const Options& opt, std::ostream& out) {
  const ModelParams m = load_checked(opt);
  const Equilibrium eq = solve_equilibrium(m);
  const auto& law = eq.law;
  const double lo = 0.9 * std::min(law.a[Regime::one], law.a[Regime::two]);
  const double hi = 1e3 * std::max(law.a[Regime::one], law.a[Regime::two]);
  CsvWriter csv(fs::path(opt.out_dir) / "dist.csv", {"x", "cdf1", "cdf2", "pdf1", "pdf2"});
  for (double x : log_grid(lo, hi, 600)) {
    csv.row({num(x), num(law.cdf(x, Regime::one)), num(law.cdf(x, Regime::two)),
             num(law.pdf(x, Regime::one)), num(law.pdf(x, Regime::two))});
  }
  out << "theta2 = " << num(law.theta2()) << "\n";
  return kExitOk;
}

int run_gini(const Options& opt, std::ostream& out) {
  const ModelParams m = load_checked(opt);
  const Equilibrium eq = solve_equilibrium(m);
  const ConcentrationReport rep = concentration(eq.law, 201);
  CsvWriter csv(fs::path(opt.out_dir) / "gini.csv", {"q", "Qbar"});
  for (const auto& [q, v] : rep.curve) csv.row({num(q), num(v)});
  ordered_json j;
  j["mean"] = rep.mean;
  j["variance"] = rep.variance ? ordered_json(*rep.variance) : ordered_json(nullptr);
  j["ratio"] = rep.ratio ? ordered_json(*rep.ratio) : ordered_json(nullptr);
  j["gini_H"] = rep.gini_H;
  j["theta2"] = rep.theta2;
  write_json(fs::path(opt.out_dir) / "concentration.json", j);
  out << "H = " << num(rep.gini_H) << "\n";
  return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Stationary mean-field equilibrium of a regime-switching investment industry"};
  Options opt;
  app.add_option("command", opt.command, "solve|simulate|sweep|elasticities|table1|dist|gini")
      ->required()
      ->check(CLI::IsMember({"solve", "simulate", "sweep", "elasticities", "table1", "dist", "gini"}));
  app.add_option("--config", opt.config, "parameter file (key = value lines or JSON)");
  app.add_option("--out", opt.out_dir, "output directory");
  app.add_option("--seed", opt.seed, "simulation seed");
  app.add_option("--param", opt.param, "swept parameter (config key, inv_p1 or inv_p2)");
  app.add_option("--from", opt.from, "sweep start");
  app.add_option("--to", opt.to, "sweep end");
  app.add_option("--points", opt.points, "sweep grid size");
  app.add_option("--paths", opt.paths, "simulated paths");
  app.add_option("--horizon", opt.horizon, "simulated time per path");
  app.add_option("--dt", opt.dt, "simulation time step");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    std::ostringstream msg, dummy;
    const int code = app.exit(e, dummy, msg);
    if (code == 0) {
      out << dummy.str();
      return kExitOk;
    }
    err << msg.str();
    return kExitInput;
  }

  try {
    fs::create_directories(opt.out_dir);
    if (opt.command == "solve") return run_solve(opt, out);
    if (opt.command == "simulate") return run_simulate(opt, out);
    if (opt.command == "sweep") return run_sweep(opt, out);
    if (opt.command == "elasticities") return run_elasticities(opt, out);
    if (opt.command == "table1") return run_table1(opt, out);
    if (opt.command == "dist") return run_dist(opt, out);
    return run_gini(opt, out);
  } catch (const ConfigError& e) {
    err << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const DivergentMomentError& e) {
    err << "divergent moment (order " << e.order() << ", theta2 = " << e.theta2()
        << "): " << e.what() << "\n";
    return kExitDivergent;
  } catch (const SolverError& e) {
    err << "solver failure: " << e.what();
    if (e.best_residual() >= 0.0) err << " (best residual " << e.best_residual() << ")";
    err << "\n" << e.trace();
    return kExitSolver;
  } catch (const DomainError& e) {
    err << "input error: " << e.what() << "\n";
    return kExitInput;
  } catch (const fs::filesystem_error& e) {
    err << "input error: " << e.what() << "\n";
    return kExitInput;
  }
}

}  // namespace mfe
