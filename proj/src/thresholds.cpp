#include "mfe/thresholds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

#include <Eigen/Dense>

#include "mfe/errors.hpp"

namespace mfe {

namespace {

constexpr Regime kFirst = Regime::one;
constexpr Regime kSecond = Regime::two;

PerRegime<double> solve2(double a11, double a12, double a21, double a22, double b1, double b2) {
  Eigen::Matrix2d m;
  m << a11, a12, a21, a22;
  const Eigen::Vector2d x = m.partialPivLu().solve(Eigen::Vector2d(b1, b2));
  if (!x.allFinite()) throw SolverError("singular 2x2 system in particular solution");
  return {{x(0), x(1)}};
}

struct Attempt {
  std::optional<ThresholdSolution> solution;
  double best_residual = std::numeric_limits<double>::infinity();
  std::string trace;
};

struct NewtonResult {
  double u1 = 0, u2 = 0, residual = 0;
  int iterations = 0;
  bool converged = false;
};

NewtonResult newton(const CoefficientLadder& ladder, const QuadraticRoots& gamma, double kappa,
                    double u1, double u2, const ThresholdOptions& opt) {
  NewtonResult out{u1, u2, std::numeric_limits<double>::infinity(), 0, false};
  auto merit = [](const LadderResidual& r) { return std::max(std::abs(r.value[0]), std::abs(r.value[1])); };
  LadderResidual r = ladder_residual(ladder, gamma, kappa, u1, u2);
  double m = merit(r);
  for (int it = 0; it < opt.max_newton; ++it) {
    out.iterations = it;
    if (!std::isfinite(m)) return out;
    if (m < opt.tolerance) break;
    const auto& J = r.jacobian;
    const double det = J[0][0] * J[1][1] - J[0][1] * J[1][0];
    if (det == 0.0 || !std::isfinite(det)) break;
    double s1 = -(J[1][1] * r.value[0] - J[0][1] * r.value[1]) / det;
    double s2 = -(-J[1][0] * r.value[0] + J[0][0] * r.value[1]) / det;
    const double big = std::max(std::abs(s1), std::abs(s2));
    if (big > opt.max_log_step) {
      s1 *= opt.max_log_step / big;
      s2 *= opt.max_log_step / big;
    }
    double lambda = 1.0;
    bool moved = false;
    for (int half = 0; half < 40; ++half) {
      const LadderResidual trial = ladder_residual(ladder, gamma, kappa, u1 + lambda * s1, u2 + lambda * s2);
      const double mt = merit(trial);
      if (std::isfinite(mt) && mt < m) {
        u1 += lambda * s1;
        u2 += lambda * s2;
        r = trial;
        m = mt;
        moved = true;
        break;
      }
      lambda *= 0.5;
    }
    if (!moved) break;
  }
  out.u1 = u1;
  out.u2 = u2;
  out.residual = m;
  out.converged = m < opt.accept;
  return out;
}

PiecewiseLogPower first_value(const ThresholdSolution& s, double a1, double a2) {
  const double kappa = s.canonical.kappa;
  const auto& g = s.gamma;
  const auto& l = s.lambda.r;
  const auto& pc = s.pc;
  return PiecewiseLogPower(
      {{0.0, a1, LogPowerSum::constant(kappa, a1)},
       {a1, a2,
        LogPowerSum(a1, {{s.A, g.hi, 0}, {s.B, g.lo, 0}, {pc.C1 * a1, 1.0, 0}, {pc.D1, 0.0, 0}})},
       {a2, std::numeric_limits<double>::infinity(),
        LogPowerSum(a2, {{s.M1, l[0], 0},
                         {s.M2, l[1], 0},
                         {pc.L[kFirst] * a2, 1.0, 0},
                         {pc.R[kFirst], 0.0, 0}})}});
}

PiecewiseLogPower second_value(const ThresholdSolution& s, double a2) {
  const double kappa = s.canonical.kappa;
  const auto& l = s.lambda.r;
  const auto& pc = s.pc;
  return PiecewiseLogPower(
      {{0.0, a2, LogPowerSum::constant(kappa, a2)},
       {a2, std::numeric_limits<double>::infinity(),
        LogPowerSum(a2, {{-s.M1 * pc.G11, l[0], 0},
                         {-s.M2 * pc.G12, l[1], 0},
                         {pc.L[kSecond] * a2, 1.0, 0},
                         {pc.R[kSecond], 0.0, 0}})}});
}

// Checks the variational inequality of the stopping problem on a grid: v <= kappa where
// continuing, and a nonnegative generator where stopped.
bool admissible_solution(const ModelParams& q, const PerRegime<double>& eta, double a1, double a2,
                         const PiecewiseLogPower& v1, const PiecewiseLogPower& v2) {
  const double kappa = q.kappa;
  const double tol = 1e-9 * (kappa + std::abs(eta[kFirst]) + std::abs(eta[kSecond]));
  const double cost = (q.rho + q.delta) * kappa;
  if (eta[kFirst] - 2.0 * q.c * a1 - cost < -tol) return false;
  constexpr int n = 400;
  for (int j = 0; j <= n; ++j) {
    const double x1 = a1 * std::exp(j * std::log(1e3) / n);
    const double x2 = a2 * std::exp(j * std::log(1e3) / n);
    if (v1(x1) > kappa + tol || v2(x2) > kappa + tol) return false;
  }
  if (a2 > a1) {
    for (int j = 0; j <= 100; ++j) {
      const double x = a1 + (a2 - a1) * j / 100.0;
      const double gen = q[kSecond].p * (v1(x) - kappa) - cost + eta[kSecond] - 2.0 * q.c * x;
      if (gen < -tol) return false;
    }
  } else if (eta[kSecond] - 2.0 * q.c * a2 - cost < -tol) {
    return false;
  }
  return true;
}

Attempt solve_ordered(const ModelParams& q, const PerRegime<double>& eta,
                      const ThresholdOptions& opt) {
  Attempt attempt;
  ThresholdSolution s;
  s.canonical = q;
  s.canonical_eta = eta;
  s.gamma = gamma_roots(q, kFirst);
  s.lambda = lambda_roots(q);
  s.pc = particular_coeffs(q, eta);
  s.ladder = coefficient_ladder(q, s.pc, s.gamma, s.lambda);

  std::vector<std::pair<double, double>> starts;
  const double w1 = single_regime_threshold(q, kFirst, eta[kFirst]);
  const double w2 = single_regime_threshold(q, kSecond, eta[kSecond]);
  if (w1 > 0.0 && w2 > 0.0) {
    starts.emplace_back(std::min(w1, w2), std::max(w1, w2));
    starts.emplace_back(w1, w2);
  }
  const double lo = 0.5 * std::min(std::abs(w1), std::abs(w2));
  const double hi = 2.0 * std::max(std::abs(w1), std::abs(w2));
  const int g = opt.fallback_grid;
  for (int i = 0; i < g; ++i) {
    for (int j = i; j < g; ++j) {
      const double x = lo * std::pow(hi / lo, (i + 0.5) / g);
      const double y = lo * std::pow(hi / lo, (j + 0.5) / g);
      starts.emplace_back(x, y);
    }
  }

  std::ostringstream trace;
  trace.precision(6);
  for (const auto& [x0, y0] : starts) {
    if (!(x0 > 0.0 && y0 > 0.0)) continue;
    const NewtonResult nr = newton(s.ladder, s.gamma, q.kappa, std::log(x0), std::log(y0), opt);
    trace << "start (" << x0 << ", " << y0 << ") -> (" << std::exp(nr.u1) << ", "
          << std::exp(nr.u2) << ") residual " << nr.residual << "\n";
    attempt.best_residual = std::min(attempt.best_residual, nr.residual);
    if (!nr.converged) continue;
    const double a1 = std::exp(nr.u1);
    double a2 = std::exp(nr.u2);
    if (!(a1 <= a2 * (1.0 + 1e-12))) continue;
    a2 = std::max(a1, a2);

    ThresholdSolution cand = s;
    const auto& L = cand.ladder;
    // Same value as c11 + c12 a1 at the root, without its cancellation.
    cand.A = std::exp(-cand.gamma.hi * std::log(a2 / a1)) * (L.f11 + L.f12 * a2);
    cand.B = L.c21 + L.c22 * a1;
    cand.M1 = L.d11 + L.d12 * a2;
    cand.M2 = L.d21 + L.d22 * a2;
    cand.residual = nr.residual;
    cand.iterations = nr.iterations;
    const PiecewiseLogPower v1 = first_value(cand, a1, a2);
    const PiecewiseLogPower v2 = second_value(cand, a2);
    if (!admissible_solution(q, eta, a1, a2, v1, v2)) continue;
    cand.k = solve_k(q, eta, a1, a2, v1);
    cand.a = {{a1, a2}};
    cand.v_fn = {{v1, v2}};
    cand.V_fn = {{v1.antiderivative(a1, cand.k[kFirst]), v2.antiderivative(a2, cand.k[kSecond])}};
    attempt.solution = std::move(cand);
    break;
  }
  attempt.trace = trace.str();
  return attempt;
}

}  // namespace

ParticularCoeffs particular_coeffs(const ModelParams& params, const PerRegime<double>& eta) {
  const auto& r1 = params[kFirst];
  const auto& r2 = params[kSecond];
  const double s1 = r1.sigma * r1.sigma, s2 = r2.sigma * r2.sigma;
  const double base = params.rho + params.delta;
  ParticularCoeffs pc;
  pc.C1 = -2.0 * params.c / (params.rho + 2.0 * params.delta + r1.p - s1);
  pc.D1 = (eta[kFirst] + r1.p * params.kappa) / (base + r1.p);
  pc.L = solve2(params.rho + 2.0 * params.delta + r1.p - s1, -r1.p, -r2.p,
                params.rho + 2.0 * params.delta + r2.p - s2, -2.0 * params.c, -2.0 * params.c);
  pc.R = solve2(base + r1.p, -r1.p, -r2.p, base + r2.p, eta[kFirst], eta[kSecond]);
  const Quadratic G1 = stopping_quadratic(params, kFirst);
  const QuarticRoots lam = lambda_roots(params);
  pc.G11 = G1(lam.r[0]) / r1.p;
  pc.G12 = G1(lam.r[1]) / r1.p;
  return pc;
}

CoefficientLadder coefficient_ladder(const ModelParams& params, const ParticularCoeffs& pc,
                                     const QuadraticRoots& gamma, const QuarticRoots& lambda) {
  const double kappa = params.kappa;
  const double gm = gamma.lo, gp = gamma.hi;
  const double l1 = lambda.r[0], l2 = lambda.r[1];
  const double L1 = pc.L[kFirst], L2 = pc.L[kSecond];
  const double R1 = pc.R[kFirst], R2 = pc.R[kSecond];
  CoefficientLadder c;
  c.c11 = (kappa - pc.D1) * gm / (gm - gp);
  c.c12 = pc.C1 * (1.0 - gm) / (gm - gp);
  c.c21 = -(kappa - pc.D1) * gp / (gm - gp);
  c.c22 = -pc.C1 * (1.0 - gp) / (gm - gp);

  c.d11 = -(kappa - R2) * l2 / (pc.G11 * (l2 - l1));
  c.d12 = -L2 * (1.0 - l2) / (pc.G11 * (l2 - l1));
  c.d21 = (kappa - R2) * l1 / (pc.G12 * (l2 - l1));
  c.d22 = L2 * (1.0 - l1) / (pc.G12 * (l2 - l1));

  c.e11 = c.d11 + c.d21 + R1 - pc.D1;
  c.e12 = c.d12 + c.d22 + L1 - pc.C1;
  c.e21 = c.d11 * l1 + c.d21 * l2;
  c.e22 = c.d12 * l1 + c.d22 * l2 + L1 - pc.C1;

  c.f11 = (c.e21 - gm * c.e11) / (gp - gm);
  c.f12 = (c.e22 - gm * c.e12) / (gp - gm);
  c.f21 = (c.e11 * gp - c.e21) / (gp - gm);
  c.f22 = (c.e12 * gp - c.e22) / (gp - gm);
  return c;
}

LadderResidual ladder_residual(const CoefficientLadder& L, const QuadraticRoots& gamma,
                               double kappa, double u1, double u2) {
  const double a1 = std::exp(u1), a2 = std::exp(u2), t = u2 - u1;
  const double gp = gamma.hi, gm = gamma.lo;
  // The first equation is divided by exp(gamma+ t): for small volatility that factor
  // overflows and the equation degenerates to A = 0, which this form keeps exact.
  const double ep = std::exp(-gp * t), em = std::exp(gm * t);
  const double A = L.c11 + L.c12 * a1, B = L.c21 + L.c22 * a1;
  const double F1 = L.f11 + L.f12 * a2, F2 = L.f21 + L.f22 * a2;
  LadderResidual r;
  r.scale = {std::abs(L.c11) + std::abs(L.c12 * a1) + ep * (std::abs(L.f11) + std::abs(L.f12 * a2)),
             std::abs(em * B) + std::abs(F2) + kappa};
  r.value = {(A - ep * F1) / r.scale[0], (em * B - F2) / r.scale[1]};
  r.jacobian[0] = {(L.c12 * a1 - gp * ep * F1) / r.scale[0],
                   ep * (gp * F1 - L.f12 * a2) / r.scale[0]};
  r.jacobian[1] = {(em * (-gm * B + L.c22 * a1)) / r.scale[1],
                   (gm * em * B - L.f22 * a2) / r.scale[1]};
  return r;
}

double single_regime_threshold(const ModelParams& params, Regime r, double eta) {
  const double s2 = params[r].sigma * params[r].sigma;
  const Quadratic q{0.5 * s2, 0.5 * s2 - params.delta, -(params.rho + params.delta)};
  const double gm = opposite_sign_roots(q).lo;
  const double C = -2.0 * params.c / (params.rho + 2.0 * params.delta - s2);
  const double D = eta / (params.rho + params.delta);
  return (params.kappa - D) / (C * (1.0 - 1.0 / gm));
}

PerRegime<double> solve_k(const ModelParams& q, const PerRegime<double>& eta, double a1,
                          double a2, const PiecewiseLogPower& v_first) {
  const double p1 = q[kFirst].p, p2 = q[kSecond].p;
  const double kd = q.delta * q.kappa;
  const double r1 = (eta[kFirst] - kd) * a1 - q.c * a1 * a1 - p1 * q.kappa * (a2 - a1);
  const double r2 = (eta[kSecond] - kd) * a2 - q.c * a2 * a2 + p2 * v_first.integral(a1, a2);
  return solve2(-(q.rho + p1), p1, p2, -(q.rho + p2), -r1, -r2);
}

double ThresholdSolution::v(double x, Regime r) const { return v_fn[r](x); }
double ThresholdSolution::V(double x, Regime r) const { return V_fn[r](x); }

ThresholdSolution solve_thresholds(const ModelParams& params, const PerRegime<double>& eta,
                                   const ThresholdOptions& options) {
  if (!(eta[Regime::one] > 0.0 && eta[Regime::two] > 0.0)) {
    throw DomainError("prices must be positive");
  }
  require_admissible(params);
  Attempt direct = solve_ordered(params, eta, options);
  if (direct.solution) {
    direct.solution->relabeled = false;
    return std::move(*direct.solution);
  }
  Attempt swapped = solve_ordered(params.relabeled(), eta.swapped(), options);
  if (swapped.solution) {
    ThresholdSolution s = std::move(*swapped.solution);
    s.relabeled = true;
    s.a = s.a.swapped();
    s.v_fn = s.v_fn.swapped();
    s.V_fn = s.V_fn.swapped();
    return s;
  }
  throw SolverError("threshold system did not converge in either ordering",
                    std::min(direct.best_residual, swapped.best_residual),
                    "first ordering:\n" + direct.trace + "relabeled:\n" + swapped.trace);
}

}  // namespace mfe
