#include "mfe/stationary.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "mfe/errors.hpp"

namespace mfe {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// (r^(1+e) - 1) / (1+e), with the logarithmic limit.
double power_gain(double r, double e) {
  const double k = 1.0 + e;
  if (std::abs(k) < kDegenerateExponent) return std::log(r);
  return std::expm1(k * std::log(r)) / k;
}

Regime to_canonical(const StationaryLaw& law, Regime r) {
  return law.relabeled ? other(r) : r;
}

}  // namespace

StationaryLaw solve_cdf_coeffs(const ModelParams& params, const PerRegime<double>& barriers) {
  if (!(barriers[Regime::one] > 0.0 && barriers[Regime::two] > 0.0)) {
    throw DomainError("barriers must be positive");
  }
  StationaryLaw law;
  law.a = barriers;
  law.relabeled = barriers[Regime::one] > barriers[Regime::two];
  const ModelParams q = law.relabeled ? params.relabeled() : params;
  const double a1 = std::min(barriers[Regime::one], barriers[Regime::two]);
  const double a2 = std::max(barriers[Regime::one], barriers[Regime::two]);
  law.b1 = std::log(a1);
  law.b2 = std::log(a2);
  law.alpha = alpha_roots(q, Regime::one);
  law.theta = theta_roots(q);
  law.pi = chain_stationary(params);
  law.canonical_pi = chain_stationary(q).pi;
  const double pi1 = law.canonical_pi[Regime::one], pi2 = law.canonical_pi[Regime::two];

  const Quadratic phi1 = stationary_quadratic(q, Regime::one);
  const double t1 = law.theta.r[0], t2 = law.theta.r[1];
  const double ap = law.alpha.hi, am = law.alpha.lo;
  law.phi11 = phi1(t1) / q[Regime::two].p;
  law.phi12 = phi1(t2) / q[Regime::two].p;

  // Unknowns (A1, B1, B2) with A2 = -A1 substituted.
  const double span = law.b2 - law.b1;
  const double ep = std::exp(ap * span), em = std::exp(am * span);
  Eigen::Matrix3d m;
  m << ep - em, -1.0, -1.0,
       ap * ep - am * em, -t1, -t2,
       0.0, law.phi11, law.phi12;
  const Eigen::Vector3d rhs(pi1, 0.0, pi2);
  const Eigen::Vector3d x = m.fullPivLu().solve(rhs);
  if (!x.allFinite() || (m * x - rhs).norm() > 1e-9) {
    throw SolverError("stationary coefficient system is singular");
  }
  law.A1 = x(0);
  law.A2 = -x(0);
  law.B1 = x(1);
  law.B2 = x(2);

  const double f11 = law.phi11, f12 = law.phi12;
  PerRegime<PiecewiseLogPower> cdf, surv;
  cdf[Regime::one] = PiecewiseLogPower(
      {{0.0, a1, LogPowerSum::constant(0.0, a1)},
       {a1, a2, LogPowerSum(a1, {{law.A1, ap, 0}, {law.A2, am, 0}})},
       {a2, kInf, LogPowerSum(a2, {{law.B1, t1, 0}, {law.B2, t2, 0}, {pi1, 0.0, 0}})}});
  cdf[Regime::two] = PiecewiseLogPower(
      {{0.0, a2, LogPowerSum::constant(0.0, a2)},
       {a2, kInf, LogPowerSum(a2, {{-law.B1 * f11, t1, 0}, {-law.B2 * f12, t2, 0}, {pi2, 0.0, 0}})}});
  surv[Regime::one] = PiecewiseLogPower(
      {{0.0, a1, LogPowerSum::constant(pi1, a1)},
       {a1, a2, LogPowerSum(a1, {{pi1, 0.0, 0}, {-law.A1, ap, 0}, {-law.A2, am, 0}})},
       {a2, kInf, LogPowerSum(a2, {{-law.B1, t1, 0}, {-law.B2, t2, 0}})}});
  surv[Regime::two] = PiecewiseLogPower(
      {{0.0, a2, LogPowerSum::constant(pi2, a2)},
       {a2, kInf, LogPowerSum(a2, {{law.B1 * f11, t1, 0}, {law.B2 * f12, t2, 0}})}});
  if (law.relabeled) {
    cdf = cdf.swapped();
    surv = surv.swapped();
  }
  law.cdf_fn = cdf;
  law.survival_fn = surv;
  law.pdf_fn = {{cdf[Regime::one].derivative(), cdf[Regime::two].derivative()}};
  return law;
}

double StationaryLaw::cdf(double x, Regime r) const { return cdf_fn[r](x); }
double StationaryLaw::pdf(double x, Regime r) const { return pdf_fn[r](x); }

double StationaryLaw::marginal_cdf(double x) const {
  return cdf_fn[Regime::one](x) + cdf_fn[Regime::two](x);
}

double StationaryLaw::marginal_pdf(double x) const {
  return pdf_fn[Regime::one](x) + pdf_fn[Regime::two](x);
}

double StationaryLaw::marginal_survival(double x) const {
  return survival_fn[Regime::one](x) + survival_fn[Regime::two](x);
}

double StationaryLaw::regime_moment(Regime r, int k) const {
  if (!(k + theta2() < 0.0)) {
    throw DivergentMomentError("heavy tail: moment of order " + std::to_string(k) + " diverges",
                               k, theta2());
  }
  return pdf_fn[r].times_power(k).integral(0.0, kInf);
}

double StationaryLaw::moment(int k) const {
  return regime_moment(Regime::one, k) + regime_moment(Regime::two, k);
}

double StationaryLaw::partial_mean(double x) const {
  if (!(x > 0.0)) return 0.0;
  return pdf_fn[Regime::one].times_power(1.0).integral(0.0, x) +
         pdf_fn[Regime::two].times_power(1.0).integral(0.0, x);
}

double StationaryLaw::conditional_mean(Regime r) const {
  const double t1 = theta.r[0], t2 = theta.r[1];
  if (!(1.0 + t2 < 0.0)) {
    throw DivergentMomentError("heavy tail: mean diverges", 1, t2);
  }
  const double a1 = std::exp(b1), a2 = std::exp(b2), ratio = a2 / a1;
  const double ap = alpha.hi, am = alpha.lo;
  if (to_canonical(*this, r) == Regime::one) {
    const double m = A1 * ap * a1 * power_gain(ratio, ap) + A2 * am * a1 * power_gain(ratio, am) -
                     B1 * t1 * a2 / (1.0 + t1) - B2 * t2 * a2 / (1.0 + t2);
    return m / canonical_pi[Regime::one];
  }
  const double m = (B1 * t1 * phi11 / (1.0 + t1) + B2 * t2 * phi12 / (1.0 + t2)) * a2;
  return m / canonical_pi[Regime::two];
}

double StationaryLaw::quantile(double q) const {
  if (!(q > 0.0 && q < 1.0)) throw DomainError("quantile level must lie in (0,1)");
  double lo = std::min(a[Regime::one], a[Regime::two]);
  const double top = std::max(a[Regime::one], a[Regime::two]);
  const double cap = 1e3 * top / std::pow(1.0 - q, 1.0 / std::abs(theta2()));
  double hi = top;
  while (marginal_cdf(hi) < q && hi < cap) hi = std::min(2.0 * hi, cap);
  if (marginal_cdf(hi) < q) return hi;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (marginal_cdf(mid) >= q) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

}  // namespace mfe
