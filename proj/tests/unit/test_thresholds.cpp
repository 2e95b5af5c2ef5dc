#include <doctest.h>

#include <cmath>

#include "mfe/errors.hpp"
#include "mfe/thresholds.hpp"
#include "oracles.hpp"

using namespace mfe;

namespace {

const PerRegime<double> kEta{{10.2, 5.2}};

// Relative residual of the marginal-value equation of regime r at x.
double marginal_ode_residual(const ThresholdSolution& s, const ModelParams& m,
                             const PerRegime<double>& eta, Regime r, double x) {
  const auto dv = s.v_fn[r].derivative();
  const auto d2v = dv.derivative();
  const double s2 = m[r].sigma * m[r].sigma;
  const double v = s.v(x, r), vj = s.v(x, other(r));
  const double terms[] = {0.5 * s2 * x * x * d2v(x), (s2 - m.delta) * x * dv(x),
                          -(m.rho + m.delta) * v, m[r].p * (vj - v), eta[r], -2.0 * m.c * x};
  double sum = 0.0, scale = 0.0;
  for (double t : terms) {
    sum += t;
    scale += std::abs(t);
  }
  return std::abs(sum) / scale;
}

}  // namespace

TEST_CASE("single-regime thresholds match the independent closed form") {
  const ModelParams m = reference_params();
  for (Regime r : kRegimes) {
    for (double eta : {4.0, 7.5, 12.0}) {
      const double ref = oracle::single_regime_threshold_numeric(m[r].sigma, m.delta, m.rho,
                                                                 m.kappa, m.c, eta);
      CHECK(single_regime_threshold(m, r, eta) == doctest::Approx(ref).epsilon(1e-12));
    }
  }
}

TEST_CASE("identical regimes give the single-regime threshold in both regimes") {
  const ModelParams base = reference_params();
  ModelParams m = base;
  m.regime[Regime::two] = m.regime[Regime::one];
  const auto s = solve_thresholds(m, {{9.0, 9.0}});
  const double ref = oracle::single_regime_threshold_numeric(m[Regime::one].sigma, m.delta,
                                                             m.rho, m.kappa, m.c, 9.0);
  CHECK(s.a[Regime::one] == doctest::Approx(ref).epsilon(1e-9));
  CHECK(s.a[Regime::two] == doctest::Approx(ref).epsilon(1e-9));
}

TEST_CASE("smooth fit, marginal ODE and V' = v") {
  const ModelParams m = reference_params();
  const auto s = solve_thresholds(m, kEta);
  CHECK(s.residual < 1e-10);
  for (Regime r : kRegimes) {
    const double a = s.a[r];
    CHECK(std::abs(s.v(a, r) - m.kappa) < 1e-9 * m.kappa);
    CHECK(std::abs(s.v_fn[r].right_derivative(a)) * a < 1e-8 * m.kappa);
    CHECK(s.v(0.5 * a, r) == doctest::Approx(m.kappa));
    for (double f : {1.01, 1.3, 2.0, 5.0, 40.0}) {
      const double x = f * a;
      CHECK(marginal_ode_residual(s, m, kEta, r, x) < 1e-9);
      CHECK(s.v(x, r) <= m.kappa * (1.0 + 1e-12));
      const double h = 1e-5 * x;
      CHECK((s.V(x + h, r) - s.V(x - h, r)) / (2.0 * h) ==
            doctest::Approx(s.v(x, r)).epsilon(1e-6));
    }
  }
}

TEST_CASE("relabeling the regimes relabels the thresholds") {
  const ModelParams m = reference_params();
  const auto s = solve_thresholds(m, kEta);
  const auto t = solve_thresholds(m.relabeled(), kEta.swapped());
  CHECK(t.a[Regime::one] == doctest::Approx(s.a[Regime::two]).epsilon(1e-10));
  CHECK(t.a[Regime::two] == doctest::Approx(s.a[Regime::one]).epsilon(1e-10));
  CHECK(s.relabeled != t.relabeled);
  for (double x : {5.0, 20.0, 80.0}) {
    CHECK(t.V(x, Regime::one) == doctest::Approx(s.V(x, Regime::two)).epsilon(1e-9));
  }
}

TEST_CASE("thresholds agree with the finite-difference variational inequality") {
  const ModelParams m = reference_params();
  const auto s = solve_thresholds(m, kEta);
  const double lo = std::min(s.a[Regime::one], s.a[Regime::two]);
  const double hi = std::max(s.a[Regime::one], s.a[Regime::two]);
  const auto fd = oracle::hjb_free_boundaries(m, kEta, std::log(lo) - 1.0, std::log(hi) + 6.0, 2000);
  for (Regime r : kRegimes) {
    CHECK(std::abs(std::log(fd.a[r] / s.a[r])) <= fd.cell);
  }
}

TEST_CASE("inadmissible inputs are rejected before solving") {
  ModelParams m = reference_params();
  m.regime[Regime::one].sigma = 0.7;
  CHECK_THROWS_AS(solve_thresholds(m, kEta), ConfigError);
}
