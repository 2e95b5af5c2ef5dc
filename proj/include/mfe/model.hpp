#pragma once

#include <array>
#include <string>
#include <vector>

namespace mfe {

/// Macroeconomic regime of the two-state chain.
enum class Regime { one = 0, two = 1 };

constexpr int index(Regime r) noexcept { return static_cast<int>(r); }
constexpr Regime other(Regime r) noexcept {
  return r == Regime::one ? Regime::two : Regime::one;
}
constexpr std::array<Regime, 2> kRegimes{Regime::one, Regime::two};

/// A quantity carried once per regime.
template <class T>
struct PerRegime {
  std::array<T, 2> values{};

  constexpr T& operator[](Regime r) noexcept { return values[index(r)]; }
  constexpr const T& operator[](Regime r) const noexcept {
    return values[index(r)];
  }
  constexpr PerRegime swapped() const { return {{values[1], values[0]}}; }
  friend constexpr bool operator==(const PerRegime&, const PerRegime&) = default;
};

struct RegimeParams {
  double sigma = 0.0;   // production volatility
  double p = 0.0;       // intensity of leaving this regime
  double varphi = 0.0;  // price level
  double zeta = 0.0;    // inverse-demand scale

  friend bool operator==(const RegimeParams&, const RegimeParams&) = default;
};

/// Exogenous constants of the industry model.
struct ModelParams {
  double delta = 0.0;  // depreciation rate
  double rho = 0.0;    // discount rate
  double kappa = 0.0;  // marginal investment cost
  double c = 0.0;      // quadratic running-cost coefficient
  double alpha = 0.0;  // inverse-demand elasticity exponent
  PerRegime<RegimeParams> regime;

  const RegimeParams& operator[](Regime r) const noexcept { return regime[r]; }

  /// Same model with the two regime labels exchanged.
  ModelParams relabeled() const {
    ModelParams out = *this;
    out.regime = regime.swapped();
    return out;
  }

  friend bool operator==(const ModelParams&, const ModelParams&) = default;
};

/// Stationary law of the regime chain.
struct ChainLaw {
  PerRegime<double> pi;
};

enum class Severity { warning, error };

struct ValidationIssue {
  std::string code;
  std::string message;
  Severity severity = Severity::error;
};

struct ValidationReport {
  std::vector<ValidationIssue> issues;

  bool admissible() const noexcept;
  bool has(const std::string& code) const noexcept;
  std::string summary() const;
};

/// Checks every admissibility constraint. Never throws.
ValidationReport validate(const ModelParams& params);

/// Throws ConfigError listing the errors if `params` is not admissible.
void require_admissible(const ModelParams& params);

/// Regime price varphi_i + zeta_i * Q^(-alpha). Throws DomainError if Q <= 0.
double inverse_demand(const ModelParams& params, double aggregate, Regime r);
PerRegime<double> inverse_demand(const ModelParams& params,
                                 const PerRegime<double>& aggregate);

ChainLaw chain_stationary(const ModelParams& params);

/// Parses either a flat `key = value` listing or a JSON object. The thirteen
/// keys delta, rho, kappa, c, alpha, sigma1, sigma2, p1, p2, varphi1,
/// varphi2, zeta1, zeta2 are all required.
ModelParams parse_params(const std::string& text);
ModelParams load_params(const std::string& path);

/// Flat key-value listing accepted by parse_params.
std::string format_params(const ModelParams& params);

/// Parameter set used for the dynamics figures (two regimes, phi = 10 / 5).
ModelParams reference_params();

/// Reads or writes one named scalar (config key names). Throws ConfigError
/// on an unknown name.
double get_param(const ModelParams& params, const std::string& name);
void set_param(ModelParams& params, const std::string& name, double value);

}  // namespace mfe
