#include "mfe/model.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <sstream>

#include <json.hpp>

#include "mfe/errors.hpp"

namespace mfe {

namespace {

const std::array<const char*, 13> kKeys{
    "delta", "rho",     "kappa",   "c",     "alpha", "sigma1", "sigma2",
    "p1",    "p2",      "varphi1", "varphi2", "zeta1", "zeta2"};

double* slot(ModelParams& m, const std::string& name) {
  if (name == "delta") return &m.delta;
  if (name == "rho") return &m.rho;
  if (name == "kappa") return &m.kappa;
  if (name == "c") return &m.c;
  if (name == "alpha") return &m.alpha;
  if (name == "sigma1") return &m.regime[Regime::one].sigma;
  if (name == "sigma2") return &m.regime[Regime::two].sigma;
  if (name == "p1") return &m.regime[Regime::one].p;
  if (name == "p2") return &m.regime[Regime::two].p;
  if (name == "varphi1") return &m.regime[Regime::one].varphi;
  if (name == "varphi2") return &m.regime[Regime::two].varphi;
  if (name == "zeta1") return &m.regime[Regime::one].zeta;
  if (name == "zeta2") return &m.regime[Regime::two].zeta;
  return nullptr;
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_number(const std::string& key, const std::string& raw) {
  std::string text = trim(raw);
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &used);
  } catch (const std::exception&) {
    throw ConfigError("value for '" + key + "' is not a number: '" + text + "'");
  }
  if (used != text.size() || !std::isfinite(value)) {
    throw ConfigError("value for '" + key + "' is not a number: '" + text + "'");
  }
  return value;
}

ModelParams from_map(const std::map<std::string, double>& values) {
  ModelParams m;
  for (const auto& [key, value] : values) {
    double* target = slot(m, key);
    if (target == nullptr) throw ConfigError("unknown parameter key '" + key + "'");
    *target = value;
  }
  for (const char* key : kKeys) {
    if (!values.contains(key)) {
      throw ConfigError(std::string("missing parameter key '") + key + "'");
    }
  }
  return m;
}

}  // namespace

bool ValidationReport::admissible() const noexcept {
  return std::none_of(issues.begin(), issues.end(), [](const ValidationIssue& i) {
    return i.severity == Severity::error;
  });
}

bool ValidationReport::has(const std::string& code) const noexcept {
  return std::any_of(issues.begin(), issues.end(),
                     [&](const ValidationIssue& i) { return i.code == code; });
}

std::string ValidationReport::summary() const {
  std::ostringstream out;
  for (const auto& issue : issues) {
    out << (issue.severity == Severity::error ? "error" : "warning") << " ["
        << issue.code << "]: " << issue.message << "\n";
  }
  return out.str();
}

ValidationReport validate(const ModelParams& m) {
  ValidationReport report;
  auto add = [&](std::string code, std::string msg, Severity sev = Severity::error) {
    report.issues.push_back({std::move(code), std::move(msg), sev});
  };
  auto positive = [&](const char* name, double v) {
    if (!(v > 0.0) || !std::isfinite(v)) add("positivity", std::string(name) + " must be > 0");
  };
  positive("delta", m.delta);
  positive("rho", m.rho);
  positive("kappa", m.kappa);
  positive("c", m.c);
  if (!(m.alpha > 0.0 && m.alpha < 1.0)) add("alpha_range", "alpha must lie in (0,1)");

  double max_var = 0.0;
  for (Regime r : kRegimes) {
    const auto& g = m[r];
    const std::string n = std::to_string(index(r) + 1);
    positive(("sigma" + n).c_str(), g.sigma);
    positive(("varphi" + n).c_str(), g.varphi);
    positive(("zeta" + n).c_str(), g.zeta);
    if (!(g.p > 0.0 && g.p < 1.0)) {
      add("intensity_range",
          "p" + n + " must lie in (0,1) (model-specific range for switching intensities)");
    }
    max_var = std::max(max_var, g.sigma * g.sigma);
  }

  if (!(m.rho > 2.0 * max_var)) {
    std::ostringstream msg;
    msg << "rho = " << m.rho << " is not strictly above 2*max(sigma_i^2) = "
        << 2.0 * max_var;
    if (std::abs(m.rho - 2.0 * max_var) <= 1e-12 * m.rho) msg << " (violated at the boundary)";
    add("impatience", msg.str(), Severity::warning);
  }
  if (!(m.rho + 2.0 * m.delta > max_var)) {
    add("growth", "rho + 2*delta must exceed max(sigma_i^2) for finite quadratic costs");
  }
  if (!(std::min(m[Regime::one].varphi, m[Regime::two].varphi) > m.rho + m.delta)) {
    add("price_level", "min(varphi1, varphi2) must exceed rho + delta");
  }
  return report;
}

void require_admissible(const ModelParams& params) {
  auto report = validate(params);
  if (!report.admissible()) throw ConfigError("inadmissible parameters:\n" + report.summary());
}

double inverse_demand(const ModelParams& params, double aggregate, Regime r) {
  if (!(aggregate > 0.0)) throw DomainError("aggregate production must be positive");
  return params[r].varphi + params[r].zeta * std::pow(aggregate, -params.alpha);
}

PerRegime<double> inverse_demand(const ModelParams& params,
                                 const PerRegime<double>& aggregate) {
  return {{inverse_demand(params, aggregate[Regime::one], Regime::one),
           inverse_demand(params, aggregate[Regime::two], Regime::two)}};
}

ChainLaw chain_stationary(const ModelParams& params) {
  const double p1 = params[Regime::one].p;
  const double p2 = params[Regime::two].p;
  return {{{p2 / (p1 + p2), p1 / (p1 + p2)}}};
}

ModelParams parse_params(const std::string& text) {
  std::map<std::string, double> values;
  const std::string body = trim(text);
  if (!body.empty() && body.front() == '{') {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(body);
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(std::string("malformed JSON parameters: ") + e.what());
    }
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (!it.value().is_number()) throw ConfigError("value for '" + it.key() + "' is not a number");
      values[it.key()] = it.value().get<double>();
    }
    return from_map(values);
  }

  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    auto sep = line.find_first_of("=:");
    std::string key, value;
    if (sep != std::string::npos) {
      key = trim(line.substr(0, sep));
      value = line.substr(sep + 1);
    } else {
      auto ws = line.find_first_of(" \t");
      if (ws == std::string::npos) {
        throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
      }
      key = trim(line.substr(0, ws));
      value = line.substr(ws);
    }
    if (values.contains(key)) throw ConfigError("duplicate parameter key '" + key + "'");
    values[key] = parse_number(key, value);
  }
  return from_map(values);
}

ModelParams load_params(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open parameter file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_params(buffer.str());
}

std::string format_params(const ModelParams& params) {
  std::ostringstream out;
  out << std::setprecision(17);
  ModelParams copy = params;
  for (const char* key : kKeys) out << key << " = " << *slot(copy, key) << "\n";
  return out.str();
}

ModelParams reference_params() {
  ModelParams m;
  m.delta = 0.1;
  m.rho = 0.08;
  m.kappa = 10.0;
  m.c = 0.1;
  m.alpha = 0.5;
  m.regime[Regime::one] = {0.2, 0.1, 10.0, 1.0};
  m.regime[Regime::two] = {0.15, 0.2, 5.0, 1.0};
  return m;
}

double get_param(const ModelParams& params, const std::string& name) {
  ModelParams copy = params;
  double* target = slot(copy, name);
  if (target == nullptr) throw ConfigError("unknown parameter '" + name + "'");
  return *target;
}

void set_param(ModelParams& params, const std::string& name, double value) {
  double* target = slot(params, name);
  if (target == nullptr) throw ConfigError("unknown parameter '" + name + "'");
  *target = value;
}

}  // namespace mfe
