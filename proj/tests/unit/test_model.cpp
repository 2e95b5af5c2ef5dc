#include <doctest.h>

#include <cmath>

#include "mfe/errors.hpp"
#include "mfe/model.hpp"

using namespace mfe;

namespace {

const char* kFlat = R"(# comment line
delta = 0.1
rho = 0.08
kappa = 10
c = 0.1
alpha = 0.5
sigma1 = 0.2
sigma2 = 0.15
p1 = 0.1
p2 = 0.2
varphi1 = 10
varphi2 = 5
zeta1 = 1
zeta2 = 1
)";

}  // namespace

TEST_CASE("flat and JSON inputs parse to the same parameters") {
  const ModelParams flat = parse_params(kFlat);
  CHECK(flat == reference_params());
  const ModelParams json = parse_params(R"({"delta":0.1,"rho":0.08,"kappa":10,"c":0.1,
    "alpha":0.5,"sigma1":0.2,"sigma2":0.15,"p1":0.1,"p2":0.2,"varphi1":10,"varphi2":5,
    "zeta1":1,"zeta2":1})");
  CHECK(json == flat);
  CHECK(parse_params(format_params(flat)) == flat);
}

TEST_CASE("malformed inputs are rejected") {
  std::string missing = kFlat;
  missing.replace(missing.find("zeta2 = 1"), 9, "");
  CHECK_THROWS_AS(parse_params(missing), ConfigError);
  CHECK_THROWS_AS(parse_params(std::string(kFlat) + "gamma = 3\n"), ConfigError);
  std::string bad = kFlat;
  bad.replace(bad.find("kappa = 10"), 10, "kappa = ten");
  CHECK_THROWS_AS(parse_params(bad), ConfigError);
  CHECK_THROWS_AS(parse_params("{ not json"), ConfigError);
  ModelParams target;
  CHECK_THROWS_AS(set_param(target, "nope", 1.0), ConfigError);
}

TEST_CASE("validation reports every violated constraint") {
  ModelParams m = reference_params();
  CHECK(validate(m).admissible());
  CHECK(validate(m).has("impatience"));  // 0.08 = 2 * 0.2^2 sits on the boundary
  CHECK(validate(m).summary().find("boundary") != std::string::npos);

  m.regime[Regime::one].sigma = 0.5;  // 0.25 < rho + 2 delta = 0.28
  CHECK(validate(m).admissible());
  m.regime[Regime::one].sigma = 0.6;
  CHECK(validate(m).has("growth"));
  CHECK_THROWS_AS(require_admissible(m), ConfigError);

  m = reference_params();
  m.regime[Regime::two].p = 1.2;
  CHECK(validate(m).has("intensity_range"));
  m = reference_params();
  m.regime[Regime::two].varphi = 0.1;
  CHECK(validate(m).has("price_level"));
  m = reference_params();
  m.alpha = 1.0;
  m.c = -1.0;
  const auto report = validate(m);
  CHECK(report.has("alpha_range"));
  CHECK(report.has("positivity"));
}

TEST_CASE("inverse demand and chain law") {
  const ModelParams m = reference_params();
  CHECK(inverse_demand(m, 4.0, Regime::one) == doctest::Approx(10.5));
  CHECK(inverse_demand(m, 25.0, Regime::two) == doctest::Approx(5.2));
  CHECK_THROWS_AS(inverse_demand(m, 0.0, Regime::one), DomainError);
  CHECK_THROWS_AS(inverse_demand(m, -1.0, Regime::two), DomainError);
  const ChainLaw law = chain_stationary(m);
  CHECK(law.pi[Regime::one] == doctest::Approx(2.0 / 3.0));
  CHECK(law.pi[Regime::one] + law.pi[Regime::two] == doctest::Approx(1.0));
}

TEST_CASE("relabeling swaps the regime blocks only") {
  const ModelParams m = reference_params();
  const ModelParams s = m.relabeled();
  CHECK(s[Regime::one] == m[Regime::two]);
  CHECK(s[Regime::two] == m[Regime::one]);
  CHECK(s.delta == m.delta);
  CHECK(s.relabeled() == m);
  CHECK(get_param(s, "sigma1") == 0.15);
}
