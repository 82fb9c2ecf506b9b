#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <numbers>
#include <sstream>

#include "ncqo/scenario.hpp"

using namespace ncqo;
using Catch::Matchers::ContainsSubstring;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

constexpr double pi = std::numbers::pi;

scenario parse_text(const std::string& text) {
  std::stringstream in(text);
  return parse_scenario(in);
}

// Unit-damping oscillator with decaying frequency: f = 1,
// omega = omega0 e^{-t/2}, with the NC parameters that reproduce
// a = sigma e^{-t} and b = Delta e^{t} at M = Gamma = 1.
scenario decaying_freq_scenario(double sigma, double delta, double omega0) {
  scenario sc;
  sc.k.sigma = sigma;
  sc.k.delta = delta;
  sc.k.omega0 = omega0;
  sc.omega = omega0 * time_expr::exponential(-0.5);
  sc.theta = (2.0 / omega0) * time_expr::exponential(0.5) *
             sqrt(sigma * time_expr::exponential(-1.0) - 1.0);
  sc.capital_omega =
      2.0 * sqrt(delta * time_expr::exponential(1.0) -
                 omega0 * omega0 * time_expr::exponential(-1.0));
  sc.n = 1;
  return sc;
}

const char* const full_config = R"(
# Constant-frequency damped oscillator.
[framework]
type = standard

[constants]
M = 1
omega0 = 1          ; natural units
Gamma = 1
sigma = 1
Delta = 1.25
mu = 1

[functions]
f = exponential(-1)
omega = constant(1)
theta = constant(0)
Omega = exponential(1)

[quantum]
n = 1
m = 0
)";

}  // namespace

TEST_CASE("Framework tags round trip through their names") {
  for (const auto fw : {framework::standard, framework::magnetic,
                        framework::generalized_i, framework::generalized_ii})
    REQUIRE(framework_from_name(framework_name(fw)) == fw);
  REQUIRE_THROWS_AS(framework_from_name("galilean"), parse_error);
}

TEST_CASE("Scenario parser reads the sectioned key = value format") {
  const scenario sc = parse_text(full_config);
  REQUIRE(sc.fw == framework::standard);
  REQUIRE(sc.k.mass == 1.0);
  REQUIRE(sc.k.delta == 1.25);
  REQUIRE(sc.n == 1);
  REQUIRE(sc.m == 0);
  REQUIRE_THAT(sc.damping(1.0), WithinRel(std::exp(-1.0), 1e-15));
  REQUIRE_THAT(sc.capital_omega(2.0), WithinRel(std::exp(2.0), 1e-15));
  REQUIRE(sc.theta(5.0) == 0.0);

  // The parsed functions assemble into the usual coefficients: the phase
  // integrand of this system is the constant -1/2.
  const hamiltonian_coefficients hc = build_coefficients(sc);
  for (const double t : {0.0, 1.0, 3.0}) {
    REQUIRE_THAT(hc.a(t), WithinRel(std::exp(-t), 1e-14));
    REQUIRE_THAT(hc.b(t), WithinRel(1.25 * std::exp(t), 1e-14));
    REQUIRE_THAT(hc.c(t), WithinAbs(0.5, 1e-14));
  }
}

TEST_CASE("Function entries accept an amplitude prefix") {
  const scenario sc = parse_text(
      "[functions]\nB = 2.5 * exponential(-1)\nP = power(1, 2, -0.5)\n");
  REQUIRE_THAT(sc.field(1.0), WithinRel(2.5 * std::exp(-1.0), 1e-15));
  REQUIRE_THAT(sc.p_weight(2.0), WithinRel(0.5, 1e-15));
}

TEST_CASE("Scenario parser names the offending key") {
  REQUIRE_THROWS_WITH(parse_text("[orbit]\n"),
                      ContainsSubstring("unknown section"));
  REQUIRE_THROWS_WITH(parse_text("[framework]\ntype = galilean\n"),
                      ContainsSubstring("framework.type"));
  REQUIRE_THROWS_WITH(parse_text("[framework]\nname = standard\n"),
                      ContainsSubstring("framework.name"));
  REQUIRE_THROWS_WITH(parse_text("[constants]\nmass = 1\n"),
                      ContainsSubstring("constants.mass"));
  REQUIRE_THROWS_WITH(parse_text("[constants]\nM = heavy\n"),
                      ContainsSubstring("constants.M"));
  REQUIRE_THROWS_WITH(parse_text("[functions]\ntheta = sqr(1)\n"),
                      ContainsSubstring("functions.theta"));
  REQUIRE_THROWS_WITH(parse_text("[functions]\nf = power(1, 2)\n"),
                      ContainsSubstring("expects 3"));
  REQUIRE_THROWS_WITH(parse_text("[functions]\ng = constant(1)\n"),
                      ContainsSubstring("functions.g"));
  REQUIRE_THROWS_WITH(parse_text("[quantum]\nn = -1\n"),
                      ContainsSubstring("quantum.n"));
  REQUIRE_THROWS_WITH(parse_text("[quantum]\nm = 0.5\n"),
                      ContainsSubstring("quantum.m"));
  REQUIRE_THROWS_WITH(parse_text("[quantum]\nl = 1\n"),
                      ContainsSubstring("quantum.l"));
  REQUIRE_THROWS_WITH(parse_text("n = 1\n"),
                      ContainsSubstring("before any section"));
  REQUIRE_THROWS_WITH(parse_text("[framework\ntype = standard\n"),
                      ContainsSubstring("unterminated"));
  REQUIRE_THROWS_WITH(parse_text("[quantum]\njust text\n"),
                      ContainsSubstring("key = value"));
}

TEST_CASE("Missing scenario file is reported by path") {
  REQUIRE_THROWS_WITH(load_scenario("/nonexistent/sys.cfg"),
                      ContainsSubstring("/nonexistent/sys.cfg"));
}

TEST_CASE("Coefficient dispatch honors the framework tag") {
  scenario sc;
  sc.fw = framework::magnetic;
  sc.field = time_expr::constant(0.0);
  sc.theta = time_expr::constant(0.0);
  sc.capital_omega = time_expr::constant(0.0);
  const hamiltonian_coefficients mag = build_coefficients(sc);
  sc.fw = framework::standard;
  const hamiltonian_coefficients std_ = build_coefficients(sc);
  for (const double t : {0.0, 0.7, 2.0}) {
    REQUIRE_THAT(mag.a(t), WithinRel(std_.a(t), 1e-15));
    REQUIRE_THAT(mag.b(t), WithinRel(std_.b(t), 1e-15));
  }

  sc.fw = framework::generalized_ii;
  sc.theta = time_expr::constant(1.0);
  sc.capital_omega = time_expr::constant(1.0);  // theta*Omega > 0
  REQUIRE_THROWS_AS(build_coefficients(sc), sign_constraint_violated);
}

TEST_CASE("Physical window spans the whole range without radicands") {
  scenario sc;  // commutative defaults: theta = Omega = 0
  const auto windows = physical_window(sc, 12.0);
  REQUIRE(windows.size() == 1);
  REQUIRE(windows[0].lo == 0.0);
  REQUIRE(windows[0].hi == 12.0);
  REQUIRE_THROWS_AS(physical_window(sc, 0.0), error);
}

TEST_CASE("Physical window ends where the position radicand turns negative") {
  // sigma = Delta = 1e7, omega0 = 1e3: the theta radicand sigma e^{-t} - 1
  // dies at t = ln(1e7); the Omega radicand never does.
  const scenario sc = decaying_freq_scenario(1e7, 1e7, 1e3);
  const auto windows = physical_window(sc, 20.0);
  REQUIRE(windows.size() == 1);
  REQUIRE(windows[0].lo == 0.0);
  REQUIRE_THAT(windows[0].hi, WithinAbs(std::log(1e7), 1e-7));
}

TEST_CASE("Physical window opens where the momentum radicand turns positive") {
  // Delta below omega0^2 delays the Omega radicand: feasible from
  // t = ln(omega0^2/Delta)/2 onward.
  const scenario sc = decaying_freq_scenario(1e7, 1e5, 1e3);
  const auto windows = physical_window(sc, 20.0);
  REQUIRE(windows.size() == 1);
  REQUIRE_THAT(windows[0].lo, WithinAbs(0.5 * std::log(10.0), 1e-7));
  REQUIRE_THAT(windows[0].hi, WithinAbs(std::log(1e7), 1e-7));
}

TEST_CASE("Physical window degenerates to a point at the marginal constants") {
  // M sigma = 1 leaves the theta radicand non-negative only at t = 0.
  const scenario sc = decaying_freq_scenario(1.0, 1e7, 1e3);
  const auto windows = physical_window(sc, 20.0);
  REQUIRE(windows.size() == 1);
  REQUIRE(windows[0].lo == 0.0);
  REQUIRE(windows[0].hi < 1e-6);
}

TEST_CASE("Physical window reports disjoint feasible stretches") {
  scenario sc;
  sc.theta = sqrt(time_expr::sine(1.0));
  const auto windows = physical_window(sc, 10.0);
  REQUIRE(windows.size() == 2);
  REQUIRE(windows[0].lo == 0.0);
  REQUIRE_THAT(windows[0].hi, WithinAbs(pi, 1e-7));
  REQUIRE_THAT(windows[1].lo, WithinAbs(2.0 * pi, 1e-7));
  REQUIRE_THAT(windows[1].hi, WithinAbs(3.0 * pi, 1e-7));
}
