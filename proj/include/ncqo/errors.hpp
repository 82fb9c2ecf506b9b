#pragma once

#include <stdexcept>
#include <string>

namespace ncqo {

// Common base so callers can catch every library error with one handler.
struct error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Evaluation left the expression's domain (division by zero, sqrt of a
// negative, fractional power of a negative base). Carries the offending t.
struct domain_error : error {
  double t;
  domain_error(const std::string& what, double t_)
      : error(what + " (t = " + std::to_string(t_) + ")"), t(t_) {}
};

// Order doubling changed a quadrature value by more than the tolerance.
struct nonconvergent_integral : error {
  using error::error;
};

// A solution family's constants fail its constraint relation.
// `relation` spells out the violated equation.
struct constraint_violated : error {
  std::string relation;
  constraint_violated(const std::string& relation_, double residual)
      : error("constraint violated: " + relation_ +
              " (relative residual " + std::to_string(residual) + ")"),
        relation(relation_) {}
};

struct invalid_c : error {
  using error::error;
};

struct invalid_k : error {
  using error::error;
};

// rho(t) fell below the singularity guard during integration.
struct singular_ep : error {
  using error::error;
};

struct no_convergence : error {
  using error::error;
};

// The integrability check needs a nonconstant a(t).
struct chiellini_inapplicable : error {
  using error::error;
};

// A radicand of the scenario's NC parameters went negative. Carries the
// time and the offending radicand value.
struct outside_physical_window : error {
  double t;
  double radicand;
  outside_physical_window(double t_, double radicand_)
      : error("outside physical window: radicand " + std::to_string(radicand_) +
              " at t = " + std::to_string(t_)),
        t(t_),
        radicand(radicand_) {}
};

// Requested a closed-form phase outside the supported elementary cases.
struct unsupported_case : error {
  using error::error;
};

// Reality condition of a closed-form phase fails.
struct complex_phase : error {
  using error::error;
};

// omega_p^2 = ab - 4d^2 is nonpositive where a positive value is required.
struct imaginary_effective_frequency : error {
  using error::error;
};

// Hamiltonian coefficients do not close after one declared cycle.
struct periodicity_violated : error {
  using error::error;
};

// theta*Omega has the wrong sign for the modified framework.
struct sign_constraint_violated : error {
  using error::error;
};

// The (a, b, d) triple is mutually inconsistent beyond tolerance.
struct inconsistent_triple : error {
  using error::error;
};

// Scenario file parsing failed; message names the offending key.
struct parse_error : error {
  using error::error;
};

struct unknown_figure : error {
  using error::error;
};

}  // namespace ncqo
