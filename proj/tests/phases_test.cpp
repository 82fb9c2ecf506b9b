#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <numbers>

#include "ncqo/coefficients.hpp"
#include "ncqo/ermakov.hpp"
#include "ncqo/phases.hpp"

using namespace ncqo;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

constexpr double pi = std::numbers::pi;

// Damped oscillator with constant frequency: f = e^{-t}, omega = 1,
// theta = 0, Omega = e^{t}. With sigma = mu = 1 and Delta = 5/4 the phase
// integrand is exactly -1/2.
hamiltonian_coefficients decay_const_freq_coeffs() {
  return coeffs_standard(time_expr::exponential(-1.0),
                         time_expr::constant(1.0), time_expr::constant(0.0),
                         time_expr::exponential(1.0), 1.0);
}

ep_solution decay_const_freq_ep() { return ep_exponential(1.0, 1.25, 1.0, 1.0); }

// Shared constants of the two magnetic systems: M = q = B0 = omega0 =
// Gamma = chi = mu = 1, sigma = 2, Delta = 17/8. They satisfy both the
// exponential and the k = -2 rational auxiliary constraints.
model_constants magnetic_constants() {
  model_constants mc;
  mc.sigma = 2.0;
  mc.delta = 2.125;
  mc.field0 = 1.0;
  return mc;
}

// Printed NC parameter amplitudes for those constants.
double magnetic_theta_amp() {
  return 1.6 * (std::sqrt(1.5) - 0.5);
}
double magnetic_omega_amp() { return 2.0 * std::sqrt(1.125) - 1.0; }

// Exponential-field magnetic system: f = e^{-t}, omega = 1, B = e^{t},
// theta = theta0 e^{-t}, Omega = Omega0 e^{t}. Produces a = 2 e^{-t},
// b = 17/8 e^{t} and a constant c.
hamiltonian_coefficients magnetic_exp_coeffs() {
  return coeffs_magnetic(time_expr::exponential(-1.0),
                         time_expr::constant(1.0), time_expr::exponential(1.0),
                         magnetic_theta_amp() * time_expr::exponential(-1.0),
                         magnetic_omega_amp() * time_expr::exponential(1.0),
                         1.0, 1.0);
}

// Rational sibling: f = 1, omega = B = 1/(t+1), theta = theta0 (t+1),
// Omega = Omega0/(t+1). Produces a = 2, b = 17/8 (t+1)^{-2} and
// c = c0/(t+1) with the same constant c0 as the exponential system.
hamiltonian_coefficients magnetic_rational_coeffs() {
  const time_expr up = time_expr::linear_power(1.0, 1.0, 1.0);
  const time_expr down = time_expr::linear_power(1.0, 1.0, -1.0);
  return coeffs_magnetic(time_expr::constant(1.0), down, down,
                         magnetic_theta_amp() * up,
                         magnetic_omega_amp() * down, 1.0, 1.0);
}

// Cyclic systems at unit mass and frequency, coupling amplitudes 2.
// Cosine-coupled: a = 2, b = 1, d = cos(f t)/sqrt(2).
hamiltonian_coefficients cosine_coupled_coeffs(double f) {
  return coeffs_generalized_I(
      time_expr::constant(1.0), time_expr::constant(0.5),
      time_expr::cosine(f) / std::sqrt(2.0), time_expr::constant(0.0),
      time_expr::constant(0.0));
}

// Cubed-sine system: Q = sin^6(f t)/2, R = sin^3(f t)/sqrt(2), theta = 0,
// Omega = 2 cos(f t).
hamiltonian_coefficients cubed_sine_coeffs(double f) {
  const time_expr s = time_expr::sine(f);
  return coeffs_generalized_I(time_expr::constant(1.0),
                              0.5 * powi(s, 6), powi(s, 3) / std::sqrt(2.0),
                              time_expr::constant(0.0),
                              2.0 * time_expr::cosine(f));
}

// Sine-driven system: constant weights, theta = Omega = 2 sin(f t).
hamiltonian_coefficients sine_driven_coeffs(double f) {
  const time_expr s = time_expr::sine(f);
  return coeffs_generalized_I(time_expr::constant(1.0),
                              time_expr::constant(0.5),
                              time_expr::constant(1.0 / std::sqrt(2.0)),
                              2.0 * s, 2.0 * s);
}

// Modified-shift system with cosine parameters of opposite sign:
// a = 2 + 3 cos^2, b = 1 + 3 cos^2, the effective frequency never drops
// below sqrt(2).
hamiltonian_coefficients opposed_cosine_coeffs(double f) {
  const time_expr c = time_expr::cosine(f);
  return coeffs_generalized_II(time_expr::constant(1.0),
                               time_expr::constant(0.5), 2.0 * c, -2.0 * c,
                               2.0 * pi / f);
}

// Modified-shift system whose weights all scale with sin^2: the coupling
// ratio d/a is constant, so the geometric integrand vanishes identically.
hamiltonian_coefficients scaled_sine_coeffs(double f) {
  const time_expr s2 = powi(time_expr::sine(f), 2);
  return coeffs_generalized_II(s2, 0.5 * s2, time_expr::constant(2.0),
                               time_expr::constant(-2.0), 2.0 * pi / f);
}

double congruence_defect(const berry_result& r) {
  return std::abs(std::remainder(r.value - r.alt_value, 2.0 * pi));
}

}  // namespace

TEST_CASE("Phase quadrature reproduces the constant-slope decay system") {
  const auto hc = decay_const_freq_coeffs();
  const auto ep = decay_const_freq_ep();
  const phase_result res = lewis_phase_quadrature(hc, ep, 1, 0, 2.0);
  REQUIRE(res.method == phase_method::quadrature);
  REQUIRE_THAT(res.value, WithinAbs(-1.0, 1e-9));
  REQUIRE(res.estimated_error < 1e-8);

  // The phase scales with n + l.
  const phase_result tripled = lewis_phase_quadrature(hc, ep, 2, 1, 2.0);
  REQUIRE_THAT(tripled.value, WithinAbs(-3.0, 1e-9));
}

TEST_CASE("Phase quadrature handles trivial arguments") {
  const auto hc = decay_const_freq_coeffs();
  const auto ep = decay_const_freq_ep();
  REQUIRE(lewis_phase_quadrature(hc, ep, 0, 0, 3.0).value == 0.0);
  REQUIRE(lewis_phase_quadrature(hc, ep, 1, 0, 0.0).value == 0.0);
  REQUIRE_THROWS_AS(lewis_phase_quadrature(hc, ep, 1, 0, -0.5), error);
}

TEST_CASE("Closed phases start at zero and carry the closed-form tag") {
  const model_constants mc = magnetic_constants();
  for (const auto which :
       {closed_phase_case::set_ib, closed_phase_case::magnetic_set_i_case_ii,
        closed_phase_case::rational_k_neg2}) {
    const phase_result res = lewis_phase_closed(which, mc, 1, 0, 0.0);
    REQUIRE(res.method == phase_method::closed_form);
    REQUIRE(res.value == 0.0);
  }
}

TEST_CASE("Closed decay-system phase is linear with slope -1/2") {
  model_constants mc;
  mc.delta = 1.25;
  const phase_result res =
      lewis_phase_closed(closed_phase_case::set_ib, mc, 1, 0, 2.0);
  REQUIRE_THAT(res.value, WithinAbs(-1.0, 1e-14));
  for (const double t : {0.5, 1.0, 3.0, 10.0}) {
    const phase_result r =
        lewis_phase_closed(closed_phase_case::set_ib, mc, 1, 0, t);
    REQUIRE_THAT(r.value / t, WithinAbs(-0.5, 1e-13));
  }
}

TEST_CASE("Closed phases reject constants that make them complex") {
  model_constants weak;
  weak.sigma = 0.5;  // M sigma < 1
  weak.delta = 2.0;
  REQUIRE_THROWS_AS(
      lewis_phase_closed(closed_phase_case::set_ib, weak, 1, 0, 1.0),
      complex_phase);

  model_constants soft;
  soft.sigma = 2.0;
  soft.delta = 0.5;  // Delta < M omega0^2
  REQUIRE_THROWS_AS(
      lewis_phase_closed(closed_phase_case::set_ib, soft, 1, 0, 1.0),
      complex_phase);
  soft.field0 = 1.0;
  REQUIRE_THROWS_AS(lewis_phase_closed(
                        closed_phase_case::magnetic_set_i_case_ii, soft, 1, 0,
                        1.0),
                    complex_phase);
}

TEST_CASE("Magnetic closed phase collapses to the field-free value at B0 = 0") {
  model_constants mc = magnetic_constants();
  mc.field0 = 0.0;
  for (const double t : {0.5, 2.0, 5.0}) {
    const phase_result plain =
        lewis_phase_closed(closed_phase_case::set_ib, mc, 1, 0, t);
    const phase_result magnetic = lewis_phase_closed(
        closed_phase_case::magnetic_set_i_case_ii, mc, 1, 0, t);
    REQUIRE_THAT(magnetic.value, WithinAbs(plain.value, 1e-13));
  }
}

TEST_CASE("Quadrature and closed forms agree across the elementary systems") {
  struct probe {
    closed_phase_case which;
    hamiltonian_coefficients hc;
    ep_solution ep;
    model_constants mc;
  };
  model_constants decay_mc;
  decay_mc.delta = 1.25;
  const probe probes[] = {
      {closed_phase_case::set_ib, decay_const_freq_coeffs(),
       decay_const_freq_ep(), decay_mc},
      {closed_phase_case::magnetic_set_i_case_ii, magnetic_exp_coeffs(),
       ep_exponential(2.0, 2.125, 1.0, 1.0), magnetic_constants()},
      {closed_phase_case::rational_k_neg2, magnetic_rational_coeffs(),
       ep_rational(-2, 2.0, 2.125, 1.0, 1.0, 1.0), magnetic_constants()},
  };
  for (const probe& p : probes) {
    for (const double t : {0.5, 1.0, 2.0, 5.0}) {
      for (const auto& [n, l] : {std::pair{1, 0}, std::pair{2, 1}}) {
        const phase_result closed = lewis_phase_closed(p.which, p.mc, n, l, t);
        const phase_result quad = lewis_phase_quadrature(p.hc, p.ep, n, l, t);
        REQUIRE_THAT(quad.value,
                     WithinAbs(closed.value,
                               1e-9 * (1.0 + std::abs(closed.value))));
        REQUIRE(quad.estimated_error < 1e-8);
      }
    }
  }
}

TEST_CASE("Quadrature phase of the exponential systems is linear in time") {
  const auto decay_hc = decay_const_freq_coeffs();
  const auto decay_ep = decay_const_freq_ep();
  const auto mag_hc = magnetic_exp_coeffs();
  const auto mag_ep = ep_exponential(2.0, 2.125, 1.0, 1.0);
  for (const double h : {0.5, 1.0}) {
    for (int i = 1; i <= 3; ++i) {
      const double t = h * i;
      const double d2 =
          lewis_phase_quadrature(decay_hc, decay_ep, 1, 0, t).value -
          2.0 * lewis_phase_quadrature(decay_hc, decay_ep, 1, 0, t + h).value +
          lewis_phase_quadrature(decay_hc, decay_ep, 1, 0, t + 2.0 * h).value;
      REQUIRE(std::abs(d2) < 1e-8);
      const double m2 =
          lewis_phase_quadrature(mag_hc, mag_ep, 1, 0, t).value -
          2.0 * lewis_phase_quadrature(mag_hc, mag_ep, 1, 0, t + h).value +
          lewis_phase_quadrature(mag_hc, mag_ep, 1, 0, t + 2.0 * h).value;
      REQUIRE(std::abs(m2) < 1e-8);
    }
  }
}

TEST_CASE("Rational-decay phase grows logarithmically") {
  const model_constants mc = magnetic_constants();
  const double base =
      lewis_phase_closed(closed_phase_case::rational_k_neg2, mc, 1, 0, 1.0)
          .value /
      std::log(2.0);
  for (const double t : {0.5, 2.0, 9.0, 99.0}) {
    const phase_result r =
        lewis_phase_closed(closed_phase_case::rational_k_neg2, mc, 1, 0, t);
    REQUIRE_THAT(r.value, WithinAbs(base * std::log(1.0 + t), 1e-12));
  }
}

TEST_CASE("Phase integration outside the physical window names the failure") {
  // c carries sqrt(2 - e^t), real only up to t = ln 2.
  hamiltonian_coefficients hc;
  hc.a = time_expr::exponential(-1.0);
  hc.b = time_expr::constant(1.0);
  hc.c = sqrt(2.0 - time_expr::exponential(1.0));
  hc.d = time_expr::constant(0.0);
  const auto ep = decay_const_freq_ep();
  try {
    lewis_phase_quadrature(hc, ep, 1, 0, 1.5);
    FAIL("expected the window failure to throw");
  } catch (const outside_physical_window& w) {
    REQUIRE(w.t > std::log(2.0));
    REQUIRE(w.t <= 1.5);
    REQUIRE(w.radicand < 0.0);
  }
  // Inside the window the same system integrates cleanly.
  REQUIRE_NOTHROW(lewis_phase_quadrature(hc, ep, 1, 0, 0.5));
}

TEST_CASE("Adiabatic effective frequency reduces to sqrt(ab) without coupling") {
  hamiltonian_coefficients flat;
  flat.a = time_expr::constant(2.0);
  flat.b = time_expr::constant(8.0);
  flat.c = time_expr::constant(0.0);
  flat.d = time_expr::constant(0.0);
  REQUIRE_THAT(adiabatic_a_over_rho2(flat, 0.7), WithinAbs(4.0, 1e-14));

  hamiltonian_coefficients decay;
  decay.a = time_expr::exponential(-1.0);
  decay.b = 1.25 * time_expr::exponential(1.0);
  decay.c = time_expr::constant(0.0);
  decay.d = time_expr::constant(0.0);
  for (const double t : {0.0, 1.0, 4.0})
    REQUIRE_THAT(adiabatic_a_over_rho2(decay, t),
                 WithinAbs(std::sqrt(1.25), 1e-13));
}

TEST_CASE("Adiabatic value carries the first coupling correction") {
  const double f = 0.1;
  const auto hc = cosine_coupled_coeffs(f);
  // At the quarter cycle d vanishes but its slope does not:
  // sqrt(2) * (1 - (a/wp2) * (d/a)') = sqrt(2) + f/2.
  const double t = 0.5 * pi / f;
  REQUIRE_THAT(adiabatic_a_over_rho2(hc, t),
               WithinAbs(std::sqrt(2.0) + 0.5 * f, 1e-10));
  // A stronger coupling drives a b - 4 d^2 negative and is rejected.
  const auto wide = coeffs_generalized_I(
      time_expr::constant(1.0), time_expr::constant(0.5),
      2.0 * time_expr::cosine(f), time_expr::constant(0.0),
      time_expr::constant(0.0));
  REQUIRE_THROWS_AS(adiabatic_a_over_rho2(wide, 0.0),
                    imaginary_effective_frequency);
}

TEST_CASE("Geometric integrand of the cosine-coupled system is -f/2") {
  const double f = 0.5;
  const auto hc = cosine_coupled_coeffs(f);
  // Includes points beyond the branch flip at pi/f.
  for (const double t : {0.3, 2.0, 5.0, 7.0, 11.0})
    REQUIRE_THAT(berry_integrand(hc, t), WithinAbs(-0.5 * f, 1e-10));
}

TEST_CASE("Geometric integrand vanishes without cross coupling") {
  const auto hc = coeffs_generalized_I(
      time_expr::constant(1.0), time_expr::constant(0.5),
      time_expr::constant(0.0), time_expr::constant(0.0),
      time_expr::constant(0.0));
  for (const double t : {0.0, 1.3, 6.0})
    REQUIRE(berry_integrand(hc, t) == 0.0);
}

TEST_CASE("Geometric integrand vanishes when the coupling ratio is constant") {
  const double f = 0.5;
  const auto hc = scaled_sine_coeffs(f);
  for (const double t : {1.0, 2.5, 4.0, 8.0})
    REQUIRE_THAT(berry_integrand(hc, t), WithinAbs(0.0, 1e-10));
}

TEST_CASE("Geometric phase of the cosine-coupled system is -pi per quantum") {
  const double f = 0.5;
  const auto hc = cosine_coupled_coeffs(f);
  const berry_result r = berry_phase(hc, f, 1, 0);
  REQUIRE_THAT(r.cycle_period, WithinRel(2.0 * pi / f, 1e-15));
  REQUIRE_THAT(r.value, WithinAbs(-pi, 1e-8));
  REQUIRE_THAT(r.alt_value, WithinAbs(pi, 1e-8));
  REQUIRE(congruence_defect(r) < 1e-6);

  const berry_result scaled = berry_phase(hc, f, 2, 1);
  REQUIRE_THAT(scaled.value, WithinAbs(-3.0 * pi, 1e-8));
}

TEST_CASE("Geometric phase of the cubed-sine system is 3 pi / (2 sqrt 2)") {
  const double f = 0.5;
  const berry_result r = berry_phase(cubed_sine_coeffs(f), f, 1, 0);
  REQUIRE_THAT(r.value, WithinAbs(3.0 * pi / (2.0 * std::sqrt(2.0)), 1e-8));
  REQUIRE(congruence_defect(r) < 1e-6);
}

TEST_CASE("Geometric phase vanishes for the remaining cyclic systems") {
  const double f = 0.5;
  const hamiltonian_coefficients systems[] = {
      sine_driven_coeffs(f), opposed_cosine_coeffs(f), scaled_sine_coeffs(f)};
  for (const auto& hc : systems) {
    const berry_result r = berry_phase(hc, f, 1, 0);
    REQUIRE_THAT(r.value, WithinAbs(0.0, 1e-8));
    REQUIRE(congruence_defect(r) < 1e-6);
  }
}

TEST_CASE("Partial geometric integral closes the cycle") {
  const double f = 0.5;
  const double period = 2.0 * pi / f;
  const auto cosine = cosine_coupled_coeffs(f);
  REQUIRE_THAT(berry_partial(cosine, 1, 0, period),
               WithinAbs(berry_phase(cosine, f, 1, 0).value, 1e-8));
  const auto cubed = cubed_sine_coeffs(f);
  REQUIRE_THAT(berry_partial(cubed, 1, 0, period),
               WithinAbs(berry_phase(cubed, f, 1, 0).value, 1e-8));
}

TEST_CASE("Partial geometric integral follows its elementary forms") {
  const double f = 0.5;
  const auto cosine = cosine_coupled_coeffs(f);
  REQUIRE(berry_partial(cosine, 1, 0, 0.0) == 0.0);
  REQUIRE(berry_partial(cosine, 0, 0, 3.0) == 0.0);
  for (const double t : {1.0, 3.0, 8.0})
    REQUIRE_THAT(berry_partial(cosine, 1, 0, t), WithinAbs(-0.5 * f * t, 1e-8));

  // Cubed-sine: (3 f / (4 sqrt 2)) (t - sin(2 f t) / (2 f)).
  const auto cubed = cubed_sine_coeffs(f);
  for (const double t : {1.0, 5.0, 9.0}) {
    const double expected =
        3.0 * f / (4.0 * std::sqrt(2.0)) * (t - std::sin(2.0 * f * t) / (2.0 * f));
    REQUIRE_THAT(berry_partial(cubed, 1, 0, t), WithinAbs(expected, 1e-8));
  }
}

TEST_CASE("Partial geometric integral of the sine-driven system is periodic") {
  const double f = 0.5;
  const double period = 2.0 * pi / f;
  const auto hc = sine_driven_coeffs(f);
  for (const double t : {0.5, 2.0, 5.0}) {
    const double here = berry_partial(hc, 1, 0, t);
    // Elementary form: -atan(sin(f t)/sqrt(2)).
    REQUIRE_THAT(here, WithinAbs(-std::atan(std::sin(f * t) / std::sqrt(2.0)),
                                 1e-8));
    REQUIRE_THAT(berry_partial(hc, 1, 0, t + period), WithinAbs(here, 1e-8));
  }
}

TEST_CASE("Geometric phase demands a closed parameter cycle") {
  const auto hc = cosine_coupled_coeffs(0.5);
  REQUIRE_THROWS_AS(berry_phase(hc, 0.45, 1, 0), periodicity_violated);
}

TEST_CASE("Geometric machinery rejects an imaginary effective frequency") {
  // d = 2 cos(f t) against a b = 2 drives a b - 4 d^2 negative.
  const double f = 0.5;
  const auto hc = coeffs_generalized_I(
      time_expr::constant(1.0), time_expr::constant(0.5),
      2.0 * time_expr::cosine(f), time_expr::constant(0.0),
      time_expr::constant(0.0));
  REQUIRE_THROWS_AS(berry_phase(hc, f, 1, 0), imaginary_effective_frequency);
  REQUIRE_THROWS_AS(berry_integrand(hc, 0.1), imaginary_effective_frequency);
}
