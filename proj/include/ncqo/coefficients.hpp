#pragma once

#include <cmath>
#include <limits>
#include <utility>

#include "ncqo/errors.hpp"
#include "ncqo/time_expr.hpp"

namespace ncqo {

// The quadruple multiplying the commutative-variable Hamiltonian
//   H = (a/2)(p1^2+p2^2) + (b/2)(x1^2+x2^2) + c(x2 p1 - x1 p2)
//       + d(x1 p1 + p1 x1 + x2 p2 + p2 x2),
// in natural units. The standard and magnetic frameworks always have d = 0.
struct hamiltonian_coefficients {
  time_expr a, b, c, d;
};

// Standard noncommutative oscillator with damping factor f(t), frequency
// omega(t) and NC parameters theta(t), Omega(t).
inline hamiltonian_coefficients coeffs_standard(const time_expr& f,
                                                const time_expr& omega,
                                                const time_expr& theta,
                                                const time_expr& capital_omega,
                                                double mass) {
  if (!(mass > 0.0)) throw error("coeffs_standard: mass must be positive");
  const time_expr omega2 = omega * omega;
  hamiltonian_coefficients co;
  co.a = f / mass + mass * omega2 * theta * theta / (4.0 * f);
  co.b = f * capital_omega * capital_omega / (4.0 * mass) + mass * omega2 / f;
  co.c = 0.5 * (f * capital_omega / mass + mass * omega2 * theta / f);
  co.d = time_expr::constant(0.0);
  return co;
}

// Magnetic extension: a Coulomb-gauge field B(t) on a charge q adds the
// cyclotron terms. B = 0 collapses to coeffs_standard exactly.
inline hamiltonian_coefficients coeffs_magnetic(
    const time_expr& f, const time_expr& omega, const time_expr& field,
    const time_expr& theta, const time_expr& capital_omega, double mass,
    double charge) {
  if (!(mass > 0.0)) throw error("coeffs_magnetic: mass must be positive");
  const double q = charge;
  // Recurring combination q^2 B^2 f / (4M) + M omega^2 / f.
  const time_expr s = q * q * field * field * f / (4.0 * mass) +
                      mass * omega * omega / f;
  hamiltonian_coefficients co;
  co.a = f / mass + q * field * f * theta / (2.0 * mass) +
         s * theta * theta / 4.0;
  co.b = s + q * field * f * capital_omega / (2.0 * mass) +
         f * capital_omega * capital_omega / (4.0 * mass);
  co.c = 0.5 * (q * field * f / mass * (1.0 + theta * capital_omega / 4.0) +
                capital_omega * f / mass + s * theta);
  co.d = time_expr::constant(0.0);
  return co;
}

// Generalized oscillator with the standard Bopp shift: P, Q, R are the
// momentum, position and cross-term weights of the NC Hamiltonian.
inline hamiltonian_coefficients coeffs_generalized_I(
    const time_expr& p_weight, const time_expr& q_weight,
    const time_expr& r_weight, const time_expr& theta,
    const time_expr& capital_omega) {
  hamiltonian_coefficients co;
  co.a = 2.0 * p_weight + theta * theta * q_weight / 2.0;
  co.b = 2.0 * q_weight + p_weight * capital_omega * capital_omega / 2.0;
  co.c = p_weight * capital_omega + q_weight * theta;
  co.d = (1.0 - capital_omega * theta / 4.0) * r_weight;
  return co;
}

// Generalized oscillator with the modified Bopp shift. The cross term d
// carries sqrt(-theta*Omega), so theta*Omega must not be positive; the
// product is sampled on [0, sample_t_max] at construction and a positive
// value is rejected (zero is the legitimate commutative limit).
inline hamiltonian_coefficients coeffs_generalized_II(
    const time_expr& p_weight, const time_expr& q_weight,
    const time_expr& theta, const time_expr& capital_omega,
    double sample_t_max = 10.0) {
  const time_expr product = theta * capital_omega;
  for (int i = 0; i <= 64; ++i) {
    const double t = sample_t_max * i / 64.0;
    if (product(t) > 1e-12)
      throw sign_constraint_violated(
          "coeffs_generalized_II: theta*Omega > 0 at t = " + std::to_string(t));
  }
  const time_expr one_minus = 1.0 - product / 4.0;
  hamiltonian_coefficients co;
  co.a = 2.0 * p_weight * one_minus + q_weight * theta * theta / 2.0;
  co.b = 2.0 * q_weight * one_minus +
         p_weight * capital_omega * capital_omega / 2.0;
  co.c = p_weight * capital_omega + theta * q_weight;
  co.d = sqrt(0.0 - product) / 4.0 *
         (capital_omega * p_weight - theta * q_weight);
  return co;
}

// Recovers the NC parameters from given a(t), b(t) in the standard
// framework at one instant. Positive-root convention throughout.
inline std::pair<double, double> invert_nc_standard(
    const time_expr& a, const time_expr& b, const time_expr& f,
    const time_expr& omega, double mass, double t) {
  const double fv = f(t), wv = omega(t), av = a(t), bv = b(t);
  const double rad_theta = fv * (av * mass - fv);
  if (rad_theta < 0.0) throw outside_physical_window(t, rad_theta);
  const double rad_omega = mass * (bv * fv - mass * wv * wv);
  if (rad_omega < 0.0) throw outside_physical_window(t, rad_omega);
  const double theta = 2.0 * std::sqrt(rad_theta) / (mass * wv);
  const double capital_omega = 2.0 * std::sqrt(rad_omega) / fv;
  return {theta, capital_omega};
}

// Magnetic counterpart: theta solves a quadratic (the cyclotron term is
// linear in theta), Omega completes a square. Branches are fixed so that
// B -> 0 reproduces invert_nc_standard.
inline std::pair<double, double> invert_nc_magnetic(
    const time_expr& a, const time_expr& b, const time_expr& f,
    const time_expr& omega, const time_expr& field, double mass, double charge,
    double t) {
  const double fv = f(t), wv = omega(t), bv = field(t);
  const double av = a(t), bbv = b(t);
  const double half_cyc = charge * bv * fv / (2.0 * mass);
  const double s = charge * charge * bv * bv * fv / (4.0 * mass) +
                   mass * wv * wv / fv;
  const double quarter_s = s / 4.0;
  // quarter_s theta^2 + half_cyc theta + (f/M - a) = 0.
  const double disc = half_cyc * half_cyc + 4.0 * quarter_s * (av - fv / mass);
  if (disc < 0.0) throw outside_physical_window(t, disc);
  double theta;
  if (quarter_s == 0.0) {
    // Only reachable with B = 0 and omega = 0; then a must equal f/M.
    if (std::abs(av - fv / mass) > 1e-12 * (1.0 + std::abs(av)))
      throw error("invert_nc_magnetic: degenerate quadratic, no real theta");
    theta = 0.0;
  } else {
    theta = (-half_cyc + std::sqrt(disc)) / (2.0 * quarter_s);
  }
  const double rad_omega = mass * (bbv * fv - mass * wv * wv);
  if (rad_omega < 0.0) throw outside_physical_window(t, rad_omega);
  const double capital_omega =
      -charge * bv + 2.0 * std::sqrt(rad_omega) / fv;
  return {theta, capital_omega};
}

// Modified-shift inversion: the scalar pair (a, b) determines (theta, Omega)
// up to a joint sign, and the cross coefficient d picks the sign and must
// be consistent with the pair. Damped Newton on the (a, b) equations.
inline std::pair<double, double> invert_nc_modified(double a, double b,
                                                    double d, double mass,
                                                    double omega) {
  if (!(mass > 0.0) || !(omega > 0.0))
    throw error("invert_nc_modified: mass and omega must be positive");
  const double p = 1.0 / (2.0 * mass);
  const double q = mass * omega * omega / 2.0;

  const auto residual_ab = [&](double th, double om, double* ra, double* rb) {
    const double one_minus = 1.0 - th * om / 4.0;
    *ra = 2.0 * p * one_minus + q * th * th / 2.0 - a;
    *rb = 2.0 * q * one_minus + p * om * om / 2.0 - b;
  };
  const auto d_from = [&](double th, double om) {
    double prod = th * om;
    if (prod > 1e-12) return std::numeric_limits<double>::quiet_NaN();
    prod = std::min(prod, 0.0);
    return std::sqrt(-prod) / 4.0 * (om * p - th * q);
  };

  // Decoupled first guess: ignore the cross term and solve each equation
  // alone, with the signs that make theta*Omega negative.
  double th = std::sqrt(std::max(0.0, (a - 2.0 * p) * 2.0 / q));
  double om = -std::sqrt(std::max(0.0, (b - 2.0 * q) * 2.0 / p));

  double ra, rb;
  residual_ab(th, om, &ra, &rb);
  double norm = std::abs(ra) + std::abs(rb);
  const double tol = 1e-13 * (1.0 + std::abs(a) + std::abs(b));
  for (int iter = 0; iter < 100 && norm > tol; ++iter) {
    // Jacobian of the (a, b) residuals in (theta, Omega).
    const double j00 = -p * om / 2.0 + q * th;
    const double j01 = -p * th / 2.0;
    const double j10 = -q * om / 2.0;
    const double j11 = -q * th / 2.0 + p * om;
    const double det = j00 * j11 - j01 * j10;
    if (det == 0.0)
      throw no_convergence("invert_nc_modified: singular Jacobian");
    double step_th = -(j11 * ra - j01 * rb) / det;
    double step_om = -(-j10 * ra + j00 * rb) / det;
    // Halve the step until the residual actually shrinks.
    double damp = 1.0;
    for (int k = 0; k < 60; ++k) {
      double ra2, rb2;
      residual_ab(th + damp * step_th, om + damp * step_om, &ra2, &rb2);
      if (std::abs(ra2) + std::abs(rb2) < norm) {
        th += damp * step_th;
        om += damp * step_om;
        ra = ra2;
        rb = rb2;
        norm = std::abs(ra2) + std::abs(rb2);
        break;
      }
      damp *= 0.5;
      if (k == 59) throw no_convergence("invert_nc_modified: stalled");
    }
  }
  if (norm > tol)
    throw no_convergence("invert_nc_modified: 100 iterations exhausted");

  if (th * om > 1e-12)
    throw sign_constraint_violated(
        "invert_nc_modified: recovered theta*Omega is positive");

  // The (a, b) pair is even under (theta, Omega) -> (-theta, -Omega) while
  // d is odd, so try both signs and keep the consistent one.
  const double d_plus = d_from(th, om);
  const double d_minus = d_from(-th, -om);
  const double err_plus = std::abs(d_plus - d);
  const double err_minus = std::abs(d_minus - d);
  if (err_minus < err_plus) {
    th = -th;
    om = -om;
  }
  const double err = std::min(err_plus, err_minus);
  if (!(err <= 1e-6 * (1.0 + std::abs(d))))
    throw inconsistent_triple(
        "invert_nc_modified: cross coefficient residual " +
        std::to_string(err));
  return {th, om};
}

}  // namespace ncqo
