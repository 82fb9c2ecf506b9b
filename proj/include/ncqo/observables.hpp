#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <vector>

#include "ncqo/coefficients.hpp"
#include "ncqo/ermakov.hpp"
#include "ncqo/errors.hpp"
#include "ncqo/laguerre.hpp"
#include "ncqo/phases.hpp"
#include "ncqo/quadrature.hpp"
#include "ncqo/scenario.hpp"
#include "ncqo/time_expr.hpp"

namespace ncqo {

// Frozen per-instant data of a stationary state: the auxiliary function
// rho and its velocity, the kinetic coefficient a and cross coefficient d
// of the Hamiltonian, plus the quantum numbers. The state is f_{n, m-n},
// so the angular index is m - n and m < n is a legitimate label.
struct state_params {
  double rho = 1.0;
  double rho_dot = 0.0;
  double a = 1.0;
  double d = 0.0;
  int n = 0;
  int m = 0;
};

// Energy expectation sampled over a time grid. The builder drops grid
// points outside the physical window, so values are always real.
struct energy_profile {
  std::vector<double> grid;
  std::vector<double> values;
  framework fw = framework::standard;
};

namespace detail {

inline void check_state(const state_params& sp, const char* who) {
  if (!(sp.rho > 0.0))
    throw error(std::string(who) + ": rho must be positive");
  if (!(sp.a > 0.0))
    throw error(std::string(who) + ": kinetic coefficient must be positive");
  if (sp.n < 0 || sp.m < 0)
    throw error(std::string(who) + ": quantum numbers must be non-negative");
}

// rho_dot - 2 rho d, the velocity entering every expectation value. The
// cross coefficient acts only through this shift.
inline double effective_velocity(const state_params& sp) {
  return sp.rho_dot - 2.0 * sp.rho * sp.d;
}

inline double factorial(int v) {
  double out = 1.0;
  for (int i = 2; i <= v; ++i) out *= i;
  return out;
}

inline double binomial(int k, int r) {
  double out = 1.0;
  for (int i = 1; i <= r; ++i) out = out * (k - r + i) / i;
  return out;
}

inline double ipow(double base, int e) {
  double out = 1.0;
  for (int i = 0; i < e; ++i) out *= base;
  return out;
}

// i^{-m}, kept exact on the four-cycle.
inline std::complex<double> inv_i_power(int m) {
  switch (((m % 4) + 4) % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, -1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, 1.0};
  }
}

// Integral of w^p e^{-w} L_{m1}^{(a1)}(w) L_{m2}^{(a2)}(w) over [0, inf)
// with integer superscripts of either sign. A negative superscript -j
// (j never exceeds the degree for eigenstate labels) folds into the
// monomial through
//   L_m^{(-j)}(w) = (-w)^j ((m-j)!/m!) L_{m-j}^{(j)}(w),
// which raises p by j. Every selection-rule-allowed power-element term
// ends with a non-negative folded p, so the positive-superscript
// quadrature applies directly.
inline double laguerre_pair_integral(double p, laguerre_spec s1,
                                     laguerre_spec s2) {
  double scale = 1.0;
  const auto fold = [&scale, &p](laguerre_spec& s) {
    if (s.alpha >= 0.0) return;
    const int j = static_cast<int>(std::lround(-s.alpha));
    if (j > s.degree)
      throw error("laguerre_pair_integral: superscript below -degree");
    if (j % 2 == 1) scale = -scale;
    for (int i = s.degree - j + 1; i <= s.degree; ++i) scale /= i;
    p += j;
    s.degree -= j;
    s.alpha = j;
  };
  fold(s1);
  fold(s2);
  return scale * laguerre_weighted_integral(p, s1, s2);
}

}  // namespace detail

// Value of the invariant eigenfunction f_{n, m-n} at the polar point
// (r, theta). The radial prefactor r^{n-m} pairs with a negative Laguerre
// superscript when m > n; folding one into the other keeps r = 0 finite.
inline std::complex<double> wavefunction(const state_params& sp, double r,
                                         double theta) {
  detail::check_state(sp, "wavefunction");
  if (r < 0.0) throw error("wavefunction: r must be non-negative");
  const int n = sp.n, m = sp.m;
  const double w = r * r / (sp.rho * sp.rho);

  double radial;  // r^{n-m} L_m^{(n-m)}(r^2/rho^2), folded when m > n
  if (m <= n) {
    radial =
        detail::ipow(r, n - m) * laguerre({m, static_cast<double>(n - m)}, w);
  } else {
    const int j = m - n;
    double ratio = 1.0;  // n!/m!
    for (int i = n + 1; i <= m; ++i) ratio /= i;
    const double sign = (j % 2 == 0) ? 1.0 : -1.0;
    radial = sign * ratio * detail::ipow(r / (sp.rho * sp.rho), j) *
             laguerre({n, static_cast<double>(j)}, w);
  }

  const double amp = std::sqrt(detail::factorial(m) / detail::factorial(n) /
                               std::numbers::pi) *
                     std::pow(sp.rho, m - n - 1);
  // exp(-(a - i rho (rho_dot - 2 rho d)) r^2 / (2 a rho^2)): a Gaussian
  // envelope carrying a velocity-driven phase.
  const std::complex<double> envelope = std::exp(std::complex<double>(
      -0.5 * w,
      detail::effective_velocity(sp) * r * r / (2.0 * sp.a * sp.rho)));
  const std::complex<double> angular =
      detail::inv_i_power(m) * std::polar(1.0, (m - n) * theta);
  return amp * radial * envelope * angular;
}

namespace detail {

// Shared core of the x^k / y^k power elements between invariant
// eigenstates (n, m) and (n, m'): the binomial expansion of the angular
// factor keeps only terms with m' = m + 2r - k, each a weighted Laguerre
// integral. The x projection carries an alternating sign per term and an
// overall i^{-k}; the normalization prefactor has already been collapsed
// to rho^k / n!.
inline std::complex<double> power_element(int n, int m, int mp, int k,
                                          const state_params& sp,
                                          bool x_axis) {
  check_state(sp, "matrix element");
  if (k < 0) throw error("matrix element: power must be non-negative");
  if (n < 0 || m < 0 || mp < 0)
    throw error("matrix element: quantum numbers must be non-negative");

  double sum = 0.0;
  for (int r = 0; r <= k; ++r) {
    if (m + 2 * r - k != mp) continue;
    double term =
        binomial(k, r) *
        laguerre_pair_integral(static_cast<double>(n - m - r + k),
                               {m, static_cast<double>(n - m)},
                               {mp, static_cast<double>(n - mp)});
    if (x_axis && (k + r) % 2 == 1) term = -term;
    sum += term;
  }
  const double common = ipow(sp.rho, k) / (ipow(2.0, k) * factorial(n)) *
                        std::sqrt(factorial(m) * factorial(mp));
  const std::complex<double> axis_phase =
      x_axis ? inv_i_power(k) : std::complex<double>(1.0, 0.0);
  return common * sum * axis_phase;
}

}  // namespace detail

// Matrix element of x^k between the invariant eigenstates (n, m) and
// (n, m'). Only rho enters from sp: the velocity and cross coefficient sit
// in a pure phase that cancels between bra and ket.
inline std::complex<double> matrix_element_xk(int n, int m, int mp, int k,
                                              const state_params& sp) {
  return detail::power_element(n, m, mp, k, sp, true);
}

// y^k counterpart: the same Laguerre sum without the alternating axis sign.
inline std::complex<double> matrix_element_yk(int n, int m, int mp, int k,
                                              const state_params& sp) {
  return detail::power_element(n, m, mp, k, sp, false);
}

enum class axis { x, y };

// Brute-force check value for the closed-form power elements: the plane
// integral of conj(phi_{n,m-n}) (r cos theta)^k (or sin) phi_{n,m'-n} with
// measure r dr dtheta, evaluated as a Gauss-Laguerre rule in z = r^2/rho^2
// crossed with a 512-point trapezoid in theta. The trapezoid is exact for
// the low harmonics that appear; doubling the radial order must not move
// the value.
inline std::complex<double> oracle_matrix_element(axis ax, int k, int n, int m,
                                                  int mp,
                                                  const state_params& sp) {
  detail::check_state(sp, "oracle_matrix_element");
  if (k < 0) throw error("oracle_matrix_element: power must be non-negative");
  if (n < 0 || m < 0 || mp < 0)
    throw error(
        "oracle_matrix_element: quantum numbers must be non-negative");

  constexpr int slices = 512;
  // The angular slice values do not depend on the radial order; build the
  // ring once.
  std::vector<std::complex<double>> ring(slices);
  for (int j = 0; j < slices; ++j) {
    const double th = 2.0 * std::numbers::pi * j / slices;
    const double trig = (ax == axis::x) ? std::cos(th) : std::sin(th);
    ring[j] = detail::ipow(trig, k) * std::polar(1.0, (mp - m) * th);
  }

  state_params bra = sp, ket = sp;
  bra.n = n;
  bra.m = m;
  ket.n = n;
  ket.m = mp;

  const auto at_order = [&](int order) {
    const quadrature_rule rule = gauss_laguerre(order);
    std::complex<double> total = 0.0;
    for (int i = 0; i < order; ++i) {
      const double z = rule.nodes[i];
      const double r = sp.rho * std::sqrt(z);
      // phi(r, theta) = phi(r, 0) e^{i (angular index) theta}, so one
      // radial evaluation serves the whole ring.
      const std::complex<double> pair = std::conj(wavefunction(bra, r, 0.0)) *
                                        wavefunction(ket, r, 0.0) *
                                        detail::ipow(r, k);
      std::complex<double> ring_sum = 0.0;
      for (int j = 0; j < slices; ++j) ring_sum += pair * ring[j];
      // The rule's e^{-z} weight is the |phi|^2 envelope itself; divide it
      // back out of the sampled integrand.
      total += rule.weights[i] * std::exp(z) * ring_sum;
    }
    // r dr = rho^2 dz / 2, and the trapezoid weight is 2 pi / slices.
    return total * (sp.rho * sp.rho / 2.0) *
           (2.0 * std::numbers::pi / slices);
  };

  const int base = std::max(10, (n + m + mp) / 2 + k + 5);
  const std::complex<double> coarse = at_order(base);
  const std::complex<double> fine = at_order(2 * base);
  if (std::abs(fine - coarse) > 1e-9 * (1.0 + std::abs(fine)))
    throw nonconvergent_integral(
        "oracle_matrix_element: radial order doubling moved the value by " +
        std::to_string(std::abs(fine - coarse)));
  return fine;
}

// <p_i^2> in the state (n, m); the same value for both axes.
inline double expect_p2(const state_params& sp) {
  detail::check_state(sp, "expect_p2");
  const double eff = detail::effective_velocity(sp);
  return (sp.n + sp.m + 1.0) / 2.0 *
         (1.0 / (sp.rho * sp.rho) + eff * eff / (sp.a * sp.a));
}

struct bilinear_expectations {
  double xp_sym = 0.0;   // <p_i x_i + x_i p_i>, equal for both axes
  double angular = 0.0;  // <p_1 x_2 - x_1 p_2>
  double cross = 0.0;    // <x_1 x_2> = <p_1 p_2>
};

// The bilinear expectation values that close the energy assembly: the
// symmetrized position-momentum product, the angular momentum, and the
// vanishing axis-mixing pairs.
inline bilinear_expectations expect_bilinears(const state_params& sp) {
  detail::check_state(sp, "expect_bilinears");
  bilinear_expectations b;
  b.xp_sym =
      (sp.n + sp.m + 1.0) * sp.rho * detail::effective_velocity(sp) / sp.a;
  b.angular = sp.n - sp.m;
  b.cross = 0.0;
  return b;
}

// Energy expectation at time t from the coefficient quadruple and a closed
// auxiliary solution:
//   (1/2)(n+m+1) [b rho^2 + a/rho^2 + (rho_dot^2 - 4 rho^2 d^2)/a]
//     + c (n - m),
// where the d term belongs to the generalized frameworks only (the other
// coefficient maps have d = 0 identically). A domain failure in any
// coefficient marks t as outside the physical window.
inline double energy_expectation(framework fw,
                                 const hamiltonian_coefficients& co,
                                 const ep_solution& ep, int n, int m,
                                 double t) {
  if (n < 0 || m < 0)
    throw error("energy_expectation: quantum numbers must be non-negative");
  double av, bv, cv, dv, rho, rho_dot;
  try {
    av = co.a(t);
    bv = co.b(t);
    cv = co.c(t);
    dv = (fw == framework::generalized_i || fw == framework::generalized_ii)
             ? co.d(t)
             : 0.0;
    rho = ep.rho(t);
    rho_dot = ep.rho.derivative()(t);
  } catch (const domain_error& de) {
    const time_expr joint = co.a + co.b + co.c + co.d + ep.rho;
    throw outside_physical_window(
        de.t, detail::most_negative_radicand(joint, de.t));
  }
  if (!(av > 0.0))
    throw error("energy_expectation: kinetic coefficient must be positive");
  if (!(rho > 0.0)) throw error("energy_expectation: rho must be positive");
  const double scale = n + m + 1.0;
  return 0.5 * scale *
             (bv * rho * rho + av / (rho * rho) +
              (rho_dot * rho_dot - 4.0 * rho * rho * dv * dv) / av) +
         cv * (n - m);
}

// Energy expectation over a grid, with out-of-window points dropped.
inline energy_profile sample_energy_profile(framework fw,
                                            const hamiltonian_coefficients& co,
                                            const ep_solution& ep, int n,
                                            int m,
                                            const std::vector<double>& grid) {
  energy_profile prof;
  prof.fw = fw;
  for (const double t : grid) {
    double value;
    try {
      value = energy_expectation(fw, co, ep, n, m, t);
    } catch (const outside_physical_window&) {
      continue;
    }
    prof.grid.push_back(t);
    prof.values.push_back(value);
  }
  return prof;
}

struct uncertainty_products {
  double dx_dy = 0.0;  // Delta x1 . Delta x2
  double dp_dp = 0.0;  // Delta p1 . Delta p2
  double dx_dp = 0.0;  // Delta x_i . Delta p_i, equal for both axes
};

// Uncertainty equalities of the commutative coordinate operators. Both
// position variances coincide, as do both momentum variances, so each
// product collapses to a single squared width.
inline uncertainty_products uncertainty_commutative(const state_params& sp) {
  detail::check_state(sp, "uncertainty_commutative");
  const double scale = sp.n + sp.m + 1.0;
  const double eff = detail::effective_velocity(sp);
  const double rho2 = sp.rho * sp.rho;
  uncertainty_products u;
  u.dx_dy = scale * rho2 / 2.0;
  u.dp_dp = scale / 2.0 * (1.0 / rho2 + eff * eff / (sp.a * sp.a));
  u.dx_dp = scale / (2.0 * sp.a) *
            std::sqrt(sp.a * sp.a + rho2 * eff * eff);
  return u;
}

struct nc_uncertainty_products {
  double dX_dY = 0.0;
  double dPX_dPY = 0.0;
  double dX_dPX = 0.0;
};

// Uncertainty equalities of the noncommutative operators, built from the
// second moments of the shifted coordinates. theta*Omega must not be
// positive; zero is the legitimate commutative limit, where the products
// reduce to uncertainty_commutative.
inline nc_uncertainty_products uncertainty_noncommutative(
    const state_params& sp, double theta, double capital_omega) {
  detail::check_state(sp, "uncertainty_noncommutative");
  const double product = theta * capital_omega;
  if (product > 0.0)
    throw sign_constraint_violated(
        "uncertainty_noncommutative: theta*Omega must not be positive");
  const double scale = sp.n + sp.m + 1.0;
  const double shift = sp.m - sp.n;
  const double eff = detail::effective_velocity(sp);
  const double rho2 = sp.rho * sp.rho;
  const double p2 = 1.0 / rho2 + eff * eff / (sp.a * sp.a);
  const double one_minus = 1.0 - product / 4.0;
  const double root = std::sqrt(-product);
  const double x_sq =
      scale / 2.0 *
          (rho2 * one_minus + theta * theta / 4.0 * p2 -
           theta * root * sp.rho * eff / (2.0 * sp.a)) -
      shift * theta / 2.0;
  const double p_sq =
      scale / 2.0 *
          (one_minus * p2 + capital_omega * capital_omega * rho2 / 4.0 +
           capital_omega * root * sp.rho * eff / (2.0 * sp.a)) -
      shift * capital_omega / 2.0;
  nc_uncertainty_products u;
  u.dX_dY = x_sq;
  u.dPX_dPY = p_sq;
  u.dX_dPX = std::sqrt(x_sq * p_sq);
  return u;
}

}  // namespace ncqo
