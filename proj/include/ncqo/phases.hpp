#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "ncqo/coefficients.hpp"
#include "ncqo/ermakov.hpp"
#include "ncqo/errors.hpp"
#include "ncqo/quadrature.hpp"
#include "ncqo/time_expr.hpp"

namespace ncqo {

enum class phase_method { quadrature, closed_form };

struct phase_result {
  double value = 0.0;  // radians
  phase_method method = phase_method::quadrature;
  double estimated_error = 0.0;
};

struct berry_result {
  double value = 0.0;      // from the a-weighted gauge
  double alt_value = 0.0;  // from the b-weighted gauge; congruent mod 2 pi
  double cycle_period = 0.0;
};

// The model systems whose phase integral reduces to elementary functions.
// Every other system goes through lewis_phase_quadrature.
enum class closed_phase_case {
  set_ib,                  // f = e^{-Gamma t}, omega = omega0: linear in t
  magnetic_set_i_case_ii,  // adds B = B0 e^{Gamma t}: still linear in t
  rational_k_neg2,         // rational decay: logarithmic in t
};

// Constants shared by the named model systems. field0 = 0 recovers the
// field-free oscillator, where the two magnetic cases collapse to set_ib.
struct model_constants {
  double mass = 1.0;
  double omega0 = 1.0;
  double sigma = 1.0;
  double delta = 1.0;
  double mu = 1.0;
  double gamma = 1.0;
  double chi = 1.0;
  double charge = 1.0;
  double field0 = 0.0;
};

namespace detail {

// Paired Gauss-Legendre evaluation on [lo, hi]; the order-doubling
// difference serves as the error estimate of the finer value.
template <typename F>
inline std::pair<double, double> gl_pair(const F& f, double lo, double hi) {
  static const quadrature_rule coarse = gauss_legendre(16);
  static const quadrature_rule fine = gauss_legendre(32);
  const double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
  double vc = 0.0, vf = 0.0;
  for (std::size_t i = 0; i < coarse.nodes.size(); ++i)
    vc += coarse.weights[i] * f(mid + half * coarse.nodes[i]);
  for (std::size_t i = 0; i < fine.nodes.size(); ++i)
    vf += fine.weights[i] * f(mid + half * fine.nodes[i]);
  return {half * vf, half * std::abs(vf - vc)};
}

struct panel_outcome {
  double value = 0.0;
  double error = 0.0;
};

// Recursive interval bisection around the paired rule. An interval that
// meets its share of the tolerance is accepted with its doubling error;
// the depth cap leaves the excess in `error` for the caller to judge.
template <typename F>
inline panel_outcome integrate_adaptive(const F& f, double lo, double hi,
                                        double tol, int depth = 0) {
  const auto [value, error] = gl_pair(f, lo, hi);
  if (error <= tol || depth >= 26) return {value, error};
  const double mid = 0.5 * (lo + hi);
  const panel_outcome left = integrate_adaptive(f, lo, mid, 0.5 * tol, depth + 1);
  const panel_outcome right =
      integrate_adaptive(f, mid, hi, 0.5 * tol, depth + 1);
  return {left.value + right.value, left.error + right.error};
}

// Most negative radicand of `e` at time t, or 0 if none is negative.
// Recovers the offending quantity after a domain failure inside an
// integrand, so the caller can report why the window was left.
inline double most_negative_radicand(const time_expr& e, double t) {
  double worst = 0.0;
  e.visit_radicands([&](const time_expr& radicand) {
    try {
      worst = std::min(worst, radicand(t));
    } catch (const error&) {
      // A nested failure means this radicand is not the explanation.
    }
  });
  return worst;
}

// Roots of e on [t0, t1] located by sign change plus bisection. Exact
// zeros sitting on a sample point are kept as-is. A constant expression
// has either no roots or nothing usable, so it reports none.
inline std::vector<double> sign_change_roots(const time_expr& e, double t0,
                                             double t1, int samples = 2048) {
  std::vector<double> roots;
  if (e.is_constant() || !(t1 > t0)) return roots;
  double prev_t = t0, prev_v = e(t0);
  for (int i = 1; i <= samples; ++i) {
    const double t = t0 + (t1 - t0) * i / samples;
    const double v = e(t);
    if (prev_v == 0.0) {
      if (prev_t != t0) roots.push_back(prev_t);
    } else if (v != 0.0 && std::signbit(v) != std::signbit(prev_v)) {
      double lo = prev_t, hi = t, v_lo = prev_v;
      while (hi - lo > 1e-15 * (1.0 + std::abs(hi))) {
        const double mid = 0.5 * (lo + hi);
        const double v_mid = e(mid);
        if (v_mid == 0.0) {
          lo = hi = mid;
        } else if (std::signbit(v_mid) == std::signbit(v_lo)) {
          lo = mid;
          v_lo = v_mid;
        } else {
          hi = mid;
        }
      }
      roots.push_back(0.5 * (lo + hi));
    }
    prev_t = t;
    prev_v = v;
  }
  return roots;
}

// A point where e dips to zero without crossing: a local minimum at the
// zero level. The curvature there separates quadratic touches from
// flatter (quartic and higher) ones.
struct zero_touch {
  double t = 0.0;
  double curvature = 0.0;
};

// Finds the zero-level minima of e on (t0, t1) by bisecting the sign
// changes of e' from falling to rising. Also reports the sampled scale of
// e and of e'', which calibrate the "is zero" and curvature thresholds.
struct touch_scan {
  std::vector<zero_touch> touches;
  double scale = 0.0;        // max |e| over the scan grid
  double curve_scale = 0.0;  // max |e''| over the scan grid
  double min_value = 0.0;    // most negative e seen
};

inline touch_scan scan_zero_touches(const time_expr& e, double t0, double t1,
                                    int samples = 2048) {
  touch_scan out;
  if (!(t1 > t0)) return out;
  const time_expr e_dot = e.derivative();
  const time_expr e_ddot = e_dot.derivative();
  for (int i = 0; i <= samples; ++i) {
    const double t = t0 + (t1 - t0) * i / samples;
    const double v = e(t);
    out.scale = std::max(out.scale, std::abs(v));
    out.min_value = std::min(out.min_value, v);
    out.curve_scale = std::max(out.curve_scale, std::abs(e_ddot(t)));
  }
  const double zero_tol = 1e-9 * (out.scale > 0.0 ? out.scale : 1.0);
  for (const double t : sign_change_roots(e_dot, t0, t1, samples)) {
    // Only falling-to-rising derivative changes are minima.
    const double step = (t1 - t0) * 1e-7;
    if (!(e_dot(std::max(t0, t - step)) < e_dot(std::min(t1, t + step))))
      continue;
    if (std::abs(e(t)) <= zero_tol) out.touches.push_back({t, e_ddot(t)});
  }
  return out;
}

// The square root of wp2 continued smoothly through its zero touches:
// at a quadratic touch the root changes sign, at a quartic touch it does
// not. Returns the flip times on (t0, t1).
inline std::vector<double> branch_flip_times(const time_expr& wp2, double t0,
                                             double t1) {
  const touch_scan scan = scan_zero_touches(wp2, t0, t1);
  if (scan.min_value < -1e-9 * (scan.scale > 0.0 ? scan.scale : 1.0))
    throw imaginary_effective_frequency(
        "effective frequency: a b - 4 d^2 goes negative inside the range");
  const double curve_tol = 1e-6 * (1.0 + scan.curve_scale);
  std::vector<double> flips;
  for (const zero_touch& touch : scan.touches)
    if (touch.curvature > curve_tol) flips.push_back(touch.t);
  return flips;
}

inline double branch_sign(const std::vector<double>& flips, double t) {
  int crossed = 0;
  for (const double flip : flips)
    if (flip < t) ++crossed;
  return crossed % 2 == 0 ? 1.0 : -1.0;
}

// Shared driver for the cycle integrals: integrates
//   sign(t) * w(t)/omega_p(t) * d/dt(d(t)/w(t))
// over [0, t_end] with panel edges at the zeros of d, at every zero touch
// of wp2 (keeping the removable points off the quadrature nodes), and at
// the branch flips.
inline panel_outcome weighted_cycle_integral(const time_expr& w,
                                             const time_expr& d,
                                             const time_expr& wp2,
                                             const std::vector<double>& flips,
                                             double t_end) {
  const time_expr ratio_dot = (d / w).derivative();
  std::vector<double> edges{0.0, t_end};
  for (const double t : sign_change_roots(d, 0.0, t_end)) edges.push_back(t);
  for (const zero_touch& touch : scan_zero_touches(wp2, 0.0, t_end).touches)
    edges.push_back(touch.t);
  for (const double t : flips) edges.push_back(t);
  std::sort(edges.begin(), edges.end());
  edges.erase(std::unique(edges.begin(), edges.end(),
                          [&](double x, double y) {
                            return std::abs(x - y) <= 1e-13 * (1.0 + t_end);
                          }),
              edges.end());

  panel_outcome total;
  double pilot = 0.0;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i)
    pilot += gl_pair([&](double t) { return w(t) / std::sqrt(wp2(t)) *
                                            ratio_dot(t); },
                     edges[i], edges[i + 1])
                 .first;
  const double tol_total = 1e-11 * (1.0 + std::abs(pilot));
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    const double lo = edges[i], hi = edges[i + 1];
    const double sign = branch_sign(flips, 0.5 * (lo + hi));
    const auto f = [&](double t) {
      return sign * w(t) / std::sqrt(wp2(t)) * ratio_dot(t);
    };
    const panel_outcome part =
        integrate_adaptive(f, lo, hi, tol_total * (hi - lo) / t_end);
    total.value += part.value;
    total.error += part.error;
  }
  if (total.error > 1e-9 * (1.0 + std::abs(total.value)))
    throw nonconvergent_integral(
        "cycle integral: panel refinement did not settle");
  return total;
}

}  // namespace detail

// Lewis phase (n+l) * integral_0^t of (c - a/rho^2) by adaptive composite
// Gauss-Legendre. The coefficients must stay real on [0, t]; a domain
// failure inside the integrand is reported as leaving the physical window
// together with the offending radicand.
inline phase_result lewis_phase_quadrature(const hamiltonian_coefficients& hc,
                                           const ep_solution& ep, int n, int l,
                                           double t) {
  if (t < 0.0) throw error("lewis_phase_quadrature: t must be non-negative");
  phase_result res;
  res.method = phase_method::quadrature;
  if (n + l == 0 || t == 0.0) return res;

  const time_expr integrand_expr = hc.c - hc.a / powi(ep.rho, 2);
  const auto f = [&](double tau) { return integrand_expr(tau); };
  try {
    const double pilot = detail::gl_pair(f, 0.0, t).first;
    const detail::panel_outcome out = detail::integrate_adaptive(
        f, 0.0, t, 1e-11 * (1.0 + std::abs(pilot)));
    if (out.error > 1e-9 * (1.0 + std::abs(out.value)))
      throw nonconvergent_integral(
          "lewis_phase_quadrature: panel refinement did not settle");
    res.value = (n + l) * out.value;
    res.estimated_error = std::abs(static_cast<double>(n + l)) * out.error;
    return res;
  } catch (const domain_error& de) {
    throw outside_physical_window(
        de.t, detail::most_negative_radicand(integrand_expr, de.t));
  }
}

namespace detail {

// The constant value of c(t) shared by the two elementary magnetic cases:
// the exponentially grown field makes c time independent, and the
// rationally decayed field makes (Gamma t + chi) c(t) this same constant.
// field0 = 0 reduces it to the field-free value
// sqrt((Delta - M omega0^2)/M) + omega0 sqrt(M sigma - 1).
inline double magnetic_constant_c(const model_constants& mc) {
  const double m = mc.mass, w0 = mc.omega0, q = mc.charge, b0 = mc.field0;
  const double stiffness = m * mc.delta - m * m * w0 * w0;
  if (stiffness < 0.0)
    throw complex_phase("closed phase: Delta - M*omega0^2 is negative");
  const double depth =
      q * q * b0 * b0 * mc.sigma / (4.0 * m) + w0 * w0 * (m * mc.sigma - 1.0);
  if (depth < 0.0)
    throw complex_phase(
        "closed phase: q^2 B0^2 sigma/(4M) + omega0^2 (M sigma - 1) is "
        "negative");
  const double s = std::sqrt(stiffness), r = std::sqrt(depth);
  const double denom = q * q * b0 * b0 + 4.0 * m * m * w0 * w0;
  const double bracket = (4.0 * m * m * w0 * w0 + 2.0 * q * b0 * s) * r -
                         2.0 * q * b0 * m * w0 * w0 -
                         q * q * b0 * b0 / m * s;
  return bracket / denom + s / m;
}

}  // namespace detail

// Elementary closed forms of the Lewis phase. Only the three model systems
// whose integral collapses to a linear or logarithmic function are
// supported; everything else must go through lewis_phase_quadrature.
inline phase_result lewis_phase_closed(closed_phase_case which,
                                       const model_constants& mc, int n, int l,
                                       double t) {
  phase_result res;
  res.method = phase_method::closed_form;
  const double mu2 = mc.mu * mc.mu;
  switch (which) {
    case closed_phase_case::set_ib: {
      const double stiffness = mc.delta - mc.mass * mc.omega0 * mc.omega0;
      const double depth = mc.mass * mc.sigma - 1.0;
      if (stiffness < 0.0)
        throw complex_phase("set-Ib phase: Delta - M*omega0^2 is negative");
      if (depth < 0.0)
        throw complex_phase("set-Ib phase: M*sigma is below 1");
      const double c0 = std::sqrt(stiffness / mc.mass) +
                        mc.omega0 * std::sqrt(depth);
      res.value = (n + l) * (c0 - mc.sigma / mu2) * t;
      return res;
    }
    case closed_phase_case::magnetic_set_i_case_ii: {
      const double c0 = detail::magnetic_constant_c(mc);
      res.value = (n + l) * (c0 - mc.sigma / mu2) * t;
      return res;
    }
    case closed_phase_case::rational_k_neg2: {
      const double c0 = detail::magnetic_constant_c(mc);
      res.value = (n + l) * (c0 - mc.sigma / mu2) *
                  std::log((mc.gamma * t + mc.chi) / mc.chi) / mc.gamma;
      return res;
    }
  }
  throw unsupported_case("lewis_phase_closed: unrecognized case");
}

// Adiabatic value of a/rho^2: omega_p (1 - a/omega_p^2 * d/dt(d/a)) with
// omega_p = sqrt(a b - 4 d^2) and the derivative taken symbolically.
inline double adiabatic_a_over_rho2(const hamiltonian_coefficients& hc,
                                    double t) {
  const time_expr wp2 = hc.a * hc.b - 4.0 * hc.d * hc.d;
  const double v = wp2(t);
  if (!(v > 0.0))
    throw imaginary_effective_frequency(
        "adiabatic_a_over_rho2: a b - 4 d^2 is not positive at t");
  const double ratio_dot = (hc.d / hc.a).derivative()(t);
  return std::sqrt(v) * (1.0 - hc.a(t) / v * ratio_dot);
}

// Pointwise geometric-phase integrand a/omega_p * d/dt(d/a), with omega_p
// the square root of a b - 4 d^2 continued smoothly from t = 0: its sign
// flips at each quadratic zero touch passed along the way, which is what
// keeps the integrand a plain constant in systems where the naive positive
// root would alternate.
inline double berry_integrand(const hamiltonian_coefficients& hc, double t) {
  const time_expr wp2 = hc.a * hc.b - 4.0 * hc.d * hc.d;
  const double v = wp2(t);
  if (!(v > 0.0))
    throw imaginary_effective_frequency(
        "berry_integrand: a b - 4 d^2 is not positive at t");
  double sign = 1.0;
  if (t > 0.0)
    sign = detail::branch_sign(detail::branch_flip_times(wp2, 0.0, t), t);
  const double ratio_dot = (hc.d / hc.a).derivative()(t);
  return sign * hc.a(t) / std::sqrt(v) * ratio_dot;
}

// Geometric phase over one parameter cycle of period 2 pi / f, computed in
// both gauges: value from the a-weighted integrand, alt_value from the
// b-weighted one. They agree only modulo 2 pi, because the boundary term
// relating the gauges jumps by pi at each zero of d.
inline berry_result berry_phase(const hamiltonian_coefficients& hc, double f,
                                int n, int l) {
  if (!(f > 0.0)) throw error("berry_phase: cycle frequency must be positive");
  const double period = 2.0 * std::numbers::pi / f;

  const time_expr* coeffs[] = {&hc.a, &hc.b, &hc.c, &hc.d};
  for (const time_expr* e : coeffs) {
    const double v0 = (*e)(0.0), v1 = (*e)(period);
    if (std::abs(v1 - v0) > 1e-9 * (1.0 + std::abs(v0)))
      throw periodicity_violated(
          "berry_phase: a coefficient does not close after one cycle");
  }

  const time_expr wp2 = hc.a * hc.b - 4.0 * hc.d * hc.d;
  const std::vector<double> flips =
      detail::branch_flip_times(wp2, 0.0, period);

  berry_result res;
  res.cycle_period = period;
  res.value =
      (n + l) *
      detail::weighted_cycle_integral(hc.a, hc.d, wp2, flips, period).value;
  res.alt_value =
      -(n + l) *
      detail::weighted_cycle_integral(hc.b, hc.d, wp2, flips, period).value;
  return res;
}

// Running geometric-phase integral (n+l) * integral_0^t of the smoothly
// continued integrand: the curve whose cycle endpoint is the Berry phase.
inline double berry_partial(const hamiltonian_coefficients& hc, int n, int l,
                            double t) {
  if (t < 0.0) throw error("berry_partial: t must be non-negative");
  if (t == 0.0 || n + l == 0) return 0.0;
  const time_expr wp2 = hc.a * hc.b - 4.0 * hc.d * hc.d;
  const std::vector<double> flips = detail::branch_flip_times(wp2, 0.0, t);
  return (n + l) *
         detail::weighted_cycle_integral(hc.a, hc.d, wp2, flips, t).value;
}

}  // namespace ncqo
