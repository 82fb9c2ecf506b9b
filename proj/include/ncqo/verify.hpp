#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ncqo/coefficients.hpp"
#include "ncqo/csv.hpp"
#include "ncqo/ermakov.hpp"
#include "ncqo/errors.hpp"
#include "ncqo/figures.hpp"
#include "ncqo/laguerre.hpp"
#include "ncqo/observables.hpp"
#include "ncqo/phases.hpp"
#include "ncqo/scenario.hpp"
#include "ncqo/time_expr.hpp"

namespace ncqo {

// Knobs of the verification suite. tolerance_override replaces every
// check's own tolerance. berry_integrand_sign is a deliberate mutation
// hook for testing the suite itself: it multiplies the geometric-phase
// integral before comparison, so -1 must fail the sign-sensitive berry
// checks and leave every other check untouched.
struct verify_options {
  std::optional<double> tolerance_override;
  double berry_integrand_sign = 1.0;
};

struct check_row {
  std::string name;
  double residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct verification_report {
  std::vector<check_row> rows;

  bool all_pass() const {
    return std::all_of(rows.begin(), rows.end(),
                       [](const check_row& r) { return r.pass; });
  }

  csv_table to_csv() const {
    csv_table out;
    out.metadata.push_back("verification = " + std::to_string(rows.size()) +
                           " checks");
    out.header = {"check", "status", "residual", "tolerance"};
    for (const check_row& r : rows)
      out.rows.push_back({r.name, r.pass ? "pass" : "fail",
                          csv_number(r.residual), csv_number(r.tolerance)});
    return out;
  }
};

// One registered check: the residual function returns a non-negative
// defect that must stay at or below the tolerance.
struct verify_check {
  std::string name;
  double tolerance = 0.0;
  std::function<double(const verify_options&)> residual;
};

inline constexpr int verify_check_count = 36;

namespace detail {

// The six solution-family instances the analytic checks run on. The two
// exponential entries share constants; the rest pick the simplest values
// satisfying each family's constraint.
struct family_case {
  std::string tag;
  ep_solution ep;
};

inline std::vector<family_case> verification_families() {
  std::vector<family_case> out;
  out.push_back({"exponential", ep_exponential(1.0, 1.25, 1.0, 1.0)});
  out.push_back(
      {"exponential-shifted", ep_exponential(1.0, 1.25, 1.0, 1.0, 2.0)});
  out.push_back({"rational-k1", ep_rational(1, 1.0, 10.0 / 9.0, 1.0, 1.0, 1.0)});
  out.push_back(
      {"rational-k2", ep_rational(2, 1.0, 17.0 / 16.0, 1.0, 1.0, 1.0)});
  out.push_back(
      {"rational-neg2", ep_rational(-2, 2.0, 17.0 / 8.0, 1.0, 1.0, 1.0)});
  out.push_back({"elementary", ep_elementary(2.0, 2.0, 1.0, 1.0, 1.0)});
  return out;
}

// Largest auxiliary-equation defect over 200 points of (0, 5/Gamma],
// scaled by the local size 1 + a^2/rho^3 of the nonlinear term.
inline double ep_residual_scaled_max(const ep_solution& ep) {
  double worst = 0.0;
  const double t_end = 5.0 / ep.gamma;
  for (int i = 1; i <= 200; ++i) {
    const double t = t_end * (static_cast<double>(i) / 200.0);
    const double a = ep.a(t);
    const double rho = ep.rho(t);
    const double scale = 1.0 + a * a / (rho * rho * rho);
    worst = std::max(worst, std::abs(ep_residual(ep, t)) / scale);
  }
  return worst;
}

// Largest deviation between the closed-form rho and the RK4 integration
// started from the same initial data, over [0, 5/Gamma].
inline double ep_oracle_deviation(const ep_solution& ep) {
  const double t_end = 5.0 / ep.gamma;
  std::vector<double> grid;
  grid.reserve(51);
  for (int i = 0; i <= 50; ++i)
    grid.push_back(t_end * (static_cast<double>(i) / 50.0));
  const time_expr rho_dot = ep.rho.derivative();
  const std::vector<double> numeric =
      integrate_ep(ep.a, ep.b, ep.d, ep.rho(0.0), rho_dot(0.0), grid);
  double worst = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i)
    worst = std::max(worst, std::abs(numeric[i] - ep.rho(grid[i])));
  return worst;
}

inline double chiellini_deviation(const ep_solution& ep, double q_expect,
                                  double lambda_expect) {
  const chiellini_report rep = chiellini_check(ep);
  return std::max({std::abs(rep.q - q_expect),
                   std::abs(rep.lambda_q - lambda_expect),
                   rep.condition_residual, rep.eta_residual});
}

// Constants shared by the magnetic phase checks: M = q = B0 = omega0 =
// Gamma = chi = mu = 1, sigma = 2, Delta = 17/8 (satisfies both the
// exponential and the k = -2 rational auxiliary constraints).
inline model_constants verification_magnetic_constants() {
  model_constants mc;
  mc.sigma = 2.0;
  mc.delta = 2.125;
  mc.field0 = 1.0;
  return mc;
}

inline double verification_theta_amp() { return 1.6 * (std::sqrt(1.5) - 0.5); }
inline double verification_omega_amp() {
  return 2.0 * std::sqrt(1.125) - 1.0;
}

// Largest quadrature-versus-closed-form gap at t in {0.5, 1, 2, 5}.
inline double lewis_gap(const hamiltonian_coefficients& hc,
                        const ep_solution& ep, closed_phase_case which,
                        const model_constants& mc) {
  double worst = 0.0;
  for (const double t : {0.5, 1.0, 2.0, 5.0}) {
    const double quad = lewis_phase_quadrature(hc, ep, 1, 0, t).value;
    const double closed = lewis_phase_closed(which, mc, 1, 0, t).value;
    worst = std::max(worst, std::abs(quad - closed));
  }
  return worst;
}

inline double lewis_set_ib_gap() {
  model_constants mc;
  mc.delta = 1.25;
  const hamiltonian_coefficients hc = coeffs_standard(
      time_expr::exponential(-1.0), time_expr::constant(1.0),
      time_expr::constant(0.0), time_expr::exponential(1.0), 1.0);
  return lewis_gap(hc, ep_exponential(1.0, 1.25, 1.0, 1.0),
                   closed_phase_case::set_ib, mc);
}

inline double lewis_magnetic_gap() {
  const hamiltonian_coefficients hc = coeffs_magnetic(
      time_expr::exponential(-1.0), time_expr::constant(1.0),
      time_expr::exponential(1.0),
      verification_theta_amp() * time_expr::exponential(-1.0),
      verification_omega_amp() * time_expr::exponential(1.0), 1.0, 1.0);
  return lewis_gap(hc, ep_exponential(2.0, 2.125, 1.0, 1.0),
                   closed_phase_case::magnetic_set_i_case_ii,
                   verification_magnetic_constants());
}

inline double lewis_rational_neg2_gap() {
  const time_expr up = time_expr::linear_power(1.0, 1.0, 1.0);
  const time_expr down = time_expr::linear_power(1.0, 1.0, -1.0);
  const hamiltonian_coefficients hc = coeffs_magnetic(
      time_expr::constant(1.0), down, down, verification_theta_amp() * up,
      verification_omega_amp() * down, 1.0, 1.0);
  return lewis_gap(hc, ep_rational(-2, 2.0, 2.125, 1.0, 1.0, 1.0),
                   closed_phase_case::rational_k_neg2,
                   verification_magnetic_constants());
}

// Cyclic systems for the geometric-phase checks, all at unit mass and
// frequency with coupling amplitudes 2 and drive f = 1/2.
inline double berry_drive() { return 0.5; }

inline hamiltonian_coefficients berry_cosine_coupled() {
  return coeffs_generalized_I(
      time_expr::constant(1.0), time_expr::constant(0.5),
      time_expr::cosine(berry_drive()) / std::numbers::sqrt2,
      time_expr::constant(0.0), time_expr::constant(0.0));
}

inline hamiltonian_coefficients berry_cubed_sine() {
  const time_expr s = time_expr::sine(berry_drive());
  return coeffs_generalized_I(time_expr::constant(1.0), 0.5 * powi(s, 6),
                              powi(s, 3) / std::numbers::sqrt2,
                              time_expr::constant(0.0),
                              2.0 * time_expr::cosine(berry_drive()));
}

inline hamiltonian_coefficients berry_sine_driven() {
  const time_expr s = time_expr::sine(berry_drive());
  return coeffs_generalized_I(time_expr::constant(1.0),
                              time_expr::constant(0.5),
                              time_expr::constant(1.0 / std::numbers::sqrt2),
                              2.0 * s, 2.0 * s);
}

inline hamiltonian_coefficients berry_opposed_cosine() {
  const time_expr c = time_expr::cosine(berry_drive());
  return coeffs_generalized_II(time_expr::constant(1.0),
                               time_expr::constant(0.5), 2.0 * c, -2.0 * c,
                               2.0 * std::numbers::pi / berry_drive());
}

inline hamiltonian_coefficients berry_scaled_sine() {
  const time_expr s2 = powi(time_expr::sine(berry_drive()), 2);
  return coeffs_generalized_II(s2, 0.5 * s2, time_expr::constant(2.0),
                               time_expr::constant(-2.0),
                               2.0 * std::numbers::pi / berry_drive());
}

inline double berry_cycle_gap(const hamiltonian_coefficients& hc,
                              double expected, double sign) {
  const berry_result r = berry_phase(hc, berry_drive(), 1, 0);
  return std::abs(sign * r.value - expected);
}

// Worst wrap defect between the two gauge evaluations across all five
// cyclic systems; the two gauges must agree modulo 2 pi.
inline double berry_congruence_defect(double sign) {
  const hamiltonian_coefficients systems[] = {
      berry_cosine_coupled(), berry_cubed_sine(), berry_sine_driven(),
      berry_opposed_cosine(), berry_scaled_sine()};
  double worst = 0.0;
  for (const hamiltonian_coefficients& hc : systems) {
    const berry_result r = berry_phase(hc, berry_drive(), 1, 0);
    worst = std::max(worst, std::abs(std::remainder(
                                sign * r.value - r.alt_value,
                                2.0 * std::numbers::pi)));
  }
  return worst;
}

// Envelope states the matrix-element checks sweep: the ground envelope,
// a moving one, and one with velocity cross coupling.
inline std::vector<state_params> verification_states() {
  std::vector<state_params> out(3);
  out[1].rho = 1.3;
  out[1].rho_dot = 0.7;
  out[1].a = 2.0;
  out[2].rho = 0.8;
  out[2].rho_dot = -0.4;
  out[2].a = 1.5;
  out[2].d = 0.3;
  return out;
}

// Closed-form elements against the direct wavefunction integrals, both
// axes, all n, m, m' up to 4 and powers up to 4, scaled by 1 + |value|.
inline double matrix_element_agreement() {
  double worst = 0.0;
  for (const state_params& sp : verification_states())
    for (int n = 0; n <= 4; ++n)
      for (int m = 0; m <= 4; ++m)
        for (int mp = 0; mp <= 4; ++mp)
          for (int k = 0; k <= 4; ++k) {
            const std::complex<double> cx = matrix_element_xk(n, m, mp, k, sp);
            const std::complex<double> ox =
                oracle_matrix_element(axis::x, k, n, m, mp, sp);
            worst = std::max(worst, std::abs(cx - ox) / (1.0 + std::abs(cx)));
            const std::complex<double> cy = matrix_element_yk(n, m, mp, k, sp);
            const std::complex<double> oy =
                oracle_matrix_element(axis::y, k, n, m, mp, sp);
            worst = std::max(worst, std::abs(cy - oy) / (1.0 + std::abs(cy)));
          }
  return worst;
}

// The diagonal second moment must equal rho^2 (n + m + 1) / 2 exactly.
inline double matrix_element_diagonal_square_gap() {
  double worst = 0.0;
  for (const state_params& sp : verification_states())
    for (int n = 0; n <= 4; ++n)
      for (int m = 0; m <= 4; ++m) {
        const std::complex<double> got = matrix_element_xk(n, m, m, 2, sp);
        const double want = sp.rho * sp.rho * (n + m + 1) / 2.0;
        worst = std::max(worst, std::abs(got - want) / (1.0 + want));
      }
  return worst;
}

// Energy profile of the shifted exponential family in the modified
// framework: starts at 2.25, rises monotonically, levels at 3.75.
inline double energy_modified_shape_defect() {
  const ep_solution ep = ep_exponential(1.0, 1.25, 1.0, 1.0, 2.0);
  const hamiltonian_coefficients co{ep.a, ep.b, time_expr::constant(0.0),
                                    ep.d};
  double worst = 0.0;
  double prev = 0.0;
  for (int i = 0; i <= 200; ++i) {
    const double t = 20.0 * (static_cast<double>(i) / 200.0);
    const double e =
        energy_expectation(framework::generalized_ii, co, ep, 1, 1, t);
    if (i == 0)
      worst = std::max(worst, std::abs(e - 2.25));
    else
      worst = std::max(worst, prev - e);
    if (i == 200) worst = std::max(worst, std::abs(e - 3.75));
    prev = e;
  }
  return worst;
}

// The plain exponential family in the standard framework keeps the same
// system at constant energy.
inline double energy_standard_flat_defect() {
  const ep_solution ep = ep_exponential(1.0, 1.25, 1.0, 1.0);
  const hamiltonian_coefficients co{ep.a, ep.b, time_expr::constant(0.0),
                                    ep.d};
  double lo = 0.0, hi = 0.0;
  for (int i = 0; i <= 200; ++i) {
    const double t = 20.0 * (static_cast<double>(i) / 200.0);
    const double e =
        energy_expectation(framework::generalized_i, co, ep, 1, 1, t);
    if (i == 0) lo = hi = e;
    lo = std::min(lo, e);
    hi = std::max(hi, e);
  }
  return hi - lo;
}

// Both k = 1 rational systems decay like 1/t: the log-log slope fitted
// over Gamma t in [10, 100] must be -1.
inline double energy_rational_slope_defect() {
  double worst = 0.0;
  for (int which = 0; which < 2; ++which) {
    const ep_solution ep = which == 0
                               ? ep_rational(1, 1.0, 2.0, 1.0, 1.0, 1.0, 1.0)
                               : ep_rational(1, 1.0, 10.0 / 9.0, 1.0, 1.0, 1.0);
    const framework fw =
        which == 0 ? framework::generalized_ii : framework::generalized_i;
    const hamiltonian_coefficients co{ep.a, ep.b, time_expr::constant(0.0),
                                      ep.d};
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    const int pts = 41;
    for (int i = 0; i < pts; ++i) {
      const double x = std::log(10.0) + (std::log(100.0) - std::log(10.0)) *
                                            (static_cast<double>(i) / 40.0);
      const double t = std::exp(x);
      const double y =
          std::log(energy_expectation(fw, co, ep, 1, 1, t));
      sx += x;
      sy += y;
      sxx += x * x;
      sxy += x * y;
    }
    const double slope = (pts * sxy - sx * sy) / (pts * sxx - sx * sx);
    worst = std::max(worst, std::abs(slope + 1.0));
  }
  return worst;
}

// The damped-oscillator figure's first parameter set must be physical
// exactly on [0, ln(M sigma) / Gamma] at its catalogued constants.
inline double energy_window_bounds_defect() {
  const figure_data fig = figure_dho_fig1();
  const std::vector<time_interval>& window = fig.curves.front().window;
  if (window.size() != 1) return 1.0;
  return std::max(std::abs(window.front().lo),
                  std::abs(window.front().hi - std::log(1e7)));
}

// Integer weights only: half-integer weights converge merely
// algebraically on standard Gauss-Laguerre nodes and cannot meet this
// tolerance (see the weighted-integral test for the loose-tolerance case).
inline double laguerre_orthonormality_defect() {
  double worst = 0.0;
  for (const double alpha : {0.0, 1.0, 2.0, 3.0})
    for (int n = 0; n <= 6; ++n)
      for (int m = 0; m <= 6; ++m) {
        const double got =
            laguerre_weighted_integral(alpha, {n, alpha}, {m, alpha});
        const double want =
            n == m ? std::exp(std::lgamma(n + alpha + 1.0) -
                              std::lgamma(n + 1.0))
                   : 0.0;
        worst = std::max(worst, std::abs(got - want) / (1.0 + want));
      }
  return worst;
}

inline double laguerre_power_moment_defect() {
  double worst = 0.0;
  for (int n = 0; n <= 6; ++n)
    for (const double k : {0.0, 1.0, 2.0})
      for (int p = 0; p <= 1; ++p) {
        const auto [lhs, rhs] = verify_power_moment_identity(n, k, p);
        worst = std::max(worst, std::abs(lhs - rhs) / (1.0 + std::abs(rhs)));
      }
  return worst;
}

inline double laguerre_two_integral_defect() {
  double worst = 0.0;
  for (int m = 2; m <= 6; ++m)
    for (int n = m; n <= 6; ++n)
      worst = std::max(worst, std::abs(verify_appendix_identity(n, m)));
  return worst;
}

// The p = 2 power moment is a documented counterexample: the quadrature
// gives 14 where the p <= 1 closed form would give 9. This row passes
// when that mismatch is reproduced, not when the identity holds.
inline double laguerre_p2_counterexample_defect() {
  const auto [lhs, rhs] = verify_power_moment_identity(1, 0.0, 2);
  return std::max(std::abs(lhs - 14.0), std::abs(rhs - 9.0));
}

inline double uncertainty_cross_fold_defect() {
  state_params sp;
  sp.rho = 1.3;
  sp.rho_dot = 0.7;
  sp.a = 2.0;
  sp.n = 1;
  const uncertainty_products base = uncertainty_commutative(sp);
  double worst = 0.0;
  for (const double d : {1e-13, 1e-14}) {
    state_params folded = sp;
    folded.d = d;
    const uncertainty_products u = uncertainty_commutative(folded);
    worst = std::max({worst, std::abs(u.dx_dy - base.dx_dy),
                      std::abs(u.dp_dp - base.dp_dp),
                      std::abs(u.dx_dp - base.dx_dp)});
  }
  return worst;
}

inline double uncertainty_commutative_limit_defect() {
  state_params sp;
  sp.rho = 1.3;
  sp.rho_dot = 0.7;
  sp.a = 2.0;
  sp.n = 1;
  sp.m = 1;
  const uncertainty_products base = uncertainty_commutative(sp);
  double worst = 0.0;
  for (const double theta : {1e-11, -1e-11}) {
    const nc_uncertainty_products u =
        uncertainty_noncommutative(sp, theta, -theta);
    worst = std::max({worst, std::abs(u.dX_dY - base.dx_dy),
                      std::abs(u.dPX_dPY - base.dp_dp),
                      std::abs(u.dX_dPX - base.dx_dp)});
  }
  return worst;
}

inline double uncertainty_ground_defect() {
  const state_params ground;
  return std::abs(uncertainty_commutative(ground).dx_dp - 0.5);
}

}  // namespace detail

// The full registry. Names are stable identifiers grouped by a prefix
// (ep-residual-, ep-oracle-, chiellini-, lewis-, berry-, matrix-element-,
// energy-, laguerre-, uncertainty-) so reports can be partitioned.
inline const std::vector<verify_check>& verify_checks() {
  static const std::vector<verify_check> checks = [] {
    std::vector<verify_check> list;
    const auto add = [&list](std::string name, double tol,
                             std::function<double(const verify_options&)> fn) {
      list.push_back({std::move(name), tol, std::move(fn)});
    };

    for (const detail::family_case& fc : detail::verification_families()) {
      const ep_solution ep = fc.ep;
      add("ep-residual-" + fc.tag, 1e-9, [ep](const verify_options&) {
        return detail::ep_residual_scaled_max(ep);
      });
    }
    for (const detail::family_case& fc : detail::verification_families()) {
      const ep_solution ep = fc.ep;
      add("ep-oracle-" + fc.tag, 1e-6, [ep](const verify_options&) {
        return detail::ep_oracle_deviation(ep);
      });
    }

    add("chiellini-exponential", 1e-10, [](const verify_options&) {
      return detail::chiellini_deviation(ep_exponential(1.0, 1.25, 1.0, 1.0),
                                         0.25, -2.0);
    });
    add("chiellini-rational-k2", 1e-10, [](const verify_options&) {
      return detail::chiellini_deviation(
          ep_rational(2, 1.0, 17.0 / 16.0, 1.0, 1.0, 1.0), 0.1875, -4.0);
    });

    add("lewis-set-ib-closed", 1e-9, [](const verify_options&) {
      return detail::lewis_set_ib_gap();
    });
    add("lewis-magnetic-grown-field", 1e-9, [](const verify_options&) {
      return detail::lewis_magnetic_gap();
    });
    add("lewis-rational-neg2", 1e-9, [](const verify_options&) {
      return detail::lewis_rational_neg2_gap();
    });

    add("berry-standard-cosine-cycle", 1e-8, [](const verify_options& o) {
      return detail::berry_cycle_gap(detail::berry_cosine_coupled(),
                                     -std::numbers::pi,
                                     o.berry_integrand_sign);
    });
    add("berry-cubed-sine-cycle", 1e-8, [](const verify_options& o) {
      return detail::berry_cycle_gap(
          detail::berry_cubed_sine(),
          1.5 * std::numbers::pi / std::numbers::sqrt2,
          o.berry_integrand_sign);
    });
    add("berry-sine-driven-cycle", 1e-8, [](const verify_options& o) {
      return detail::berry_cycle_gap(detail::berry_sine_driven(), 0.0,
                                     o.berry_integrand_sign);
    });
    add("berry-opposed-cosine-cycle", 1e-8, [](const verify_options& o) {
      return detail::berry_cycle_gap(detail::berry_opposed_cosine(), 0.0,
                                     o.berry_integrand_sign);
    });
    add("berry-scaled-sine-cycle", 1e-8, [](const verify_options& o) {
      return detail::berry_cycle_gap(detail::berry_scaled_sine(), 0.0,
                                     o.berry_integrand_sign);
    });
    add("berry-gauge-congruence", 1e-6, [](const verify_options& o) {
      return detail::berry_congruence_defect(o.berry_integrand_sign);
    });

    add("matrix-element-oracle-agreement", 1e-6, [](const verify_options&) {
      return detail::matrix_element_agreement();
    });
    add("matrix-element-diagonal-square", 1e-12, [](const verify_options&) {
      return detail::matrix_element_diagonal_square_gap();
    });

    add("energy-modified-exponential-shape", 1e-6, [](const verify_options&) {
      return detail::energy_modified_shape_defect();
    });
    add("energy-standard-flat", 1e-9, [](const verify_options&) {
      return detail::energy_standard_flat_defect();
    });
    add("energy-rational-decay-slope", 0.05, [](const verify_options&) {
      return detail::energy_rational_slope_defect();
    });
    add("energy-window-bounds", 1e-6, [](const verify_options&) {
      return detail::energy_window_bounds_defect();
    });

    add("laguerre-orthonormality", 1e-9, [](const verify_options&) {
      return detail::laguerre_orthonormality_defect();
    });
    add("laguerre-power-moment", 1e-9, [](const verify_options&) {
      return detail::laguerre_power_moment_defect();
    });
    add("laguerre-two-integral-identity", 1e-9, [](const verify_options&) {
      return detail::laguerre_two_integral_defect();
    });
    add("laguerre-power-moment-p2-mismatch", 1e-9, [](const verify_options&) {
      return detail::laguerre_p2_counterexample_defect();
    });

    add("uncertainty-cross-fold-limit", 1e-12, [](const verify_options&) {
      return detail::uncertainty_cross_fold_defect();
    });
    add("uncertainty-commutative-limit", 1e-10, [](const verify_options&) {
      return detail::uncertainty_commutative_limit_defect();
    });
    add("uncertainty-ground-product", 1e-12, [](const verify_options&) {
      return detail::uncertainty_ground_defect();
    });

    return list;
  }();
  return checks;
}

inline verification_report verify_all(const verify_options& opt = {}) {
  verification_report rep;
  rep.rows.reserve(verify_checks().size());
  for (const verify_check& check : verify_checks()) {
    check_row row;
    row.name = check.name;
    row.tolerance = opt.tolerance_override.value_or(check.tolerance);
    row.residual = check.residual(opt);
    row.pass = row.residual <= row.tolerance;
    rep.rows.push_back(std::move(row));
  }
  return rep;
}

}  // namespace ncqo
