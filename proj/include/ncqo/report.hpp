#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "ncqo/csv.hpp"
#include "ncqo/ermakov.hpp"
#include "ncqo/errors.hpp"
#include "ncqo/observables.hpp"
#include "ncqo/phases.hpp"
#include "ncqo/scenario.hpp"

namespace ncqo {

inline std::string ep_family_name(ep_family f) {
  switch (f) {
    case ep_family::exponential: return "exponential";
    case ep_family::rational: return "rational";
    case ep_family::rational_neg2: return "rational-neg2";
    case ep_family::elementary: return "elementary";
  }
  return "?";
}

// Builds the solution family a scenario declares from its constants. The
// family constructors validate their constraint relation, so a violating
// configuration surfaces as constraint_violated right here.
inline ep_solution scenario_ep_solution(const scenario& sc) {
  if (!sc.family)
    throw parse_error(
        "ermakov.family: the scenario declares no solution family");
  switch (*sc.family) {
    case ep_family::exponential:
      return ep_exponential(sc.k.sigma, sc.k.delta, sc.k.mu, sc.k.gamma,
                            sc.k.pole_shift);
    case ep_family::rational:
    case ep_family::rational_neg2: {
      std::optional<double> d_const;
      if (sc.k.d_coeff != 0.0) d_const = sc.k.d_coeff;
      return ep_rational(sc.family_k, sc.k.sigma, sc.k.delta, sc.k.mu,
                         sc.k.chi, sc.k.gamma, d_const);
    }
    case ep_family::elementary:
      return ep_elementary(sc.k.sigma, sc.k.delta, sc.k.mu, sc.k.chi,
                           sc.k.gamma);
  }
  throw error("scenario_ep_solution: corrupt family tag");
}

// Uniformly spaced sampling grid with steps + 1 points; steps = 0 collapses
// to the single point t0.
inline std::vector<double> uniform_grid(double t0, double t1, int steps) {
  if (steps < 0) throw error("uniform_grid: steps must be non-negative");
  if (!(t1 >= t0)) throw error("uniform_grid: t1 must not precede t0");
  std::vector<double> grid;
  grid.reserve(static_cast<std::size_t>(steps) + 1);
  for (int i = 0; i <= steps; ++i)
    grid.push_back(t0 + (t1 - t0) *
                            (static_cast<double>(i) / std::max(steps, 1)));
  return grid;
}

// Evaluates a scenario over a grid: one row per in-window point carrying
// the accumulated phase, the energy expectation and the three uncertainty
// products of the state (n, m). Metadata records the framework, the family
// and the physical-window boundaries; an empty grid yields a header-only
// table. The parameter functions must reproduce the declared family's
// coefficients, otherwise the report would mix two different systems.
inline csv_table run_scenario(const scenario& sc,
                              const std::vector<double>& grid) {
  const ep_solution ep = scenario_ep_solution(sc);
  double horizon = 10.0;
  for (double t : grid) horizon = std::max(horizon, t);
  const hamiltonian_coefficients co = build_coefficients(sc, horizon);
  const std::vector<time_interval> window = physical_window(sc, horizon);

  if (!window.empty()) {
    const time_interval& w0 = window.front();
    double mismatch = 0.0;
    for (int i = 0; i < 5; ++i) {
      const double t = w0.lo + (w0.hi - w0.lo) * (i + 0.5) / 5.0;
      const auto rel = [](double got, double want) {
        return std::abs(got - want) /
               std::max({1e-30, std::abs(got), std::abs(want)});
      };
      mismatch = std::max({mismatch, rel(co.a(t), ep.a(t)),
                           rel(co.b(t), ep.b(t))});
      const double d_scale =
          std::max({1.0, std::abs(co.d(t)), std::abs(ep.d(t))});
      mismatch =
          std::max(mismatch, std::abs(co.d(t) - ep.d(t)) / d_scale);
    }
    if (mismatch > 1e-6)
      throw constraint_violated(
          "scenario functions must reproduce the declared solution family",
          mismatch);
  }

  csv_table out;
  out.metadata.push_back("framework = " + framework_name(sc.fw));
  out.metadata.push_back("family = " + ep_family_name(ep.family));
  out.metadata.push_back("state = n = " + std::to_string(sc.n) +
                         ", m = " + std::to_string(sc.m));
  for (const time_interval& w : window)
    out.metadata.push_back("window = [" + csv_number(w.lo) + ", " +
                           csv_number(w.hi) + "]");
  out.header = {"t",           "Gamma_t",         "lewis_phase",
                "energy",      "delta_x_delta_y", "delta_p_delta_p",
                "delta_x_delta_p"};

  const time_expr rho_dot = ep.rho.derivative();
  for (double t : grid) {
    bool inside = false;
    for (const time_interval& w : window)
      if (t >= w.lo && t <= w.hi) {
        inside = true;
        break;
      }
    if (!inside) continue;
    try {
      const double phase =
          lewis_phase_quadrature(co, ep, sc.n, sc.m, t).value;
      const double en = energy_expectation(sc.fw, co, ep, sc.n, sc.m, t);
      state_params sp;
      sp.rho = ep.rho(t);
      sp.rho_dot = rho_dot(t);
      sp.a = ep.a(t);
      sp.d = co.d(t);
      sp.n = sc.n;
      sp.m = sc.m;
      const uncertainty_products u = uncertainty_commutative(sp);
      out.rows.push_back({csv_number(t), csv_number(sc.k.gamma * t),
                          csv_number(phase), csv_number(en),
                          csv_number(u.dx_dy), csv_number(u.dp_dp),
                          csv_number(u.dx_dp)});
    } catch (const outside_physical_window&) {
      continue;
    }
  }
  return out;
}

}  // namespace ncqo
