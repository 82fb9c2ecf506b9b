#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "ncqo/errors.hpp"
#include "ncqo/time_expr.hpp"

namespace ncqo {

enum class ep_family { exponential, rational, rational_neg2, elementary };

// A closed-form solution of the auxiliary equation
//   rho_ddot - (a_dot/a) rho_dot
//     + rho (a b - 2 d_dot - 4 d^2 + 2 (a_dot/a) d) = a^2 / rho^3
// together with the family constants that entered it. Constructors validate
// the family's constraint relation, so a held ep_solution is always
// consistent (ep_residual vanishes identically up to roundoff).
struct ep_solution {
  ep_family family;
  time_expr a, b, rho, d;
  double sigma = 0.0, delta = 0.0, mu = 0.0, gamma = 0.0, chi = 0.0;
  std::optional<double> c_const;  // pole-shift constant of the exponential d
  std::optional<double> d_const;  // coefficient of the rational d
  int k = 0;
};

// Constancy report for the integrability structure of a solution family:
// with g = -a_dot/a and h the restoring bracket, d(h/g)/drho = q g must
// hold for a constant q and rho_dot = lambda_q h/g for a constant lambda_q.
struct chiellini_report {
  double q = 0.0;
  double lambda_q = 0.0;
  double condition_residual = 0.0;
  double eta_residual = 0.0;
};

namespace detail {

inline void require_positive(double v, const char* name) {
  if (!(v > 0.0)) throw error(std::string("constant must be positive: ") + name);
}

// Relative residual of lhs = rhs. The caller may pass the magnitude of the
// terms the sides were assembled from; when a constraint subtracts two huge
// quantities down to an O(1) value, that term scale (not the cancelled
// result) is the level at which double arithmetic can certify equality.
inline double relative_residual(double lhs, double rhs, double term_scale) {
  const double scale =
      std::max({1e-30, std::abs(lhs), std::abs(rhs), term_scale});
  return std::abs(lhs - rhs) / scale;
}

inline void check_constraint(double lhs, double rhs,
                             const std::string& relation,
                             double term_scale = 0.0) {
  const double residual = relative_residual(lhs, rhs, term_scale);
  if (residual > 1e-10) throw constraint_violated(relation, residual);
}

}  // namespace detail

// Exponentially decaying family: a = sigma e^{-Gamma t}, b = Delta e^{Gamma t},
// rho = mu e^{-Gamma t/2}. Passing the pole-shift constant turns on the
// cross coefficient d = Gamma / (2 (C e^{Gamma t} - 1)), whose pole sits at
// negative time whenever C > 1.
inline ep_solution ep_exponential(double sigma, double delta, double mu,
                                  double gamma,
                                  std::optional<double> c_const = {}) {
  detail::require_positive(sigma, "sigma");
  detail::require_positive(delta, "Delta");
  detail::require_positive(mu, "mu");
  detail::require_positive(gamma, "Gamma");
  const double mu4 = mu * mu * mu * mu;
  detail::check_constraint(mu4 * (sigma * delta - gamma * gamma / 4.0),
                           sigma * sigma,
                           "mu^4 = sigma^2/(sigma*Delta - Gamma^2/4)");
  ep_solution s;
  s.family = ep_family::exponential;
  s.sigma = sigma;
  s.delta = delta;
  s.mu = mu;
  s.gamma = gamma;
  s.a = sigma * time_expr::exponential(-gamma);
  s.b = delta * time_expr::exponential(gamma);
  s.rho = mu * time_expr::exponential(-gamma / 2.0);
  if (c_const) {
    if (!(*c_const > 1.0))
      throw invalid_c("ep_exponential: pole-shift constant must exceed 1");
    s.c_const = c_const;
    s.d = gamma / (2.0 * (*c_const * time_expr::exponential(gamma) - 1.0));
  } else {
    s.d = time_expr::constant(0.0);
  }
  return s;
}

// Rationally varying family. For k not in {0, -1, -2}:
//   a = sigma (1+2/k)^{(k+2)/k} (Gamma t + chi)^{-(k+2)/k},
//   b = Delta (1+2/k)^{(k-2)/k} (Gamma t + chi)^{-(k-2)/k},
//   rho = mu (1+2/k)^{1/k} (Gamma t + chi)^{-1/k}.
// k = -2 selects the modified set a = sigma, b = Delta/(Gamma t + chi)^2,
// rho = mu sqrt(Gamma t + chi). A nonzero d coefficient adds
// d = delta_d/(Gamma t + chi) and switches the constraint accordingly.
inline ep_solution ep_rational(int k, double sigma, double delta, double mu,
                               double chi, double gamma,
                               std::optional<double> d_const = {}) {
  if (k == 0) throw invalid_k("ep_rational: k must be nonzero");
  if (k == -1)
    throw invalid_k("ep_rational: k = -1 makes the family factor vanish");
  detail::require_positive(sigma, "sigma");
  detail::require_positive(delta, "Delta");
  detail::require_positive(mu, "mu");
  detail::require_positive(chi, "chi");
  detail::require_positive(gamma, "Gamma");
  if (d_const && *d_const < 0.0)
    throw error("ep_rational: d coefficient must be non-negative");

  const double mu4 = mu * mu * mu * mu;
  ep_solution s;
  s.sigma = sigma;
  s.delta = delta;
  s.mu = mu;
  s.gamma = gamma;
  s.chi = chi;
  s.k = k;

  if (k == -2) {
    // The generic expressions degenerate at k = -2; the modified set below
    // satisfies the auxiliary equation with its own constraint.
    detail::check_constraint(
        4.0 * sigma * delta * mu4 - mu4 * gamma * gamma, 4.0 * sigma * sigma,
        "4*sigma*Delta*mu^4 - mu^4*Gamma^2 = 4*sigma^2");
    if (d_const && *d_const != 0.0) {
      // The only d coefficients compatible with the auxiliary equation for
      // this set are 0 and Gamma/2.
      detail::check_constraint(*d_const * gamma, 2.0 * *d_const * *d_const,
                               "delta*(Gamma - 2*delta) = 0");
    }
    s.family = ep_family::rational_neg2;
    s.a = time_expr::constant(sigma);
    s.b = delta * powi(time_expr::linear_power(gamma, chi, 1.0), -2);
    s.rho = mu * sqrt(time_expr::linear_power(gamma, chi, 1.0));
  } else {
    const double kk = k;
    // sigma*Delta*mu^4 - sigma^2 can cancel fourteen digits (the catalogued
    // 1e7-scale members), so the residual is judged against the term scale.
    const double term_scale =
        (sigma * delta * mu4 + sigma * sigma) * (kk + 2.0) * (kk + 2.0);
    if (d_const && *d_const != 0.0) {
      detail::check_constraint(
          4.0 * *d_const * mu4 * kk * kk * (gamma / kk + *d_const),
          (sigma * delta * mu4 - sigma * sigma) * (kk + 2.0) * (kk + 2.0) -
              gamma * gamma * mu4,
          "4*delta*mu^4*k^2*(Gamma/k + delta) = "
          "(sigma*Delta*mu^4 - sigma^2)*(k+2)^2 - Gamma^2*mu^4",
          term_scale);
    } else {
      detail::check_constraint(
          (sigma * delta * mu4 - sigma * sigma) * (kk + 2.0) * (kk + 2.0),
          mu4 * gamma * gamma,
          "(sigma*Delta*mu^4 - sigma^2)*(k+2)^2 = mu^4*Gamma^2", term_scale);
    }
    s.family = ep_family::rational;
    const double factor = 1.0 + 2.0 / kk;
    s.a = sigma * std::pow(factor, (kk + 2.0) / kk) *
          time_expr::linear_power(gamma, chi, -(kk + 2.0) / kk);
    s.b = delta * std::pow(factor, (kk - 2.0) / kk) *
          time_expr::linear_power(gamma, chi, -(kk - 2.0) / kk);
    s.rho = mu * std::pow(factor, 1.0 / kk) *
            time_expr::linear_power(gamma, chi, -1.0 / kk);
  }
  if (d_const && *d_const != 0.0) {
    s.d_const = d_const;
    s.d = *d_const * time_expr::linear_power(gamma, chi, -1.0);
  } else {
    s.d = time_expr::constant(0.0);
  }
  return s;
}

// Elementary family: a = sigma, b = Delta/(Gamma t + chi)^4,
// rho = mu (Gamma t + chi), d = 0; valid when Delta mu^4 = sigma.
inline ep_solution ep_elementary(double sigma, double delta, double mu,
                                 double chi, double gamma) {
  detail::require_positive(sigma, "sigma");
  detail::require_positive(delta, "Delta");
  detail::require_positive(mu, "mu");
  detail::require_positive(chi, "chi");
  detail::require_positive(gamma, "Gamma");
  detail::check_constraint(delta * mu * mu * mu * mu, sigma,
                           "Delta*mu^4 = sigma");
  ep_solution s;
  s.family = ep_family::elementary;
  s.sigma = sigma;
  s.delta = delta;
  s.mu = mu;
  s.gamma = gamma;
  s.chi = chi;
  s.a = time_expr::constant(sigma);
  s.b = delta * powi(time_expr::linear_power(gamma, chi, 1.0), -4);
  s.rho = mu * time_expr::linear_power(gamma, chi, 1.0);
  s.d = time_expr::constant(0.0);
  return s;
}

// Signed defect of the auxiliary equation at time t, evaluated with exact
// symbolic derivatives. Zero (to roundoff) for every validated family.
inline double ep_residual(const ep_solution& s, double t) {
  const double a = s.a(t);
  const double b = s.b(t);
  const double rho = s.rho(t);
  const double d = s.d(t);
  const double a_dot = s.a.derivative()(t);
  const time_expr rho_dot_expr = s.rho.derivative();
  const double rho_dot = rho_dot_expr(t);
  const double rho_ddot = rho_dot_expr.derivative()(t);
  const double d_dot = s.d.derivative()(t);
  const double log_a_dot = a_dot / a;
  return rho_ddot - log_a_dot * rho_dot +
         rho * (a * b - 2.0 * d_dot - 4.0 * d * d + 2.0 * log_a_dot * d) -
         a * a / (rho * rho * rho);
}

// Extracts the integrability constants by sampling: q(t) from
// d(h/g)/drho = q g and lambda(t) from rho_dot = lambda h/g must both be
// flat across the family's domain; the residuals report how flat.
inline chiellini_report chiellini_check(const ep_solution& s) {
  double a_slope = 0.0;
  if (s.a.derivative().is_constant(&a_slope) && a_slope == 0.0)
    throw chiellini_inapplicable(
        "chiellini_check: the family has constant a, so g vanishes");

  const time_expr a_dot = s.a.derivative();
  const time_expr g = 0.0 - a_dot / s.a;
  const time_expr h =
      s.rho * (s.a * s.b - 2.0 * s.d.derivative() - 4.0 * s.d * s.d +
               2.0 * (a_dot / s.a) * s.d) -
      s.a * s.a / powi(s.rho, 3);
  const time_expr ratio = h / g;
  const time_expr ratio_dot = ratio.derivative();
  const time_expr rho_dot = s.rho.derivative();

  chiellini_report rep;
  const int samples = 33;
  const double t_max = 2.0 / s.gamma;
  for (int i = 0; i < samples; ++i) {
    const double t = t_max * (i + 1) / samples;
    const double q_t = ratio_dot(t) / (rho_dot(t) * g(t));
    const double lambda_t = rho_dot(t) * g(t) / h(t);
    if (i == 0) {
      rep.q = q_t;
      rep.lambda_q = lambda_t;
    } else {
      rep.condition_residual =
          std::max(rep.condition_residual, std::abs(q_t - rep.q));
      rep.eta_residual =
          std::max(rep.eta_residual, std::abs(lambda_t - rep.lambda_q));
    }
  }
  return rep;
}

// Numerical oracle: integrates the auxiliary equation as a first-order
// system with classic fixed-step RK4, halving the step until the solution
// on the requested grid stops moving by more than 1e-8.
inline std::vector<double> integrate_ep(const time_expr& a, const time_expr& b,
                                        const time_expr& d, double rho0,
                                        double rho_dot0,
                                        const std::vector<double>& grid) {
  if (grid.empty()) return {};
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1]))
      throw error("integrate_ep: grid must be strictly increasing");
  if (rho0 < 1e-12) throw singular_ep("integrate_ep: initial rho too small");

  const time_expr a_dot = a.derivative();
  const time_expr d_dot = d.derivative();
  const auto accel = [&](double t, double rho, double v) {
    const double av = a(t);
    const double log_a_dot = a_dot(t) / av;
    const double dv = d(t);
    return log_a_dot * v -
           rho * (av * b(t) - 2.0 * d_dot(t) - 4.0 * dv * dv +
                  2.0 * log_a_dot * dv) +
           av * av / (rho * rho * rho);
  };

  const auto sweep = [&](int substeps_per_interval) {
    std::vector<double> out;
    out.reserve(grid.size());
    double rho = rho0, v = rho_dot0;
    out.push_back(rho);
    for (std::size_t i = 1; i < grid.size(); ++i) {
      const double h = (grid[i] - grid[i - 1]) / substeps_per_interval;
      double t = grid[i - 1];
      for (int st = 0; st < substeps_per_interval; ++st) {
        const double k1r = v, k1v = accel(t, rho, v);
        const double k2r = v + 0.5 * h * k1v,
                     k2v = accel(t + 0.5 * h, rho + 0.5 * h * k1r,
                                 v + 0.5 * h * k1v);
        const double k3r = v + 0.5 * h * k2v,
                     k3v = accel(t + 0.5 * h, rho + 0.5 * h * k2r,
                                 v + 0.5 * h * k2v);
        const double k4r = v + h * k3v,
                     k4v = accel(t + h, rho + h * k3r, v + h * k3v);
        rho += h / 6.0 * (k1r + 2.0 * k2r + 2.0 * k3r + k4r);
        v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        t += h;
        if (rho < 1e-12)
          throw singular_ep("integrate_ep: rho crossed the singular guard");
      }
      out.push_back(rho);
    }
    return out;
  };

  int substeps = 4;
  std::vector<double> coarse = sweep(substeps);
  for (int round = 0; round < 16; ++round) {
    substeps *= 2;
    std::vector<double> fine = sweep(substeps);
    double change = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i)
      change = std::max(change, std::abs(fine[i] - coarse[i]));
    if (change < 1e-8) return fine;
    coarse = std::move(fine);
  }
  throw no_convergence("integrate_ep: step halving did not settle");
}

}  // namespace ncqo
