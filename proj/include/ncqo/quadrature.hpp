#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "ncqo/errors.hpp"

namespace ncqo {

enum class rule_kind { gauss_laguerre, gauss_legendre };

// Nodes and weights of a Gaussian rule. Gauss-Laguerre integrates
// int_0^inf e^{-z} f(z) dz; Gauss-Legendre integrates int_{-1}^{1} f(x) dx.
struct quadrature_rule {
  std::vector<double> nodes;
  std::vector<double> weights;
  rule_kind kind;
  int order;

  double integrate(const std::function<double(double)>& f) const {
    double sum = 0.0;
    for (int i = 0; i < order; ++i) sum += weights[i] * f(nodes[i]);
    return sum;
  }
};

namespace detail {

// Eigenvalues of a symmetric tridiagonal matrix by implicit-shift QL.
// d holds the diagonal and is overwritten with the eigenvalues (unsorted);
// e holds the subdiagonal in e[0..n-2].
inline void tridiagonal_eigenvalues(std::vector<double>& d,
                                    std::vector<double>& e) {
  const int n = static_cast<int>(d.size());
  if (n <= 1) return;
  e.resize(n, 0.0);
  for (int l = 0; l < n; ++l) {
    int iter = 0;
    int m;
    do {
      for (m = l; m < n - 1; ++m) {
        const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(e[m]) <= 1e-300 + 1e-16 * dd) break;
      }
      if (m != l) {
        if (iter++ == 64)
          throw no_convergence("tridiagonal QL failed to converge");
        double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
        double r = std::hypot(g, 1.0);
        g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
        double s = 1.0, c = 1.0, p = 0.0;
        int i = m - 1;
        for (; i >= l; --i) {
          double f = s * e[i];
          const double b = c * e[i];
          r = std::hypot(f, g);
          e[i + 1] = r;
          if (r == 0.0) {
            d[i + 1] -= p;
            e[m] = 0.0;
            break;
          }
          s = f / r;
          c = g / r;
          g = d[i + 1] - p;
          r = (d[i] - g) * s + 2.0 * c * b;
          p = s * r;
          d[i + 1] = g + p;
          g = c * r - b;
        }
        if (r == 0.0 && i >= l) continue;
        d[l] -= p;
        e[l] = g;
        e[m] = 0.0;
      }
    } while (m != l);
  }
}

// Standard Laguerre polynomials L_0..L_n at x (weight e^{-z}; these are
// already orthonormal). Returns L_n and fills lower degrees if asked.
inline double laguerre_std(int n, double x, double* lower = nullptr) {
  double lm1 = 0.0, l = 1.0;
  if (lower) lower[0] = 1.0;
  for (int j = 0; j < n; ++j) {
    const double lp1 = ((2.0 * j + 1.0 - x) * l - j * lm1) / (j + 1.0);
    lm1 = l;
    l = lp1;
    if (lower && j + 1 < n) lower[j + 1] = l;
  }
  return n == 0 ? 1.0 : l;
}

// Legendre polynomials P_n at x.
inline double legendre_std(int n, double x) {
  double pm1 = 0.0, p = 1.0;
  for (int j = 0; j < n; ++j) {
    const double pp1 = ((2.0 * j + 1.0) * x * p - j * pm1) / (j + 1.0);
    pm1 = p;
    p = pp1;
  }
  return n == 0 ? 1.0 : p;
}

}  // namespace detail

// Gauss-Laguerre rule (weight e^{-z} on [0, inf)) of the given order.
// Nodes come from the Golub-Welsch Jacobi matrix (diagonal 2k+1,
// subdiagonal k), polished by Newton on L_N to relative residual 1e-13;
// weights are the Christoffel numbers 1/sum_{j<N} L_j(x)^2.
inline quadrature_rule gauss_laguerre(int order) {
  if (order < 1) throw error("gauss_laguerre: order must be positive");
  std::vector<double> d(order), e(order, 0.0);
  for (int k = 0; k < order; ++k) {
    d[k] = 2.0 * k + 1.0;
    if (k + 1 < order) e[k] = static_cast<double>(k + 1);
  }
  detail::tridiagonal_eigenvalues(d, e);
  std::sort(d.begin(), d.end());

  quadrature_rule rule;
  rule.kind = rule_kind::gauss_laguerre;
  rule.order = order;
  rule.nodes.resize(order);
  rule.weights.resize(order);
  std::vector<double> lower(order, 0.0);
  for (int i = 0; i < order; ++i) {
    double x = d[i];
    // Newton on L_N; x L_N'(x) = N (L_N(x) - L_{N-1}(x)).
    double step = 0.0;
    for (int it = 0; it < 64; ++it) {
      const double ln = detail::laguerre_std(order, x);
      const double lnm1 = detail::laguerre_std(order - 1, x);
      const double deriv = order * (ln - lnm1) / x;
      step = ln / deriv;
      x -= step;
      if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(x))) break;
    }
    if (std::abs(step) > 1e-13 * std::max(1.0, std::abs(x)))
      throw no_convergence("gauss_laguerre: node residual above 1e-13");
    rule.nodes[i] = x;
    detail::laguerre_std(order, x, lower.data());
    double denom = 0.0;
    for (int j = 0; j < order; ++j) denom += lower[j] * lower[j];
    // Overflowing denominators belong to far-tail nodes whose weights
    // underflow anyway; 1/inf -> 0 is the right limit.
    rule.weights[i] = std::isinf(denom) ? 0.0 : 1.0 / denom;
  }
  return rule;
}

// Gauss-Legendre rule on [-1, 1] of the given order. Same construction:
// Jacobi matrix (diagonal 0, subdiagonal k/sqrt(4k^2-1)), Newton polish on
// P_N, Christoffel weights 2 / sum_{j<N} (2j+1) P_j(x)^2.
inline quadrature_rule gauss_legendre(int order) {
  if (order < 1) throw error("gauss_legendre: order must be positive");
  std::vector<double> d(order, 0.0), e(order, 0.0);
  for (int k = 1; k < order; ++k)
    e[k - 1] = k / std::sqrt(4.0 * k * k - 1.0);
  detail::tridiagonal_eigenvalues(d, e);
  std::sort(d.begin(), d.end());

  quadrature_rule rule;
  rule.kind = rule_kind::gauss_legendre;
  rule.order = order;
  rule.nodes.resize(order);
  rule.weights.resize(order);
  for (int i = 0; i < order; ++i) {
    double x = d[i];
    double step = 0.0;
    for (int it = 0; it < 64; ++it) {
      const double pn = detail::legendre_std(order, x);
      const double pnm1 = detail::legendre_std(order - 1, x);
      // (1-x^2) P_N'(x) = N (P_{N-1}(x) - x P_N(x))
      const double deriv = order * (pnm1 - x * pn) / (1.0 - x * x);
      step = pn / deriv;
      x -= step;
      if (std::abs(step) <= 1e-15) break;
    }
    if (std::abs(step) > 1e-13)
      throw no_convergence("gauss_legendre: node residual above 1e-13");
    rule.nodes[i] = x;
    double denom = 0.0;
    for (int j = 0; j < order; ++j) {
      const double pj = detail::legendre_std(j, x);
      denom += (2.0 * j + 1.0) * pj * pj;
    }
    rule.weights[i] = 2.0 / denom;
  }
  return rule;
}

// int_a^b f(x) dx with a single Gauss-Legendre rule mapped onto [a, b].
inline double integrate_legendre(const std::function<double(double)>& f,
                                 double a, double b, int order) {
  const quadrature_rule rule = gauss_legendre(order);
  const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  double sum = 0.0;
  for (int i = 0; i < order; ++i)
    sum += rule.weights[i] * f(mid + half * rule.nodes[i]);
  return half * sum;
}

}  // namespace ncqo
