#pragma once

#include <cmath>
#include <utility>

#include "ncqo/errors.hpp"
#include "ncqo/quadrature.hpp"

namespace ncqo {

// Degree and superscript of an associated Laguerre polynomial L_m^{(alpha)}.
// alpha may be any real, including the negative integers that arise when the
// angular quantum number exceeds the radial one.
struct laguerre_spec {
  int degree = 0;
  double alpha = 0.0;
};

inline constexpr int laguerre_degree_cap = 64;

// L_m^{(alpha)}(z) by the ascending three-term recurrence
// (m+1) L_{m+1} = (2m+1+alpha-z) L_m - (m+alpha) L_{m-1},
// seeded with L_0 = 1, L_1 = 1+alpha-z. Stable for the moderate degrees
// used here; degrees are capped at 64.
inline double laguerre(const laguerre_spec& spec, double z) {
  if (spec.degree < 0) throw error("laguerre: negative degree");
  if (spec.degree > laguerre_degree_cap)
    throw error("laguerre: degree above cap 64");
  if (spec.degree == 0) return 1.0;
  double lm1 = 1.0;
  double l = 1.0 + spec.alpha - z;
  for (int m = 1; m < spec.degree; ++m) {
    const double lp1 =
        ((2.0 * m + 1.0 + spec.alpha - z) * l - (m + spec.alpha) * lm1) /
        (m + 1.0);
    lm1 = l;
    l = lp1;
  }
  return l;
}

// int_0^inf z^p e^{-z} L_{m1}^{(a1)}(z) L_{m2}^{(a2)}(z) dz by standard
// (alpha = 0) Gauss-Laguerre quadrature; z^p is absorbed into the integrand,
// so non-integer p works on the same nodes. The rule order starts at
// m1 + m2 + ceil(p) + 4 and the value must be stable under order doubling.
inline double laguerre_weighted_integral(double p, const laguerre_spec& s1,
                                         const laguerre_spec& s2,
                                         double tol = 1e-10) {
  if (!(p > -1.0)) throw error("laguerre_weighted_integral: need p > -1");
  const int base = s1.degree + s2.degree + static_cast<int>(std::ceil(p)) + 4;
  const int order = std::max(base, 6);
  const auto eval = [&](int n) {
    const quadrature_rule rule = gauss_laguerre(n);
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
      const double z = rule.nodes[i];
      sum += rule.weights[i] * std::pow(z, p) * laguerre(s1, z) *
             laguerre(s2, z);
    }
    return sum;
  };
  const double coarse = eval(order);
  const double fine = eval(2 * order);
  if (std::abs(fine - coarse) > tol * (1.0 + std::abs(fine)))
    throw nonconvergent_integral(
        "laguerre_weighted_integral: order doubling moved the value by " +
        std::to_string(std::abs(fine - coarse)));
  return fine;
}

// Residual of the two-integral identity
//   (n-m+1) int z^{n-m} e^{-z} L_m^{(n-m)} L_{m-1}^{(n-m+1)} dz
//     = int z^{n-m+1} e^{-z} L_m^{(n-m)} L_{m-2}^{(n-m+2)} dz,
// valid for m >= 2, n >= m. Both sides are evaluated by quadrature.
inline double verify_appendix_identity(int n, int m) {
  if (m < 2 || n < m) throw error("verify_appendix_identity: need n >= m >= 2");
  const double a = static_cast<double>(n - m);
  const double i1 = laguerre_weighted_integral(a, {m, a}, {m - 1, a + 1.0});
  const double i2 =
      laguerre_weighted_integral(a + 1.0, {m, a}, {m - 2, a + 2.0});
  return std::abs((n - m + 1.0) * i1 - i2);
}

// Power moment of a squared Laguerre polynomial versus its printed closed
// form: lhs = int z^{k+p} e^{-z} (L_n^{(k)})^2 dz by quadrature,
// rhs = (Gamma(n+k+1)/n!) (2n+k+1)^p. The pair is returned for the caller
// to compare; the closed form holds for p in {0, 1} but fails for p >= 2
// (n=1, k=0, p=2 gives lhs 14 versus rhs 9).
inline std::pair<double, double> verify_power_moment_identity(int n, double k,
                                                              int p) {
  if (p < 0) throw error("verify_power_moment_identity: need p >= 0");
  if (!(k > -1.0)) throw error("verify_power_moment_identity: need k > -1");
  const double lhs = laguerre_weighted_integral(k + p, {n, k}, {n, k});
  const double rhs = std::exp(std::lgamma(n + k + 1.0) - std::lgamma(n + 1.0)) *
                     std::pow(2.0 * n + k + 1.0, p);
  return {lhs, rhs};
}

}  // namespace ncqo
