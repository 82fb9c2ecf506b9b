#include <catch2/catch_amalgamated.hpp>
#include <cmath>

#include "ncqo/laguerre.hpp"

using namespace ncqo;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

// Independent evaluation straight from the coefficient sum
// L_m^{(a)}(z) = sum_j (-1)^j C(m+a, m-j) z^j / j!, with the generalized
// binomial written as a product so non-integer a works.
double laguerre_explicit(int m, double a, double z) {
  double sum = 0.0;
  for (int j = 0; j <= m; ++j) {
    double binom = 1.0;
    for (int i = 1; i <= m - j; ++i) binom *= (a + j + i) / i;
    double zj = 1.0;
    for (int i = 1; i <= j; ++i) zj *= z / i;
    sum += ((j % 2 == 0) ? 1.0 : -1.0) * binom * zj;
  }
  return sum;
}

double factorial(int n) { return std::exp(std::lgamma(n + 1.0)); }

}  // namespace

TEST_CASE("Laguerre evaluation matches pinned low-order values") {
  REQUIRE_THAT(laguerre({0, 3.5}, 7.0), WithinAbs(1.0, 1e-15));
  REQUIRE_THAT(laguerre({1, 1.0}, 0.0), WithinAbs(2.0, 1e-15));
  REQUIRE_THAT(laguerre({2, 0.0}, 1.0), WithinAbs(-0.5, 1e-15));
}

TEST_CASE("Laguerre recurrence agrees with explicit coefficient sums") {
  for (double a : {0.0, 1.0, 2.0, 2.5, -0.5}) {
    for (int m = 0; m <= 4; ++m) {
      for (double z : {0.0, 0.5, 1.0, 5.0}) {
        const double ref = laguerre_explicit(m, a, z);
        const double got = laguerre({m, a}, z);
        REQUIRE_THAT(got, WithinAbs(ref, 1e-12 * (1.0 + std::abs(ref))));
      }
    }
  }
}

TEST_CASE("Weighted Laguerre integrals match pinned values") {
  // Orthonormality diagonal at degree 2, superscript 1: Gamma(4)/2! = 3.
  REQUIRE_THAT(laguerre_weighted_integral(1.0, {2, 1.0}, {2, 1.0}),
               WithinAbs(3.0, 1e-10));
  // Distinct degrees with a shared superscript integrate to zero. Integer
  // superscripts are exact at the base order; the fractional one converges
  // only algebraically on standard nodes, so it gets a loose tolerance.
  REQUIRE_THAT(laguerre_weighted_integral(2.0, {0, 2.0}, {1, 2.0}),
               WithinAbs(0.0, 1e-10));
  REQUIRE_THAT(laguerre_weighted_integral(0.5, {0, 0.5}, {1, 0.5}, 1e-2),
               WithinAbs(0.0, 2e-2));
  // int z^2 e^{-z} (2-z)^2 dz = 8.
  REQUIRE_THAT(laguerre_weighted_integral(2.0, {1, 1.0}, {1, 1.0}),
               WithinAbs(8.0, 1e-10));
}

TEST_CASE("Weighted Laguerre integrals satisfy orthonormality") {
  for (double a : {0.0, 1.0, 2.0}) {
    for (int n = 0; n <= 6; ++n) {
      for (int m = 0; m <= 6; ++m) {
        const double got = laguerre_weighted_integral(a, {n, a}, {m, a});
        const double expected =
            (n == m) ? std::exp(std::lgamma(n + a + 1.0)) / factorial(n) : 0.0;
        REQUIRE_THAT(got,
                     WithinAbs(expected, 1e-9 * (1.0 + std::abs(expected))));
      }
    }
  }
}

TEST_CASE("Two-integral identity residual vanishes") {
  REQUIRE(verify_appendix_identity(3, 2) < 1e-9);
  REQUIRE(verify_appendix_identity(2, 2) < 1e-9);
  REQUIRE(verify_appendix_identity(5, 3) < 1e-9);
  for (int m = 2; m <= 6; ++m)
    for (int n = m; n <= 6; ++n) REQUIRE(verify_appendix_identity(n, m) < 1e-9);
}

TEST_CASE("Power moment closed form holds for p = 0 and 1 but not p = 2") {
  {
    const auto [lhs, rhs] = verify_power_moment_identity(1, 1.0, 1);
    REQUIRE_THAT(lhs, WithinAbs(8.0, 1e-9));
    REQUIRE_THAT(rhs, WithinAbs(8.0, 1e-12));
  }
  {
    const auto [lhs, rhs] = verify_power_moment_identity(1, 1.0, 0);
    REQUIRE_THAT(lhs, WithinAbs(2.0, 1e-9));
    REQUIRE_THAT(rhs, WithinAbs(2.0, 1e-12));
  }
  {
    // The closed form undercounts once p reaches 2: the true moment is 14.
    const auto [lhs, rhs] = verify_power_moment_identity(1, 0.0, 2);
    REQUIRE_THAT(lhs, WithinAbs(14.0, 1e-9));
    REQUIRE_THAT(rhs, WithinAbs(9.0, 1e-12));
  }
}

TEST_CASE("Weighted integral rejects impossible exponents") {
  REQUIRE_THROWS_AS(laguerre_weighted_integral(-1.0, {0, 0.0}, {0, 0.0}),
                    error);
}
