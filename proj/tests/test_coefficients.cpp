#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "hsm/coefficients.hpp"
#include "hsm/roots.hpp"

using namespace hsm;

namespace {
constexpr double kPi = 3.14159265358979323846;
}

TEST_CASE("alpha closed form") {
  CHECK(alpha(MultPair(1, 1), -3.7) == 0.0);
  CHECK(alpha(MultPair(1, 1), 0.9) == 0.0);
  CHECK(alpha(MultPair(2, 2), 0.0) == 0.0);
  // saturation toward m1 - 1
  CHECK(alpha(MultPair(2, 4), 50.0) == Catch::Approx(3.0).margin(1e-12));
}

TEST_CASE("beta closed form") {
  CHECK(beta(MultPair(2, 2), 0.0) == 0.0);
  CHECK(beta(MultPair(2, 4), 0.0) == Catch::Approx(0.5).margin(1e-15));
  CHECK(beta(MultPair(2, 4), 50.0) == Catch::Approx(2.0).margin(1e-12));  // m1 / 2
}

TEST_CASE("quotient function") {
  // equal multiplicities: constant B
  for (double x : {-2.0, 0.0, 1.3}) {
    const ExtReal v = q(MultPair(3, 3), x);
    REQUIRE(v.is_finite());
    CHECK(v.value == Catch::Approx(0.75).margin(1e-15));
  }
  // ratio of saturated values -> B
  CHECK(q(MultPair(2, 4), 50.0).value == Catch::Approx(2.0 / 3.0).margin(1e-12));
  // signed infinity at the zero of alpha, sign of beta there
  const double za = std::atanh(-0.5);
  CHECK(q(MultPair(2, 4), za + 1e-8).value < -1e6);
  const ExtReal at_pole = q(MultPair(2, 4), za);
  if (!at_pole.is_finite()) CHECK(at_pole.kind == ExtReal::Kind::MinusInf);
}

TEST_CASE("structural constants for (2,4)") {
  const StructuralConstants sc = constants(MultPair(2, 4));
  REQUIRE(sc.z_alpha.is_finite());
  CHECK(sc.z_alpha.value == Catch::Approx(std::atanh(-0.5)).margin(1e-12));
  CHECK(sc.big_b == Catch::Approx(2.0 / 3.0).margin(1e-15));
  // tanh d+ = (2 B^2 - (m1-m0)) / (m0+m1) = -5/27, cross-checked internally
  // against bisection of 2 beta - B^2
  CHECK(sc.d_plus == Catch::Approx(std::atanh(-5.0 / 27.0)).margin(1e-12));
  const double root = bisect(
      [&](double x) { return 2.0 * beta(MultPair(2, 4), x) - sc.big_b * sc.big_b; }, -1.0, 1.0);
  CHECK(sc.d_plus == Catch::Approx(root).margin(1e-10));
}

TEST_CASE("equal multiplicities give z_alpha = 0 and c = 0") {
  for (int m : {2, 3, 4, 5, 6}) {
    const StructuralConstants sc = constants(MultPair(m, m));
    REQUIRE(sc.z_alpha.is_finite());
    CHECK(std::fabs(sc.z_alpha.value) < 1e-15);
    CHECK(sc.c == 0.0);
  }
}

TEST_CASE("domain errors") {
  CHECK_THROWS_AS(constants(MultPair(1, 1)), std::domain_error);
  CHECK_THROWS_AS(constants(MultPair(5, 1)), std::domain_error);
  CHECK_THROWS_AS(MultPair(0, 2), std::domain_error);
  CHECK_THROWS_AS(m1_max(1), std::domain_error);
  CHECK_THROWS_AS(m1_max(6), std::domain_error);
  CHECK_THROWS_AS(absch1_bounds(MultPair(1, 5)), std::domain_error);
}

TEST_CASE("z_alpha is -inf for m0 = 1 < m1") {
  const StructuralConstants sc = constants(MultPair(1, 3));
  CHECK_FALSE(sc.z_alpha.is_finite());
  CHECK(sc.z_alpha.kind == ExtReal::Kind::MinusInf);
  CHECK(std::isnan(sc.cap_c));
}

TEST_CASE("zero residuals and ordering across pairs") {
  for (int m0 = 2; m0 <= 8; ++m0) {
    for (int m1 = m0; m1 <= 8; ++m1) {
      const MultPair p(m0, m1);
      const StructuralConstants sc = constants(p);
      const double za = sc.z_alpha.finite_value();
      CHECK(std::fabs(alpha(p, za)) < 1e-12);
      CHECK(std::fabs(beta(p, sc.z_beta)) < 1e-12);
      CHECK(za <= sc.z_beta + 1e-15);
      CHECK(sc.z_beta <= sc.d_plus + 1e-15);
      CHECK(sc.cap_l >= 0.0);
      CHECK(sc.cap_r >= 0.0);
      // c sits left of d+ so the slope trigger is armed inside the stripe gate
      if (!std::isnan(sc.c)) CHECK(sc.c < sc.d_plus);
    }
  }
}

TEST_CASE("monotonicity and reflection symmetry on a grid") {
  const MultPair a(2, 4), b(4, 2);
  double prev_alpha = -1e30, prev_beta = -1e30;
  for (int i = 0; i <= 200; ++i) {
    const double x = -10.0 + 0.1 * i;
    CHECK(alpha(a, x) > prev_alpha);
    CHECK(beta(a, x) > prev_beta);
    prev_alpha = alpha(a, x);
    prev_beta = beta(a, x);
    CHECK(alpha(a, x) == Catch::Approx(-alpha(b, -x)).margin(1e-14));
    CHECK(beta(a, x) == Catch::Approx(-beta(b, -x)).margin(1e-14));
  }
}

TEST_CASE("q increases to supremum B right of z_alpha when m0 < m1") {
  for (auto [m0, m1] : {std::pair{2, 4}, std::pair{3, 7}}) {
    const MultPair p(m0, m1);
    const StructuralConstants sc = constants(p);
    const double za = sc.z_alpha.finite_value();
    double prev = -1e30;
    for (int i = 1; i <= 120; ++i) {
      const double x = za + 0.05 * i;
      const ExtReal qi = q(p, x);
      REQUIRE(qi.is_finite());
      CHECK(qi.value > prev);
      CHECK(qi.value < sc.big_b);
      prev = qi.value;
    }
  }
}

TEST_CASE("stripe width bounds") {
  // closed forms
  const StripeBounds b2 = absch1_bounds(MultPair(2, 10));
  CHECK(b2.r_bound == Catch::Approx(std::atanh(5.0 / 13.0)).margin(1e-15));
  CHECK(b2.r_ok);

  const StripeBounds b22 = absch1_bounds(MultPair(2, 2));
  CHECK(b22.l_bound_pi == Catch::Approx(std::sqrt(2.0) * std::atanh(0.5)).margin(1e-15));
  CHECK(b22.l_bound_pi < kPi / 2);
  CHECK(b22.l_pi_ok);

  const StripeBounds b35 = absch1_bounds(MultPair(3, 5));
  CHECK(b35.r_ok);
  CHECK(b35.l_pi_ok);
  CHECK(b35.l_lower_ok);
}

TEST_CASE("largest admissible m1 table") {
  CHECK(m1_max(2) == 4);
  CHECK(m1_max(3) == 27);
  CHECK(m1_max(4) == 60);
  CHECK(m1_max(5) == 106);
}

TEST_CASE("boundary estimate fails just past the table entry") {
  const double limit = 1.5 * kPi;
  CHECK(boundary_estimate(MultPair(3, 27)) <= limit);
  CHECK(boundary_estimate(MultPair(3, 28)) > limit);
  CHECK(boundary_estimate(MultPair(5, 106)) <= limit);
  CHECK(boundary_estimate(MultPair(5, 107)) > limit);
}

TEST_CASE("cap_c scan agrees with the closed form for equal multiplicities") {
  // for (m,m) the quotient is the constant B, so C solves 2 beta = B^2,
  // i.e. C = artanh(B^2 / m)
  for (int m : {2, 3, 5}) {
    const StructuralConstants sc = constants(MultPair(m, m));
    const double bb = sc.big_b * sc.big_b;
    CHECK(sc.cap_c == Catch::Approx(std::atanh(bb / m)).margin(1e-10));
    CHECK(sc.d_minus == Catch::Approx(-sc.cap_c).margin(1e-15));
  }
}
