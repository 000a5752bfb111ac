#pragma once

// Closed-form coefficient functions of the x-form ODE
//
//   r''(x) - alpha(x) r'(x) + beta(x) sin 2r(x) = 0,
//
//   alpha(x) = 1/2 ((m0+m1-2) tanh x + m1-m0),
//   beta(x)  = 1/4 ((m0+m1)   tanh x + m1-m0),
//
// and the structural constants built from them: the zeros Z^alpha, Z^beta,
// the slope threshold B, the blow-up gate c, the stripe gate d+, and the
// left-side gate d- = -C with C the largest root of 2 beta_sw = q_sw^2 for
// the index-swapped pair. Each root-based constant carries an independent
// bisection cross-check; disagreement is a hard failure.

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "hsm/ext_real.hpp"
#include "hsm/pair.hpp"
#include "hsm/real.hpp"
#include "hsm/roots.hpp"

namespace hsm {

template <class Real>
Real alpha(const MultPair& p, Real x) {
  return Real(0.5) * (Real(p.m0 + p.m1 - 2) * rmath::tanh(x) + Real(p.m1 - p.m0));
}

template <class Real>
Real beta(const MultPair& p, Real x) {
  return Real(0.25) * (Real(p.m0 + p.m1) * rmath::tanh(x) + Real(p.m1 - p.m0));
}

/// Quotient q = beta/alpha as an extended real: at the zero of alpha the
/// one-sided limits are signed infinities carrying the sign of beta there.
/// For m0 = m1 = m the quotient is the constant B = m/(2(m-1)).
inline ExtReal q(const MultPair& p, double x) {
  if (p.m0 == p.m1) {
    if (p.m1 < 2) throw std::domain_error("q: constant value B undefined for (1,1)");
    return ExtReal::finite(p.m1 / (2.0 * (p.m1 - 1)));
  }
  const double a = alpha(p, x);
  const double b = beta(p, x);
  if (a == 0.0) return b >= 0.0 ? ExtReal::plus_inf() : ExtReal::minus_inf();
  return ExtReal::finite(b / a);
}

/// Z^alpha, Z^beta, B, c, d+, d- = -C, C, and the stripe widths
/// L = Z^alpha - d-, R = d+ - Z^alpha.
struct StructuralConstants {
  MultPair pair;
  ExtReal z_alpha;     ///< zero of alpha; -inf when m0 = 1 < m1
  double z_beta = 0;   ///< zero of beta
  double big_b = 0;    ///< B = m1 / (2(m1-1))
  double c = 0;        ///< blow-up gate: q = -B on (Z^alpha, inf); 0 when m0 = m1; NaN when m0 > m1
  double d_plus = 0;   ///< unique solution of 2 beta = B^2
  double d_minus = 0;  ///< -C; NaN when m0 = 1
  double cap_c = 0;    ///< C = max{x : 2 beta_sw(x) = q_sw(x)^2}; NaN when m0 = 1
  double cap_l = 0;    ///< L = Z^alpha - d-
  double cap_r = 0;    ///< R = d+ - Z^alpha
  bool multiple_cap_c_roots = false;  ///< more than one root found in the C scan
};

namespace detail {

inline void cross_check(double closed_form, double by_bisection, const char* what) {
  if (std::fabs(closed_form - by_bisection) > 1e-10)
    throw std::logic_error(std::string("constants: closed form and bisection disagree for ") +
                           what);
}

/// Largest root of 2 beta_{m1,m0}(x) = q_{m1,m0}(x)^2, located by scanning
/// F = 2 beta a^2 - beta^2 (pole-free) on a geometric grid right of the
/// swapped Z^alpha. Returns the root count as well.
inline std::pair<double, int> largest_quotient_square_root(const MultPair& p) {
  const MultPair sw = p.swapped();
  const double za_sw = std::atanh(double(sw.m0 - sw.m1) / double(sw.m0 + sw.m1 - 2));
  auto F = [&](double x) {
    const double a = alpha(sw, x);
    const double b = beta(sw, x);
    return 2.0 * b * a * a - b * b;
  };
  const auto grid = geometric_grid(za_sw, 1e-9, 50.0, 3000);
  const auto roots = roots_on_grid(F, grid);
  if (roots.empty()) throw std::logic_error("constants: no root found in the C scan for " + p.str());
  return {roots.back(), static_cast<int>(roots.size())};
}

}  // namespace detail

/// All structural constants for a pair. Requires m1 >= 2 (B is undefined
/// otherwise). For m0 = 1 the left-side constants C, d-, L do not exist and
/// are reported as NaN with z_alpha = -inf. The documented ordering
/// z_alpha <= z_beta <= d_plus holds whenever m0 <= m1.
inline StructuralConstants constants(const MultPair& p) {
  if (p.m1 < 2) throw std::domain_error("constants: requires m1 >= 2, got " + p.str());

  StructuralConstants sc;
  sc.pair = p;
  sc.big_b = p.m1 / (2.0 * (p.m1 - 1));

  if (p.m0 == 1) {
    sc.z_alpha = ExtReal::minus_inf();
  } else {
    const double za = std::atanh(double(p.m0 - p.m1) / double(p.m0 + p.m1 - 2));
    detail::cross_check(za, bisect([&](double x) { return alpha(p, x); }, za - 1.0, za + 1.0),
                        "z_alpha");
    if (std::fabs(alpha(p, za)) > 1e-12) throw std::logic_error("constants: alpha(z_alpha) residual");
    sc.z_alpha = ExtReal::finite(za);
  }

  sc.z_beta = std::atanh(double(p.m0 - p.m1) / double(p.m0 + p.m1));
  detail::cross_check(sc.z_beta,
                      bisect([&](double x) { return beta(p, x); }, sc.z_beta - 1.0, sc.z_beta + 1.0),
                      "z_beta");

  const double arg_dp = (2.0 * sc.big_b * sc.big_b - (p.m1 - p.m0)) / double(p.m0 + p.m1);
  sc.d_plus = std::atanh(arg_dp);
  {
    // independent bracket: 2 beta runs from 0 at z_beta up to m1 > B^2
    auto g = [&](double x) { return 2.0 * beta(p, x) - sc.big_b * sc.big_b; };
    detail::cross_check(sc.d_plus, bisect(g, sc.z_beta, sc.z_beta + 60.0), "d_plus");
    if (std::fabs(g(sc.d_plus)) > 1e-12) throw std::logic_error("constants: d_plus residual");
  }

  if (p.m0 == p.m1) {
    sc.c = 0.0;
  } else if (p.m0 < p.m1) {
    // q = -B  <=>  beta + B alpha = 0, and beta + B alpha is strictly
    // increasing with a sign change on [Z^alpha, Z^beta] (for m0 = 1 the
    // left end runs out to -inf; any point far left works as a bracket).
    const double lo = sc.z_alpha.is_finite() ? sc.z_alpha.value : sc.z_beta - 60.0;
    auto g = [&](double x) { return beta(p, x) + sc.big_b * alpha(p, x); };
    sc.c = bisect(g, lo, sc.z_beta);
    const ExtReal qc = q(p, sc.c);
    if (!qc.is_finite() || std::fabs(qc.value + sc.big_b) > 1e-12)
      throw std::logic_error("constants: c residual");
  } else {
    sc.c = std::numeric_limits<double>::quiet_NaN();  // q > B on the whole half-line
  }

  if (p.m0 >= 2) {
    auto [capc, nroots] = detail::largest_quotient_square_root(p);
    sc.cap_c = capc;
    sc.multiple_cap_c_roots = nroots > 1;
    const MultPair sw = p.swapped();
    const double residual =
        std::fabs(2.0 * beta(sw, capc) - std::pow(beta(sw, capc) / alpha(sw, capc), 2));
    if (residual > 1e-12) throw std::logic_error("constants: cap_c residual");
    sc.d_minus = -sc.cap_c;
    sc.cap_l = sc.z_alpha.finite_value() - sc.d_minus;
    sc.cap_r = sc.d_plus - sc.z_alpha.finite_value();
  } else {
    sc.cap_c = std::numeric_limits<double>::quiet_NaN();
    sc.d_minus = std::numeric_limits<double>::quiet_NaN();
    sc.cap_l = std::numeric_limits<double>::quiet_NaN();
    sc.cap_r = HUGE_VAL;
  }

  return sc;
}

/// Closed-form bounds on the stripe widths R and L, with verification flags
/// for the parameter ranges in which each bound applies:
///   R <= artanh(5/(8 m0 - 3))                     for m1 >= max(m0, 4),
///   sqrt(m0) L <= sqrt(m0) artanh(1/(3 m0 - 4))   for m1 >= m0 (and < pi/2),
///   L >= artanh((1+sqrt 17)/(16 m0 - 17 - sqrt 17)) for m1 >= 3 m0 - 4.
struct StripeBounds {
  double r_bound = 0;
  double l_bound_pi = 0;
  double l_lower = 0;
  bool r_ok = true;        ///< cap_r <= r_bound where applicable
  bool l_pi_ok = true;     ///< sqrt(m0) cap_l <= l_bound_pi < pi/2 where applicable
  bool l_lower_ok = true;  ///< cap_l >= l_lower where applicable
};

inline StripeBounds absch1_bounds(const MultPair& p) {
  if (p.m0 < 2) throw std::domain_error("absch1_bounds: requires m0 >= 2");
  const double s17 = std::sqrt(17.0);
  StripeBounds b;
  b.r_bound = std::atanh(5.0 / (8.0 * p.m0 - 3.0));
  b.l_bound_pi = std::sqrt(double(p.m0)) * std::atanh(1.0 / (3.0 * p.m0 - 4.0));
  b.l_lower = std::atanh((1.0 + s17) / (16.0 * p.m0 - 17.0 - s17));

  const StructuralConstants sc = constants(p);
  const double half_pi = std::acos(-1.0) / 2.0;
  if (p.m1 >= std::max(p.m0, 4)) b.r_ok = sc.cap_r <= b.r_bound + 1e-12;
  if (p.m1 >= p.m0)
    b.l_pi_ok = std::sqrt(double(p.m0)) * sc.cap_l <= b.l_bound_pi + 1e-12 && b.l_bound_pi < half_pi;
  if (p.m1 >= 3 * p.m0 - 4) b.l_lower_ok = sc.cap_l >= b.l_lower - 1e-12;
  return b;
}

/// Value of the endpoint estimate
///   pi + sqrt(m0) L + sqrt(m1+1) (Z^beta - Z^alpha) + sqrt(m1) (d+ - Z^beta)
/// whose comparison against 3 pi / 2 drives the m1_max table.
inline double boundary_estimate(const MultPair& p) {
  const StructuralConstants sc = constants(p);
  const double za = sc.z_alpha.finite_value();
  const double pi_v = std::acos(-1.0);
  return pi_v + std::sqrt(double(p.m0)) * sc.cap_l +
         std::sqrt(double(p.m1 + 1)) * (sc.z_beta - za) +
         std::sqrt(double(p.m1)) * (sc.d_plus - sc.z_beta);
}

/// Largest m1 >= m0 for which the boundary estimate stays below 3 pi / 2.
inline int m1_max(int m0) {
  if (m0 < 2 || m0 > 5) throw std::domain_error("m1_max: defined for 2 <= m0 <= 5");
  const double limit = 1.5 * std::acos(-1.0);
  int last_ok = -1;
  int consecutive_fail = 0;
  for (int m1 = m0; m1 < 5000 && consecutive_fail < 60; ++m1) {
    if (boundary_estimate(MultPair(m0, m1)) <= limit) {
      last_ok = m1;
      consecutive_fail = 0;
    } else {
      ++consecutive_fail;
    }
  }
  if (last_ok < 0) throw std::logic_error("m1_max: estimate exceeded 3 pi / 2 for every m1");
  return last_ok;
}

}  // namespace hsm
