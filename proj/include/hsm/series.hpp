#pragma once

// Power-series solutions of the ODE at the singular endpoints t = 0 and
// t = pi/2. In the t variable the equation reads
//
//   r''(t) = P(t) r'(t) + Q(t) sin 2r(t),
//   P = (m1-m0) csc 2t - (m0+m1) cot 2t,   Q = m0/(2 sin^2 t) - m1/(2 cos^2 t),
//
// with P ~ -m0/t and Q ~ m0/(2 t^2) at the left endpoint. The regular branch
// scales like v*t and carries odd powers only; coefficient a_j solves
// (j-1)(j+m0) a_j = known_j, so every order j >= 3 is uniquely determined
// (the indicial roots are 1 and -m0). The expansions of t*P and t^2*Q are
// generated by series arithmetic at working precision, and the finished
// series is validated by evaluating the full ODE residual at the handoff
// point with independent library trig.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "hsm/pair.hpp"
#include "hsm/powser.hpp"
#include "hsm/real.hpp"

namespace hsm {

template <class Real>
struct SeriesStart {
  MultPair pair;
  bool at_zero = true;  ///< endpoint: t = 0, else t = pi/2 in the variable u = pi/2 - t
  int k = 0;            ///< level index for the pi/2 endpoint: r(pi/2) = (2k+1) pi/2
  Real v{};             ///< initial slope in t (resp. u)
  std::vector<Real> coeffs;  ///< Taylor coefficients, index = power of t (resp. u)
  int order = 0;
  Real validity_radius{};  ///< handoff point; residual checked here
  Real residual{};         ///< relative ODE residual at the handoff point
};

namespace detail {

template <class Real>
int default_series_order() {
  return sizeof(Real) > 8 ? 27 : 9;
}

template <class Real>
Real series_trunc_tol() {
  return sizeof(Real) > 8 ? Real(1e-32) : Real(1e-12);
}

/// Coefficients of t*P(t) (even, constant -m0) and t^2*Q(t) (even, constant
/// m0/2), built from z/sin z, z cot z and sec^2 z.
template <class Real>
void ode_coefficient_series(const MultPair& p, int n, powser::Series<Real>& tP,
                            powser::Series<Real>& t2Q) {
  using namespace powser;
  const Series<Real> sinc = sinc_series<Real>(n);   // sin z / z
  const Series<Real> cosz = cos_series<Real>(n);    // cos z
  const Series<Real> g1 = recip(sinc, n);           // z / sin z
  const Series<Real> g2 = mul(g1, cosz, n);         // z cot z
  const Series<Real> g1_2t = scale_argument(g1, Real(2));
  const Series<Real> g2_2t = scale_argument(g2, Real(2));

  tP.assign(n + 1, Real(0));
  for (int j = 0; j <= n; ++j)
    tP[j] = Real(0.5) * (Real(p.m1 - p.m0) * g1_2t[j] - Real(p.m0 + p.m1) * g2_2t[j]);

  const Series<Real> g1sq = mul(g1, g1, n);          // t^2 / sin^2 t
  const Series<Real> sec2 = recip(mul(cosz, cosz, n), n);
  t2Q.assign(n + 1, Real(0));
  for (int j = 0; j <= n; ++j) {
    Real q = Real(0.5) * Real(p.m0) * g1sq[j];
    if (j >= 2) q -= Real(0.5) * Real(p.m1) * sec2[j - 2];
    t2Q[j] = q;
  }
}

/// Relative residual of the t-form ODE on the truncated series at t,
/// using direct trig for the coefficients (independent of the expansions
/// used to build the series).
template <class Real>
Real t_ode_residual(const MultPair& p, const std::vector<Real>& a, Real t) {
  const int K = static_cast<int>(a.size()) - 1;
  Real r(0), rd(0), rdd(0);
  for (int k = K; k >= 0; --k) r = r * t + a[k];
  for (int k = K; k >= 1; --k) rd = rd * t + Real(k) * a[k];
  for (int k = K; k >= 2; --k) rdd = rdd * t + Real(k) * Real(k - 1) * a[k];
  const Real s2t = rmath::sin(Real(2) * t);
  const Real c2t = rmath::cos(Real(2) * t);
  const Real st = rmath::sin(t);
  const Real ct = rmath::cos(t);
  const Real P = (Real(p.m1 - p.m0) - Real(p.m0 + p.m1) * c2t) / s2t;
  const Real Q = Real(p.m0) / (Real(2) * st * st) - Real(p.m1) / (Real(2) * ct * ct);
  const Real t1 = P * rd;
  const Real t2 = Q * rmath::sin(Real(2) * r);
  const Real scale = Real(1) + rmath::fabs(rdd) + rmath::fabs(t1) + rmath::fabs(t2);
  return rmath::fabs(rdd - t1 - t2) / scale;
}

}  // namespace detail

/// Series solution of the singular IVP r(0) = 0, r'(0) = v at t = 0.
/// Only odd powers are populated; the parity is not assumed correct a
/// priori but confirmed by the residual check. order = 0 picks a default
/// per lane (9 for double, 27 for the deep lane).
template <class Real>
SeriesStart<Real> series_at_zero(const MultPair& p, Real v, int order = 0) {
  using namespace powser;
  if (order == 0) order = detail::default_series_order<Real>();
  if (order < 5) throw std::domain_error("series_at_zero: order must be >= 5");
  if (order % 2 == 0) ++order;
  const int n = order;

  Series<Real> tP, t2Q;
  detail::ode_coefficient_series(p, n, tP, t2Q);

  Series<Real> a(n + 1, Real(0));
  a[1] = v;
  // Solve F[j] = 0 order by order, F = t^2 r'' - (tP)(t r') - (t^2 Q) sin 2r.
  for (int j = 3; j <= n; j += 2) {
    const Real lam = Real((j - 1) * (j + p.m0));
    Series<Real> u(n + 1, Real(0));
    for (int i = 0; i <= n; ++i) u[i] = Real(2) * a[i];
    const Series<Real> s = sin_of(u, n);
    Real F(0);
    F += Real(j * (j - 1)) * a[j];  // zero at this point; kept for clarity
    Real conv1(0);
    for (int i = 0; i <= j; ++i) conv1 += tP[i] * Real(j - i) * a[j - i];
    Real conv2(0);
    for (int i = 0; i <= j; ++i) conv2 += t2Q[i] * s[j - i];
    F -= conv1 + conv2;
    a[j] = -F / lam;
  }

  SeriesStart<Real> out;
  out.pair = p;
  out.at_zero = true;
  out.v = v;
  out.coeffs = a;
  out.order = n;

  // Handoff point: small enough that the estimated truncation term is below
  // tolerance and v*t stays small, never above 1e-2.
  const Real trunc_tol = detail::series_trunc_tol<Real>();
  const Real abs_v = rmath::fabs(v);
  Real t_cap = std::min(Real(1e-2), Real(0.05) / std::max(Real(1), abs_v));
  Real t_trunc = Real(1e-2);
  const Real aN = rmath::fabs(a[n]);
  if (aN > Real(0)) t_trunc = rmath::exp(rmath::log(trunc_tol / aN) / Real(n));
  Real t0 = std::min(t_cap, t_trunc);
  t0 = std::max(t0, std::min(Real(1e-4), t_cap));
  out.validity_radius = t0;

  if (v != Real(0)) {
    out.residual = detail::t_ode_residual(p, a, t0);
    const Real res_tol = sizeof(Real) > 8 ? Real(1e-25) : Real(1e-9);
    if (!(out.residual < res_tol))
      throw std::runtime_error("series_at_zero: residual check failed for " + p.str() +
                               " at v = " + std::to_string(rmath::to_double(v)));
  } else {
    out.residual = Real(0);  // r identically zero
  }
  return out;
}

/// Series solution at t = pi/2 in the variable u = pi/2 - t, with
/// r(pi/2) = (2k+1) pi/2 and dr/du(0) = w. Reduces to the t = 0 problem
/// for the swapped pair via rho(u) = (2k+1) pi/2 - r(pi/2 - u), which obeys
/// the swapped-pair equation with rho(0) = 0, rho'(0) = -w.
template <class Real>
SeriesStart<Real> series_at_pi_half(const MultPair& p, int k, Real w, int order = 0) {
  SeriesStart<Real> rho = series_at_zero(p.swapped(), -w, order);
  SeriesStart<Real> out;
  out.pair = p;
  out.at_zero = false;
  out.k = k;
  out.v = w;
  out.order = rho.order;
  out.validity_radius = rho.validity_radius;
  out.residual = rho.residual;
  out.coeffs.assign(rho.coeffs.size(), Real(0));
  out.coeffs[0] = Real(2 * k + 1) * rmath::pi<Real>() / Real(2);
  for (std::size_t j = 1; j < rho.coeffs.size(); ++j) out.coeffs[j] = -rho.coeffs[j];
  return out;
}

template <class Real>
struct XState {
  Real x{}, r{}, rp{};  // rp = dr/dx
};

/// Convert a series evaluation at parameter t in (0, pi/2) to the x
/// coordinate: x = log tan t, r'(x) = dr/dt * sin t * cos t.
template <class Real>
XState<Real> to_x_state(const SeriesStart<Real>& s, Real t) {
  const Real half_pi = rmath::pi<Real>() / Real(2);
  if (!(t > Real(0) && t < half_pi))
    throw std::domain_error("to_x_state: t must lie in (0, pi/2)");
  Real r, rdot;
  if (s.at_zero) {
    r = powser::eval(s.coeffs, t);
    rdot = powser::eval_derivative(s.coeffs, t);
  } else {
    const Real u = half_pi - t;
    r = powser::eval(s.coeffs, u);
    rdot = -powser::eval_derivative(s.coeffs, u);
  }
  XState<Real> st;
  st.x = rmath::log(rmath::tan(t));
  st.r = r;
  st.rp = rdot * rmath::sin(t) * rmath::cos(t);
  return st;
}

}  // namespace hsm
