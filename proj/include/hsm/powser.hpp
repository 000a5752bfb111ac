#pragma once

// Dense truncated power series over a Real lane: just enough arithmetic to
// generate the ODE coefficient expansions (reciprocals of sin z / z, cos z)
// and to compose sin of a series with zero constant term. Everything is
// generated from factorials at working precision; nothing is transcribed by
// hand.

#include <vector>

#include "hsm/real.hpp"

namespace hsm::powser {

template <class Real>
using Series = std::vector<Real>;  // index = power of the variable

template <class Real>
Series<Real> mul(const Series<Real>& a, const Series<Real>& b, int n) {
  Series<Real> c(n + 1, Real(0));
  for (int i = 0; i <= n && i < static_cast<int>(a.size()); ++i) {
    if (a[i] == Real(0)) continue;
    const int jmax = std::min<int>(n - i, static_cast<int>(b.size()) - 1);
    for (int j = 0; j <= jmax; ++j) c[i + j] += a[i] * b[j];
  }
  return c;
}

/// 1 / a with a[0] != 0, by the standard division recurrence.
template <class Real>
Series<Real> recip(const Series<Real>& a, int n) {
  Series<Real> b(n + 1, Real(0));
  b[0] = Real(1) / a[0];
  for (int k = 1; k <= n; ++k) {
    Real acc(0);
    for (int j = 1; j <= k && j < static_cast<int>(a.size()); ++j) acc += a[j] * b[k - j];
    b[k] = -acc / a[0];
  }
  return b;
}

/// sin(u) for a series u with u[0] = 0, summed as u - u^3/3! + u^5/5! - ...
template <class Real>
Series<Real> sin_of(const Series<Real>& u, int n) {
  Series<Real> result(n + 1, Real(0));
  Series<Real> u2 = mul(u, u, n);
  Series<Real> upow = u;  // u^(2m+1)
  Real inv_fact(1);
  for (int m = 0; 2 * m + 1 <= n; ++m) {
    if (m > 0) {
      upow = mul(upow, u2, n);
      inv_fact /= Real((2 * m) * (2 * m + 1));
    }
    const Real sign = (m % 2 == 0) ? Real(1) : Real(-1);
    for (int j = 2 * m + 1; j <= n; ++j) result[j] += sign * inv_fact * upow[j];
  }
  return result;
}

/// sin(z)/z and cos(z) as series in z, from the factorial expansions.
template <class Real>
Series<Real> sinc_series(int n) {
  Series<Real> s(n + 1, Real(0));
  Real term(1);
  s[0] = term;
  for (int k = 2; k <= n; k += 2) {
    term /= Real(-k * (k + 1));
    s[k] = term;
  }
  return s;
}

template <class Real>
Series<Real> cos_series(int n) {
  Series<Real> c(n + 1, Real(0));
  Real term(1);
  c[0] = term;
  for (int k = 2; k <= n; k += 2) {
    term /= Real(-k * (k - 1));
    c[k] = term;
  }
  return c;
}

/// Substitute z -> s*z (coefficients pick up s^k).
template <class Real>
Series<Real> scale_argument(Series<Real> a, Real s) {
  Real p(1);
  for (auto& ak : a) {
    ak *= p;
    p *= s;
  }
  return a;
}

template <class Real>
Real eval(const Series<Real>& a, Real t) {
  Real r(0);
  for (int k = static_cast<int>(a.size()) - 1; k >= 0; --k) r = r * t + a[k];
  return r;
}

template <class Real>
Real eval_derivative(const Series<Real>& a, Real t) {
  Real r(0);
  for (int k = static_cast<int>(a.size()) - 1; k >= 1; --k) r = r * t + Real(k) * a[k];
  return r;
}

}  // namespace hsm::powser
