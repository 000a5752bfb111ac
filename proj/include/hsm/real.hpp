#pragma once

// Floating-point lanes. Everything numerical is templated on a Real type:
// double is the survey lane, __float128 the deep lane for shots that must
// track a saddle connection further than double roundoff allows.

#include <cmath>
#include <limits>
#include <quadmath.h>

namespace hsm {

using quad = __float128;

// Unqualified calls inside templates would silently convert __float128 to
// double through the std overloads, so all Real-generic code goes through
// this namespace instead.
namespace rmath {

inline double tanh(double x) { return std::tanh(x); }
inline double sin(double x) { return std::sin(x); }
inline double cos(double x) { return std::cos(x); }
inline double tan(double x) { return std::tan(x); }
inline double exp(double x) { return std::exp(x); }
inline double log(double x) { return std::log(x); }
inline double atan(double x) { return std::atan(x); }
inline double atan2(double y, double x) { return std::atan2(y, x); }
inline double atanh(double x) { return std::atanh(x); }
inline double sqrt(double x) { return std::sqrt(x); }
inline double fabs(double x) { return std::fabs(x); }
inline double hypot(double y, double x) { return std::hypot(y, x); }
inline double floor(double x) { return std::floor(x); }
inline bool isfinite(double x) { return std::isfinite(x); }

inline long double tanh(long double x) { return std::tanh(x); }
inline long double sin(long double x) { return std::sin(x); }
inline long double cos(long double x) { return std::cos(x); }
inline long double tan(long double x) { return std::tan(x); }
inline long double exp(long double x) { return std::exp(x); }
inline long double log(long double x) { return std::log(x); }
inline long double atan(long double x) { return std::atan(x); }
inline long double atan2(long double y, long double x) { return std::atan2(y, x); }
inline long double atanh(long double x) { return std::atanh(x); }
inline long double sqrt(long double x) { return std::sqrt(x); }
inline long double fabs(long double x) { return std::fabs(x); }
inline long double hypot(long double y, long double x) { return std::hypot(y, x); }
inline long double floor(long double x) { return std::floor(x); }
inline bool isfinite(long double x) { return std::isfinite(x); }

inline quad tanh(quad x) { return tanhq(x); }
inline quad sin(quad x) { return sinq(x); }
inline quad cos(quad x) { return cosq(x); }
inline quad tan(quad x) { return tanq(x); }
inline quad exp(quad x) { return expq(x); }
inline quad log(quad x) { return logq(x); }
inline quad atan(quad x) { return atanq(x); }
inline quad atan2(quad y, quad x) { return atan2q(y, x); }
inline quad atanh(quad x) { return atanhq(x); }
inline quad sqrt(quad x) { return sqrtq(x); }
inline quad fabs(quad x) { return fabsq(x); }
inline quad hypot(quad y, quad x) { return hypotq(y, x); }
inline quad floor(quad x) { return floorq(x); }
inline bool isfinite(quad x) { return finiteq(x) != 0; }

template <class Real>
Real pi() {
  static const Real value = Real(4) * rmath::atan(Real(1));
  return value;
}

inline double to_double(double x) { return x; }
inline double to_double(long double x) { return static_cast<double>(x); }
inline double to_double(quad x) { return static_cast<double>(x); }

}  // namespace rmath
}  // namespace hsm
