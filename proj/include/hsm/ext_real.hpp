#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace hsm {

/// Extended real: a finite double or a signed infinity, tagged explicitly.
/// Used where a quantity is genuinely infinite for some parameter choices
/// (the zero of alpha sits at -inf when m0 = 1 < m1), so that no sentinel
/// float ever leaks through a public signature.
struct ExtReal {
  enum class Kind { Finite, PlusInf, MinusInf };

  Kind kind = Kind::Finite;
  double value = 0.0;

  static ExtReal finite(double v) { return {Kind::Finite, v}; }
  static ExtReal plus_inf() { return {Kind::PlusInf, 0.0}; }
  static ExtReal minus_inf() { return {Kind::MinusInf, 0.0}; }

  bool is_finite() const { return kind == Kind::Finite; }

  /// Finite value, or +/-HUGE_VAL for the infinite tags.
  double as_double() const {
    switch (kind) {
      case Kind::Finite: return value;
      case Kind::PlusInf: return HUGE_VAL;
      case Kind::MinusInf: return -HUGE_VAL;
    }
    return 0.0;
  }

  /// Finite value; throws if the tag is infinite.
  double finite_value() const {
    if (!is_finite()) throw std::domain_error("ExtReal: value is infinite");
    return value;
  }

  std::string str() const {
    switch (kind) {
      case Kind::Finite: return std::to_string(value);
      case Kind::PlusInf: return "+inf";
      case Kind::MinusInf: return "-inf";
    }
    return {};
  }
};

}  // namespace hsm
