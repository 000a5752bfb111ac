#pragma once

#include <stdexcept>
#include <string>

namespace hsm {

/// Multiplicity pair (m0, m1) indexing the ODE family. Both entries are
/// positive; operations that need m0 <= m1 or m1 >= 2 say so themselves.
struct MultPair {
  int m0 = 1;
  int m1 = 1;

  MultPair() = default;
  MultPair(int m0_, int m1_) : m0(m0_), m1(m1_) {
    if (m0 < 1 || m1 < 1)
      throw std::domain_error("MultPair: multiplicities must be >= 1, got (" +
                              std::to_string(m0) + "," + std::to_string(m1) + ")");
  }

  MultPair swapped() const { return MultPair(m1, m0); }

  bool operator==(const MultPair&) const = default;

  std::string str() const { return "(" + std::to_string(m0) + "," + std::to_string(m1) + ")"; }
};

}  // namespace hsm
