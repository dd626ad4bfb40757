#pragma once

#include "ph3/types.hpp"

#include <array>
#include <cstdint>
#include <string>

namespace ph3 {

/// 3x3 integer matrix with exact arithmetic (int64, overflow checked).
class IntegerMatrix3 {
 public:
  using Entries = std::array<std::array<std::int64_t, 3>, 3>;

  IntegerMatrix3() = default;
  explicit IntegerMatrix3(const Entries& entries) : m_(entries) {}

  static IntegerMatrix3 identity();

  std::int64_t operator()(int r, int c) const { return m_[r][c]; }
  std::int64_t& operator()(int r, int c) { return m_[r][c]; }
  const Entries& entries() const { return m_; }

  std::int64_t det() const;
  bool unimodular() const;
  /// Exact inverse; requires det = +-1.
  IntegerMatrix3 inverse() const;
  IntegerMatrix3 operator*(const IntegerMatrix3& o) const;
  IntegerMatrix3 operator-(const IntegerMatrix3& o) const;
  IntegerMatrix3 power(int p) const;
  Cell apply(const Cell& v) const;
  Mat3 to_real() const;

  bool operator==(const IntegerMatrix3& o) const = default;

  std::string str() const;

 private:
  Entries m_{};
};

/// Lower-triangular Hermite basis of the lattice M Z^3 (|det M| > 0):
/// columns h_1, h_2, h_3 with h_jj > 0, so Z^3 / M Z^3 has the box
/// [0,h_11) x [0,h_22) x [0,h_33) as exact coset representatives.
IntegerMatrix3 hermite_column_basis(const IntegerMatrix3& m);

/// Smith invariant factors d1 | d2 | d3 (zero for a rank drop).
std::array<std::int64_t, 3> smith_invariants(const IntegerMatrix3& m);

}  // namespace ph3
