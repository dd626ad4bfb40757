#include "ph3/integer_matrix.hpp"

#include "ph3/errors.hpp"

#include <numeric>
#include <sstream>
#include <utility>

namespace ph3 {
namespace {

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_mul_overflow(a, b, &r)) throw NumericalUnderflow("integer overflow in matrix product");
  return r;
}

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t r;
  if (__builtin_add_overflow(a, b, &r)) throw NumericalUnderflow("integer overflow in matrix sum");
  return r;
}

std::int64_t minor2(const IntegerMatrix3& m, int r0, int r1, int c0, int c1) {
  return checked_add(checked_mul(m(r0, c0), m(r1, c1)), -checked_mul(m(r0, c1), m(r1, c0)));
}

// Extended gcd: returns g >= 0 with x*a + y*b = g.
std::int64_t ext_gcd(std::int64_t a, std::int64_t b, std::int64_t& x, std::int64_t& y) {
  std::int64_t old_r = a, r = b, old_s = 1, s = 0, old_t = 0, t = 1;
  while (r != 0) {
    const std::int64_t q = old_r / r;
    std::tie(old_r, r) = std::pair{r, old_r - q * r};
    std::tie(old_s, s) = std::pair{s, old_s - q * s};
    std::tie(old_t, t) = std::pair{t, old_t - q * t};
  }
  if (old_r < 0) {
    old_r = -old_r;
    old_s = -old_s;
    old_t = -old_t;
  }
  x = old_s;
  y = old_t;
  return old_r;
}

}  // namespace

IntegerMatrix3 IntegerMatrix3::identity() {
  return IntegerMatrix3(Entries{{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}});
}

std::int64_t IntegerMatrix3::det() const {
  const auto& a = m_;
  std::int64_t d = checked_mul(a[0][0], minor2(*this, 1, 2, 1, 2));
  d = checked_add(d, -checked_mul(a[0][1], minor2(*this, 1, 2, 0, 2)));
  d = checked_add(d, checked_mul(a[0][2], minor2(*this, 1, 2, 0, 1)));
  return d;
}

bool IntegerMatrix3::unimodular() const {
  const auto d = det();
  return d == 1 || d == -1;
}

IntegerMatrix3 IntegerMatrix3::inverse() const {
  const std::int64_t d = det();
  if (d != 1 && d != -1) throw NotPartiallyHyperbolicLinearization("matrix is not unimodular: det = " + std::to_string(d));
  IntegerMatrix3 inv;
  for (int r = 0; r < 3; ++r) {
    for (int c = 0; c < 3; ++c) {
      // cofactor of (c, r)
      const int r0 = (c + 1) % 3, r1 = (c + 2) % 3;
      const int c0 = (r + 1) % 3, c1 = (r + 2) % 3;
      inv(r, c) = d * minor2(*this, r0, r1, c0, c1);
    }
  }
  return inv;
}

IntegerMatrix3 IntegerMatrix3::operator*(const IntegerMatrix3& o) const {
  IntegerMatrix3 p;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) {
      std::int64_t s = 0;
      for (int k = 0; k < 3; ++k) s = checked_add(s, checked_mul(m_[r][k], o(k, c)));
      p(r, c) = s;
    }
  return p;
}

IntegerMatrix3 IntegerMatrix3::operator-(const IntegerMatrix3& o) const {
  IntegerMatrix3 d;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) d(r, c) = checked_add(m_[r][c], -o(r, c));
  return d;
}

IntegerMatrix3 IntegerMatrix3::power(int p) const {
  if (p < 0) return inverse().power(-p);
  IntegerMatrix3 result = identity();
  for (int i = 0; i < p; ++i) result = result * (*this);
  return result;
}

Cell IntegerMatrix3::apply(const Cell& v) const {
  Cell out;
  for (int r = 0; r < 3; ++r) {
    std::int64_t s = 0;
    for (int k = 0; k < 3; ++k) s = checked_add(s, checked_mul(m_[r][k], v(k)));
    out(r) = s;
  }
  return out;
}

Mat3 IntegerMatrix3::to_real() const {
  Mat3 a;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) a(r, c) = static_cast<double>(m_[r][c]);
  return a;
}

std::string IntegerMatrix3::str() const {
  std::ostringstream os;
  os << '[';
  for (int r = 0; r < 3; ++r) {
    os << (r ? ",[" : "[");
    for (int c = 0; c < 3; ++c) os << (c ? "," : "") << m_[r][c];
    os << ']';
  }
  os << ']';
  return os.str();
}

IntegerMatrix3 hermite_column_basis(const IntegerMatrix3& m) {
  if (m.det() == 0) throw NumericalUnderflow("hermite basis requested for a singular matrix");
  IntegerMatrix3 h = m;
  auto combine = [&h](int row, int ci, int cj) {
    // Column ops on (ci, cj) so that h(row, cj) becomes 0.
    const std::int64_t a = h(row, ci), b = h(row, cj);
    if (b == 0) return;
    std::int64_t x, y;
    const std::int64_t g = ext_gcd(a, b, x, y);
    const std::int64_t p = a / g, q = b / g;
    for (int r = 0; r < 3; ++r) {
      const std::int64_t u = h(r, ci), v = h(r, cj);
      h(r, ci) = checked_add(checked_mul(x, u), checked_mul(y, v));
      h(r, cj) = checked_add(checked_mul(-q, u), checked_mul(p, v));
    }
  };
  for (int row = 0; row < 3; ++row) {
    for (int c = row + 1; c < 3; ++c) combine(row, row, c);
    if (h(row, row) < 0)
      for (int r = 0; r < 3; ++r) h(r, row) = -h(r, row);
  }
  return h;
}

std::array<std::int64_t, 3> smith_invariants(const IntegerMatrix3& m) {
  std::int64_t g1 = 0;
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) g1 = std::gcd(g1, m(r, c));
  std::int64_t g2 = 0;
  for (int r0 = 0; r0 < 3; ++r0)
    for (int r1 = r0 + 1; r1 < 3; ++r1)
      for (int c0 = 0; c0 < 3; ++c0)
        for (int c1 = c0 + 1; c1 < 3; ++c1) g2 = std::gcd(g2, minor2(m, r0, r1, c0, c1));
  const std::int64_t g3 = m.det() < 0 ? -m.det() : m.det();
  const std::int64_t d1 = g1;
  const std::int64_t d2 = d1 == 0 ? 0 : g2 / d1;
  const std::int64_t d3 = g2 == 0 ? 0 : g3 / g2;
  return {d1, d2, d3};
}

}  // namespace ph3
