#pragma once

// Reference computations that share no code with the library.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using IMat = std::array<std::array<std::int64_t, 3>, 3>;

inline IMat multiply(const IMat& a, const IMat& b) {
  IMat c{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k) c[i][j] += a[i][k] * b[k][j];
  return c;
}

inline std::int64_t det(const IMat& m) {
  return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
         m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
}

/// |det(A^p - I)| by repeated integer multiplication.
inline std::int64_t lefschetz(const IMat& a, int p) {
  IMat m{{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}};
  for (int i = 0; i < p; ++i) m = multiply(m, a);
  for (int i = 0; i < 3; ++i) m[i][i] -= 1;
  const std::int64_t d = det(m);
  return d < 0 ? -d : d;
}

/// Real roots of the characteristic polynomial l^3 - t l^2 + c l - d, sorted
/// by modulus, found by bisection on sign changes of a fine scan.
inline std::array<double, 3> eigenvalues(const IMat& a) {
  const double t = double(a[0][0] + a[1][1] + a[2][2]);
  const double c = double(a[0][0] * a[1][1] - a[0][1] * a[1][0] + a[0][0] * a[2][2] - a[0][2] * a[2][0] +
                          a[1][1] * a[2][2] - a[1][2] * a[2][1]);
  const double d = double(det(a));
  auto p = [&](long double l) { return ((l - t) * l + c) * l - d; };
  std::vector<double> roots;
  const double bound = 1.0 + std::abs(t) + std::abs(c) + std::abs(d);
  const int steps = 200000;
  long double prev = -bound;
  for (int i = 1; i <= steps; ++i) {
    long double cur = -bound + 2.0L * bound * i / steps;
    if (p(prev) == 0.0L) roots.push_back(double(prev));
    else if ((p(prev) < 0) != (p(cur) < 0) && p(cur) != 0.0L) {
      long double lo = prev, hi = cur;
      for (int k = 0; k < 200; ++k) {
        long double mid = (lo + hi) / 2;
        if ((p(lo) < 0) == (p(mid) < 0)) lo = mid;
        else hi = mid;
      }
      roots.push_back(double((lo + hi) / 2));
    }
    prev = cur;
  }
  std::sort(roots.begin(), roots.end(), [](double x, double y) { return std::abs(x) < std::abs(y); });
  std::array<double, 3> out{};
  for (std::size_t i = 0; i < 3 && i < roots.size(); ++i) out[i] = roots[i];
  return out;
}

inline std::array<double, 3> log_moduli(const IMat& a) {
  auto ev = eigenvalues(a);
  return {std::log(std::abs(ev[0])), std::log(std::abs(ev[1])), std::log(std::abs(ev[2]))};
}

/// Central differences with step h.
inline Eigen::Matrix3d jacobian_fd(const std::function<Eigen::Vector3d(const Eigen::Vector3d&)>& f,
                                   const Eigen::Vector3d& x, double h = 1e-6) {
  Eigen::Matrix3d j;
  for (int c = 0; c < 3; ++c) {
    Eigen::Vector3d e = Eigen::Vector3d::Zero();
    e(c) = h;
    j.col(c) = (f(x + e) - f(x - e)) / (2 * h);
  }
  return j;
}

inline double point_segment(const Eigen::Vector3d& p, const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
  const Eigen::Vector3d ab = b - a;
  const double len2 = ab.squaredNorm();
  double t = len2 > 0 ? (p - a).dot(ab) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return (a + t * ab - p).norm();
}

inline double point_polyline(const Eigen::Vector3d& p, const std::vector<Eigen::Vector3d>& line) {
  double best = INFINITY;
  for (std::size_t i = 0; i + 1 < line.size(); ++i) best = std::min(best, point_segment(p, line[i], line[i + 1]));
  return best;
}

}  // namespace oracle
