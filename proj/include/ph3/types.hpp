#pragma once

#include <Eigen/Dense>

#include <array>
#include <cstdint>
#include <string>
#include <string_view>

namespace ph3 {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Cell = Eigen::Matrix<std::int64_t, 3, 1>;

/// Invariant direction of the splitting E^s + E^c + E^u.
enum class Sigma { s = 0, c = 1, u = 2 };

inline constexpr std::array<Sigma, 3> all_sigmas{Sigma::s, Sigma::c, Sigma::u};

inline int index(Sigma s) { return static_cast<int>(s); }

std::string_view to_string(Sigma s);
Sigma sigma_from_string(std::string_view name);

/// Point of R^3 stored as integer cell plus fractional part in [0,1)^3.
///
/// Long leaf constructions run the dynamics for tens of steps on the cover;
/// a plain double loses the fractional part once coordinates reach ~1e8.
struct Lifted {
  Cell cell = Cell::Zero();
  Vec3 frac = Vec3::Zero();

  static Lifted from_point(const Vec3& p);
  Vec3 to_point() const;
  /// this - other, exact in the integer part.
  Vec3 minus(const Lifted& other) const;
};

/// x - floor(x) componentwise, guaranteed to land in [0,1).
Vec3 reduce(const Vec3& x);
/// Euclidean distance on T^3 (minimum over lattice translates).
double torus_distance(const Vec3& a, const Vec3& b);
/// Representative of a - b with components in [-1/2, 1/2].
Vec3 torus_difference(const Vec3& a, const Vec3& b);

/// Angle in [0, pi/2] between two lines.
double line_angle(const Vec3& a, const Vec3& b);
/// Flip v so that its first component with |v_i| > 1e-12 is positive.
Vec3 canonical_sign(const Vec3& v);

}  // namespace ph3
