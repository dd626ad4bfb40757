#include "ph3/types.hpp"

#include "ph3/errors.hpp"

#include <cmath>

namespace ph3 {

std::string_view to_string(Sigma s) {
  switch (s) {
    case Sigma::s: return "s";
    case Sigma::c: return "c";
    case Sigma::u: return "u";
  }
  return "?";
}

Sigma sigma_from_string(std::string_view name) {
  if (name == "s") return Sigma::s;
  if (name == "c") return Sigma::c;
  if (name == "u") return Sigma::u;
  throw UsageError("unknown direction '" + std::string(name) + "' (expected s, c or u)");
}

Vec3 reduce(const Vec3& x) {
  Vec3 r;
  for (int i = 0; i < 3; ++i) {
    double v = x(i) - std::floor(x(i));
    if (v >= 1.0) v = 0.0;
    r(i) = v;
  }
  return r;
}

Lifted Lifted::from_point(const Vec3& p) {
  Lifted l;
  for (int i = 0; i < 3; ++i) {
    const double f = std::floor(p(i));
    l.cell(i) = static_cast<std::int64_t>(f);
    double r = p(i) - f;
    if (r >= 1.0) {
      r = 0.0;
      l.cell(i) += 1;
    }
    l.frac(i) = r;
  }
  return l;
}

Vec3 Lifted::to_point() const { return cell.cast<double>() + frac; }

Vec3 Lifted::minus(const Lifted& other) const {
  return (cell - other.cell).cast<double>() + (frac - other.frac);
}

Vec3 torus_difference(const Vec3& a, const Vec3& b) {
  Vec3 d = a - b;
  for (int i = 0; i < 3; ++i) d(i) -= std::nearbyint(d(i));
  return d;
}

double torus_distance(const Vec3& a, const Vec3& b) { return torus_difference(a, b).norm(); }

double line_angle(const Vec3& a, const Vec3& b) {
  const double c = std::abs(a.dot(b)) / (a.norm() * b.norm());
  const double s = a.cross(b).norm() / (a.norm() * b.norm());
  return std::atan2(s, c);
}

Vec3 canonical_sign(const Vec3& v) {
  for (int i = 0; i < 3; ++i) {
    if (std::abs(v(i)) > 1e-12) return v(i) < 0 ? Vec3(-v) : v;
  }
  return v;
}

}  // namespace ph3
