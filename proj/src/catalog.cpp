#include "ph3/catalog.hpp"

#include <charconv>
#include <cmath>
#include <numbers>
#include <optional>

namespace ph3 {

IntegerMatrix3 matrix_ph() { return IntegerMatrix3({{{2, 1, 0}, {1, 1, 0}, {0, 0, 1}}}); }

IntegerMatrix3 matrix_anosov() { return IntegerMatrix3({{{3, 2, 1}, {2, 2, 1}, {1, 1, 1}}}); }

IntegerMatrix3 matrix_anosov_inverse() { return matrix_anosov().inverse(); }

TrigProfile unit_slope_sine() { return TrigProfile{{}, {1.0 / (2.0 * std::numbers::pi)}}; }

const std::vector<CatalogEntry>& catalog() {
  static const std::vector<CatalogEntry> entries{
      {"linear_ph", "A_ph = [[2,1,0],[1,1,0],[0,0,1]], center eigenvalue 1", 0.0, false},
      {"linear_anosov", "A_anosov = [[3,2,1],[2,2,1],[1,1,1]], splitting E^ss + E^s + E^u", 0.0, false},
      {"linear_anosov_inv", "inverse of A_anosov, splitting E^s + E^u + E^uu", 0.0, false},
      {"da_ph", "A_ph o shears x2 += eps psi(x1), x1 += eps psi(x3)", 0.2, true},
      {"da_anosov", "A_anosov o shears x2 += eps psi(x1), x1 += eps psi(x3)", 0.2, true},
      {"da_anosov_inv", "A_anosov^-1 o shears x2 += eps psi(x1), x1 += eps psi(x3)", 0.1, true},
      {"skew_ph", "A_ph o shears x2 += eps psi(x1), x1 += eps psi(x2); x3 is left fixed", 0.2, true},
      {"conj_ph", "Phi o A_ph o Phi^-1 with Phi = shears of amplitude eps", 0.1, true},
      {"conj_anosov", "Phi o A_anosov o Phi^-1 with Phi = shears of amplitude eps", 0.1, true},
      {"conj_anosov_inv", "Phi o A_anosov^-1 o Phi^-1 with Phi = shears of amplitude eps", 0.1, true},
  };
  return entries;
}

namespace {

ShearStep shear(int source, int target, double eps) { return ShearStep{source, target, eps, unit_slope_sine()}; }

std::string format_eps(double eps) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, eps);
  return std::string(buf, res.ptr);
}

}  // namespace

TorusMapSpec da_family(const IntegerMatrix3& a, double eps, const std::string& name) {
  TorusMapSpec spec;
  spec.name = name;
  spec.linear_part = a;
  spec.pre_shears = {shear(0, 1, eps), shear(2, 0, eps)};
  return spec;
}

TorusMapSpec skew_family(double eps) {
  TorusMapSpec spec;
  spec.name = "skew_ph:" + format_eps(eps);
  spec.linear_part = matrix_ph();
  spec.pre_shears = {shear(0, 1, eps), shear(1, 0, eps)};
  return spec;
}

TorusMapSpec conjugate_family(const IntegerMatrix3& a, double eps, const std::string& name) {
  TorusMapSpec spec;
  spec.name = name;
  spec.linear_part = a;
  spec.conjugator = {shear(0, 1, eps), shear(2, 0, eps)};
  return spec;
}

TorusMapSpec builtin_map(const std::string& name) {
  std::string family = name;
  std::optional<double> eps;
  if (const auto colon = name.find(':'); colon != std::string::npos) {
    family = name.substr(0, colon);
    const std::string tail = name.substr(colon + 1);
    double v = 0.0;
    const auto res = std::from_chars(tail.data(), tail.data() + tail.size(), v);
    if (res.ec != std::errc() || res.ptr != tail.data() + tail.size() || !std::isfinite(v))
      throw UsageError("bad parameter in map name '" + name + "'");
    eps = v;
  }
  for (const auto& entry : catalog()) {
    if (entry.family != family) continue;
    if (!entry.parametric && eps) throw UsageError("map '" + family + "' takes no parameter");
    const double e = eps.value_or(entry.default_epsilon);
    const std::string full = entry.parametric ? family + ":" + format_eps(e) : family;
    if (family == "linear_ph") return TorusMapSpec{full, matrix_ph(), {}, {}};
    if (family == "linear_anosov") return TorusMapSpec{full, matrix_anosov(), {}, {}};
    if (family == "linear_anosov_inv") return TorusMapSpec{full, matrix_anosov_inverse(), {}, {}};
    if (family == "da_ph") return da_family(matrix_ph(), e, full);
    if (family == "da_anosov") return da_family(matrix_anosov(), e, full);
    if (family == "da_anosov_inv") return da_family(matrix_anosov_inverse(), e, full);
    if (family == "skew_ph") return skew_family(e);
    if (family == "conj_ph") return conjugate_family(matrix_ph(), e, full);
    if (family == "conj_anosov") return conjugate_family(matrix_anosov(), e, full);
    if (family == "conj_anosov_inv") return conjugate_family(matrix_anosov_inverse(), e, full);
  }
  throw UsageError("unknown built-in map '" + name + "'");
}

TorusMapSpec flip_conjugate(const TorusMapSpec& spec, int coordinate) {
  if (coordinate < 0 || coordinate > 2) throw UsageError("flip coordinate must be 0, 1 or 2");
  std::array<std::int64_t, 3> r{1, 1, 1};
  r[coordinate] = -1;
  TorusMapSpec out = spec;
  out.name = spec.name + "~flip" + std::to_string(coordinate + 1);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) out.linear_part(i, j) = r[i] * r[j] * spec.linear_part(i, j);
  auto flip = [&r](ShearStep& s) {
    const double rt = static_cast<double>(r[s.target]);
    const double rjt = static_cast<double>(r[s.source] * r[s.target]);
    for (double& a : s.profile.cos_coeffs) a *= rt;
    for (double& b : s.profile.sin_coeffs) b *= rjt;
  };
  for (auto& s : out.pre_shears) flip(s);
  for (auto& s : out.conjugator) flip(s);
  return out;
}

}  // namespace ph3
