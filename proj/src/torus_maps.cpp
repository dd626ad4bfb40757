#include "ph3/torus_maps.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace ph3 {

void TrigProfile::evaluate(double t, double& value, double& derivative) const {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  const double theta = two_pi * (t - std::floor(t));
  const double c1 = std::cos(theta), s1 = std::sin(theta);
  value = cos_coeffs.empty() ? 0.0 : cos_coeffs[0];
  derivative = 0.0;
  const std::size_t top = std::max(cos_coeffs.size() == 0 ? 0 : cos_coeffs.size() - 1, sin_coeffs.size());
  double cn = c1, sn = s1;
  for (std::size_t n = 1; n <= top; ++n) {
    const double a = n < cos_coeffs.size() ? cos_coeffs[n] : 0.0;
    const double b = n - 1 < sin_coeffs.size() ? sin_coeffs[n - 1] : 0.0;
    value += a * cn + b * sn;
    derivative += two_pi * static_cast<double>(n) * (b * cn - a * sn);
    const double next_c = cn * c1 - sn * s1;
    sn = sn * c1 + cn * s1;
    cn = next_c;
  }
}

void TrigProfile::difference(double t, double d, double& delta, double& derivative) const {
  constexpr double pi = std::numbers::pi;
  const double base = t - std::floor(t);
  // sin(a+b)-sin(a) = 2 cos(a+b/2) sin(b/2), cos(a+b)-cos(a) = -2 sin(a+b/2) sin(b/2)
  delta = 0.0;
  const std::size_t top = std::max(cos_coeffs.size() == 0 ? 0 : cos_coeffs.size() - 1, sin_coeffs.size());
  for (std::size_t n = 1; n <= top; ++n) {
    const double a = n < cos_coeffs.size() ? cos_coeffs[n] : 0.0;
    const double b = n - 1 < sin_coeffs.size() ? sin_coeffs[n - 1] : 0.0;
    const double nn = static_cast<double>(n);
    const double mid = 2.0 * pi * nn * (base + 0.5 * d);
    const double half = std::sin(pi * nn * d);
    delta += 2.0 * half * (b * std::cos(mid) - a * std::sin(mid));
  }
  derivative = this->derivative(base + d);
}

double TrigProfile::value(double t) const {
  double v, d;
  evaluate(t, v, d);
  return v;
}

double TrigProfile::derivative(double t) const {
  double v, d;
  evaluate(t, v, d);
  return d;
}

double TrigProfile::derivative_bound() const {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double bound = 0.0;
  for (std::size_t n = 1; n < cos_coeffs.size(); ++n) bound += two_pi * n * std::abs(cos_coeffs[n]);
  for (std::size_t n = 0; n < sin_coeffs.size(); ++n) bound += two_pi * (n + 1) * std::abs(sin_coeffs[n]);
  return bound;
}

void ShearStep::validate() const {
  if (source < 0 || source > 2 || target < 0 || target > 2)
    throw FormatError("shear coordinates must lie in 1..3");
  if (source == target) throw FormatError("shear source and target coordinates must differ");
  if (!std::isfinite(epsilon)) throw FormatError("shear amplitude must be finite");
  for (double c : profile.cos_coeffs)
    if (!std::isfinite(c)) throw FormatError("non-finite profile coefficient");
  for (double c : profile.sin_coeffs)
    if (!std::isfinite(c)) throw FormatError("non-finite profile coefficient");
}

LinearData linear_data(const IntegerMatrix3& a) {
  if (!a.unimodular())
    throw NotPartiallyHyperbolicLinearization("det = " + std::to_string(a.det()) + " is not +-1");
  const Mat3 m = a.to_real();
  Eigen::EigenSolver<Mat3> solver(m);
  const auto values = solver.eigenvalues();
  const auto vectors = solver.eigenvectors();
  std::array<int, 3> order{0, 1, 2};
  for (int i = 0; i < 3; ++i) {
    if (std::abs(values(i).imag()) > 1e-9)
      throw NotPartiallyHyperbolicLinearization(a.str() + " has a complex eigenvalue pair");
  }
  std::sort(order.begin(), order.end(),
            [&](int i, int j) { return std::abs(values(i).real()) < std::abs(values(j).real()); });
  LinearData out;
  out.matrix = a;
  for (int k = 0; k < 3; ++k) {
    const int i = order[k];
    double lambda = values(i).real();
    Vec3 v = vectors.col(i).real().normalized();
    // One step of inverse iteration polishes both to working precision.
    const Mat3 shifted = m - (lambda + 1e-10) * Mat3::Identity();
    v = shifted.fullPivLu().solve(v).normalized();
    lambda = v.dot(m * v);
    out.eigenvalues[k] = lambda;
    out.moduli[k] = std::abs(lambda);
    out.exponents[k] = std::log(std::abs(lambda));
    out.directions[k] = canonical_sign(v);
  }
  const auto& mod = out.moduli;
  const bool separated = mod[1] - mod[0] > 1e-9 && mod[2] - mod[1] > 1e-9;
  if (!separated || !(mod[0] < 1.0) || !(mod[2] > 1.0)) {
    std::ostringstream os;
    os << a.str() << " moduli " << mod[0] << ", " << mod[1] << ", " << mod[2]
       << " do not split as m_s < 1 < m_u with three classes";
    throw NotPartiallyHyperbolicLinearization(os.str());
  }
  out.anosov = std::abs(mod[1] - 1.0) > 1e-12;
  return out;
}

TorusMap::TorusMap(TorusMapSpec spec) : spec_(std::move(spec)) {
  for (const auto& s : spec_.pre_shears) s.validate();
  for (const auto& s : spec_.conjugator) s.validate();
  inverse_ = spec_.linear_part.inverse();
  try {
    linear_ = linear_data(spec_.linear_part);
  } catch (const NotPartiallyHyperbolicLinearization& e) {
    linear_error_ = e.what();
  }
  pipeline_forward_ = build(true);
  pipeline_inverse_ = build(false);
}

const LinearData& TorusMap::linearization() const {
  if (!linear_) throw NotPartiallyHyperbolicLinearization(linear_error_);
  return *linear_;
}

double TorusMap::perturbation_bound() const {
  double b = 0.0;
  for (const auto& s : spec_.pre_shears) b += std::abs(s.epsilon) * s.profile.derivative_bound();
  for (const auto& s : spec_.conjugator) b += 2.0 * std::abs(s.epsilon) * s.profile.derivative_bound();
  return b;
}

std::vector<TorusMap::Piece> TorusMap::build(bool forward) const {
  std::vector<Piece> pipe;
  auto push_shear = [&pipe](const ShearStep& s, double sign) {
    if (s.epsilon == 0.0) return;
    Piece p;
    p.kind = Piece::shear;
    p.source = s.source;
    p.target = s.target;
    p.amplitude = sign * s.epsilon;
    p.profile = s.profile;
    pipe.push_back(std::move(p));
  };
  auto push_linear = [&pipe](const IntegerMatrix3& m) {
    Piece p;
    p.kind = Piece::linear;
    p.matrix = m.to_real();
    pipe.push_back(std::move(p));
  };
  for (auto it = spec_.conjugator.rbegin(); it != spec_.conjugator.rend(); ++it) push_shear(*it, -1.0);
  if (forward) {
    for (const auto& s : spec_.pre_shears) push_shear(s, 1.0);
    push_linear(spec_.linear_part);
  } else {
    push_linear(inverse_);
    for (auto it = spec_.pre_shears.rbegin(); it != spec_.pre_shears.rend(); ++it) push_shear(*it, -1.0);
  }
  for (const auto& s : spec_.conjugator) push_shear(s, 1.0);
  return pipe;
}

Vec3 TorusMap::run(const std::vector<Piece>& pipe, const Vec3& x, Mat3* jac, Vec3* tangent) const {
  Vec3 p = x;
  if (jac) jac->setIdentity();
  for (const auto& piece : pipe) {
    if (piece.kind == Piece::shear) {
      double psi, dpsi;
      piece.profile.evaluate(p(piece.source), psi, dpsi);
      p(piece.target) += piece.amplitude * psi;
      const double slope = piece.amplitude * dpsi;
      if (jac) jac->row(piece.target) += slope * jac->row(piece.source);
      if (tangent) (*tangent)(piece.target) += slope * (*tangent)(piece.source);
    } else {
      p = piece.matrix * p;
      if (jac) *jac = piece.matrix * (*jac);
      if (tangent) *tangent = piece.matrix * (*tangent);
    }
  }
  return p;
}

Vec3 TorusMap::evaluate(const Vec3& x, Space space) const {
  if (space == Space::cover) return run(pipeline_forward_, x, nullptr, nullptr);
  return reduce(run(pipeline_forward_, reduce(x), nullptr, nullptr));
}

Vec3 TorusMap::inverse_evaluate(const Vec3& x, Space space) const {
  if (space == Space::cover) return run(pipeline_inverse_, x, nullptr, nullptr);
  return reduce(run(pipeline_inverse_, reduce(x), nullptr, nullptr));
}

Mat3 TorusMap::jacobian(const Vec3& x) const {
  Mat3 j;
  run(pipeline_forward_, reduce(x), &j, nullptr);
  return j;
}

Mat3 TorusMap::inverse_jacobian(const Vec3& x) const {
  Mat3 j;
  run(pipeline_inverse_, reduce(x), &j, nullptr);
  return j;
}

Vec3 TorusMap::step(const Vec3& x, Mat3* jac) const { return run(pipeline_forward_, x, jac, nullptr); }

Vec3 TorusMap::inverse_step(const Vec3& x, Mat3* jac) const { return run(pipeline_inverse_, x, jac, nullptr); }

Vec3 TorusMap::step_tangent(const Vec3& x, Vec3& v) const { return run(pipeline_forward_, x, nullptr, &v); }

Vec3 TorusMap::inverse_step_tangent(const Vec3& x, Vec3& v) const {
  return run(pipeline_inverse_, x, nullptr, &v);
}

Vec3 TorusMap::step_offset(const Vec3& r, Vec3& w, Vec3* tangent, bool inverse) const {
  const auto& pipe = inverse ? pipeline_inverse_ : pipeline_forward_;
  Vec3 p = r;
  for (const auto& piece : pipe) {
    if (piece.kind == Piece::shear) {
      double psi, dpsi_ref, delta, dpsi;
      piece.profile.evaluate(p(piece.source), psi, dpsi_ref);
      piece.profile.difference(p(piece.source), w(piece.source), delta, dpsi);
      p(piece.target) += piece.amplitude * psi;
      w(piece.target) += piece.amplitude * delta;
      if (tangent) (*tangent)(piece.target) += piece.amplitude * dpsi * (*tangent)(piece.source);
    } else {
      p = piece.matrix * p;
      w = piece.matrix * w;
      if (tangent) *tangent = piece.matrix * (*tangent);
    }
  }
  return p;
}

namespace {

Lifted recombine(const Cell& moved_cell, const Vec3& image) {
  Lifted out = Lifted::from_point(image);
  out.cell += moved_cell;
  return out;
}

}  // namespace

Lifted TorusMap::step(const Lifted& p) const {
  return recombine(spec_.linear_part.apply(p.cell), run(pipeline_forward_, p.frac, nullptr, nullptr));
}

Lifted TorusMap::inverse_step(const Lifted& p) const {
  return recombine(inverse_.apply(p.cell), run(pipeline_inverse_, p.frac, nullptr, nullptr));
}

Lifted TorusMap::step_tangent(const Lifted& p, Vec3& v) const {
  return recombine(spec_.linear_part.apply(p.cell), run(pipeline_forward_, p.frac, nullptr, &v));
}

Lifted TorusMap::inverse_step_tangent(const Lifted& p, Vec3& v) const {
  return recombine(inverse_.apply(p.cell), run(pipeline_inverse_, p.frac, nullptr, &v));
}

}  // namespace ph3
