#pragma once

#include "ph3/errors.hpp"
#include "ph3/integer_matrix.hpp"
#include "ph3/parallel.hpp"
#include "ph3/types.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace ph3 {

/// psi(t) = sum_n a_n cos(2 pi n t) + sum_{n>=1} b_n sin(2 pi n t).
struct TrigProfile {
  std::vector<double> cos_coeffs;  ///< a_0, a_1, ...
  std::vector<double> sin_coeffs;  ///< b_1, b_2, ...

  double value(double t) const;
  double derivative(double t) const;
  /// Value and derivative in one pass.
  void evaluate(double t, double& value, double& derivative) const;
  /// psi(t + d) - psi(t) without cancellation, and psi'(t + d).
  void difference(double t, double d, double& delta, double& derivative) const;
  /// sum 2 pi n (|a_n| + |b_n|) >= sup |psi'|.
  double derivative_bound() const;

  bool operator==(const TrigProfile&) const = default;
};

/// g(x) = x + epsilon psi(x_j) e_k, 0-based coordinates.
struct ShearStep {
  int source = 0;
  int target = 1;
  double epsilon = 0.0;
  TrigProfile profile;

  void validate() const;
  bool operator==(const ShearStep&) const = default;
};

struct TorusMapSpec {
  std::string name;
  IntegerMatrix3 linear_part;
  std::vector<ShearStep> pre_shears;  ///< applied first to last
  std::vector<ShearStep> conjugator;  ///< Phi = last o ... o first

  bool operator==(const TorusMapSpec&) const = default;
};

enum class Space { torus, cover };

/// Eigen data of the linearization, directions ordered (s, c, u).
struct LinearData {
  IntegerMatrix3 matrix;
  std::array<double, 3> eigenvalues{};  ///< signed real eigenvalues
  std::array<double, 3> moduli{};
  std::array<double, 3> exponents{};  ///< log moduli
  std::array<Vec3, 3> directions{};   ///< unit, canonical sign
  bool anosov = false;

  double modulus(Sigma s) const { return moduli[index(s)]; }
  double exponent(Sigma s) const { return exponents[index(s)]; }
  const Vec3& direction(Sigma s) const { return directions[index(s)]; }
};

LinearData linear_data(const IntegerMatrix3& a);

/// Evaluable diffeomorphism of T^3 built from a TorusMapSpec.
///
/// f = Phi o A o g_m o ... o g_1 o Phi^{-1}. The map is immutable and safe to
/// share across threads.
class TorusMap {
 public:
  explicit TorusMap(TorusMapSpec spec);

  const TorusMapSpec& spec() const { return spec_; }
  const std::string& name() const { return spec_.name; }
  const IntegerMatrix3& linear_part() const { return spec_.linear_part; }
  const IntegerMatrix3& linear_inverse() const { return inverse_; }
  const LinearData& linearization() const;
  bool is_linear() const { return pipeline_forward_.size() == 1; }
  /// Sum of |epsilon| sup|psi'| over all shears (conjugator counted twice).
  double perturbation_bound() const;

  Vec3 evaluate(const Vec3& x, Space space = Space::torus) const;
  Vec3 inverse_evaluate(const Vec3& x, Space space = Space::torus) const;
  Mat3 jacobian(const Vec3& x) const;
  /// Jacobian of f^{-1} at x.
  Mat3 inverse_jacobian(const Vec3& x) const;

  /// Cover step with value and Jacobian at x (x is any cover point).
  Vec3 step(const Vec3& x, Mat3* jac) const;
  Vec3 inverse_step(const Vec3& x, Mat3* jac) const;
  /// Cover step that also pushes a tangent vector: v <- Df(x) v.
  Vec3 step_tangent(const Vec3& x, Vec3& v) const;
  Vec3 inverse_step_tangent(const Vec3& x, Vec3& v) const;

  /// Exact lifted iteration: F(m + r) = F(r) + A m.
  Lifted step(const Lifted& p) const;
  Lifted inverse_step(const Lifted& p) const;
  Lifted step_tangent(const Lifted& p, Vec3& v) const;
  Lifted inverse_step_tangent(const Lifted& p, Vec3& v) const;

  /// Offset form of one step: given a reference point r and an offset w,
  /// replaces w by F(r + w) - F(r) computed without cancellation and
  /// returns F(r). The optional tangent is pushed by Df(r + w).
  Vec3 step_offset(const Vec3& r, Vec3& w, Vec3* tangent, bool inverse = false) const;

 private:
  struct Piece {
    enum Kind { shear, linear } kind = linear;
    int source = 0, target = 0;
    double amplitude = 0.0;  // signed: negative for an inverse shear
    TrigProfile profile;
    Mat3 matrix = Mat3::Identity();
  };
  std::vector<Piece> build(bool forward) const;
  Vec3 run(const std::vector<Piece>& pipe, const Vec3& x, Mat3* jac, Vec3* tangent) const;

  TorusMapSpec spec_;
  IntegerMatrix3 inverse_;
  std::optional<LinearData> linear_;
  std::string linear_error_;
  std::vector<Piece> pipeline_forward_;
  std::vector<Piece> pipeline_inverse_;
};

struct RateBounds {
  double min = 0.0;
  double max = 0.0;
};

struct PartialHyperbolicityEstimate {
  RateBounds nu, mu, lambda;  ///< per-direction rates ||Df^n e||^{1/n}
  int horizon = 1;
  int grid = 0;
  bool dominated = false;        ///< nu+ < mu- and mu+ < lambda-, nu+ < 1 < lambda-
  bool center_contains_one = false;  ///< mu- <= 1 <= mu+
};

/// Violating grid sample of a failed verification.
class VerificationFailed : public Error {
 public:
  VerificationFailed(const std::string& detail, Vec3 point, std::array<double, 3> rates,
                     PartialHyperbolicityEstimate estimate)
      : Error("VerificationFailed", detail), point(point), rates(rates), estimate(estimate) {}
  Vec3 point;
  std::array<double, 3> rates;
  PartialHyperbolicityEstimate estimate;
};

/// Finite-time rate certification on a grid^3 lattice of points.
PartialHyperbolicityEstimate verify_partial_hyperbolicity(const TorusMap& map, int horizon, int grid,
                                                          Execution exec = Execution::parallel,
                                                          int frame_horizon = 40);

}  // namespace ph3
