#pragma once

#include "ph3/torus_maps.hpp"

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace ph3 {

struct PeriodicOrbit {
  Vec3 x = Vec3::Zero();  ///< representative on the torus
  int period = 1;         ///< minimal period
  Cell k = Cell::Zero();  ///< F^period(x) = x + k in the cover
  std::array<double, 3> exponents{};  ///< (1/period) log |eigenvalue| per direction s, c, u
  double residual = 0.0;  ///< torus distance |f^period(x) - x|
  double log_det = 0.0;   ///< sum of the exponents times the period
};

/// Solution set of (A^p - I) x in Z^3 when A^p - I is singular.
struct ContinuumDescriptor {
  int kernel_dimension = 0;
  std::int64_t components = 0;  ///< translates of the kernel torus, product of the nonzero invariants
  Cell direction = Cell::Zero();  ///< primitive kernel vector (kernel dimension 1)
  std::array<std::int64_t, 3> invariants{};
};

struct PeriodicOptions {
  int continuation_steps = 8;  ///< amplitude levels between the linear part and the map
  int slices = 4;              ///< sample points per invariant circle in the singular case
  int max_iterations = 60;
  double residual_tolerance = 1e-10;
  int frame_horizon = 40;
  Execution exec = Execution::parallel;
};

struct PeriodicSearch {
  int period = 1;
  std::int64_t expected = 0;  ///< |det(A^p - I)|, 0 if singular
  std::size_t points = 0;     ///< periodic points found (all of them for isolated solutions)
  std::vector<PeriodicOrbit> orbits;
  std::optional<ContinuumDescriptor> continuum;
  std::size_t diverged = 0;   ///< seeds whose continuation failed
  std::size_t complex_excluded = 0;
  bool count_matches = true;  ///< points == expected, all distinct and closed under f
};

/// Exact solutions of (A^p - I) x = k, one per class of Z^3 / (A^p - I) Z^3,
/// reduced to [0,1)^3 and paired with their lattice vector k.
std::vector<std::pair<Vec3, Cell>> linear_periodic_points(const IntegerMatrix3& a, int p);

ContinuumDescriptor continuum_descriptor(const IntegerMatrix3& a, int p);

/// Points of the singular solution set: for every component, `slices` points
/// spread along the kernel direction.
std::vector<std::pair<Vec3, Cell>> linear_continuum_samples(const IntegerMatrix3& a, int p, int slices);

/// Period-p points continued in the shear amplitude from the linear solutions.
/// In the singular case the Newton step is constrained to the plane through
/// the seed normal to the kernel direction.
PeriodicSearch find_periodic_points(const TorusMap& map, int p, const PeriodicOptions& opts = {});

/// Exponents of Df^p at a periodic point, eigenvalues matched to the frame
/// directions by eigenvector angle. ComplexPair on a non-real pair.
std::array<double, 3> periodic_data(const TorusMap& map, const Vec3& x, int p, int frame_horizon = 40);

struct PeriodicDataReport {
  std::string map;
  int iterate = 1;  ///< exponents and periods refer to f^iterate
  int max_period = 1;
  double threshold = 1e-3;
  std::vector<PeriodicSearch> searches;  ///< per period of f^iterate
  std::vector<PeriodicOrbit> orbits;     ///< distinct orbits over all periods
  std::array<double, 3> spread{};
  std::array<double, 3> deviation{};  ///< max |lambda - iterate lambda_A|
  std::array<bool, 3> constant{true, true, true};
  std::size_t excluded = 0;
};

PeriodicDataReport periodic_data_constancy(const TorusMap& map, int max_period, double threshold = 1e-3,
                                           int iterate = 1, const PeriodicOptions& opts = {});

}  // namespace ph3
