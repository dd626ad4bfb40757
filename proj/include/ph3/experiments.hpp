#pragma once

#include "ph3/cocycle.hpp"
#include "ph3/torus_maps.hpp"

#include <array>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

namespace ph3 {

/// Every statistical decision uses mean +- 3 stderr.
inline constexpr double decision_sigmas = 3.0;
/// Added to 3 stderr so that exact cases are not decided by rounding.
inline constexpr double rounding_floor = 1e-9;
/// Gap between sorted per-seed values, in per-seed stderr units, that splits clusters.
inline constexpr double cluster_gap = 5.0;

enum class RigidityVerdict { rigid_consistent, inequality_consistent, violation };
std::string_view to_string(RigidityVerdict v);

struct SeedCluster {
  std::vector<std::size_t> seeds;
  std::array<double, 3> exponents{};
  std::array<double, 3> stderr_{};
};

/// Clusters of per-seed exponents split at gaps in lambda^u larger than
/// cluster_gap times the median per-seed stderr. One cluster if unimodal.
std::vector<SeedCluster> seed_clusters(const LyapunovReport& ensemble);

struct RigidityReport {
  TorusMapSpec spec;
  std::size_t seeds = 0;
  std::size_t n = 0;
  std::size_t burn_in = 0;
  std::uint64_t master_seed = 0;
  std::array<double, 3> exponents{};
  std::array<double, 3> stderr_{};
  std::array<double, 3> linear{};
  std::array<double, 3> difference{};  ///< exponent - linear
  bool rigid = false;
  bool inequality = false;
  bool strict_drop = false;  ///< lambda^u < lambda^u_A - 3 stderr
  RigidityVerdict verdict = RigidityVerdict::violation;
  std::vector<SeedCluster> clusters;  ///< more than one when the seeds look non-ergodic
  std::vector<SeedExponents> per_seed;
};

RigidityReport run_rigidity(const TorusMap& map, std::size_t seeds, std::size_t n, std::uint64_t master_seed,
                            std::size_t burn_in = default_burn_in, Execution exec = Execution::parallel);

struct SweepPoint {
  double epsilon = 0.0;
  std::string map;
  double mean = 0.0;
  double stderr_ = 0.0;
  double mirror_mean = 0.0;  ///< same quantity for the flipped conjugate of the map at -epsilon
  double mirror_stderr = 0.0;
  bool has_mirror = false;
};

struct SweepReport {
  std::string family;
  std::vector<SweepPoint> points;  ///< sorted by epsilon
  std::size_t seeds = 0;
  std::size_t n = 0;
  std::uint64_t master_seed = 0;
  int flip_coordinate = -1;
  double argmax = 0.0;
  bool max_at_zero = false;   ///< no point exceeds the epsilon = 0 mean by more than 3 stderr
  bool separated = false;     ///< |eps| >= separation_radius bars clear of the epsilon = 0 bar
  double separation_radius = 0.1;
  bool symmetric = true;      ///< mirror means agree within 3 combined stderr
};

using FamilyGenerator = std::function<TorusMapSpec(double)>;

/// Mean lambda^u per epsilon. When flip_coordinate >= 0, every negative epsilon
/// is also measured through flip_conjugate of the map at |epsilon|.
SweepReport run_sweep(const std::string& family, const FamilyGenerator& generator, std::vector<double> grid,
                      std::size_t seeds, std::size_t n, std::uint64_t master_seed, int flip_coordinate = -1,
                      double separation_radius = 0.1, Execution exec = Execution::parallel);

struct CenterTopologyReport {
  TorusMapSpec spec;
  double exponent = 0.0;  ///< lambda^c
  double stderr_ = 0.0;
  bool exponent_zero = false;  ///< |lambda^c| <= 1e-5
  std::vector<Vec3> starts;
  std::vector<double> closure;  ///< torus distance from the start at center arc 1
  double max_closure = 0.0;
  bool closes = false;          ///< every closure <= 1e-6
  bool verdict_applies = false; ///< shears avoid the center coordinate; descriptive otherwise
};

inline constexpr double center_exponent_tolerance = 1e-5;
inline constexpr double closure_tolerance = 1e-6;

/// Needs a center eigenvalue of modulus 1 (UsageError otherwise).
CenterTopologyReport run_center_topology(const TorusMap& map, std::size_t seeds, std::size_t n, std::size_t leaves,
                                         std::uint64_t master_seed, Execution exec = Execution::parallel);

struct AnosovCenterReport {
  TorusMapSpec spec;
  double exponent = 0.0;  ///< lambda^c
  double stderr_ = 0.0;
  double linear = 0.0;
  double margin = 0.0;    ///< lambda^c_A - lambda^c
  bool holds = false;     ///< lambda^c <= lambda^c_A + 3 stderr
};

/// Needs an Anosov linear part whose middle modulus exceeds 1.
AnosovCenterReport run_anosov_center_inequality(const TorusMap& map, std::size_t seeds, std::size_t n,
                                                std::uint64_t master_seed, Execution exec = Execution::parallel);

}  // namespace ph3
