#pragma once

#include "ph3/density.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace ph3 {

/// Plaques of F^sigma through a square grid on the plane spanned by the two
/// other eigen-directions of the linearization.
struct FoliatedBox {
  Sigma sigma = Sigma::u;
  Vec3 center = Vec3::Zero();
  double length = 0.0;       ///< R: every plaque has arc length >= R
  double disk_radius = 0.0;  ///< half side of the transverse grid
  int grid = 1;
  double step = 0.0;         ///< transverse grid spacing
  Mat3 frame = Mat3::Identity();  ///< columns t1, t2 (transversal) and E^sigma_A
  std::vector<Vec3> disk;
  std::vector<std::array<int, 2>> grid_index;
  std::vector<LeafSegment> plaques;
  std::size_t central = 0;
  double min_separation = 0.0;

  bool interior(std::size_t p) const;
};

struct BoxOptions {
  LeafOptions leaf;
  bool check_disjoint = true;
};

/// plaque_count must be a perfect square (grid side).
FoliatedBox build_foliated_box(const TorusMap& map, Sigma sigma, const Vec3& x, double R, double disk_radius,
                               int plaque_count, const BoxOptions& opts = {});

struct PlaqueHistogram {
  std::size_t plaque = 0;
  std::size_t samples = 0;
  std::vector<std::size_t> counts;
  std::vector<double> density;  ///< per unit arc length, integrates to 1
  std::vector<double> stderr_;  ///< binomial
  bool empty_bin = false;       ///< some bin has fewer than 10 samples
};

struct EmpiricalDisintegration {
  std::vector<double> edges;  ///< bin edges in arc length, [-R/2, R/2]
  std::vector<PlaqueHistogram> plaques;  ///< interior plaques only
  std::size_t samples = 0;    ///< accepted points in the box solid
  std::size_t draws = 0;
  std::uint64_t seed = 0;
  bool empty_bin = false;
};

inline constexpr std::size_t disintegration_chunk = 1 << 15;

/// Uniform points in a bounding parallelepiped of the box, kept when they fall
/// in the solid, assigned to the nearest plaque and binned by arc length.
/// Chunk i of draws uses task_rng(seed, i).
EmpiricalDisintegration empirical_disintegration(const FoliatedBox& box, std::size_t samples, int bins,
                                                 std::uint64_t seed, Execution exec = Execution::parallel);

/// Bin masses of the analytic rho of a plaque, renormalized to [-R/2, R/2].
std::vector<double> profile_bin_masses(const DensityProfile& profile, const std::vector<double>& edges);
/// L1 distance between a histogram and bin masses.
double l1_distance(const PlaqueHistogram& hist, const std::vector<double>& edges, const std::vector<double>& masses);
double l1_to_uniform(const PlaqueHistogram& hist, const std::vector<double>& edges);

/// CSV: plaque_id,bin_center_arclength,density,stderr
std::string histogram_csv(const EmpiricalDisintegration& e);

enum class UbdMode { analytic, empirical };
enum class UbdVerdict { bounded, growing, inconclusive };

std::string_view to_string(UbdMode m);
std::string_view to_string(UbdVerdict v);

struct UbdOptions {
  std::size_t centers = 4;
  std::uint64_t seed = 1;
  double disk_radius = 0.05;
  int plaque_count = 9;
  double tau = 1e-8;
  int bins = 20;
  std::size_t samples = 200000;  ///< empirical mode, per box
  double spacing = 1e-2;         ///< leaf spacing for analytic plaques
  Execution exec = Execution::parallel;
};

struct UbdReport {
  Sigma sigma = Sigma::u;
  UbdMode mode = UbdMode::analytic;
  std::vector<double> lengths;
  std::vector<double> k;  ///< K(R)
  double slope = 0.0;     ///< of log K against log R over the top decade
  UbdVerdict verdict = UbdVerdict::inconclusive;
  std::vector<Vec3> centers;
};

inline constexpr double ubd_slope_threshold = 0.05;

/// Least-squares slope of log K against log R for R >= R_max / 10.
double top_decade_slope(const std::vector<double>& lengths, const std::vector<double>& k, std::size_t* points = nullptr);
UbdVerdict ubd_verdict(double slope, std::size_t points);

UbdReport ubd_constant(const TorusMap& map, Sigma sigma, const std::vector<double>& lengths, UbdMode mode,
                       const UbdOptions& opts = {});

}  // namespace ph3
