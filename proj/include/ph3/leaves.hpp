#pragma once

#include "ph3/cocycle.hpp"
#include "ph3/parallel.hpp"
#include "ph3/torus_maps.hpp"

#include <string>
#include <vector>

namespace ph3 {

struct LeafOptions {
  double spacing = 1e-2;           ///< h: maximal gap between consecutive vertices
  int horizon = 0;                 ///< pull-back depth n for strong leaves; 0 = automatic
  double seed_scale = 1e-12;       ///< automatic horizon aims at a seed of this half-length
  int frame_horizon = 40;          ///< power-iteration depth for e_sigma estimates
  double tangency_tolerance = 1e-6;
  int tangency_checks = 16;        ///< vertices re-checked against a fresh frame
  double chord_tolerance = 0.05;   ///< max angle (rad) between chord and tangent
  double on_leaf_tolerance = 1e-6; ///< miss allowed when locating a point on a leaf
  int max_horizon = 200;
  Execution exec = Execution::parallel;
};

/// Seed chart of a strong leaf: vertices are D^n(z + s e) with D = f (u) or
/// f^{-1} (s). Kept so that points can be re-evaluated at any parameter.
struct StrongChart {
  Sigma sigma = Sigma::u;
  Vec3 seed = Vec3::Zero();       ///< z = D^{-n}(x) on the torus
  Vec3 direction = Vec3::Zero();  ///< e_sigma(z)
  int horizon = 0;
  std::vector<Vec3> reference;    ///< D^k(z) reduced to [0,1)^3, k = 0..n
};

/// Arc-length parametrized polyline in the cover.
struct LeafSegment {
  Sigma sigma = Sigma::u;
  Vec3 base = Vec3::Zero();
  std::size_t base_index = 0;
  std::vector<Vec3> vertices;
  std::vector<double> arc;          ///< signed arc length from the base
  std::vector<Vec3> tangents;       ///< unit, oriented with increasing index
  std::vector<double> log_stretch;  ///< strong leaves: log |gamma'(s)|
  std::vector<double> parameter;    ///< strong leaves: seed parameter s
  double spacing = 0.0;
  int horizon = 0;
  double max_tangency_defect = 0.0;
  double max_chord_angle = 0.0;
  StrongChart chart;                ///< strong leaves only

  std::size_t size() const { return vertices.size(); }
  double length_before() const { return -arc.front(); }
  double length_after() const { return arc.back(); }
  /// Linear interpolation at signed arc length a.
  Vec3 point_at_arc(double a) const;
  /// Index i with arc[i] <= a < arc[i+1] (clamped).
  std::size_t segment_at_arc(double a) const;
};

/// Builds the seed chart at depth n for the strong sigma-leaf through x.
StrongChart make_chart(const TorusMap& map, Sigma sigma, const Vec3& x, int horizon, int frame_horizon = 40);

/// Strong stable or unstable leaf through x extending >= R on both sides.
LeafSegment trace_strong_leaf(const TorusMap& map, Sigma sigma, const Vec3& x, double R,
                              const LeafOptions& opts = {});

/// Center leaf by Heun steps of size h/10 along the re-estimated e_c field.
LeafSegment trace_center_leaf(const TorusMap& map, const Vec3& x, double R, const LeafOptions& opts = {});

LeafSegment trace_leaf(const TorusMap& map, Sigma sigma, const Vec3& x, double R, const LeafOptions& opts = {});

/// Point and log-stretch history of one seed parameter through every stage.
struct StageHistory {
  std::vector<Vec3> offsets;       ///< D^k(z + s e) - D^k(z), k = 0..n
  std::vector<double> increments;  ///< log ||Df t|| at stage k, k = 0..n-1
};
StageHistory stage_history(const TorusMap& map, const StrongChart& chart, double s);

/// Evaluates offset, unit tangent and log-stretch at seed parameter s.
struct ChartPoint {
  Vec3 offset = Vec3::Zero();  ///< relative to reference[n]
  Vec3 tangent = Vec3::Zero();
  double log_stretch = 0.0;
};
ChartPoint evaluate_chart(const TorusMap& map, const StrongChart& chart, double s);

struct QuasiIsometryReport {
  Sigma sigma = Sigma::u;
  double r_min = 0.0;
  std::size_t pairs = 0;
  double max_ratio = 1.0;   ///< sup d_W / ||x - y||
  double min_margin = 0.0;  ///< min (d_W - ||x - y||), must be >= 0
  std::vector<double> bucket_lower;  ///< chord buckets [r_min 2^b, r_min 2^{b+1})
  std::vector<double> bucket_max;
  bool non_increasing = true;
};

QuasiIsometryReport quasi_isometry_constant(const LeafSegment& leaf, double r_min, std::size_t sample = 600);

struct DirectionSample {
  double radius = 0.0;
  int side = 1;
  double chord = 0.0;
  Vec3 direction = Vec3::Zero();
  double angle = 0.0;  ///< to the eigen-line of the linearization
};

std::vector<DirectionSample> asymptotic_direction(const LeafSegment& leaf, const Vec3& eigen_direction,
                                                  const std::vector<double>& radii);

struct ComparabilityReport {
  int k = 1;
  double c_target = 2.0;
  std::size_t pairs = 0;
  double prop_min = 1.0, prop_max = 1.0;    ///< ||F^k x - F^k y|| / ||A^k (x - y)||
  double lemma_min = 1.0, lemma_max = 1.0;  ///< ||A^k (x - y)|| / (e^{k lambda_A} ||x - y||)
  double reported_m = 0.0;  ///< smallest sampled chord beyond which both ratios are inside; inf if none
  double prop_min_beyond = 1.0, prop_max_beyond = 1.0;
};

ComparabilityReport large_scale_comparability(const TorusMap& map, const LeafSegment& leaf, int k,
                                              double c_target, double m_min = 1.0, std::size_t sample = 400);

/// CSV with header arc_length,x1,x2,x3.
std::string leaf_csv(const LeafSegment& leaf);

/// Hausdorff distance between two polylines (vertices against segments).
double hausdorff_distance(const std::vector<Vec3>& a, const std::vector<Vec3>& b);

}  // namespace ph3
