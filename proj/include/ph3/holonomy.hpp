#pragma once

#include "ph3/density.hpp"

#include <string_view>
#include <vector>

namespace ph3 {

inline constexpr double intersection_tolerance = 1e-6;
inline constexpr double bisection_tolerance = 1e-8;

/// Crossing of a strong leaf with a center leaf inside their common cu-leaf.
struct Crossing {
  Vec3 point = Vec3::Zero();         ///< on the center leaf
  Vec3 strong_point = Vec3::Zero();  ///< on the strong leaf
  double strong_arc = 0.0;           ///< signed arc from the strong leaf base
  double center_arc = 0.0;           ///< signed arc from the center leaf base
  double miss = 0.0;                 ///< residual distance between the two curves
};

/// Bisection on the chart parameter of the strong leaf until the bracket is
/// shorter than bisection_tolerance in arc length.
Crossing intersect_leaves(const TorusMap& map, const LeafSegment& strong, const LeafSegment& center);

struct HolonomyOptions {
  LeafOptions leaf{.spacing = 1e-3};
  Execution exec = Execution::parallel;
};

/// Region between the center leaves of x and y, y on F^u_x at signed u-arc du.
struct Strip {
  Vec3 x = Vec3::Zero();
  Vec3 y = Vec3::Zero();
  double du = 0.0;
  LeafSegment center_x;
  LeafSegment center_y;
  std::vector<double> center_arcs;  ///< positions z on F^c_x
  std::vector<double> lengths;      ///< d^u(z, h_u(z))
  double consistency = 0.0;         ///< |h_u(x) - y|

  double min_length() const;
  double max_length() const;
};

/// y is snapped to the u-leaf vertex nearest to arc du, so it lies on the leaf.
Strip build_strip(const TorusMap& map, const Vec3& x, double du, double center_length, std::size_t samples,
                  const HolonomyOptions& opts = {});

/// h_u(z) for z on F^c_x at center arc a: F^u_z crossed with F^c_y.
Crossing unstable_holonomy(const TorusMap& map, const Strip& strip, double center_arc,
                           const HolonomyOptions& opts = {});

enum class HolonomyKind { center, unstable };
std::string_view to_string(HolonomyKind k);

struct HolonomySample {
  double du_xy = 0.0;
  double t = 0.0;
  double ratio = 1.0;
};

struct HolonomyReport {
  HolonomyKind kind = HolonomyKind::center;
  std::vector<HolonomySample> samples;
  double min_ratio = 1.0;
  double max_ratio = 1.0;
  double c_hat = 1.0;  ///< max(max, 1 / min)

  void summarize();
};

/// d^u(h^c(x), h^c(y)) / d^u(x, y) with y at u-arc du and h^c sliding by center arc t.
HolonomySample center_holonomy(const TorusMap& map, const Vec3& x, double du, double t,
                               const HolonomyOptions& opts = {});
HolonomyReport center_holonomy_report(const TorusMap& map, const std::vector<Vec3>& bases,
                                      const std::vector<double>& du, const std::vector<double>& t,
                                      const HolonomyOptions& opts = {});
/// Lengths of a strip normalized by d^u(x, y).
HolonomyReport unstable_holonomy_report(const Strip& strip);

struct LipschitzDelta {
  double segment = 0.0;    ///< d^u(x, a)
  double lipschitz = 1.0;  ///< d^u(h(x), h(a)) / d^u(x, a)
  DeltaValue delta_c;      ///< Delta^c(x, h(x))
  double ratio = 1.0;      ///< lipschitz / Delta^c
};

/// Center holonomy by arc t restricted to the u-segment [x, a] of length ell.
LipschitzDelta holonomy_lipschitz_vs_delta(const TorusMap& map, const Vec3& x, double ell, double t,
                                           const HolonomyOptions& opts = {});

}  // namespace ph3
