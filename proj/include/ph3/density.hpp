#pragma once

#include "ph3/leaves.hpp"

#include <vector>

namespace ph3 {

/// Hoelder model |log J(a) - log J(b)| <= c1 d(a,b)^alpha for the leaf
/// Jacobian, fitted on backward stage histories and inflated by 2.
struct TailModel {
  double c1 = 0.0;
  double alpha = 1.0;
  double lambda_min = 1.0;  ///< smallest observed per-step leaf expansion
  std::size_t samples = 0;
};

TailModel calibrate_tail(const TorusMap& map, const LeafSegment& leaf, Execution exec = Execution::parallel);

/// Bound on the neglected log-tail beyond depth N for leaf distance d.
double tail_bound(const TailModel& model, double distance, int depth);
/// Smallest depth whose tail bound is <= tau; TailNotCertified past the cap.
int certified_depth(const TailModel& model, double distance, double tau, int cap);

struct DeltaValue {
  double value = 1.0;
  double log_value = 0.0;
  int depth = 0;
  double tail = 0.0;  ///< certified bound on |log error|
};

/// Truncated product at a fixed depth between vertices i and j of a strong leaf.
DeltaValue delta_at_depth(const TorusMap& map, const LeafSegment& leaf, std::size_t i, std::size_t j, int depth);
/// Delta between vertices i and j with the depth chosen to certify tau.
DeltaValue delta(const TorusMap& map, const LeafSegment& leaf, const TailModel& model, std::size_t i, std::size_t j,
                 double tau);

struct DeltaOptions {
  double tau = 1e-8;
  LeafOptions leaf;
};

/// Delta^sigma(x, y) for cover points y on the sigma-leaf of x. Traces the
/// leaf, locates y on it and certifies the truncation.
DeltaValue delta(const TorusMap& map, Sigma sigma, const Vec3& x, const Vec3& y, const DeltaOptions& opts = {});

struct DensityProfile {
  Sigma sigma = Sigma::u;
  std::size_t base_index = 0;
  std::vector<double> arc;
  std::vector<double> values;  ///< Delta(x, y_i)
  std::vector<double> rho;
  int depth = 0;
  double tail = 0.0;
  double normalizer = 0.0;  ///< L(x)
  TailModel model;

  double length() const { return arc.back() - arc.front(); }
  /// Integral of rho over [a, b] in arc length (trapezoid, linear in between).
  double mass(double a, double b) const;
};

/// Delta from the vertex `base` (default: the leaf base) to every vertex.
DensityProfile density_profile(const TorusMap& map, const LeafSegment& leaf, double tau = 1e-8,
                               std::ptrdiff_t base = -1, Execution exec = Execution::parallel);

/// Largest arc radius around the base inside which |Delta - 1| <= threshold.
double flatness_radius(const DensityProfile& profile, double threshold = 0.1);

/// Trapezoid integral of values over the arc-length grid.
double trapezoid(const std::vector<double>& arc, const std::vector<double>& values);

/// Delta^c(x, y) for x, y on one center leaf of a map whose center is uniformly
/// expanding (orbits pulled back) or contracting (pushed forward). The two
/// computed orbits drift apart along the transverse direction, so the depth
/// is the one minimizing the tail bound C1 d_N / (lambda - 1).
DeltaValue center_delta(const TorusMap& map, const Vec3& x, const Vec3& y, int max_depth = 40,
                        int frame_horizon = 40);

}  // namespace ph3
