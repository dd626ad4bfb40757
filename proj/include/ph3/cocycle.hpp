#pragma once

#include "ph3/parallel.hpp"
#include "ph3/torus_maps.hpp"

#include <array>
#include <cstdint>
#include <vector>

namespace ph3 {

struct SplittingFrame {
  Vec3 base = Vec3::Zero();
  std::array<Vec3, 3> directions{};  ///< e_s, e_c, e_u
  std::array<double, 3> residuals{};
  int horizon = 0;

  const Vec3& e(Sigma s) const { return directions[index(s)]; }
};

/// Direction estimates without residuals; also the planes they come from.
struct FrameEstimate {
  std::array<Vec3, 3> directions{};
  Vec3 normal_cu = Vec3::Zero();  ///< normal of the center-unstable plane
  Vec3 normal_cs = Vec3::Zero();  ///< normal of the center-stable plane
};

/// Power iteration along a pseudo-orbit of length n on each side of x.
FrameEstimate estimate_frame(const TorusMap& map, const Vec3& x, int n);

/// Frame at x with invariance residuals measured against the frame at f(x).
SplittingFrame oseledec_splitting(const TorusMap& map, const Vec3& x, int n = 40);

struct SeedExponents {
  std::uint64_t task = 0;
  Vec3 start = Vec3::Zero();
  std::array<double, 3> exponents{};
  std::array<double, 3> stderr_batch{};  ///< batch-means standard error along the orbit
};

struct LyapunovReport {
  std::array<double, 3> exponents{};  ///< sorted s <= c <= u
  std::array<double, 3> stderr_{};
  std::size_t n = 0;
  std::size_t burn_in = 0;
  std::uint64_t master_seed = 0;
  std::vector<SeedExponents> per_seed;

  double exponent(Sigma s) const { return exponents[index(s)]; }
  double stderr_of(Sigma s) const { return stderr_[index(s)]; }
  double sum() const { return exponents[0] + exponents[1] + exponents[2]; }
};

inline constexpr std::size_t default_burn_in = 1000;
inline constexpr int lyapunov_batches = 20;

/// Discrete QR along one orbit. Per-step re-orthonormalization of a full frame.
LyapunovReport lyapunov_spectrum(const TorusMap& map, const Vec3& x0, std::size_t n,
                                 std::size_t burn_in = default_burn_in);

/// Seed ensemble: seed i starts at a uniform point drawn from task_rng(master, i).
/// Exponents are seed means; stderr is the across-seed standard error.
LyapunovReport lyapunov_ensemble(const TorusMap& map, std::size_t seeds, std::uint64_t master_seed,
                                 std::size_t n, std::size_t burn_in = default_burn_in,
                                 Execution exec = Execution::parallel);

/// Volume-uniform start points used by ensembles.
std::vector<Vec3> seed_points(std::size_t seeds, std::uint64_t master_seed);

/// (1/n) sum log ||Df e_sigma|| along the orbit of x for all three directions.
/// The frame is propagated along the stored orbit: forward for e_u and the
/// center-unstable plane, backward for e_s and the center-stable plane.
std::array<double, 3> directional_exponents(const TorusMap& map, const Vec3& x, std::size_t n,
                                            int horizon = 40);
double directional_exponent(const TorusMap& map, const Vec3& x, Sigma sigma, std::size_t n,
                            int horizon = 40);

}  // namespace ph3
