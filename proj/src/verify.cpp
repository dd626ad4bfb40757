#include "ph3/cocycle.hpp"
#include "ph3/torus_maps.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace ph3 {

PartialHyperbolicityEstimate verify_partial_hyperbolicity(const TorusMap& map, int horizon, int grid,
                                                          Execution exec, int frame_horizon) {
  if (horizon < 1) throw UsageError("verification horizon must be >= 1");
  if (grid < 1) throw UsageError("verification grid must be >= 1");
  const std::size_t count = static_cast<std::size_t>(grid) * grid * grid;
  std::vector<std::array<double, 3>> rates(count);
  std::vector<Vec3> points(count);

  for_each_index(count, exec, [&](std::size_t idx) {
    const std::size_t i = idx / (grid * grid), j = (idx / grid) % grid, k = idx % grid;
    const Vec3 x((i + 0.5) / grid, (j + 0.5) / grid, (k + 0.5) / grid);
    points[idx] = x;
    const FrameEstimate frame = estimate_frame(map, x, frame_horizon);
    for (int s = 0; s < 3; ++s) {
      Vec3 v = frame.directions[s];
      Vec3 p = x;
      double log_rate = 0.0;
      for (int step = 0; step < horizon; ++step) {
        p = reduce(map.step_tangent(p, v));
        const double len = v.norm();
        log_rate += std::log(len);
        v /= len;
      }
      rates[idx][s] = std::exp(log_rate / horizon);
    }
  });

  PartialHyperbolicityEstimate est;
  est.horizon = horizon;
  est.grid = grid;
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::array<RateBounds*, 3> bounds{&est.nu, &est.mu, &est.lambda};
  std::array<std::size_t, 3> argmin{}, argmax{};
  for (int s = 0; s < 3; ++s) *bounds[s] = {inf, -inf};
  for (std::size_t idx = 0; idx < count; ++idx) {
    for (int s = 0; s < 3; ++s) {
      if (rates[idx][s] < bounds[s]->min) {
        bounds[s]->min = rates[idx][s];
        argmin[s] = idx;
      }
      if (rates[idx][s] > bounds[s]->max) {
        bounds[s]->max = rates[idx][s];
        argmax[s] = idx;
      }
    }
  }
  est.center_contains_one = est.mu.min <= 1.0 && 1.0 <= est.mu.max;

  auto fail = [&](const std::string& what, std::size_t idx) {
    std::ostringstream os;
    os << what << " fails at horizon " << horizon << " (nu " << est.nu.min << ".." << est.nu.max << ", mu "
       << est.mu.min << ".." << est.mu.max << ", lambda " << est.lambda.min << ".." << est.lambda.max << ")";
    throw VerificationFailed(os.str(), points[idx], rates[idx], est);
  };
  if (!(est.nu.max < est.mu.min)) fail("nu+ < mu-", argmax[0]);
  if (!(est.mu.max < est.lambda.min)) fail("mu+ < lambda-", argmax[1]);
  if (!(est.nu.max < 1.0)) fail("nu+ < 1", argmax[0]);
  if (!(est.lambda.min > 1.0)) fail("lambda- > 1", argmin[2]);
  est.dominated = true;
  return est;
}

}  // namespace ph3
