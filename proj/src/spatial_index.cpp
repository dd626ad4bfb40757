#include "ph3/spatial_index.hpp"

#include <cmath>
#include <limits>

namespace ph3 {

SpatialIndex::SpatialIndex(const std::vector<Vec3>& points, double cell) : points_(points), cell_(cell) {
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto c = cell_of(points[i]);
    cells_[key(c[0], c[1], c[2])].push_back(static_cast<std::uint32_t>(i));
  }
}

std::array<std::int64_t, 3> SpatialIndex::cell_of(const Vec3& p) const {
  return {static_cast<std::int64_t>(std::floor(p(0) / cell_)), static_cast<std::int64_t>(std::floor(p(1) / cell_)),
          static_cast<std::int64_t>(std::floor(p(2) / cell_))};
}

std::uint64_t SpatialIndex::key(std::int64_t a, std::int64_t b, std::int64_t c) {
  constexpr std::uint64_t mask = (1ull << 21) - 1;
  return (static_cast<std::uint64_t>(a) & mask) | ((static_cast<std::uint64_t>(b) & mask) << 21) |
         ((static_cast<std::uint64_t>(c) & mask) << 42);
}

std::int64_t SpatialIndex::nearest(const Vec3& q, int reach, double* distance) const {
  std::int64_t best = -1;
  double best_d = std::numeric_limits<double>::infinity();
  for_neighbours(q, reach, [&](std::size_t i) {
    const double d = (points_[i] - q).squaredNorm();
    if (d < best_d || (d == best_d && static_cast<std::int64_t>(i) < best)) {
      best_d = d;
      best = static_cast<std::int64_t>(i);
    }
  });
  if (distance) *distance = std::sqrt(best_d);
  return best;
}

}  // namespace ph3
