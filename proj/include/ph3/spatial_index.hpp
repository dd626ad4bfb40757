#pragma once

#include "ph3/types.hpp"

#include <array>
#include <cstdint>
#include <unordered_map>
#include <vector>

namespace ph3 {

/// Uniform-grid hash over points of R^3 for nearest-neighbour queries.
class SpatialIndex {
 public:
  SpatialIndex(const std::vector<Vec3>& points, double cell);

  /// Index of the nearest stored point within `reach` cells; -1 if none.
  std::int64_t nearest(const Vec3& q, int reach = 1, double* distance = nullptr) const;
  /// Calls visit(i) for every stored point in the cells around q.
  template <class Visit>
  void for_neighbours(const Vec3& q, int reach, Visit&& visit) const {
    const auto c = cell_of(q);
    for (int dx = -reach; dx <= reach; ++dx)
      for (int dy = -reach; dy <= reach; ++dy)
        for (int dz = -reach; dz <= reach; ++dz) {
          const auto it = cells_.find(key(c[0] + dx, c[1] + dy, c[2] + dz));
          if (it == cells_.end()) continue;
          for (std::uint32_t i : it->second) visit(static_cast<std::size_t>(i));
        }
  }
  double cell() const { return cell_; }

 private:
  std::array<std::int64_t, 3> cell_of(const Vec3& p) const;
  static std::uint64_t key(std::int64_t a, std::int64_t b, std::int64_t c);

  const std::vector<Vec3>& points_;
  double cell_;
  std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> cells_;
};

}  // namespace ph3
