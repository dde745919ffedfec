#pragma once

#include <string>

#include "tsearch/voxel_map.hpp"

namespace th {

using tsearch::Index3;
using tsearch::Vec3;
using tsearch::VoxelGrid;
using tsearch::VoxelState;

inline std::string data_path(const std::string& rel) { return std::string(TSEARCH_DATA_DIR) + "/" + rel; }

// Grid at the origin with every voxel set to `s`.
inline VoxelGrid filled(Index3 dims, double res, VoxelState s) {
  VoxelGrid g(Vec3::Zero(), res, dims);
  if (s != VoxelState::Unknown)
    for (std::size_t i = 0; i < g.size(); ++i) g.set_state(i, s);
  return g;
}

inline void set(VoxelGrid& g, int x, int y, int z, VoxelState s) { g.set_state(g.linear(Index3(x, y, z)), s); }

// Closed cube [lo, lo + res]^3 against segment a-b, slab test.
inline bool segment_hits_cube(const Vec3& a, const Vec3& b, const Vec3& lo, double res) {
  double t0 = 0.0, t1 = 1.0;
  const Vec3 d = b - a;
  constexpr double eps = 1e-9;
  for (int k = 0; k < 3; ++k) {
    const double l = lo[k] - eps, h = lo[k] + res + eps;
    if (std::abs(d[k]) < 1e-15) {
      if (a[k] < l || a[k] > h) return false;
      continue;
    }
    double ta = (l - a[k]) / d[k], tb = (h - a[k]) / d[k];
    if (ta > tb) std::swap(ta, tb);
    t0 = std::max(t0, ta);
    t1 = std::min(t1, tb);
    if (t0 > t1) return false;
  }
  return true;
}

}  // namespace th
