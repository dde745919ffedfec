#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "tsearch/voxel_map.hpp"

namespace tsearch {

/// Per-voxel inflation masks for an agent body of `radius` metres, using a
/// cube of ceil(radius / res) voxels around each cell (clipped to the grid).
///   near_occupied: some Occupied voxel lies inside the cube.
///   traversable:   the cell is Free, its centre lies in the height band and
///                  every cell of the cube is Free.
struct ClearanceField {
  int radius_vox = 0;
  std::vector<std::uint8_t> near_occupied;
  std::vector<std::uint8_t> traversable;

  bool can_stand(std::size_t lin) const { return traversable[lin] != 0; }
};

namespace detail {

// In-place max filter over a cube, separable along the three axes.
inline void dilate_cube(const VoxelGrid& grid, std::vector<std::uint8_t>& mask, int r) {
  if (r <= 0) return;
  const Index3 d = grid.dims();
  std::vector<std::uint8_t> tmp(mask.size());
  for (int axis = 0; axis < 3; ++axis) {
    if (d[axis] == 1) continue;
    std::size_t stride = 1;
    for (int a = 0; a < axis; ++a) stride *= static_cast<std::size_t>(d[a]);
    const int len = d[axis];
    for (std::size_t lin = 0; lin < mask.size(); ++lin) {
      const int pos = grid.unlinear(lin)[axis];
      const std::size_t base = lin - static_cast<std::size_t>(pos) * stride;
      std::uint8_t v = 0;
      const int lo = std::max(0, pos - r);
      const int hi = std::min(len - 1, pos + r);
      for (int q = lo; q <= hi && !v; ++q) v = mask[base + static_cast<std::size_t>(q) * stride];
      tmp[lin] = v;
    }
    mask.swap(tmp);
  }
}

}  // namespace detail

inline ClearanceField compute_clearance(const VoxelGrid& grid, const MapConfig& cfg,
                                        double radius) {
  ClearanceField f;
  f.radius_vox = static_cast<int>(std::ceil(radius / grid.resolution() - 1e-9));
  const std::size_t n = grid.size();
  f.near_occupied.assign(n, 0);
  std::vector<std::uint8_t> not_free(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const VoxelState s = grid.state(i);
    f.near_occupied[i] = s == VoxelState::Occupied;
    not_free[i] = s != VoxelState::Free;
  }
  detail::dilate_cube(grid, f.near_occupied, f.radius_vox);
  detail::dilate_cube(grid, not_free, f.radius_vox);
  f.traversable.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (not_free[i]) continue;
    const double z = grid.center(i).z();
    if (z < cfg.band_min_z - 1e-9 || z > cfg.band_max_z + 1e-9) continue;
    f.traversable[i] = 1;
  }
  return f;
}

/// Cells 26-connected to `seed` through traversable cells. The seed itself is
/// always included.
inline std::vector<std::uint8_t> flood_traversable(const VoxelGrid& grid,
                                                   const ClearanceField& field,
                                                   std::size_t seed) {
  std::vector<std::uint8_t> seen(grid.size(), 0);
  std::vector<std::size_t> stack{seed};
  seen[seed] = 1;
  while (!stack.empty()) {
    const std::size_t cur = stack.back();
    stack.pop_back();
    grid.for_each_neighbor26(grid.unlinear(cur), [&](const Index3& n) {
      const std::size_t lin = grid.linear(n);
      if (seen[lin] || !field.traversable[lin]) return;
      seen[lin] = 1;
      stack.push_back(lin);
    });
  }
  return seen;
}

/// Segment visibility with body clearance: every traversed voxel is known
/// Free (an unmapped wall may hide in Unknown space), and none other than
/// the two endpoint cells lies within the inflation radius of an Occupied
/// voxel.
inline bool clear_segment(const VoxelGrid& grid, const ClearanceField& field, const Vec3& a,
                          const Vec3& b) {
  const Vec3 d = b - a;
  const double len = d.norm();
  const std::size_t la = grid.linear(grid.world_to_index(a));
  const std::size_t lb = grid.linear(grid.world_to_index(b));
  if (len == 0.0) return grid.state(la) != VoxelState::Occupied;
  bool ok = true;
  traverse(grid, a, d / len, len, [&](std::size_t lin) {
    if (grid.state(lin) != VoxelState::Free ||
        (lin != la && lin != lb && field.near_occupied[lin])) {
      ok = false;
      return false;
    }
    return true;
  });
  return ok;
}

}  // namespace tsearch
