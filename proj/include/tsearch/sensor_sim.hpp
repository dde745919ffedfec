#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

#include "tsearch/clearance.hpp"
#include "tsearch/voxel_map.hpp"

namespace tsearch {

class InvalidPose : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Fully labelled world. `grid` holds only Free and Occupied voxels;
/// `target_voxels[i]` is the Occupied surface voxel carrying `targets[i]`.
struct GroundTruthWorld {
  VoxelGrid grid;
  std::vector<Vec3> targets;
  std::vector<std::size_t> target_voxels;
};

struct LidarPattern {
  double azimuth_res_deg = 1.0;
  double elevation_res_deg = 2.0;
  double elevation_min_deg = -90.0;
  double elevation_max_deg = 90.0;
};

/// Elevation rows used on this grid. A single-layer grid only ever sees the
/// level row; other rows would leave the slab in their first voxel.
inline std::vector<double> elevation_rows(const LidarPattern& p, const VoxelGrid& grid) {
  if (grid.dims().z() == 1) return {0.0};
  std::vector<double> rows;
  if (!(p.elevation_res_deg > 0.0)) return {0.0};
  const int n = static_cast<int>(
      std::floor((p.elevation_max_deg - p.elevation_min_deg) / p.elevation_res_deg + 1e-9));
  for (int i = 0; i <= n; ++i) rows.push_back(p.elevation_min_deg + i * p.elevation_res_deg);
  return rows;
}

namespace detail {

// Parameter at which origin + t * dir leaves the grid box (origin inside).
inline double exit_parameter(const VoxelGrid& grid, const Vec3& origin, const Vec3& dir) {
  const Vec3 lo = grid.min_corner();
  const Vec3 hi = grid.max_corner();
  double t = std::numeric_limits<double>::infinity();
  for (int a = 0; a < 3; ++a) {
    if (dir[a] > 0.0) t = std::min(t, (hi[a] - origin[a]) / dir[a]);
    else if (dir[a] < 0.0) t = std::min(t, (lo[a] - origin[a]) / dir[a]);
  }
  return t;
}

template <typename F>
void for_each_lidar_direction(const LidarPattern& p, const VoxelGrid& grid, F&& f) {
  const int n_az = std::max(1, static_cast<int>(std::lround(360.0 / p.azimuth_res_deg)));
  for (double el_deg : elevation_rows(p, grid)) {
    const double el = deg_to_rad(el_deg);
    const bool pole = std::abs(std::abs(el_deg) - 90.0) < 1e-9;
    const int count = pole ? 1 : n_az;
    for (int k = 0; k < count; ++k) {
      const double az = 2.0 * kPi * k / n_az;
      f(Vec3(std::cos(el) * std::cos(az), std::cos(el) * std::sin(az), std::sin(el)));
    }
  }
}

inline void require_valid_pose(const GroundTruthWorld& world, const Pose& pose) {
  if (!world.grid.contains_point(pose.position))
    throw InvalidPose("sensor pose lies outside the world");
  const std::size_t lin = world.grid.linear(world.grid.world_to_index(pose.position));
  if (world.grid.state(lin) == VoxelState::Occupied)
    throw InvalidPose("sensor pose lies inside an occupied voxel");
}

}  // namespace detail

/// Noise-free range scan traced in the ground truth. Hit rays end at the
/// centre of the struck voxel; misses end at the range limit or where the ray
/// leaves the world box.
inline RangeScan simulate_lidar(const GroundTruthWorld& world, const Pose& pose,
                                const MapConfig& cfg, const LidarPattern& pattern) {
  detail::require_valid_pose(world, pose);
  const VoxelGrid& g = world.grid;
  RangeScan scan;
  scan.origin = pose.position;
  detail::for_each_lidar_direction(pattern, g, [&](const Vec3& dir) {
    const double t_exit = detail::exit_parameter(g, pose.position, dir);
    const double max_t = std::min(cfg.lidar_range, std::max(0.0, t_exit - 1e-9));
    std::size_t last = 0;
    bool hit = false;
    traverse(g, pose.position, dir, max_t, [&](std::size_t lin) {
      last = lin;
      if (g.state(lin) == VoxelState::Occupied) {
        hit = true;
        return false;
      }
      return true;
    });
    RangeRay ray;
    ray.direction = dir;
    ray.hit = hit;
    ray.endpoint = hit ? g.center(last) : Vec3(pose.position + dir * max_t);
    scan.rays.push_back(ray);
  });
  return scan;
}

inline RangeScan simulate_lidar(const GroundTruthWorld& world, const Pose& pose,
                                const MapConfig& cfg, double angular_res_deg) {
  LidarPattern p;
  p.azimuth_res_deg = angular_res_deg;
  return simulate_lidar(world, pose, cfg, p);
}

struct CameraFrame {
  std::vector<std::pair<std::size_t, double>> visible;  // voxel, distance
  std::vector<std::size_t> targets;                     // indices into world.targets
};

/// What the camera sees of the ground truth from `pose`: Occupied voxels in
/// the frustum within lidar range with a clear line of sight, and targets
/// among them within d_max.
inline CameraFrame simulate_camera(const GroundTruthWorld& world, const Pose& pose,
                                   const MapConfig& cfg) {
  detail::require_valid_pose(world, pose);
  const VoxelGrid& g = world.grid;
  CameraFrame frame;
  std::vector<std::size_t> occ = g.occupied();
  std::sort(occ.begin(), occ.end());
  for (std::size_t lin : occ) {
    const Vec3 c = g.center(lin);
    const double dist = (c - pose.position).norm();
    if (dist > cfg.lidar_range || dist == 0.0) continue;
    if (!in_frustum(pose.position, pose.yaw, c, cfg)) continue;
    if (!line_of_sight(g, pose.position, lin, false)) continue;
    frame.visible.emplace_back(lin, dist);
  }
  for (std::size_t i = 0; i < world.target_voxels.size(); ++i) {
    const std::size_t tv = world.target_voxels[i];
    for (const auto& [lin, dist] : frame.visible)
      if (lin == tv && dist <= cfg.d_max) frame.targets.push_back(i);
  }
  return frame;
}

/// Voxels the search must account for, i.e. the complement of the residual
/// space. Agent positions are traversable truth cells 26-connected to `start`.
/// A Free voxel counts when some lidar ray from such a position crosses it
/// (positions subsampled by `stride` per axis); an Occupied surface voxel
/// counts when a camera at some position could inspect it (within d_max,
/// inside the vertical field of view for some yaw, clear line of sight).
inline std::vector<std::uint8_t> compute_reachable_mask(const GroundTruthWorld& world,
                                                        const MapConfig& cfg,
                                                        const LidarPattern& pattern,
                                                        double clearance, const Vec3& start,
                                                        int stride = 1) {
  const VoxelGrid& g = world.grid;
  const ClearanceField field = compute_clearance(g, cfg, clearance);
  const std::size_t seed = g.linear(g.world_to_index(start));
  const std::vector<std::uint8_t> positions = flood_traversable(g, field, seed);

  std::vector<std::uint8_t> mask(g.size(), 0);
  std::vector<Vec3> dirs;
  detail::for_each_lidar_direction(pattern, g, [&](const Vec3& d) { dirs.push_back(d); });

  for (std::size_t p = 0; p < g.size(); ++p) {
    if (!positions[p]) continue;
    const Index3 pi = g.unlinear(p);
    if (stride > 1 && (pi.x() % stride || pi.y() % stride || pi.z() % stride)) continue;
    const Vec3 o = g.center(p);
    for (const Vec3& dir : dirs) {
      const double t_exit = detail::exit_parameter(g, o, dir);
      const double max_t = std::min(cfg.lidar_range, std::max(0.0, t_exit - 1e-9));
      traverse(g, o, dir, max_t, [&](std::size_t lin) {
        if (g.state(lin) == VoxelState::Occupied) return false;
        mask[lin] = 1;
        return true;
      });
    }
  }

  const int reach = static_cast<int>(std::ceil(cfg.d_max / g.resolution()));
  const double half_v = deg_to_rad(cfg.camera_vfov_deg) * 0.5;
  for (std::size_t lin : g.occupied()) {
    const Index3 vi = g.unlinear(lin);
    bool surface = false;
    g.for_each_face_neighbor(vi, [&](const Index3& n, const Index3&) {
      if (g.state(g.linear(n)) == VoxelState::Free) surface = true;
    });
    if (!surface) continue;
    const Vec3 c = g.center(lin);
    bool seen = false;
    for (int dz = -reach; dz <= reach && !seen; ++dz)
      for (int dy = -reach; dy <= reach && !seen; ++dy)
        for (int dx = -reach; dx <= reach && !seen; ++dx) {
          const Index3 q = vi + Index3(dx, dy, dz);
          if (!g.contains(q)) continue;
          const std::size_t ql = g.linear(q);
          if (!positions[ql]) continue;
          const Vec3 o = g.center(ql);
          const Vec3 d = c - o;
          const double dist = d.norm();
          if (dist > cfg.d_max || dist == 0.0) continue;
          const double horiz = std::hypot(d.x(), d.y());
          if (horiz == 0.0 || std::abs(std::atan2(d.z(), horiz)) > half_v) continue;
          if (line_of_sight(g, o, lin, false)) seen = true;
        }
    if (seen) mask[lin] = 1;
  }
  return mask;
}

}  // namespace tsearch
