#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "tsearch/geometry.hpp"

namespace tsearch {

class OutOfBounds : public std::out_of_range {
 public:
  explicit OutOfBounds(const Vec3& p)
      : std::out_of_range(describe(p)), point_(p) {}
  const Vec3& point() const { return point_; }

 private:
  static std::string describe(const Vec3& p) {
    std::ostringstream os;
    os << "point (" << p.x() << ", " << p.y() << ", " << p.z()
       << ") lies outside the grid";
    return os.str();
  }
  Vec3 point_;
};

enum class VoxelState : std::uint8_t { Unknown = 0, Free = 1, Occupied = 2 };

inline constexpr double kNeverObserved = std::numeric_limits<double>::infinity();

struct Voxel {
  VoxelState state = VoxelState::Unknown;
  double closest_obs = kNeverObserved;
  bool is_target = false;
};

struct MapConfig {
  double d_max = 3.0;
  double lidar_range = 8.0;
  double camera_hfov_deg = 68.0;
  double camera_vfov_deg = 51.0;
  double band_min_z = 0.0;
  double band_max_z = 2.0;

  void validate() const {
    if (!(d_max > 0.0)) throw std::invalid_argument("d_max must be positive");
    if (!(lidar_range > d_max))
      throw std::invalid_argument("lidar_range must exceed d_max");
    if (!(camera_hfov_deg > 0.0 && camera_hfov_deg < 360.0) ||
        !(camera_vfov_deg > 0.0 && camera_vfov_deg < 180.0))
      throw std::invalid_argument("camera field of view out of range");
    if (band_max_z < band_min_z)
      throw std::invalid_argument("agent height band is empty");
  }
};

/// Dense voxel lattice. Voxel (i, j, k) covers
/// [origin + (i, j, k) * res, origin + (i + 1, j + 1, k + 1) * res).
/// Linear index is x-fastest. State changes go through set_state() so the
/// occupied list and counters stay consistent.
class VoxelGrid {
 public:
  VoxelGrid() = default;
  VoxelGrid(const Vec3& origin, double resolution, const Index3& dims)
      : origin_(origin), res_(resolution), dims_(dims) {
    if (!(resolution > 0.0))
      throw std::invalid_argument("voxel resolution must be positive");
    if (dims.minCoeff() < 1)
      throw std::invalid_argument("grid dims must be at least 1 per axis");
    voxels_.resize(static_cast<std::size_t>(dims.x()) * dims.y() * dims.z());
    counts_[0] = voxels_.size();
  }

  const Vec3& origin() const { return origin_; }
  double resolution() const { return res_; }
  const Index3& dims() const { return dims_; }
  std::size_t size() const { return voxels_.size(); }
  Vec3 min_corner() const { return origin_; }
  Vec3 max_corner() const { return origin_ + dims_.cast<double>() * res_; }

  bool contains(const Index3& idx) const {
    return idx.x() >= 0 && idx.y() >= 0 && idx.z() >= 0 &&
           idx.x() < dims_.x() && idx.y() < dims_.y() && idx.z() < dims_.z();
  }

  bool contains_point(const Vec3& p) const {
    const Vec3 lo = min_corner();
    const Vec3 hi = max_corner();
    constexpr double eps = 1e-9;
    for (int a = 0; a < 3; ++a)
      if (p[a] < lo[a] - eps || p[a] > hi[a] + eps) return false;
    return true;
  }

  // Points on the upper bounding face map into the last voxel.
  Index3 world_to_index(const Vec3& p) const {
    if (!contains_point(p)) throw OutOfBounds(p);
    Index3 idx;
    for (int a = 0; a < 3; ++a) {
      int i = static_cast<int>(std::floor((p[a] - origin_[a]) / res_));
      idx[a] = std::clamp(i, 0, dims_[a] - 1);
    }
    return idx;
  }

  Vec3 index_to_center(const Index3& idx) const {
    return origin_ + (idx.cast<double>() + Vec3::Constant(0.5)) * res_;
  }

  std::size_t linear(const Index3& idx) const {
    return static_cast<std::size_t>(idx.x()) +
           static_cast<std::size_t>(dims_.x()) *
               (static_cast<std::size_t>(idx.y()) +
                static_cast<std::size_t>(dims_.y()) * idx.z());
  }

  Index3 unlinear(std::size_t lin) const {
    const auto nx = static_cast<std::size_t>(dims_.x());
    const auto ny = static_cast<std::size_t>(dims_.y());
    return Index3(static_cast<int>(lin % nx), static_cast<int>((lin / nx) % ny),
                  static_cast<int>(lin / (nx * ny)));
  }

  Vec3 center(std::size_t lin) const { return index_to_center(unlinear(lin)); }

  const Voxel& at(std::size_t lin) const { return voxels_[lin]; }
  const Voxel& at(const Index3& idx) const { return voxels_[linear(idx)]; }
  VoxelState state(std::size_t lin) const { return voxels_[lin].state; }

  void set_state(std::size_t lin, VoxelState s) {
    Voxel& v = voxels_[lin];
    if (v.state == s) return;
    --counts_[static_cast<int>(v.state)];
    ++counts_[static_cast<int>(s)];
    if (s == VoxelState::Occupied) occupied_.push_back(lin);
    if (v.state == VoxelState::Occupied)
      occupied_.erase(std::find(occupied_.begin(), occupied_.end(), lin));
    v.state = s;
  }

  void set_closest_obs(std::size_t lin, double d) { voxels_[lin].closest_obs = d; }
  void set_target(std::size_t lin, bool t) { voxels_[lin].is_target = t; }

  // Indices of Occupied voxels in the order they became Occupied.
  const std::vector<std::size_t>& occupied() const { return occupied_; }

  std::size_t count(VoxelState s) const { return counts_[static_cast<int>(s)]; }

  // 6-neighbourhood of an index, skipping out-of-grid cells.
  template <typename F>
  void for_each_face_neighbor(const Index3& idx, F&& f) const {
    static constexpr std::array<std::array<int, 3>, 6> kOffsets{
        {{1, 0, 0}, {-1, 0, 0}, {0, 1, 0}, {0, -1, 0}, {0, 0, 1}, {0, 0, -1}}};
    for (const auto& o : kOffsets) {
      const Index3 n = idx + Index3(o[0], o[1], o[2]);
      if (contains(n)) f(n, Index3(o[0], o[1], o[2]));
    }
  }

  template <typename F>
  void for_each_neighbor26(const Index3& idx, F&& f) const {
    for (int dz = -1; dz <= 1; ++dz)
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
          if (dx == 0 && dy == 0 && dz == 0) continue;
          const Index3 n = idx + Index3(dx, dy, dz);
          if (contains(n)) f(n);
        }
  }

 private:
  Vec3 origin_ = Vec3::Zero();
  double res_ = 1.0;
  Index3 dims_ = Index3::Ones();
  std::vector<Voxel> voxels_;
  std::vector<std::size_t> occupied_;
  std::array<std::size_t, 3> counts_{0, 0, 0};
};

// ---------------------------------------------------------------------------
// Supercover traversal.

/// Visits every voxel whose closed cube meets the segment
/// origin + t * dir, t in [0, max_t], in order of entry. When the segment
/// crosses an edge or a corner, all voxels sharing it are visited (singles
/// before pairs before the diagonal). `dir` must be unit length; the walk
/// stops early when it leaves the grid or when `visit(lin)` returns false.
template <typename Visitor>
void traverse(const VoxelGrid& grid, const Vec3& origin, const Vec3& dir,
              double max_t, Visitor&& visit) {
  Index3 cur = grid.world_to_index(origin);
  if (!visit(grid.linear(cur))) return;
  if (!(max_t > 0.0)) return;

  const double res = grid.resolution();
  const Vec3& o = grid.origin();
  Index3 step = Index3::Zero();
  Vec3 t_max = Vec3::Constant(std::numeric_limits<double>::infinity());
  Vec3 t_delta = t_max;
  for (int a = 0; a < 3; ++a) {
    if (dir[a] > 0.0) {
      step[a] = 1;
      t_max[a] = (o[a] + (cur[a] + 1) * res - origin[a]) / dir[a];
      t_delta[a] = res / dir[a];
    } else if (dir[a] < 0.0) {
      step[a] = -1;
      t_max[a] = (o[a] + cur[a] * res - origin[a]) / dir[a];
      t_delta[a] = -res / dir[a];
    }
  }

  constexpr double kTie = 1e-9;
  while (true) {
    const double t = t_max.minCoeff();
    if (t > max_t + kTie) return;
    std::array<int, 3> tied{};
    int n_tied = 0;
    for (int a = 0; a < 3; ++a)
      if (t_max[a] <= t + kTie) tied[n_tied++] = a;

    if (n_tied > 1) {
      // Intermediate cells touched at the shared edge / corner.
      for (int mask_size = 1; mask_size < n_tied; ++mask_size) {
        for (int mask = 1; mask < (1 << n_tied); ++mask) {
          if (std::popcount(static_cast<unsigned>(mask)) != mask_size) continue;
          Index3 n = cur;
          for (int b = 0; b < n_tied; ++b)
            if (mask & (1 << b)) n[tied[b]] += step[tied[b]];
          if (grid.contains(n) && !visit(grid.linear(n))) return;
        }
      }
    }
    for (int b = 0; b < n_tied; ++b) {
      cur[tied[b]] += step[tied[b]];
      t_max[tied[b]] += t_delta[tied[b]];
    }
    if (!grid.contains(cur)) return;
    if (!visit(grid.linear(cur))) return;
  }
}

struct RaycastResult {
  std::vector<Index3> voxels;
  bool hit = false;
};

/// Supercover walk from `from` to `to`, terminated by the first Occupied voxel.
inline RaycastResult raycast(const VoxelGrid& grid, const Vec3& from, const Vec3& to) {
  if (!grid.contains_point(from)) throw OutOfBounds(from);
  if (!grid.contains_point(to)) throw OutOfBounds(to);
  RaycastResult out;
  const Vec3 d = to - from;
  const double len = d.norm();
  const Vec3 dir = len > 0.0 ? Vec3(d / len) : Vec3(1.0, 0.0, 0.0);
  traverse(grid, from, dir, len, [&](std::size_t lin) {
    out.voxels.push_back(grid.unlinear(lin));
    if (grid.state(lin) == VoxelState::Occupied) {
      out.hit = true;
      return false;
    }
    return true;
  });
  return out;
}

// ---------------------------------------------------------------------------
// Range integration.

struct RangeRay {
  Vec3 direction = Vec3::UnitX();
  Vec3 endpoint = Vec3::Zero();
  bool hit = false;
};

struct RangeScan {
  Vec3 origin = Vec3::Zero();
  std::vector<RangeRay> rays;
};

/// Free-space carving along every ray; the voxel holding a hit endpoint
/// becomes Occupied. Free and Occupied are never changed again. Returns the
/// number of Unknown -> {Free, Occupied} transitions.
inline std::size_t integrate_range_scan(VoxelGrid& grid, const Pose& pose,
                                        const RangeScan& scan) {
  std::size_t changed = 0;
  const double slack = grid.resolution();
  for (const RangeRay& ray : scan.rays) {
    const std::size_t end_lin = grid.linear(grid.world_to_index(ray.endpoint));
    const double len = (ray.endpoint - pose.position).norm();
    std::size_t last = grid.linear(grid.world_to_index(pose.position));
    bool reached_end = false;
    std::vector<std::size_t> chain;
    traverse(grid, pose.position, ray.direction, len + slack, [&](std::size_t lin) {
      chain.push_back(lin);
      last = lin;
      if (lin == end_lin) {
        reached_end = true;
        return false;
      }
      return true;
    });
    if (!reached_end && !chain.empty()) {
      // Endpoint sat on a face shared with the last visited cell.
      last = chain.back();
    }
    for (std::size_t lin : chain) {
      if (grid.state(lin) != VoxelState::Unknown) continue;
      const bool is_end = (lin == last) && ray.hit;
      grid.set_state(lin, is_end ? VoxelState::Occupied : VoxelState::Free);
      ++changed;
    }
  }
  return changed;
}

// ---------------------------------------------------------------------------
// Camera model.

/// Angular frustum test with the camera pitched level and facing `yaw`.
/// Distance gating is left to the caller.
inline bool in_frustum(const Vec3& cam, double yaw, const Vec3& p, const MapConfig& cfg) {
  const Vec3 d = p - cam;
  const double horiz = std::hypot(d.x(), d.y());
  if (horiz == 0.0 && d.z() == 0.0) return false;
  const double half_h = deg_to_rad(cfg.camera_hfov_deg) * 0.5;
  const double half_v = deg_to_rad(cfg.camera_vfov_deg) * 0.5;
  if (std::abs(std::atan2(d.z(), horiz)) > half_v + 1e-12) return false;
  if (horiz == 0.0) return false;
  return std::abs(wrap_angle(std::atan2(d.y(), d.x()) - yaw)) <= half_h + 1e-12;
}

/// Line of sight from `cam` to the centre of voxel `target`. Any other
/// traversed voxel that is Occupied blocks; when `unknown_blocks` is set,
/// Unknown voxels block as well (the map cannot vouch for them).
inline bool line_of_sight(const VoxelGrid& grid, const Vec3& cam, std::size_t target,
                          bool unknown_blocks) {
  const Vec3 c = grid.center(target);
  const Vec3 d = c - cam;
  const double len = d.norm();
  if (len == 0.0) return true;
  bool clear = true;
  bool reached = false;
  traverse(grid, cam, d / len, len, [&](std::size_t lin) {
    if (lin == target) {
      reached = true;
      return false;
    }
    const VoxelState s = grid.state(lin);
    if (s == VoxelState::Occupied || (unknown_blocks && s == VoxelState::Unknown)) {
      clear = false;
      return false;
    }
    return true;
  });
  return clear && reached;
}

/// Updates closest camera observation distances for mapped Occupied voxels
/// in view. Returns voxels whose distance newly dropped to d_max or below.
inline std::vector<std::size_t> integrate_camera_frame(VoxelGrid& grid, const Pose& pose,
                                                       const MapConfig& cfg) {
  std::vector<std::size_t> inspected;
  const std::vector<std::size_t> occupied = grid.occupied();
  for (std::size_t lin : occupied) {
    const Vec3 c = grid.center(lin);
    const double dist = (c - pose.position).norm();
    if (dist > cfg.lidar_range || dist == 0.0) continue;
    if (!in_frustum(pose.position, pose.yaw, c, cfg)) continue;
    const double prev = grid.at(lin).closest_obs;
    if (dist >= prev) continue;
    if (!line_of_sight(grid, pose.position, lin, /*unknown_blocks=*/true)) continue;
    grid.set_closest_obs(lin, dist);
    if (prev > cfg.d_max && dist <= cfg.d_max) inspected.push_back(lin);
  }
  std::sort(inspected.begin(), inspected.end());
  return inspected;
}

/// Ground-truth targets recognised from `pose`. A target is seen when its
/// voxel is mapped Occupied, in the frustum, within d_max and unoccluded in
/// the map (same visibility rule as inspection). Returns indices into
/// `truth_voxels` of first-time detections and flags those voxels.
inline std::vector<std::size_t> detect_targets(VoxelGrid& grid, const Pose& pose,
                                               const MapConfig& cfg,
                                               const std::vector<std::size_t>& truth_voxels) {
  std::vector<std::size_t> found;
  for (std::size_t i = 0; i < truth_voxels.size(); ++i) {
    const std::size_t lin = truth_voxels[i];
    if (grid.at(lin).is_target) continue;
    if (grid.state(lin) != VoxelState::Occupied) continue;
    const Vec3 c = grid.center(lin);
    const double dist = (c - pose.position).norm();
    if (dist > cfg.d_max || dist == 0.0) continue;
    if (!in_frustum(pose.position, pose.yaw, c, cfg)) continue;
    if (!line_of_sight(grid, pose.position, lin, /*unknown_blocks=*/true)) continue;
    grid.set_target(lin, true);
    found.push_back(i);
  }
  return found;
}

inline bool is_uninspected(const Voxel& v, const MapConfig& cfg) {
  return v.state == VoxelState::Occupied && v.closest_obs > cfg.d_max;
}

inline std::vector<std::size_t> uninspected_set(const VoxelGrid& grid, const MapConfig& cfg) {
  std::vector<std::size_t> out;
  for (std::size_t lin : grid.occupied())
    if (grid.at(lin).closest_obs > cfg.d_max) out.push_back(lin);
  std::sort(out.begin(), out.end());
  return out;
}

/// Completion: every voxel in `reachable` is known, and none of them is
/// uninspected. `reachable` is a per-voxel 0/1 mask sized like the grid.
inline bool is_search_complete(const VoxelGrid& grid, const MapConfig& cfg,
                               const std::vector<std::uint8_t>& reachable) {
  if (reachable.size() != grid.size())
    throw std::invalid_argument("reachable mask does not match grid size");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!reachable[i]) continue;
    const Voxel& v = grid.at(i);
    if (v.state == VoxelState::Unknown) return false;
    if (is_uninspected(v, cfg)) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// Snapshots.
//
// Binary layout, little endian:
//   int32 dims[3], float64 resolution, float64 origin[3]
//   then per voxel (x fastest): uint8 state | 0x80 if target, float32 closest_obs

namespace detail {
template <typename T>
void put_le(std::ostream& os, T v) {
  static_assert(std::endian::native == std::endian::little,
                "snapshot writer assumes a little-endian host");
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}
template <typename T>
T get_le(std::istream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw std::runtime_error("truncated map snapshot");
  return v;
}
}  // namespace detail

inline void write_snapshot(const VoxelGrid& grid, std::ostream& os) {
  for (int a = 0; a < 3; ++a) detail::put_le<std::int32_t>(os, grid.dims()[a]);
  detail::put_le<double>(os, grid.resolution());
  for (int a = 0; a < 3; ++a) detail::put_le<double>(os, grid.origin()[a]);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Voxel& v = grid.at(i);
    std::uint8_t b = static_cast<std::uint8_t>(v.state);
    if (v.is_target) b |= 0x80;
    detail::put_le<std::uint8_t>(os, b);
    detail::put_le<float>(os, static_cast<float>(v.closest_obs));
  }
}

inline VoxelGrid read_snapshot(std::istream& is) {
  Index3 dims;
  for (int a = 0; a < 3; ++a) dims[a] = detail::get_le<std::int32_t>(is);
  const double res = detail::get_le<double>(is);
  Vec3 origin;
  for (int a = 0; a < 3; ++a) origin[a] = detail::get_le<double>(is);
  VoxelGrid grid(origin, res, dims);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto b = detail::get_le<std::uint8_t>(is);
    const auto d = detail::get_le<float>(is);
    const auto s = static_cast<VoxelState>(b & 0x03);
    if ((b & 0x03) > 2) throw std::runtime_error("bad voxel state in snapshot");
    grid.set_state(i, s);
    grid.set_closest_obs(i, static_cast<double>(d));
    grid.set_target(i, (b & 0x80) != 0);
  }
  return grid;
}

/// One z-slice as text, top row = largest y.
/// '?' unknown, '.' free, '#' occupied, '!' uninspected, 'T' target.
inline std::string slice_ascii(const VoxelGrid& grid, const MapConfig& cfg, int z) {
  std::string out;
  for (int y = grid.dims().y() - 1; y >= 0; --y) {
    for (int x = 0; x < grid.dims().x(); ++x) {
      const Voxel& v = grid.at(Index3(x, y, z));
      char c = '?';
      if (v.is_target) c = 'T';
      else if (v.state == VoxelState::Free) c = '.';
      else if (v.state == VoxelState::Occupied) c = is_uninspected(v, cfg) ? '!' : '#';
      out.push_back(c);
    }
    out.push_back('\n');
  }
  return out;
}

}  // namespace tsearch
