#pragma once

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "tsearch/sensor_sim.hpp"
#include "tsearch/voxel_map.hpp"

namespace tsearch {

/// Line-oriented world description. `#` starts a comment.
///
///   name <word>
///   bounds <xmin> <ymin> <zmin> <xmax> <ymax> <zmax>
///   resolution <m>
///   slab <z>              optional: map a single voxel layer centred at z
///   band <zmin> <zmax>    optional: agent height band
///   start <x> <y> <z> <yaw>
///   box <xmin> <ymin> <zmin> <xmax> <ymax> <zmax>
///   target <x> <y> <z>
///   voxel <i> <j> <k>     optional raw occupied cell
struct Box {
  Vec3 lo = Vec3::Zero();
  Vec3 hi = Vec3::Zero();

  bool contains(const Vec3& p) const {
    return (p.array() >= lo.array()).all() && (p.array() <= hi.array()).all();
  }
  // Distance from an inside point to the nearest face.
  double depth(const Vec3& p) const {
    return std::min((p - lo).minCoeff(), (hi - p).minCoeff());
  }
};

struct Scenario {
  std::string name = "unnamed";
  Vec3 bounds_lo = Vec3::Zero();
  Vec3 bounds_hi = Vec3::Ones();
  double resolution = 0.1;
  std::optional<double> slab_z;
  std::optional<std::array<double, 2>> band;
  Pose start;
  std::vector<Box> boxes;
  std::vector<Vec3> targets;
  std::vector<Index3> voxels;
};

class ScenarioError : public std::runtime_error {
 public:
  ScenarioError(const std::string& what, int line = 0)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

namespace detail {

inline std::string fmt_num(double v) {
  char buf[64];
  const auto r = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, r.ptr);
}

inline std::vector<double> read_numbers(std::istringstream& ls, std::size_t n, int line,
                                        const std::string& key) {
  std::vector<double> out;
  std::string tok;
  while (ls >> tok) {
    double v = 0.0;
    const auto r = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (r.ec != std::errc() || r.ptr != tok.data() + tok.size())
      throw ScenarioError("'" + key + "': bad number '" + tok + "'", line);
    out.push_back(v);
  }
  if (out.size() != n)
    throw ScenarioError("'" + key + "' expects " + std::to_string(n) + " values, got " +
                            std::to_string(out.size()),
                        line);
  return out;
}

}  // namespace detail

inline Scenario parse_scenario(std::istream& is) {
  Scenario s;
  bool have_bounds = false, have_res = false, have_start = false;
  std::string raw;
  int line = 0;
  while (std::getline(is, raw)) {
    ++line;
    if (auto h = raw.find('#'); h != std::string::npos) raw.erase(h);
    std::istringstream ls(raw);
    std::string key;
    if (!(ls >> key)) continue;
    if (key == "name") {
      if (!(ls >> s.name)) throw ScenarioError("'name' needs a value", line);
    } else if (key == "bounds") {
      const auto v = detail::read_numbers(ls, 6, line, key);
      s.bounds_lo = Vec3(v[0], v[1], v[2]);
      s.bounds_hi = Vec3(v[3], v[4], v[5]);
      have_bounds = true;
    } else if (key == "resolution") {
      s.resolution = detail::read_numbers(ls, 1, line, key)[0];
      have_res = true;
    } else if (key == "slab") {
      s.slab_z = detail::read_numbers(ls, 1, line, key)[0];
    } else if (key == "band") {
      const auto v = detail::read_numbers(ls, 2, line, key);
      s.band = std::array<double, 2>{v[0], v[1]};
    } else if (key == "start") {
      const auto v = detail::read_numbers(ls, 4, line, key);
      s.start = {Vec3(v[0], v[1], v[2]), v[3]};
      have_start = true;
    } else if (key == "box") {
      const auto v = detail::read_numbers(ls, 6, line, key);
      s.boxes.push_back({Vec3(v[0], v[1], v[2]), Vec3(v[3], v[4], v[5])});
    } else if (key == "target") {
      const auto v = detail::read_numbers(ls, 3, line, key);
      s.targets.emplace_back(v[0], v[1], v[2]);
    } else if (key == "voxel") {
      const auto v = detail::read_numbers(ls, 3, line, key);
      s.voxels.emplace_back(static_cast<int>(v[0]), static_cast<int>(v[1]), static_cast<int>(v[2]));
    } else {
      throw ScenarioError("unknown key '" + key + "'", line);
    }
  }
  if (!have_bounds) throw ScenarioError("missing 'bounds'");
  if (!have_res) throw ScenarioError("missing 'resolution'");
  if (!have_start) throw ScenarioError("missing 'start'");
  return s;
}

inline Scenario load_scenario(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ScenarioError("cannot open scenario file '" + path + "'");
  return parse_scenario(f);
}

inline void write_scenario(const Scenario& s, std::ostream& os) {
  using detail::fmt_num;
  auto vec = [](const Vec3& v) {
    return fmt_num(v.x()) + " " + fmt_num(v.y()) + " " + fmt_num(v.z());
  };
  os << "name " << s.name << '\n';
  os << "bounds " << vec(s.bounds_lo) << ' ' << vec(s.bounds_hi) << '\n';
  os << "resolution " << fmt_num(s.resolution) << '\n';
  if (s.slab_z) os << "slab " << fmt_num(*s.slab_z) << '\n';
  if (s.band) os << "band " << fmt_num((*s.band)[0]) << ' ' << fmt_num((*s.band)[1]) << '\n';
  os << "start " << vec(s.start.position) << ' ' << fmt_num(s.start.yaw) << '\n';
  for (const Box& b : s.boxes) os << "box " << vec(b.lo) << ' ' << vec(b.hi) << '\n';
  for (const Vec3& t : s.targets) os << "target " << vec(t) << '\n';
  for (const Index3& v : s.voxels) os << "voxel " << v.x() << ' ' << v.y() << ' ' << v.z() << '\n';
}

/// Grid geometry of the scenario at resolution `res` (0 = scenario's own).
inline VoxelGrid scenario_grid_shape(const Scenario& s, double res = 0.0) {
  const double r = res > 0.0 ? res : s.resolution;
  const Vec3 ext = s.bounds_hi - s.bounds_lo;
  Index3 dims;
  for (int a = 0; a < 3; ++a) dims[a] = std::max(1, static_cast<int>(std::lround(ext[a] / r)));
  Vec3 origin = s.bounds_lo;
  if (s.slab_z) {
    dims.z() = 1;
    origin.z() = *s.slab_z - 0.5 * r;
  }
  return VoxelGrid(origin, r, dims);
}

/// Checks bounds, start and targets. Targets must lie within one voxel of
/// some box surface and not deeper inside an obstacle.
inline void validate_scenario(const Scenario& s, double res = 0.0) {
  const double r = res > 0.0 ? res : s.resolution;
  if (!(r > 0.0)) throw ScenarioError("resolution must be > 0");
  if (!((s.bounds_hi.array() > s.bounds_lo.array()).all()))
    throw ScenarioError("bounds must have positive extent");
  if (s.band && !((*s.band)[1] >= (*s.band)[0])) throw ScenarioError("band is inverted");
  auto inside_bounds = [&](const Vec3& p) {
    return (p.array() >= s.bounds_lo.array()).all() && (p.array() <= s.bounds_hi.array()).all();
  };
  if (!inside_bounds(s.start.position)) throw ScenarioError("start lies outside the bounds");
  for (std::size_t i = 0; i < s.boxes.size(); ++i) {
    if (!((s.boxes[i].hi.array() >= s.boxes[i].lo.array()).all()))
      throw ScenarioError("box " + std::to_string(i) + " is inverted");
    if (s.boxes[i].contains(s.start.position))
      throw ScenarioError("start lies inside box " + std::to_string(i));
  }
  for (std::size_t i = 0; i < s.targets.size(); ++i) {
    const Vec3& t = s.targets[i];
    if (!inside_bounds(t)) throw ScenarioError("target " + std::to_string(i) + " is outside the bounds");
    double best_gap = std::numeric_limits<double>::infinity();
    for (const Box& b : s.boxes) {
      if (b.contains(t)) {
        if (b.depth(t) > r + 1e-9)
          throw ScenarioError("target " + std::to_string(i) + " lies inside an obstacle");
        best_gap = 0.0;
      } else {
        const Vec3 q = t.cwiseMax(b.lo).cwiseMin(b.hi);
        Vec3 d = t - q;
        if (s.slab_z) d.z() = 0.0;
        best_gap = std::min(best_gap, d.norm());
      }
    }
    if (best_gap > r + 1e-9)
      throw ScenarioError("target " + std::to_string(i) + " is not on an obstacle surface");
  }
}

/// Rasterises the scenario: a voxel is Occupied when its centre lies in a box
/// (for slabs, when the box spans the slab height) or it is listed raw. Each
/// target is attached to the Occupied voxel holding it, or the nearest
/// Occupied voxel around it.
inline GroundTruthWorld build_world(const Scenario& s, double res = 0.0) {
  validate_scenario(s, res);
  GroundTruthWorld w;
  w.grid = scenario_grid_shape(s, res);
  VoxelGrid& g = w.grid;
  for (std::size_t lin = 0; lin < g.size(); ++lin) {
    Vec3 c = g.center(lin);
    bool occ = false;
    for (const Box& b : s.boxes) {
      if (s.slab_z) {
        if (*s.slab_z < b.lo.z() || *s.slab_z > b.hi.z()) continue;
        c.z() = *s.slab_z;
      }
      if (b.contains(c)) {
        occ = true;
        break;
      }
    }
    g.set_state(lin, occ ? VoxelState::Occupied : VoxelState::Free);
  }
  for (const Index3& v : s.voxels) {
    if (!g.contains(v)) throw ScenarioError("raw voxel outside the grid");
    g.set_state(g.linear(v), VoxelState::Occupied);
  }
  for (std::size_t i = 0; i < s.targets.size(); ++i) {
    Vec3 t = s.targets[i];
    if (s.slab_z) t.z() = *s.slab_z;
    const Index3 ti = g.world_to_index(t);
    std::optional<std::size_t> best;
    double bd = std::numeric_limits<double>::infinity();
    for (int dz = -1; dz <= 1; ++dz)
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) {
          const Index3 q = ti + Index3(dx, dy, dz);
          if (!g.contains(q) || g.state(g.linear(q)) != VoxelState::Occupied) continue;
          const double d = (g.index_to_center(q) - t).norm();
          if (d < bd) {
            bd = d;
            best = g.linear(q);
          }
        }
    if (!best) throw ScenarioError("target " + std::to_string(i) + " has no occupied voxel nearby");
    w.targets.push_back(s.targets[i]);
    w.target_voxels.push_back(*best);
  }
  return w;
}

inline Pose scenario_start(const Scenario& s) {
  Pose p = s.start;
  if (s.slab_z) p.position.z() = *s.slab_z;
  return p;
}

}  // namespace tsearch
