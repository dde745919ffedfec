#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "tsearch/clearance.hpp"
#include "tsearch/cluster_extract.hpp"
#include "tsearch/voxel_map.hpp"

namespace tsearch {

class NoViewpoint : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DegenerateDirection : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

struct ViewpointCandidate {
  Vec3 position = Vec3::Zero();
  double yaw = 0.0;
  int n_uninspected = 0;
  int n_unknown = 0;
  double s_info = 0.0;
  double s_nor = 1.0;
  double s_vp = 0.0;
  double distance_to_center = 0.0;
  std::uint64_t cluster_id = 0;
};

struct ScoreWeights {
  double w_uni = 0.8;
  double w_unk = 0.2;

  void validate() const {
    if (w_uni < 0.0 || w_unk < 0.0) throw std::invalid_argument("score weights must be >= 0");
    if (!(w_uni > w_unk))
      throw std::invalid_argument("uninspected weight must exceed the unknown weight");
  }
};

struct SamplingConfig {
  std::vector<double> radii{1.0, 1.5, 2.0, 2.5};
  int n_azimuth = 12;
  double clearance = 0.3;
};

/// Candidate poses on horizontal circles around the cluster centroid, at the
/// centroid height clamped into the agent band. Kept when the cell is
/// traversable under `field` and the straight line to the centroid reaches a
/// cluster cell (or the centroid cell) before any other Occupied voxel.
inline std::vector<ViewpointCandidate> sample_viewpoints(const SurfaceCluster& cluster,
                                                         const VoxelGrid& grid,
                                                         const ClearanceField& field,
                                                         const MapConfig& cfg,
                                                         const SamplingConfig& sampling) {
  std::vector<ViewpointCandidate> out;
  if (!grid.contains_point(cluster.centroid)) return out;
  const std::size_t centroid_cell = grid.linear(grid.world_to_index(cluster.centroid));
  double z = std::clamp(cluster.centroid.z(), cfg.band_min_z, cfg.band_max_z);
  {
    // Snap to a layer centre inside the band; standing is judged by centres.
    const double res = grid.resolution(), oz = grid.origin().z();
    double c = oz + (std::floor((z - oz) / res) + 0.5) * res;
    if (c < cfg.band_min_z - 1e-9) c += res;
    if (c > cfg.band_max_z + 1e-9) c -= res;
    if (c >= cfg.band_min_z - 1e-9 && c <= cfg.band_max_z + 1e-9) z = c;
  }
  for (double r : sampling.radii) {
    for (int k = 0; k < sampling.n_azimuth; ++k) {
      const double az = 2.0 * kPi * k / sampling.n_azimuth;
      const Vec3 p(cluster.centroid.x() + r * std::cos(az), cluster.centroid.y() + r * std::sin(az),
                   z);
      if (!grid.contains_point(p)) continue;
      if (!field.can_stand(grid.linear(grid.world_to_index(p)))) continue;
      const Vec3 d = cluster.centroid - p;
      const double len = d.norm();
      bool sees = false;
      traverse(grid, p, d / len, len, [&](std::size_t lin) {
        if (lin == centroid_cell ||
            std::binary_search(cluster.cells.begin(), cluster.cells.end(), lin)) {
          sees = true;
          return false;
        }
        return grid.state(lin) != VoxelState::Occupied;
      });
      if (!sees) continue;
      ViewpointCandidate vp;
      vp.position = p;
      vp.yaw = std::atan2(d.y(), d.x());
      vp.distance_to_center = len;
      vp.cluster_id = cluster.id;
      out.push_back(vp);
    }
  }
  return out;
}

/// Spatial buckets over the frontier and uninspected voxels of one map state,
/// so per-candidate counting touches only nearby cells.
class ObservationIndex {
 public:
  ObservationIndex(const VoxelGrid& grid, const std::vector<std::size_t>& frontier,
                   const std::vector<std::size_t>& uninspected, double bucket = 1.0)
      : grid_(&grid), bucket_(bucket) {
    for (std::size_t lin : frontier) frontier_[key(grid.center(lin))].push_back(lin);
    for (std::size_t lin : uninspected) uninspected_[key(grid.center(lin))].push_back(lin);
  }

  template <typename F>
  void frontier_near(const Vec3& p, double r, F&& f) const {
    visit(frontier_, p, r, f);
  }
  template <typename F>
  void uninspected_near(const Vec3& p, double r, F&& f) const {
    visit(uninspected_, p, r, f);
  }

 private:
  using Key = std::int64_t;
  using Buckets = std::unordered_map<Key, std::vector<std::size_t>>;

  Index3 cell(const Vec3& p) const {
    return Index3(static_cast<int>(std::floor(p.x() / bucket_)),
                  static_cast<int>(std::floor(p.y() / bucket_)),
                  static_cast<int>(std::floor(p.z() / bucket_)));
  }
  static Key pack(const Index3& c) {
    return (static_cast<Key>(c.x() + (1 << 20)) << 42) |
           (static_cast<Key>(c.y() + (1 << 20)) << 21) | static_cast<Key>(c.z() + (1 << 20));
  }
  Key key(const Vec3& p) const { return pack(cell(p)); }

  template <typename F>
  void visit(const Buckets& b, const Vec3& p, double r, F& f) const {
    const Index3 lo = cell(p - Vec3::Constant(r));
    const Index3 hi = cell(p + Vec3::Constant(r));
    for (int z = lo.z(); z <= hi.z(); ++z)
      for (int y = lo.y(); y <= hi.y(); ++y)
        for (int x = lo.x(); x <= hi.x(); ++x) {
          auto it = b.find(pack(Index3(x, y, z)));
          if (it == b.end()) continue;
          for (std::size_t lin : it->second)
            if ((grid_->center(lin) - p).norm() <= r) f(lin);
        }
  }

  const VoxelGrid* grid_;
  double bucket_;
  Buckets frontier_;
  Buckets uninspected_;
};

/// Counts what a candidate would observe and fills n_unknown, n_uninspected
/// and s_info. Frontier voxels count when within lidar range with no Occupied
/// voxel in between; uninspected voxels count when the camera at the
/// candidate pose would inspect them (frustum, d_max, clear line of sight).
inline double score_info(ViewpointCandidate& vp, const VoxelGrid& grid, const MapConfig& cfg,
                         const ScoreWeights& w, const ObservationIndex& index) {
  int n_unk = 0;
  int n_uni = 0;
  index.frontier_near(vp.position, cfg.lidar_range, [&](std::size_t lin) {
    if (line_of_sight(grid, vp.position, lin, false)) ++n_unk;
  });
  index.uninspected_near(vp.position, cfg.d_max, [&](std::size_t lin) {
    const Vec3 c = grid.center(lin);
    if ((c - vp.position).norm() == 0.0) return;
    if (!in_frustum(vp.position, vp.yaw, c, cfg)) return;
    if (line_of_sight(grid, vp.position, lin, true)) ++n_uni;
  });
  vp.n_unknown = n_unk;
  vp.n_uninspected = n_uni;
  vp.s_info = w.w_uni * n_uni + w.w_unk * n_unk;
  return vp.s_info;
}

inline double score_info(ViewpointCandidate& vp, const VoxelGrid& grid, const MapConfig& cfg,
                         const ScoreWeights& w) {
  const ObservationIndex index(grid, extract_frontiers(grid), uninspected_set(grid, cfg));
  return score_info(vp, grid, cfg, w, index);
}

/// Information score from raw counts.
inline double info_score(int n_uninspected, int n_unknown, const ScoreWeights& w) {
  return w.w_uni * n_uninspected + w.w_unk * n_unknown;
}

/// Cosine between (viewpoint - centroid) and the cluster normal; frontier
/// clusters score 1.
inline double score_normal(const ViewpointCandidate& vp, const SurfaceCluster& cluster) {
  if (cluster.kind == ClusterKind::Frontier) return 1.0;
  const Vec3 d = vp.position - cluster.centroid;
  const double dn = d.norm();
  const double nn = cluster.avg_normal.norm();
  if (dn == 0.0) throw DegenerateDirection("viewpoint coincides with the cluster centroid");
  if (nn == 0.0) throw DegenerateDirection("cluster normal has zero length");
  return d.dot(cluster.avg_normal) / (dn * nn);
}

/// Highest s_vp; ties go to the candidate nearer the cluster centroid, then
/// to the lexicographically smaller position.
inline const ViewpointCandidate& select_best(const std::vector<ViewpointCandidate>& cands) {
  if (cands.empty()) throw NoViewpoint("no viewpoint candidates to select from");
  const ViewpointCandidate* best = &cands.front();
  for (const ViewpointCandidate& c : cands) {
    if (c.s_vp > best->s_vp) {
      best = &c;
    } else if (c.s_vp == best->s_vp) {
      if (c.distance_to_center < best->distance_to_center ||
          (c.distance_to_center == best->distance_to_center &&
           lex_less(c.position, best->position)))
        best = &c;
    }
  }
  return *best;
}

/// Sample, score and pick one viewpoint for a cluster. Candidates that would
/// observe nothing, or that `reject` refuses, are discarded; returns nullopt
/// when none remain.
template <typename Reject>
std::optional<ViewpointCandidate> best_viewpoint(const SurfaceCluster& cluster,
                                                 const VoxelGrid& grid,
                                                 const ClearanceField& field,
                                                 const MapConfig& cfg,
                                                 const SamplingConfig& sampling,
                                                 const ScoreWeights& w,
                                                 const ObservationIndex& index, Reject&& reject) {
  std::vector<ViewpointCandidate> cands = sample_viewpoints(cluster, grid, field, cfg, sampling);
  std::vector<ViewpointCandidate> useful;
  for (ViewpointCandidate& c : cands) {
    if (reject(c)) continue;
    if (score_info(c, grid, cfg, w, index) <= 0.0) continue;
    c.s_nor = score_normal(c, cluster);
    c.s_vp = c.s_nor * c.s_info;
    useful.push_back(c);
  }
  if (useful.empty()) return std::nullopt;
  return select_best(useful);
}

inline std::optional<ViewpointCandidate> best_viewpoint(const SurfaceCluster& cluster,
                                                        const VoxelGrid& grid,
                                                        const ClearanceField& field,
                                                        const MapConfig& cfg,
                                                        const SamplingConfig& sampling,
                                                        const ScoreWeights& w,
                                                        const ObservationIndex& index) {
  return best_viewpoint(cluster, grid, field, cfg, sampling, w, index,
                        [](const ViewpointCandidate&) { return false; });
}

}  // namespace tsearch
