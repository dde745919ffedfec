#pragma once

#include <algorithm>
#include <cstdint>
#include <unordered_set>
#include <vector>

#include <Eigen/Eigenvalues>

#include "tsearch/voxel_map.hpp"

namespace tsearch {

enum class ClusterKind : std::uint8_t { Frontier = 0, Uninspected = 1 };

struct SurfaceCluster {
  ClusterKind kind = ClusterKind::Frontier;
  std::vector<std::size_t> cells;  // sorted linear indices
  Vec3 centroid = Vec3::Zero();
  Vec3 avg_normal = Vec3::Zero();
  std::uint64_t id = 0;
};

/// Free voxels with at least one Unknown face neighbour, sorted.
inline std::vector<std::size_t> extract_frontiers(const VoxelGrid& grid) {
  std::vector<std::size_t> out;
  for (std::size_t lin = 0; lin < grid.size(); ++lin) {
    if (grid.state(lin) != VoxelState::Free) continue;
    bool frontier = false;
    grid.for_each_face_neighbor(grid.unlinear(lin), [&](const Index3& n, const Index3&) {
      if (grid.state(grid.linear(n)) == VoxelState::Unknown) frontier = true;
    });
    if (frontier) out.push_back(lin);
  }
  return out;
}

inline bool is_frontier(const VoxelGrid& grid, std::size_t lin) {
  if (grid.state(lin) != VoxelState::Free) return false;
  bool frontier = false;
  grid.for_each_face_neighbor(grid.unlinear(lin), [&](const Index3& n, const Index3&) {
    if (grid.state(grid.linear(n)) == VoxelState::Unknown) frontier = true;
  });
  return frontier;
}

namespace detail {

inline std::uint64_t cluster_hash(ClusterKind kind, const std::vector<std::size_t>& cells) {
  Fnv1a h;
  h.add(static_cast<std::uint8_t>(kind));
  for (std::size_t c : cells) h.add(static_cast<std::uint64_t>(c));
  return h.value();
}

inline void finish_cluster(const VoxelGrid& grid, SurfaceCluster& c) {
  std::sort(c.cells.begin(), c.cells.end());
  Vec3 sum = Vec3::Zero();
  for (std::size_t lin : c.cells) sum += grid.center(lin);
  c.centroid = sum / static_cast<double>(c.cells.size());
  c.id = cluster_hash(c.kind, c.cells);
}

// 26-connected components of `cells`, in order of their smallest index.
inline std::vector<std::vector<std::size_t>> components(const VoxelGrid& grid,
                                                        std::vector<std::size_t> cells) {
  std::sort(cells.begin(), cells.end());
  std::unordered_set<std::size_t> pending(cells.begin(), cells.end());
  std::vector<std::vector<std::size_t>> out;
  for (std::size_t seed : cells) {
    if (!pending.count(seed)) continue;
    pending.erase(seed);
    std::vector<std::size_t> comp{seed};
    for (std::size_t head = 0; head < comp.size(); ++head) {
      grid.for_each_neighbor26(grid.unlinear(comp[head]), [&](const Index3& n) {
        const std::size_t lin = grid.linear(n);
        if (pending.erase(lin)) comp.push_back(lin);
      });
    }
    std::sort(comp.begin(), comp.end());
    out.push_back(std::move(comp));
  }
  return out;
}

}  // namespace detail

/// Partitions `cells` into 26-connected clusters with centroids and
/// content-derived ids.
inline std::vector<SurfaceCluster> grow_clusters(const VoxelGrid& grid,
                                                 const std::vector<std::size_t>& cells,
                                                 ClusterKind kind) {
  std::vector<SurfaceCluster> out;
  for (auto& comp : detail::components(grid, cells)) {
    SurfaceCluster c;
    c.kind = kind;
    c.cells = std::move(comp);
    detail::finish_cluster(grid, c);
    out.push_back(std::move(c));
  }
  return out;
}

struct PrincipalAxes {
  Vec3 mean = Vec3::Zero();
  // Columns ordered by decreasing variance.
  Eigen::Matrix3d axes = Eigen::Matrix3d::Identity();
  Vec3 variances = Vec3::Zero();
};

inline PrincipalAxes principal_axes(const VoxelGrid& grid, const std::vector<std::size_t>& cells) {
  PrincipalAxes pa;
  for (std::size_t lin : cells) pa.mean += grid.center(lin);
  pa.mean /= static_cast<double>(cells.size());
  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (std::size_t lin : cells) {
    const Vec3 d = grid.center(lin) - pa.mean;
    cov += d * d.transpose();
  }
  cov /= static_cast<double>(cells.size());
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(cov);
  // Eigen returns ascending eigenvalues.
  for (int k = 0; k < 3; ++k) {
    pa.axes.col(k) = es.eigenvectors().col(2 - k);
    pa.variances[k] = es.eigenvalues()[2 - k];
  }
  return pa;
}

inline double extent_along(const VoxelGrid& grid, const std::vector<std::size_t>& cells,
                           const Vec3& axis) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (std::size_t lin : cells) {
    const double p = grid.center(lin).dot(axis);
    lo = std::min(lo, p);
    hi = std::max(hi, p);
  }
  return hi - lo;
}

/// Recursive bisection along principal axes (largest variance first) at the
/// centroid projection, until every axis extent is within `split_threshold`.
/// Halves are re-split into connected components.
inline std::vector<SurfaceCluster> pca_split(const VoxelGrid& grid, const SurfaceCluster& cluster,
                                             double split_threshold) {
  std::vector<SurfaceCluster> out;
  std::vector<SurfaceCluster> work{cluster};
  while (!work.empty()) {
    SurfaceCluster c = std::move(work.back());
    work.pop_back();
    bool split = false;
    if (c.cells.size() > 1) {
      const PrincipalAxes pa = principal_axes(grid, c.cells);
      for (int k = 0; k < 3 && !split; ++k) {
        const Vec3 axis = pa.axes.col(k);
        if (extent_along(grid, c.cells, axis) <= split_threshold + 1e-9) continue;
        const double cut = pa.mean.dot(axis);
        std::vector<std::size_t> lo, hi;
        for (std::size_t lin : c.cells) (grid.center(lin).dot(axis) < cut ? lo : hi).push_back(lin);
        if (lo.empty() || hi.empty()) continue;
        split = true;
        // Push in reverse so the low side is emitted first.
        for (auto* half : {&hi, &lo}) {
          auto comps = detail::components(grid, *half);
          for (auto it = comps.rbegin(); it != comps.rend(); ++it) {
            SurfaceCluster part;
            part.kind = c.kind;
            part.cells = std::move(*it);
            detail::finish_cluster(grid, part);
            work.push_back(std::move(part));
          }
        }
      }
    }
    if (!split) out.push_back(std::move(c));
  }
  return out;
}

/// Cluster normal: each cell contributes the normalised sum of unit offsets
/// to its face neighbours in `toward` state; contributions are averaged and
/// normalised. When they cancel, falls back to the direction from the
/// centroid to the nearest voxel in `toward` state.
inline Vec3 average_normal(const VoxelGrid& grid, const SurfaceCluster& cluster,
                           VoxelState toward = VoxelState::Free) {
  Vec3 sum = Vec3::Zero();
  for (std::size_t lin : cluster.cells) {
    Vec3 n = Vec3::Zero();
    grid.for_each_face_neighbor(grid.unlinear(lin), [&](const Index3& nb, const Index3& off) {
      if (grid.state(grid.linear(nb)) == toward) n += off.cast<double>();
    });
    if (n.norm() > 1e-12) sum += n.normalized();
  }
  if (sum.norm() > 1e-9) return sum.normalized();

  double best = std::numeric_limits<double>::infinity();
  Vec3 dir = Vec3::UnitZ();
  for (std::size_t lin = 0; lin < grid.size(); ++lin) {
    if (grid.state(lin) != toward) continue;
    const Vec3 d = grid.center(lin) - cluster.centroid;
    const double n = d.norm();
    if (n > 1e-12 && n < best) {
      best = n;
      dir = d / n;
    }
  }
  return dir;
}

struct ExtractionResult {
  std::vector<std::size_t> frontier_cells;
  std::vector<std::size_t> uninspected_cells;
  std::vector<SurfaceCluster> clusters;  // frontier clusters first
};

/// Frontier and uninspected clusters of the current map. Cells in `excluded`
/// (per-voxel flags, may be empty) are left out. Frontier normals point
/// toward Unknown space and are not used for scoring.
inline ExtractionResult extract_clusters(const VoxelGrid& grid, const MapConfig& cfg,
                                         double split_threshold,
                                         const std::vector<std::uint8_t>& excluded = {}) {
  ExtractionResult r;
  r.frontier_cells = extract_frontiers(grid);
  r.uninspected_cells = uninspected_set(grid, cfg);
  auto keep = [&](std::vector<std::size_t> v) {
    if (excluded.empty()) return v;
    std::erase_if(v, [&](std::size_t lin) { return excluded[lin] != 0; });
    return v;
  };
  const std::pair<ClusterKind, std::vector<std::size_t>> sets[] = {
      {ClusterKind::Frontier, keep(r.frontier_cells)},
      {ClusterKind::Uninspected, keep(r.uninspected_cells)}};
  for (const auto& [kind, cells] : sets) {
    for (const SurfaceCluster& c : grow_clusters(grid, cells, kind)) {
      for (SurfaceCluster& part : pca_split(grid, c, split_threshold)) {
        part.avg_normal = average_normal(
            grid, part, kind == ClusterKind::Uninspected ? VoxelState::Free : VoxelState::Unknown);
        r.clusters.push_back(std::move(part));
      }
    }
  }
  return r;
}

}  // namespace tsearch
