#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "tsearch/clearance.hpp"
#include "tsearch/viewpoint_gen.hpp"

namespace tsearch {

struct ViewpointCluster {
  std::vector<ViewpointCandidate> members;
  Vec3 center = Vec3::Zero();
  std::uint64_t id = 0;
};

inline Vec3 mean_position(const std::vector<ViewpointCandidate>& vps) {
  Vec3 s = Vec3::Zero();
  for (const auto& v : vps) s += v.position;
  return s / static_cast<double>(vps.size());
}

/// Plain line of sight: the supercover walk from a to b meets no Occupied voxel.
inline bool mutual_visibility(const Vec3& a, const Vec3& b, const VoxelGrid& grid) {
  return !raycast(grid, a, b).hit;
}

/// Greedy visibility clustering. The first cluster is seeded at the agent
/// position; a viewpoint within `r_vp` of the current centre joins when it
/// has a clear (clearance-aware) segment to every member, nearest first, and
/// the candidate pool is rescanned after every admission. A finalised
/// cluster seeds the next one from the unclustered viewpoint nearest its
/// centre. The agent seed is dropped from the first cluster afterwards; if
/// that leaves it empty, it is discarded and the next seed is the viewpoint
/// nearest the agent.
inline std::vector<ViewpointCluster> cluster_viewpoints(const std::vector<ViewpointCandidate>& vps,
                                                        const VoxelGrid& grid,
                                                        const ClearanceField& field,
                                                        const Vec3& agent_pos, double r_vp) {
  std::vector<ViewpointCluster> out;
  if (vps.empty()) return out;

  std::vector<bool> used(vps.size(), false);
  std::size_t remaining = vps.size();

  auto nearer = [&](std::size_t a, std::size_t b, const Vec3& c) {
    const double da = (vps[a].position - c).norm();
    const double db = (vps[b].position - c).norm();
    if (da != db) return da < db;
    return lex_less(vps[a].position, vps[b].position);
  };

  std::vector<Vec3> seed_positions{agent_pos};
  std::vector<std::size_t> member_idx;
  bool first = true;

  while (true) {
    Vec3 center = agent_pos;
    if (!first) {
      center = Vec3::Zero();
      for (const Vec3& p : seed_positions) center += p;
      center /= static_cast<double>(seed_positions.size());
    }
    while (remaining > 0) {
      std::vector<std::size_t> pool;
      for (std::size_t i = 0; i < vps.size(); ++i)
        if (!used[i] && (vps[i].position - center).norm() <= r_vp) pool.push_back(i);
      std::sort(pool.begin(), pool.end(),
                [&](std::size_t a, std::size_t b) { return nearer(a, b, center); });
      bool admitted = false;
      for (std::size_t i : pool) {
        bool visible = true;
        for (const Vec3& m : seed_positions)
          if (!clear_segment(grid, field, vps[i].position, m)) {
            visible = false;
            break;
          }
        if (!visible) continue;
        used[i] = true;
        --remaining;
        member_idx.push_back(i);
        seed_positions.push_back(vps[i].position);
        center = Vec3::Zero();
        for (const Vec3& p : seed_positions) center += p;
        center /= static_cast<double>(seed_positions.size());
        admitted = true;
        break;
      }
      if (!admitted) break;
    }

    Vec3 finalized = center;
    if (!member_idx.empty()) {
      ViewpointCluster c;
      for (std::size_t i : member_idx) c.members.push_back(vps[i]);
      c.center = mean_position(c.members);
      Fnv1a h;
      for (const auto& m : c.members) h.add(m.cluster_id);
      c.id = h.value();
      finalized = c.center;
      out.push_back(std::move(c));
    } else {
      finalized = agent_pos;
    }
    first = false;
    if (remaining == 0) break;

    std::size_t next = vps.size();
    for (std::size_t i = 0; i < vps.size(); ++i)
      if (!used[i] && (next == vps.size() || nearer(i, next, finalized))) next = i;
    used[next] = true;
    --remaining;
    member_idx = {next};
    seed_positions = {vps[next].position};
    if (remaining == 0) {
      ViewpointCluster c;
      c.members.push_back(vps[next]);
      c.center = vps[next].position;
      Fnv1a h;
      h.add(vps[next].cluster_id);
      c.id = h.value();
      out.push_back(std::move(c));
      break;
    }
  }
  return out;
}

/// One cluster per viewpoint, in input order (flat planning).
inline std::vector<ViewpointCluster> singleton_clusters(const std::vector<ViewpointCandidate>& vps) {
  std::vector<ViewpointCluster> out;
  for (const auto& v : vps) {
    ViewpointCluster c;
    c.members.push_back(v);
    c.center = v.position;
    Fnv1a h;
    h.add(v.cluster_id);
    c.id = h.value();
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace tsearch
