#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "tsearch/clearance.hpp"
#include "tsearch/motion_model.hpp"
#include "tsearch/route_solver.hpp"
#include "tsearch/vp_cluster.hpp"

namespace tsearch {

/// Visiting order over cluster centres, starting at `start` (the agent).
struct GlobalRoute {
  Vec3 start = Vec3::Zero();
  std::vector<std::uint64_t> cluster_order;
  std::vector<Vec3> centers;
  double cost = 0.0;
  bool is_history = false;
  bool has_unreachable = false;

  bool empty() const { return cluster_order.empty(); }
};

struct HistoryState {
  std::optional<GlobalRoute> last_route;
  double d_anchor = 1.0;
  double d_cost_threshold = 0.3;

  void validate() const {
    if (!(d_anchor > 0.0)) throw std::invalid_argument("d_anchor must be > 0");
    if (!(d_cost_threshold >= 0.0)) throw std::invalid_argument("d_cost_threshold must be >= 0");
  }
};

/// Point used for path costs of a cluster: its centre when an agent can
/// stand there, otherwise the member nearest to the centre.
inline Vec3 plan_point(const ViewpointCluster& c, const VoxelGrid& grid,
                       const ClearanceField& field) {
  if (grid.contains_point(c.center) && field.can_stand(grid.linear(grid.world_to_index(c.center))))
    return c.center;
  const ViewpointCandidate* best = &c.members.front();
  for (const auto& m : c.members)
    if ((m.position - c.center).norm() < (best->position - c.center).norm()) best = &m;
  return best->position;
}

struct AnchorMatch {
  // (index into new clusters, position in last_route); the agent anchor is
  // implicit and always first.
  std::vector<std::pair<std::size_t, std::size_t>> anchors;
  std::vector<std::size_t> non_anchors;
  // For each non-anchor: segment k starts at anchor k (0 = agent).
  std::vector<std::size_t> segment;
};

namespace detail {

inline std::size_t nearest_old(const GlobalRoute& old, const Vec3& p, double* dist) {
  std::size_t best = 0;
  double bd = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < old.centers.size(); ++k) {
    const double d = (old.centers[k] - p).norm();
    if (d < bd) {
      bd = d;
      best = k;
    }
  }
  if (dist) *dist = bd;
  return best;
}

}  // namespace detail

/// Anchors are new clusters whose nearest old centre lies within d_anchor,
/// one anchor per old centre (closest pair first, ties to the smaller id),
/// ordered by the old route. A non-anchor joins the segment after the anchor
/// holding its nearest old centre, or after its nearest anchor (the agent
/// included) when that old centre was not matched.
inline AnchorMatch match_anchors(const std::vector<ViewpointCluster>& clusters,
                                 const HistoryState& history, const Vec3& agent) {
  if (!history.last_route || history.last_route->empty())
    throw std::invalid_argument("anchor matching needs a previous route");
  const GlobalRoute& old = *history.last_route;
  const std::size_t n = clusters.size();

  std::vector<std::size_t> near(n);
  std::vector<double> dist(n);
  for (std::size_t i = 0; i < n; ++i) near[i] = detail::nearest_old(old, clusters[i].center, &dist[i]);

  std::vector<std::size_t> cand;
  for (std::size_t i = 0; i < n; ++i)
    if (dist[i] < history.d_anchor) cand.push_back(i);
  std::sort(cand.begin(), cand.end(), [&](std::size_t a, std::size_t b) {
    if (dist[a] != dist[b]) return dist[a] < dist[b];
    return clusters[a].id < clusters[b].id;
  });
  std::vector<std::int64_t> owner(old.centers.size(), -1);
  std::vector<bool> is_anchor(n, false);
  for (std::size_t i : cand) {
    if (owner[near[i]] >= 0) continue;
    owner[near[i]] = static_cast<std::int64_t>(i);
    is_anchor[i] = true;
  }

  AnchorMatch out;
  for (std::size_t pos = 0; pos < old.centers.size(); ++pos)
    if (owner[pos] >= 0) out.anchors.push_back({static_cast<std::size_t>(owner[pos]), pos});

  for (std::size_t i = 0; i < n; ++i) {
    if (is_anchor[i]) continue;
    out.non_anchors.push_back(i);
    std::size_t seg = 0;
    if (owner[near[i]] >= 0) {
      for (std::size_t k = 0; k < out.anchors.size(); ++k)
        if (out.anchors[k].second == near[i]) seg = k + 1;
    } else {
      double bd = (agent - clusters[i].center).norm();
      for (std::size_t k = 0; k < out.anchors.size(); ++k) {
        const double d = (clusters[out.anchors[k].first].center - clusters[i].center).norm();
        if (d < bd) {
          bd = d;
          seg = k + 1;
        }
      }
    }
    out.segment.push_back(seg);
  }
  return out;
}

namespace detail {

// Node 0 is the agent, node i + 1 is clusters[i].
inline GlobalRoute route_from_order(const std::vector<ViewpointCluster>& clusters, const Vec3& agent,
                                    const std::vector<std::size_t>& order, const CostMatrix& m) {
  GlobalRoute r;
  r.start = agent;
  for (std::size_t k = 1; k < order.size(); ++k) {
    r.cluster_order.push_back(clusters[order[k] - 1].id);
    r.centers.push_back(clusters[order[k] - 1].center);
    if (m.is_sentinel(order[k - 1], order[k])) r.has_unreachable = true;
  }
  r.cost = path_cost(m, order);
  return r;
}

}  // namespace detail

/// Node order (over agent = 0 and clusters i + 1) that keeps the anchors in
/// their previous order and re-solves each segment between them.
inline std::vector<std::size_t> history_order(const AnchorMatch& match, const CostMatrix& m,
                                              std::uint64_t seed = 0) {
  std::vector<std::size_t> anchor_nodes{0};
  for (const auto& a : match.anchors) anchor_nodes.push_back(a.first + 1);
  std::vector<std::vector<std::size_t>> members(anchor_nodes.size());
  for (std::size_t k = 0; k < match.non_anchors.size(); ++k)
    members[match.segment[k]].push_back(match.non_anchors[k] + 1);

  std::vector<std::size_t> order{0};
  for (std::size_t s = 0; s < anchor_nodes.size(); ++s) {
    const bool trailing = s + 1 == anchor_nodes.size();
    std::vector<std::size_t> idx{anchor_nodes[s]};
    idx.insert(idx.end(), members[s].begin(), members[s].end());
    if (!trailing) idx.push_back(anchor_nodes[s + 1]);
    if (idx.size() == 1) continue;
    AtspOptions opt;
    opt.seed = seed + s;
    const Tour t = solve_atsp(m.submatrix(idx),
                              trailing ? TourMode::OpenFromStart : TourMode::FixedStartEnd, opt);
    for (std::size_t k = 1; k < t.order.size(); ++k) order.push_back(idx[t.order[k]]);
  }
  return order;
}

/// History-aware route for the new clusters over a precomputed global
/// matrix (agent = node 0).
inline GlobalRoute update_history_route(const std::vector<ViewpointCluster>& clusters,
                                        const HistoryState& history, const Vec3& agent,
                                        const CostMatrix& m, std::uint64_t seed = 0) {
  const AnchorMatch match = match_anchors(clusters, history, agent);
  GlobalRoute r = detail::route_from_order(clusters, agent, history_order(match, m, seed), m);
  r.is_history = true;
  return r;
}

struct GlobalPlanResult {
  GlobalRoute route;
  std::vector<std::size_t> order;  // node order: 0 = agent, i + 1 = clusters[i]
  double temp_cost = 0.0;
  std::optional<double> history_cost;
  CostMatrix matrix;
};

/// Shortest open route from the agent over all clusters; with `hagp`, the
/// history-aware route replaces it when its cost is within the relative gap.
/// Updates `history` with the adopted route.
inline GlobalPlanResult plan_global(const std::vector<ViewpointCluster>& clusters,
                                    HistoryState& history, const AgentState& agent,
                                    const VoxelGrid& grid, const ClearanceField& field,
                                    const MotionModel& motion, bool hagp = true,
                                    std::uint64_t seed = 0) {
  if (clusters.empty()) throw std::invalid_argument("global plan needs at least one cluster");
  std::vector<PlanNode> nodes;
  for (const auto& c : clusters) nodes.push_back({plan_point(c, grid, field), std::nullopt});
  GlobalPlanResult res;
  res.matrix = build_cost_matrix(agent, nodes, grid, field, motion, CostMode::Global);

  AtspOptions opt;
  opt.seed = seed;
  const Tour temp = solve_atsp(res.matrix, TourMode::OpenFromStart, opt);
  res.temp_cost = temp.cost;
  res.order = temp.order;
  res.route = detail::route_from_order(clusters, agent.position, temp.order, res.matrix);

  if (hagp && history.last_route && !history.last_route->empty()) {
    const AnchorMatch match = match_anchors(clusters, history, agent.position);
    std::vector<std::size_t> h = history_order(match, res.matrix, seed);
    const double hc = path_cost(res.matrix, h);
    res.history_cost = hc;
    const bool adopt = temp.cost > 0.0 ? (hc - temp.cost) / temp.cost <= history.d_cost_threshold
                                       : hc <= 0.0;
    if (adopt) {
      res.order = h;
      res.route = detail::route_from_order(clusters, agent.position, h, res.matrix);
      res.route.is_history = true;
    }
  }
  history.last_route = res.route;
  return res;
}

/// Order inversions between two consecutive routes over shared clusters.
/// Clusters are paired one-to-one by nearest centre within `match_radius`.
inline std::size_t count_route_inversions(const GlobalRoute& prev, const GlobalRoute& next,
                                          double match_radius) {
  struct Pair {
    double d;
    std::size_t i, j;
  };
  std::vector<Pair> pairs;
  for (std::size_t i = 0; i < prev.centers.size(); ++i)
    for (std::size_t j = 0; j < next.centers.size(); ++j) {
      const double d = (prev.centers[i] - next.centers[j]).norm();
      if (d < match_radius) pairs.push_back({d, i, j});
    }
  std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
    if (a.d != b.d) return a.d < b.d;
    if (a.i != b.i) return a.i < b.i;
    return a.j < b.j;
  });
  std::vector<bool> ui(prev.centers.size(), false), uj(next.centers.size(), false);
  std::vector<std::pair<std::size_t, std::size_t>> matched;
  for (const auto& p : pairs) {
    if (ui[p.i] || uj[p.j]) continue;
    ui[p.i] = uj[p.j] = true;
    matched.push_back({p.i, p.j});
  }
  std::sort(matched.begin(), matched.end());
  std::size_t inv = 0;
  for (std::size_t a = 0; a < matched.size(); ++a)
    for (std::size_t b = a + 1; b < matched.size(); ++b)
      if (matched[a].second > matched[b].second) ++inv;
  return inv;
}

/// One line per cycle: cycle, adopted flag, costs, cluster ids in order.
inline void write_route_log_line(std::ostream& os, std::size_t cycle, const GlobalPlanResult& r) {
  os << "cycle=" << cycle << " history=" << (r.route.is_history ? 1 : 0)
     << " temp_cost=" << r.temp_cost << " adopted_cost=" << r.route.cost << " order=";
  for (std::size_t k = 0; k < r.route.cluster_order.size(); ++k)
    os << (k ? "," : "") << std::hex << r.route.cluster_order[k] << std::dec;
  os << '\n';
}

}  // namespace tsearch
