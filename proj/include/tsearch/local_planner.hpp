#pragma once

#include <limits>
#include <optional>
#include <vector>

#include "tsearch/clearance.hpp"
#include "tsearch/motion_model.hpp"
#include "tsearch/route_solver.hpp"
#include "tsearch/viewpoint_gen.hpp"
#include "tsearch/vp_cluster.hpp"

namespace tsearch {

inline constexpr double kUnreachableCost = std::numeric_limits<double>::infinity();

/// Cost of flying from the current state to a viewpoint; the path length
/// comes from the grid search. +inf when no path exists.
inline double cost_from_state(const AgentState& s, const ViewpointCandidate& vp,
                              const MotionModel& m, const VoxelGrid& grid,
                              const ClearanceField& field) {
  const Vec3 to[] = {vp.position};
  const double l = path_lengths(grid, field, s.position, to)[0];
  count_cost_evaluations(1);
  if (!std::isfinite(l)) return kUnreachableCost;
  return state_cost(s, vp.position, vp.yaw, l, m);
}

/// Cost between two viewpoints. +inf when no path exists.
inline double cost_between(const ViewpointCandidate& a, const ViewpointCandidate& b,
                           const MotionModel& m, const VoxelGrid& grid,
                           const ClearanceField& field) {
  const Vec3 to[] = {b.position};
  const double l = path_lengths(grid, field, a.position, to)[0];
  count_cost_evaluations(1);
  if (!std::isfinite(l)) return kUnreachableCost;
  return pair_cost(a.yaw, b.yaw, l, m);
}

struct LocalLeg {
  std::vector<Vec3> points;  // grid polyline
  double length = 0.0;
  double duration = 0.0;     // nominal cost of the leg (s)
  std::optional<double> yaw; // heading at the end of the leg
};

struct LocalPlan {
  std::vector<ViewpointCandidate> order;
  std::optional<Vec3> endpoint;
  std::vector<LocalLeg> legs;  // agent -> order[0] -> ... [-> endpoint]

  std::vector<Vec3> path() const {
    std::vector<Vec3> out;
    for (const auto& leg : legs)
      for (std::size_t k = out.empty() ? 0 : 1; k < leg.points.size(); ++k)
        out.push_back(leg.points[k]);
    return out;
  }
};

/// Orders the members of the first cluster from the agent state, ending at
/// `next_center` when there is one (fixed-end tour) or anywhere otherwise.
/// Legs to unreachable nodes are left out of the polyline.
inline LocalPlan plan_local(const AgentState& s, const ViewpointCluster& cluster,
                            const std::optional<Vec3>& next_center, const MotionModel& m,
                            const VoxelGrid& grid, const ClearanceField& field,
                            std::uint64_t seed = 0) {
  if (cluster.members.empty()) throw std::invalid_argument("local plan needs a non-empty cluster");
  std::vector<PlanNode> nodes;
  for (const auto& vp : cluster.members) nodes.push_back({vp.position, vp.yaw});
  if (next_center) nodes.push_back({*next_center, std::nullopt});

  const CostMatrix c = build_cost_matrix(s, nodes, grid, field, m, CostMode::Local);
  AtspOptions opt;
  opt.seed = seed;
  const TourMode mode = next_center ? TourMode::FixedStartEnd : TourMode::OpenFromStart;
  const Tour tour = solve_atsp(c, mode, opt);

  LocalPlan plan;
  plan.endpoint = next_center;
  Vec3 from = s.position;
  for (std::size_t k = 1; k < tour.order.size(); ++k) {
    const std::size_t node = tour.order[k];
    const bool is_end = next_center && node == nodes.size();
    if (!is_end) plan.order.push_back(cluster.members[node - 1]);
    LocalLeg leg;
    try {
      const GridPath p = astar(grid, field, from, nodes[node - 1].position);
      leg.points = p.points;
      leg.length = p.length;
    } catch (const Unreachable&) {
      continue;
    }
    leg.duration = c(tour.order[k - 1], node);
    leg.yaw = nodes[node - 1].yaw;
    plan.legs.push_back(std::move(leg));
    from = nodes[node - 1].position;
  }
  return plan;
}

}  // namespace tsearch
