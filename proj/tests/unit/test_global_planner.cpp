#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <set>

#include "helpers.hpp"
#include "tsearch/global_planner.hpp"

using namespace tsearch;

namespace {

struct Floor {
  VoxelGrid g = th::filled({100, 60, 1}, 0.1, VoxelState::Free);
  MapConfig cfg;
  ClearanceField f;
  Floor() {
    cfg.band_min_z = 0.0;
    cfg.band_max_z = 0.1;
    f = compute_clearance(g, cfg, 0.0);
  }
};

ViewpointCluster cl(double x, double y, std::uint64_t id) {
  ViewpointCluster c;
  ViewpointCandidate v;
  v.position = Vec3(x, y, 0.05);
  v.cluster_id = id;
  c.members = {v};
  c.center = v.position;
  c.id = id;
  return c;
}

AgentState agent_at(double x, double y) {
  AgentState a;
  a.position = Vec3(x, y, 0.05);
  return a;
}

void expect_covers(const GlobalRoute& r, const std::vector<ViewpointCluster>& cs) {
  std::multiset<std::uint64_t> got(r.cluster_order.begin(), r.cluster_order.end()), want;
  for (const auto& c : cs) want.insert(c.id);
  EXPECT_EQ(got, want);
}

}  // namespace

TEST(PlanPoint, CentreOrNearestMember) {
  Floor fl;
  ViewpointCluster c = cl(2.05, 2.05, 1);
  EXPECT_EQ(plan_point(c, fl.g, fl.f), c.center);
  fl.g.set_state(fl.g.linear(fl.g.world_to_index(c.center)), VoxelState::Occupied);
  fl.f = compute_clearance(fl.g, fl.cfg, 0.0);
  ViewpointCandidate far, near;
  far.position = Vec3(3.05, 2.05, 0.05);
  near.position = Vec3(2.55, 2.05, 0.05);
  c.members = {far, near};
  EXPECT_EQ(plan_point(c, fl.g, fl.f), near.position);
}

TEST(MatchAnchors, IdenticalClustersAllAnchors) {
  Floor fl;
  const std::vector<ViewpointCluster> cs{cl(2, 2, 1), cl(5, 2, 2), cl(8, 2, 3)};
  HistoryState h;
  GlobalRoute old;
  old.cluster_order = {3, 1, 2};
  old.centers = {cs[2].center, cs[0].center, cs[1].center};
  h.last_route = old;
  const AnchorMatch m = match_anchors(cs, h, Vec3(1, 1, 0.05));
  ASSERT_EQ(m.anchors.size(), 3u);
  EXPECT_EQ(m.anchors[0].first, 2u);
  EXPECT_EQ(m.anchors[1].first, 0u);
  EXPECT_EQ(m.anchors[2].first, 1u);
  EXPECT_TRUE(m.non_anchors.empty());
}

TEST(MatchAnchors, AllDisplacedNoAnchors) {
  const std::vector<ViewpointCluster> cs{cl(2, 2, 1), cl(5, 2, 2)};
  HistoryState h;
  GlobalRoute old;
  old.cluster_order = {7, 8};
  old.centers = {Vec3(2, 4, 0.05), Vec3(5, 4, 0.05)};
  h.last_route = old;
  const AnchorMatch m = match_anchors(cs, h, Vec3(1, 1, 0.05));
  EXPECT_TRUE(m.anchors.empty());
  EXPECT_EQ(m.non_anchors.size(), 2u);
  for (std::size_t s : m.segment) EXPECT_EQ(s, 0u);
}

TEST(MatchAnchors, MixedCase) {
  Floor fl;
  HistoryState h;
  GlobalRoute old;
  old.cluster_order = {1, 2, 3};
  old.centers = {Vec3(2, 2, 0.05), Vec3(4, 2, 0.05), Vec3(6, 2, 0.05)};
  h.last_route = old;
  const std::vector<ViewpointCluster> cs{cl(2.3, 2, 11), cl(6.2, 2, 13), cl(4, 3.5, 14)};
  const Vec3 agent(0.5, 2, 0.05);
  const AnchorMatch m = match_anchors(cs, h, agent);
  ASSERT_EQ(m.anchors.size(), 2u);
  EXPECT_EQ(m.anchors[0].first, 0u);
  EXPECT_EQ(m.anchors[1].first, 1u);
  ASSERT_EQ(m.non_anchors, std::vector<std::size_t>{2});
  EXPECT_EQ(m.segment[0], 1u);  // after A'

  const CostMatrix cm = build_cost_matrix(agent_at(0.5, 2), std::vector<PlanNode>{{cs[0].center, {}}, {cs[1].center, {}}, {cs[2].center, {}}},
                                          fl.g, fl.f, MotionModel{}, CostMode::Global);
  const GlobalRoute r = update_history_route(cs, h, agent, cm);
  EXPECT_EQ(r.cluster_order, (std::vector<std::uint64_t>{11, 14, 13}));
  EXPECT_NEAR(r.cost, path_cost(cm, std::vector<std::size_t>{0, 1, 3, 2}), 1e-12);
}

TEST(HistoryRoute, NoNonAnchorsKeepsOrder) {
  Floor fl;
  const std::vector<ViewpointCluster> cs{cl(2, 2, 1), cl(5, 2, 2), cl(8, 2, 3)};
  HistoryState h;
  GlobalRoute old;
  old.cluster_order = {2, 3, 1};
  old.centers = {cs[1].center, cs[2].center, cs[0].center};
  h.last_route = old;
  std::vector<PlanNode> nodes;
  for (const auto& c : cs) nodes.push_back({c.center, {}});
  const CostMatrix cm = build_cost_matrix(agent_at(1, 1), nodes, fl.g, fl.f, MotionModel{}, CostMode::Global);
  const GlobalRoute r = update_history_route(cs, h, Vec3(1, 1, 0.05), cm);
  EXPECT_EQ(r.cluster_order, (std::vector<std::uint64_t>{2, 3, 1}));
  EXPECT_NEAR(r.cost, cm(0, 2) + cm(2, 3) + cm(3, 1), 1e-12);
  EXPECT_TRUE(r.is_history);
}

TEST(PlanGlobal, FirstCycleThenUnchanged) {
  Floor fl;
  const std::vector<ViewpointCluster> cs{cl(2, 2, 1), cl(5, 4, 2), cl(8, 2, 3), cl(3, 5, 4)};
  HistoryState h;
  const AgentState a = agent_at(1, 1);
  const GlobalPlanResult r1 = plan_global(cs, h, a, fl.g, fl.f, MotionModel{});
  EXPECT_FALSE(r1.route.is_history);
  EXPECT_FALSE(r1.history_cost);
  expect_covers(r1.route, cs);
  const GlobalPlanResult r2 = plan_global(cs, h, a, fl.g, fl.f, MotionModel{});
  EXPECT_TRUE(r2.route.is_history);
  EXPECT_EQ(r2.route.cluster_order, r1.route.cluster_order);
  EXPECT_EQ(count_route_inversions(r1.route, r2.route, 1.0), 0u);
}

TEST(PlanGlobal, AdversarialHistoryRejected) {
  Floor fl;
  // Old order visits the far cluster first.
  const std::vector<ViewpointCluster> cs{cl(7, 2, 1), cl(1.5, 2, 2)};
  HistoryState h;
  GlobalRoute old;
  old.cluster_order = {1, 2};
  old.centers = {cs[0].center, cs[1].center};
  h.last_route = old;
  const AgentState a = agent_at(1, 2);
  const GlobalPlanResult r = plan_global(cs, h, a, fl.g, fl.f, MotionModel{});
  ASSERT_TRUE(r.history_cost);
  EXPECT_GT(*r.history_cost, 1.3 * r.temp_cost);
  EXPECT_FALSE(r.route.is_history);
  EXPECT_EQ(r.route.cluster_order, (std::vector<std::uint64_t>{2, 1}));
  EXPECT_EQ(h.last_route->cluster_order, r.route.cluster_order);
  const Tour exact = brute_force_atsp(r.matrix, TourMode::OpenFromStart);
  EXPECT_NEAR(r.temp_cost, exact.cost, 1e-12);
}

TEST(PlanGlobal, HagpOffAlwaysTemporary) {
  Floor fl;
  const std::vector<ViewpointCluster> cs{cl(2, 2, 1), cl(5, 4, 2)};
  HistoryState h;
  plan_global(cs, h, agent_at(1, 1), fl.g, fl.f, MotionModel{}, false);
  const GlobalPlanResult r = plan_global(cs, h, agent_at(1, 1), fl.g, fl.f, MotionModel{}, false);
  EXPECT_FALSE(r.route.is_history);
  EXPECT_FALSE(r.history_cost);
}

// Random sequences of perturbed cluster sets: every adopted route covers the
// clusters exactly once and stays within the cost gap of the temporary one.
TEST(PlanGlobal, BoundedSuboptimalityAndCoverage) {
  Floor fl;
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> ux(0.5, 9.5), uy(0.5, 5.5), jit(-0.6, 0.6);
  HistoryState h;
  std::vector<ViewpointCluster> cs;
  for (int k = 0; k < 8; ++k) cs.push_back(cl(ux(rng), uy(rng), k + 1));
  for (int cycle = 0; cycle < 15; ++cycle) {
    const AgentState a = agent_at(ux(rng), uy(rng));
    const GlobalPlanResult r = plan_global(cs, h, a, fl.g, fl.f, MotionModel{}, true, cycle);
    expect_covers(r.route, cs);
    EXPECT_LE(r.route.cost, (1 + h.d_cost_threshold) * r.temp_cost + 1e-9);
    for (auto& c : cs) {
      c.center += Vec3(jit(rng), jit(rng), 0);
      c.center = c.center.cwiseMax(Vec3(0.3, 0.3, 0.05)).cwiseMin(Vec3(9.7, 5.7, 0.05));
      c.members[0].position = c.center;
    }
    if (cycle % 4 == 3) {
      cs.erase(cs.begin());
      cs.push_back(cl(ux(rng), uy(rng), 100 + cycle));
    }
  }
}

TEST(Inversions, Counting) {
  GlobalRoute a, b;
  a.centers = {Vec3(0, 0, 0), Vec3(5, 0, 0), Vec3(10, 0, 0)};
  b.centers = {Vec3(10, 0, 0), Vec3(0.2, 0, 0), Vec3(5, 0, 0), Vec3(20, 0, 0)};
  EXPECT_EQ(count_route_inversions(a, b, 1.0), 2u);
  EXPECT_EQ(count_route_inversions(a, a, 1.0), 0u);
  GlobalRoute c;
  c.centers = {Vec3(10, 0, 0), Vec3(5, 0, 0), Vec3(0, 0, 0)};
  EXPECT_EQ(count_route_inversions(a, c, 1.0), 3u);
}

TEST(History, Validation) {
  HistoryState h;
  h.d_anchor = 0.0;
  EXPECT_THROW(h.validate(), std::invalid_argument);
  h.d_anchor = 1.0;
  h.d_cost_threshold = -0.1;
  EXPECT_THROW(h.validate(), std::invalid_argument);
}
