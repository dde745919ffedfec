#include <gtest/gtest.h>

#include <random>
#include <set>

#include "helpers.hpp"
#include "tsearch/vp_cluster.hpp"

using namespace tsearch;

namespace {

struct Map {
  VoxelGrid g = th::filled({100, 60, 1}, 0.1, VoxelState::Free);
  MapConfig cfg;
  ClearanceField f;
  Map() {
    cfg.band_min_z = 0.0;
    cfg.band_max_z = 0.1;
  }
  void wall_x(int x, int y0, int y1) {
    for (int y = y0; y <= y1; ++y) g.set_state(g.linear({x, y, 0}), VoxelState::Occupied);
  }
  void finish() { f = compute_clearance(g, cfg, 0.2); }
};

ViewpointCandidate vp_at(double x, double y, std::uint64_t id) {
  ViewpointCandidate v;
  v.position = Vec3(x, y, 0.05);
  v.cluster_id = id;
  return v;
}

void expect_partition_of_cliques(const std::vector<ViewpointCluster>& cl,
                                 const std::vector<ViewpointCandidate>& vps, const Map& m) {
  std::multiset<std::uint64_t> ids;
  for (const auto& c : cl) {
    ASSERT_FALSE(c.members.empty());
    EXPECT_NEAR((mean_position(c.members) - c.center).norm(), 0.0, 1e-12);
    for (std::size_t a = 0; a < c.members.size(); ++a) {
      ids.insert(c.members[a].cluster_id);
      for (std::size_t b = a + 1; b < c.members.size(); ++b) {
        EXPECT_TRUE(mutual_visibility(c.members[a].position, c.members[b].position, m.g));
        EXPECT_TRUE(clear_segment(m.g, m.f, c.members[a].position, c.members[b].position));
      }
    }
  }
  std::multiset<std::uint64_t> want;
  for (const auto& v : vps) want.insert(v.cluster_id);
  EXPECT_EQ(ids, want);
}

}  // namespace

TEST(VpCluster, EmptyAndSingle) {
  Map m;
  m.finish();
  EXPECT_TRUE(cluster_viewpoints({}, m.g, m.f, Vec3(1, 1, 0.05), 3.0).empty());
  const auto one = cluster_viewpoints({vp_at(2, 2, 1)}, m.g, m.f, Vec3(1, 1, 0.05), 3.0);
  ASSERT_EQ(one.size(), 1u);
  EXPECT_EQ(one[0].members.size(), 1u);
}

TEST(VpCluster, WallSeparatesPair) {
  Map m;
  m.wall_x(50, 0, 59);
  m.finish();
  const std::vector<ViewpointCandidate> vps{vp_at(4.5, 3, 1), vp_at(5.5, 3, 2)};
  const auto cl = cluster_viewpoints(vps, m.g, m.f, Vec3(4.0, 3, 0.05), 3.0);
  EXPECT_EQ(cl.size(), 2u);
  expect_partition_of_cliques(cl, vps, m);
}

TEST(VpCluster, RoomAndPartition) {
  Map m;
  m.wall_x(50, 0, 59);
  m.finish();
  std::vector<ViewpointCandidate> vps{vp_at(2.0, 2.0, 1), vp_at(2.5, 3.0, 2), vp_at(3.0, 2.5, 3),
                                      vp_at(2.0, 3.5, 4), vp_at(3.5, 3.5, 5), vp_at(5.8, 2.5, 6),
                                      vp_at(6.2, 3.2, 7)};
  const auto cl = cluster_viewpoints(vps, m.g, m.f, Vec3(2.5, 2.5, 0.05), 3.0);
  ASSERT_EQ(cl.size(), 2u);
  EXPECT_EQ(cl[0].members.size(), 5u);
  EXPECT_EQ(cl[1].members.size(), 2u);
  expect_partition_of_cliques(cl, vps, m);
}

TEST(VpCluster, RandomMapsProduceCliques) {
  std::mt19937 rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    Map m;
    for (int k = 0; k < 6; ++k) {
      const int x = 10 + rng() % 80;
      const int y0 = rng() % 40;
      m.wall_x(x, y0, y0 + 15);
    }
    m.finish();
    std::vector<ViewpointCandidate> vps;
    std::uint64_t id = 1;
    while (vps.size() < 30) {
      const Index3 i(rng() % 100, rng() % 60, 0);
      if (!m.f.can_stand(m.g.linear(i))) continue;
      ViewpointCandidate v;
      v.position = m.g.index_to_center(i);
      v.cluster_id = id++;
      vps.push_back(v);
    }
    const auto cl = cluster_viewpoints(vps, m.g, m.f, vps[0].position, 3.0);
    expect_partition_of_cliques(cl, vps, m);
  }
}

TEST(MutualVisibility, Cases) {
  Map m;
  m.wall_x(50, 0, 59);
  const Vec3 a(1, 1, 0.05);
  EXPECT_TRUE(mutual_visibility(a, a, m.g));
  EXPECT_TRUE(mutual_visibility(a, Vec3(4.5, 1, 0.05), m.g));
  EXPECT_FALSE(mutual_visibility(a, Vec3(6, 1, 0.05), m.g));
}

TEST(Singletons, OnePerViewpoint) {
  const std::vector<ViewpointCandidate> vps{vp_at(1, 1, 1), vp_at(2, 2, 2), vp_at(3, 3, 3)};
  const auto s = singleton_clusters(vps);
  ASSERT_EQ(s.size(), 3u);
  for (std::size_t k = 0; k < 3; ++k) EXPECT_EQ(s[k].center, vps[k].position);
}
