#include <gtest/gtest.h>

#include <random>
#include <set>
#include <sstream>

#include "helpers.hpp"
#include "tsearch/voxel_map.hpp"

using namespace tsearch;
using th::filled;

TEST(Raycast, ZeroLengthIsOneVoxel) {
  VoxelGrid g = filled({10, 10, 10}, 0.1, VoxelState::Free);
  const Vec3 p(0.35, 0.35, 0.35);
  const RaycastResult r = raycast(g, p, p);
  ASSERT_EQ(r.voxels.size(), 1u);
  EXPECT_FALSE(r.hit);
}

TEST(Raycast, AxisAlignedFiveSteps) {
  VoxelGrid g = filled({10, 10, 10}, 0.1, VoxelState::Free);
  const RaycastResult r = raycast(g, g.index_to_center({1, 4, 4}), g.index_to_center({6, 4, 4}));
  EXPECT_EQ(r.voxels.size(), 6u);
  EXPECT_FALSE(r.hit);
}

TEST(Raycast, StopsAtWall) {
  VoxelGrid g = filled({10, 10, 10}, 0.1, VoxelState::Free);
  for (int y = 0; y < 10; ++y)
    for (int z = 0; z < 10; ++z) th::set(g, 4, y, z, VoxelState::Occupied);
  const RaycastResult r = raycast(g, g.index_to_center({1, 3, 3}), g.index_to_center({8, 3, 3}));
  EXPECT_TRUE(r.hit);
  ASSERT_EQ(r.voxels.size(), 4u);
  EXPECT_EQ(r.voxels.back(), Index3(4, 3, 3));
}

TEST(Raycast, OutOfBoundsNamesPoint) {
  VoxelGrid g = filled({4, 4, 4}, 0.1, VoxelState::Free);
  try {
    raycast(g, Vec3(0.1, 0.1, 0.1), Vec3(2.0, 0.1, 0.1));
    FAIL() << "expected OutOfBounds";
  } catch (const OutOfBounds& e) {
    EXPECT_NEAR(e.point().x(), 2.0, 1e-12);
    EXPECT_NE(std::string(e.what()).find("2"), std::string::npos);
  }
}

// Supercover oracle: every voxel whose closed cube meets the segment.
TEST(Raycast, MatchesExhaustiveCubeIntersection) {
  VoxelGrid g = filled({12, 12, 12}, 0.25, VoxelState::Free);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.01, 2.99);
  for (int trial = 0; trial < 300; ++trial) {
    const Vec3 a(u(rng), u(rng), u(rng));
    Vec3 b(u(rng), u(rng), u(rng));
    if (trial % 5 == 0) b = Vec3(a.x() + 1.7, a.y() + 0.3, a.z()).cwiseMin(Vec3::Constant(2.99));
    const RaycastResult r = raycast(g, a, b);
    std::set<std::size_t> got;
    for (const Index3& i : r.voxels) got.insert(g.linear(i));
    std::set<std::size_t> want;
    for (std::size_t lin = 0; lin < g.size(); ++lin) {
      const Vec3 lo = g.index_to_center(g.unlinear(lin)) - Vec3::Constant(0.125);
      if (th::segment_hits_cube(a, b, lo, 0.25)) want.insert(lin);
    }
    // Oracle counts cubes merely touched within 1e-9; the walk may skip
    // those grazing contacts but never misses a properly crossed cube.
    for (std::size_t lin : got) EXPECT_TRUE(want.count(lin)) << "trial " << trial;
    for (std::size_t lin : want) {
      if (got.count(lin)) continue;
      const Vec3 lo = g.index_to_center(g.unlinear(lin)) - Vec3::Constant(0.125);
      const Vec3 shrink = lo + Vec3::Constant(1e-6);
      EXPECT_FALSE(th::segment_hits_cube(a, b, shrink, 0.25 - 2e-6)) << "trial " << trial;
    }
    // Consecutive voxels are 26-adjacent.
    for (std::size_t k = 1; k < r.voxels.size(); ++k)
      EXPECT_LE((r.voxels[k] - r.voxels[k - 1]).cwiseAbs().maxCoeff(), 1);
  }
}

TEST(RangeScan, EmptyScanChangesNothing) {
  VoxelGrid g({0, 0, 0}, 0.1, {10, 10, 10});
  EXPECT_EQ(integrate_range_scan(g, Pose{Vec3(0.55, 0.55, 0.55), 0.0}, RangeScan{}), 0u);
}

TEST(RangeScan, SingleHitAndIdempotence) {
  VoxelGrid g({0, 0, 0}, 0.1, {10, 10, 10});
  const Pose pose{g.index_to_center({1, 4, 4}), 0.0};
  RangeScan scan;
  scan.origin = pose.position;
  scan.rays.push_back({Vec3::UnitX(), g.index_to_center({4, 4, 4}), true});
  EXPECT_EQ(integrate_range_scan(g, pose, scan), 4u);
  EXPECT_EQ(g.count(VoxelState::Free), 3u);
  EXPECT_EQ(g.count(VoxelState::Occupied), 1u);
  EXPECT_EQ(g.state(g.linear({4, 4, 4})), VoxelState::Occupied);
  EXPECT_EQ(integrate_range_scan(g, pose, scan), 0u);
}

TEST(RangeScan, NeverDemotesOccupied) {
  VoxelGrid g({0, 0, 0}, 0.1, {10, 10, 10});
  th::set(g, 3, 4, 4, VoxelState::Occupied);
  const Pose pose{g.index_to_center({0, 4, 4}), 0.0};
  RangeScan scan;
  scan.rays.push_back({Vec3::UnitX(), g.index_to_center({8, 4, 4}), false});
  integrate_range_scan(g, pose, scan);
  EXPECT_EQ(g.state(g.linear({3, 4, 4})), VoxelState::Occupied);
}

TEST(Camera, NothingInFrustum) {
  VoxelGrid g = filled({20, 20, 10}, 0.1, VoxelState::Free);
  th::set(g, 2, 10, 5, VoxelState::Occupied);
  MapConfig cfg;
  const Pose pose{g.index_to_center({10, 10, 5}), 0.0};  // facing +x, voxel behind
  EXPECT_TRUE(integrate_camera_frame(g, pose, cfg).empty());
}

TEST(Camera, SingleVoxelAhead) {
  VoxelGrid g = filled({30, 11, 11}, 0.1, VoxelState::Free);
  th::set(g, 15, 5, 5, VoxelState::Occupied);
  MapConfig cfg;
  const Pose pose{g.index_to_center({5, 5, 5}), 0.0};
  const auto got = integrate_camera_frame(g, pose, cfg);
  ASSERT_EQ(got.size(), 1u);
  EXPECT_EQ(got[0], g.linear({15, 5, 5}));
  EXPECT_NEAR(g.at(got[0]).closest_obs, 1.0, 1e-9);
}

TEST(Camera, OcclusionMatchesPerVoxelRaycast) {
  VoxelGrid g = filled({40, 21, 11}, 0.1, VoxelState::Free);
  for (int y = 5; y <= 15; ++y)
    for (int z = 2; z <= 8; ++z) {
      th::set(g, 12, y, z, VoxelState::Occupied);
      th::set(g, 20, y, z, VoxelState::Occupied);
    }
  MapConfig cfg;
  const Pose pose{g.index_to_center({4, 10, 5}), 0.0};
  integrate_camera_frame(g, pose, cfg);
  for (std::size_t lin : g.occupied()) {
    const Index3 i = g.unlinear(lin);
    const bool observed = g.at(lin).closest_obs < kNeverObserved;
    if (i.x() == 20) EXPECT_FALSE(observed);
    // Oracle: direct raycast to the centre hits nothing before this voxel.
    const Vec3 c = g.center(lin);
    bool clear = true;
    for (const Index3& v : raycast(g, pose.position, c).voxels)
      if (g.linear(v) != lin && g.state(g.linear(v)) == VoxelState::Occupied) clear = false;
    const bool expect = clear && in_frustum(pose.position, pose.yaw, c, cfg);
    EXPECT_EQ(observed, expect) << i.transpose();
  }
}

TEST(Camera, ClosestObsNeverIncreases) {
  VoxelGrid g = filled({40, 11, 11}, 0.1, VoxelState::Free);
  th::set(g, 30, 5, 5, VoxelState::Occupied);
  MapConfig cfg;
  integrate_camera_frame(g, Pose{g.index_to_center({20, 5, 5}), 0.0}, cfg);
  const double near = g.at(g.linear({30, 5, 5})).closest_obs;
  integrate_camera_frame(g, Pose{g.index_to_center({5, 5, 5}), 0.0}, cfg);
  EXPECT_EQ(g.at(g.linear({30, 5, 5})).closest_obs, near);
}

TEST(Targets, FrustumDistanceAndIdempotence) {
  VoxelGrid g = filled({80, 11, 11}, 0.1, VoxelState::Free);
  MapConfig cfg;
  th::set(g, 40, 5, 5, VoxelState::Occupied);
  const std::vector<std::size_t> truth{g.linear({40, 5, 5})};
  const Vec3 tc = g.index_to_center({40, 5, 5});
  // Behind.
  EXPECT_TRUE(detect_targets(g, Pose{tc - Vec3(1.0, 0, 0), kPi}, cfg, truth).empty());
  // Ahead at d_max + res.
  EXPECT_TRUE(detect_targets(g, Pose{tc - Vec3(cfg.d_max + 0.1, 0, 0), 0.0}, cfg, truth).empty());
  // Ahead at half d_max.
  const Pose ok{tc - Vec3(0.5 * cfg.d_max, 0, 0), 0.0};
  EXPECT_EQ(detect_targets(g, ok, cfg, truth).size(), 1u);
  EXPECT_TRUE(detect_targets(g, ok, cfg, truth).empty());
  EXPECT_TRUE(g.at(truth[0]).is_target);
}

TEST(Uninspected, Cases) {
  MapConfig cfg;
  VoxelGrid g({0, 0, 0}, 0.1, {5, 5, 5});
  EXPECT_TRUE(uninspected_set(g, cfg).empty());
  th::set(g, 2, 2, 2, VoxelState::Occupied);
  EXPECT_EQ(uninspected_set(g, cfg), std::vector<std::size_t>{g.linear({2, 2, 2})});
  g.set_closest_obs(g.linear({2, 2, 2}), 2.9);
  EXPECT_TRUE(uninspected_set(g, cfg).empty());
  g.set_closest_obs(g.linear({2, 2, 2}), 3.0);
  EXPECT_TRUE(uninspected_set(g, cfg).empty());
}

TEST(Completion, Cases) {
  MapConfig cfg;
  VoxelGrid g = filled({5, 5, 5}, 0.1, VoxelState::Free);
  std::vector<std::uint8_t> all(g.size(), 1);
  EXPECT_TRUE(is_search_complete(g, cfg, all));
  // Sealed hollow: unknown but outside the reachable mask.
  VoxelGrid h = g;
  h.set_state(h.linear({2, 2, 2}), VoxelState::Unknown);
  std::vector<std::uint8_t> mask = all;
  mask[h.linear({2, 2, 2})] = 0;
  EXPECT_TRUE(is_search_complete(h, cfg, mask));
  EXPECT_FALSE(is_search_complete(h, cfg, all));
  th::set(g, 1, 1, 1, VoxelState::Occupied);
  EXPECT_FALSE(is_search_complete(g, cfg, all));
  g.set_closest_obs(g.linear({1, 1, 1}), 1.0);
  EXPECT_TRUE(is_search_complete(g, cfg, all));
  EXPECT_THROW(is_search_complete(g, cfg, std::vector<std::uint8_t>(3, 1)), std::invalid_argument);
}

TEST(Grid, OccupiedListTracksStates) {
  VoxelGrid g({0, 0, 0}, 0.1, {4, 4, 4});
  th::set(g, 1, 1, 1, VoxelState::Occupied);
  th::set(g, 2, 1, 1, VoxelState::Occupied);
  EXPECT_EQ(g.occupied().size(), 2u);
  EXPECT_EQ(g.count(VoxelState::Unknown), 62u);
  EXPECT_THROW(g.world_to_index(Vec3(-0.5, 0, 0)), OutOfBounds);
  EXPECT_EQ(g.world_to_index(Vec3(0.4, 0.4, 0.4)), Index3(3, 3, 3));
}

TEST(Snapshot, RoundTrip) {
  VoxelGrid g({-1.0, 0.5, 0.0}, 0.2, {6, 5, 4});
  std::mt19937 rng(3);
  for (std::size_t i = 0; i < g.size(); ++i) {
    g.set_state(i, static_cast<VoxelState>(rng() % 3));
    if (g.state(i) == VoxelState::Occupied && rng() % 2) g.set_closest_obs(i, 0.5 * (rng() % 8));
    if (rng() % 17 == 0) g.set_target(i, true);
  }
  std::stringstream ss;
  write_snapshot(g, ss);
  const VoxelGrid r = read_snapshot(ss);
  ASSERT_EQ(r.size(), g.size());
  EXPECT_EQ(r.dims(), g.dims());
  EXPECT_EQ(r.origin(), g.origin());
  for (std::size_t i = 0; i < g.size(); ++i) {
    EXPECT_EQ(r.state(i), g.state(i));
    EXPECT_EQ(r.at(i).is_target, g.at(i).is_target);
    EXPECT_EQ(r.at(i).closest_obs, g.at(i).closest_obs);
  }
  std::stringstream cut(ss.str().substr(0, 20));
  EXPECT_THROW(read_snapshot(cut), std::runtime_error);
}

TEST(Slice, AsciiSymbols) {
  MapConfig cfg;
  VoxelGrid g({0, 0, 0}, 0.1, {3, 1, 1});
  th::set(g, 1, 0, 0, VoxelState::Free);
  th::set(g, 2, 0, 0, VoxelState::Occupied);
  EXPECT_EQ(slice_ascii(g, cfg, 0), "?.!\n");
}
