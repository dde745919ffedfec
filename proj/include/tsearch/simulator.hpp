#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "tsearch/clearance.hpp"
#include "tsearch/cluster_extract.hpp"
#include "tsearch/global_planner.hpp"
#include "tsearch/local_planner.hpp"
#include "tsearch/motion_model.hpp"
#include "tsearch/route_solver.hpp"
#include "tsearch/sensor_sim.hpp"
#include "tsearch/viewpoint_gen.hpp"
#include "tsearch/voxel_map.hpp"
#include "tsearch/vp_cluster.hpp"

namespace tsearch {

enum class ReplanTrigger { EverySegment, EveryMapChange };

struct SimConfig {
  MapConfig map;
  LidarPattern lidar;
  MotionModel motion;
  ScoreWeights weights;
  SamplingConfig sampling;
  double split_threshold = 2.0;
  double r_vp = 3.0;
  double d_anchor = 1.0;
  double d_cost_threshold = 0.3;
  double agent_radius = 0.3;
  double resolution = 0.0;  // 0 keeps the scenario's value
  double sense_interval = 0.2;
  double budget = 600.0;    // model seconds
  ReplanTrigger replan_trigger = ReplanTrigger::EverySegment;
  bool toggle_vc = true;
  bool toggle_hagp = true;
  std::uint64_t seed = 0;
  double start_jitter = 0.25;  // metres, per horizontal axis
  int reachable_stride = 1;
  std::size_t max_cycles = 5000;
  std::string dump_dir;        // stall diagnostics go here when set

  void validate() const {
    map.validate();
    motion.validate();
    weights.validate();
    if (!(split_threshold > 0.0)) throw std::invalid_argument("split_threshold must be > 0");
    if (!(r_vp > 0.0)) throw std::invalid_argument("r_vp must be > 0");
    HistoryState h;
    h.d_anchor = d_anchor;
    h.d_cost_threshold = d_cost_threshold;
    h.validate();
    if (agent_radius < 0.0) throw std::invalid_argument("agent_radius must be >= 0");
    if (!(sense_interval > 0.0)) throw std::invalid_argument("sense_interval must be > 0");
    if (!(budget > 0.0)) throw std::invalid_argument("budget must be > 0");
    if (sampling.radii.empty() || sampling.n_azimuth < 1)
      throw std::invalid_argument("viewpoint sampling lattice is empty");
    if (reachable_stride < 1) throw std::invalid_argument("reachable_stride must be >= 1");
  }
};

struct TargetDetection {
  std::size_t index = 0;
  double time = 0.0;
};

struct SearchMetrics {
  std::uint64_t seed = 0;
  bool complete = false;
  double path_length = 0.0;
  double model_time = 0.0;
  double completeness = 0.0;
  std::vector<TargetDetection> targets_found;
  std::size_t replan_count = 0;
  double mean_latency_ms = 0.0;  // wall clock, informational
  double max_latency_ms = 0.0;
  std::vector<std::uint64_t> cost_eval_counts;  // per cycle
  std::size_t route_inversion_count = 0;
  std::size_t max_viewpoints = 0;
};

struct TrajectorySample {
  double t = 0.0;
  Vec3 position = Vec3::Zero();
  double yaw = 0.0;
};

/// What one planning cycle saw; handed to the observer.
struct CycleInfo {
  std::size_t cycle = 0;
  double time = 0.0;
  AgentState agent;
  const VoxelGrid* map = nullptr;
  const ClearanceField* field = nullptr;
  const std::vector<ViewpointCandidate>* viewpoints = nullptr;
  const std::vector<ViewpointCluster>* clusters = nullptr;
  const GlobalPlanResult* global = nullptr;
  const LocalPlan* local = nullptr;
  std::uint64_t cost_evaluations = 0;
};

using CycleObserver = std::function<void(const CycleInfo&)>;

struct RunResult {
  SearchMetrics metrics;
  std::vector<TrajectorySample> trajectory;
  VoxelGrid map;
  std::vector<std::string> route_log;
  std::vector<double> latency_ms;
};

class StallError : public std::runtime_error {
 public:
  StallError(const std::string& what, std::string dump) : std::runtime_error(what), dump_(std::move(dump)) {}
  const std::string& dump_path() const { return dump_; }

 private:
  std::string dump_;
};

/// World plus the data that depends only on it and the config.
struct PreparedWorld {
  GroundTruthWorld world;
  Pose start;
  std::vector<std::uint8_t> reachable;
};

inline PreparedWorld prepare_world(GroundTruthWorld world, const Pose& start, const SimConfig& cfg) {
  cfg.validate();
  detail::require_valid_pose(world, start);
  PreparedWorld p;
  p.start = start;
  p.reachable = compute_reachable_mask(world, cfg.map, cfg.lidar, cfg.agent_radius, start.position,
                                       cfg.reachable_stride);
  p.world = std::move(world);
  return p;
}

namespace detail {

inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
  Fnv1a h;
  h.add(a);
  h.add(b);
  return h.value();
}

// Seeded start: yaw uniform, position shifted in the horizontal plane while
// it stays on a traversable cell connected to the nominal start.
inline Pose seeded_start(const PreparedWorld& pw, const SimConfig& cfg) {
  const VoxelGrid& g = pw.world.grid;
  std::mt19937_64 rng(mix_seed(cfg.seed, 0x5EED));
  auto uniform = [&](double lo, double hi) {
    return lo + (hi - lo) * (static_cast<double>(rng() >> 11) * 0x1.0p-53);
  };
  Pose p = pw.start;
  p.yaw = wrap_angle(uniform(-kPi, kPi));
  if (cfg.start_jitter <= 0.0) return p;
  const ClearanceField f = compute_clearance(g, cfg.map, cfg.agent_radius);
  const std::size_t seed_cell = g.linear(g.world_to_index(pw.start.position));
  if (!f.can_stand(seed_cell)) return p;
  const std::vector<std::uint8_t> comp = flood_traversable(g, f, seed_cell);
  for (int attempt = 0; attempt < 16; ++attempt) {
    const Vec3 q = pw.start.position +
                   Vec3(uniform(-cfg.start_jitter, cfg.start_jitter),
                        uniform(-cfg.start_jitter, cfg.start_jitter), 0.0);
    if (!g.contains_point(q)) continue;
    const std::size_t lin = g.linear(g.world_to_index(q));
    if (comp[lin] && f.can_stand(lin)) {
      p.position = q;
      break;
    }
  }
  return p;
}

inline bool cluster_resolved(const VoxelGrid& grid, const MapConfig& cfg,
                             const std::vector<std::size_t>& cells) {
  for (std::size_t lin : cells)
    if (is_frontier(grid, lin) || is_uninspected(grid.at(lin), cfg)) return false;
  return true;
}

}  // namespace detail

/// Closed-loop search: sense, extract, sample, cluster, plan, fly one leg,
/// repeat until the completion predicate holds or the budget runs out.
class Simulation {
 public:
  Simulation(const PreparedWorld& pw, SimConfig cfg, CycleObserver observer = {})
      : pw_(pw), cfg_(std::move(cfg)), observer_(std::move(observer)),
        map_(pw.world.grid.origin(), pw.world.grid.resolution(), pw.world.grid.dims()) {
    cfg_.validate();
    history_.d_anchor = cfg_.d_anchor;
    history_.d_cost_threshold = cfg_.d_cost_threshold;
  }

  RunResult run() {
    const Pose start = detail::seeded_start(pw_, cfg_);
    agent_.position = start.position;
    agent_.yaw = start.yaw;
    agent_.velocity = Vec3::Zero();
    record(agent_.position, agent_.yaw);
    sense();
    next_sense_ = cfg_.sense_interval;

    for (std::size_t cycle = 0; cycle < cfg_.max_cycles; ++cycle) {
      if (is_search_complete(map_, cfg_.map, pw_.reachable)) {
        metrics_.complete = true;
        break;
      }
      if (time_ >= cfg_.budget) break;
      plan_and_fly(cycle);
    }
    return finish();
  }

 private:
  struct Goal {
    std::uint64_t surface_id = 0;
    std::vector<std::size_t> cells;
  };

  // Sense at the current pose. Returns true when anything was learned.
  bool sense() {
    const Pose pose{agent_.position, agent_.yaw};
    const RangeScan scan = simulate_lidar(pw_.world, pose, cfg_.map, cfg_.lidar);
    const std::size_t changed = integrate_range_scan(map_, pose, scan);
    const auto inspected = integrate_camera_frame(map_, pose, cfg_.map);
    for (std::size_t i : detect_targets(map_, pose, cfg_.map, pw_.world.target_voxels))
      metrics_.targets_found.push_back({i, time_});
    return changed > 0 || !inspected.empty();
  }

  void record(const Vec3& p, double yaw) {
    if (!traj_.empty()) metrics_.path_length += (p - traj_.back().position).norm();
    traj_.push_back({time_, p, yaw});
  }

  std::vector<ViewpointCandidate> gather_viewpoints(const ClearanceField& field,
                                                    const std::vector<std::uint8_t>& reach,
                                                    std::map<std::uint64_t, std::vector<std::size_t>>& cells_of) {
    const ExtractionResult ex = extract_clusters(map_, cfg_.map, cfg_.split_threshold);
    const ObservationIndex index(map_, ex.frontier_cells, ex.uninspected_cells);
    std::map<std::uint64_t, ViewpointCandidate> next_cache;
    std::vector<ViewpointCandidate> out;
    auto usable = [&](const ViewpointCandidate& vp) {
      if (!map_.contains_point(vp.position)) return false;
      const std::size_t lin = map_.linear(map_.world_to_index(vp.position));
      return field.can_stand(lin) && reach[lin] && !fruitless(vp);
    };
    for (const SurfaceCluster& c : ex.clusters) {
      cells_of[c.id] = c.cells;
      std::optional<ViewpointCandidate> vp;
      if (auto it = cache_.find(c.id); it != cache_.end()) {
        ViewpointCandidate cand = it->second;
        if (usable(cand) && score_info(cand, map_, cfg_.map, cfg_.weights, index) > 0.0) {
          cand.s_nor = score_normal(cand, c);
          cand.s_vp = cand.s_nor * cand.s_info;
          vp = cand;
        }
      }
      if (!vp) {
        vp = best_viewpoint(c, map_, field, cfg_.map, cfg_.sampling, cfg_.weights, index,
                            [&](const ViewpointCandidate& cand) { return !usable(cand); });
      }
      if (!vp) continue;
      next_cache[c.id] = *vp;
      out.push_back(*vp);
    }
    cache_.swap(next_cache);
    return out;
  }

  void plan_and_fly(std::size_t cycle) {
    const auto wall0 = std::chrono::steady_clock::now();
    const std::uint64_t evals0 = cost_evaluations();

    const ClearanceField field = compute_clearance(map_, cfg_.map, cfg_.agent_radius);
    const std::size_t agent_cell = map_.linear(map_.world_to_index(agent_.position));
    const std::vector<std::uint8_t> reach = flood_traversable(map_, field, agent_cell);

    std::map<std::uint64_t, std::vector<std::size_t>> cells_of;
    std::vector<ViewpointCandidate> vps = gather_viewpoints(field, reach, cells_of);
    if (vps.empty()) stall(cycle, "no viewpoint left while the search is incomplete");
    metrics_.max_viewpoints = std::max(metrics_.max_viewpoints, vps.size());

    const std::vector<ViewpointCluster> clusters =
        cfg_.toggle_vc ? cluster_viewpoints(vps, map_, field, agent_.position, cfg_.r_vp)
                       : singleton_clusters(vps);
    const std::uint64_t seed = detail::mix_seed(cfg_.seed, cycle);
    const GlobalPlanResult global =
        plan_global(clusters, history_, agent_, map_, field, cfg_.motion, cfg_.toggle_hagp, seed);
    if (prev_route_) metrics_.route_inversion_count +=
        count_route_inversions(*prev_route_, global.route, cfg_.d_anchor);
    prev_route_ = global.route;
    {
      std::ostringstream line;
      write_route_log_line(line, cycle, global);
      route_log_.push_back(line.str());
    }

    const ViewpointCluster& first = clusters[global.order[1] - 1];
    std::optional<Vec3> next_center;
    if (global.order.size() > 2)
      next_center = plan_point(clusters[global.order[2] - 1], map_, field);
    const LocalPlan local =
        plan_local(agent_, first, next_center, cfg_.motion, map_, field, seed ^ 0x10CA1ULL);

    const std::uint64_t evals = cost_evaluations() - evals0;
    metrics_.cost_eval_counts.push_back(evals);
    ++metrics_.replan_count;
    latency_.push_back(
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - wall0).count());

    if (observer_) {
      CycleInfo info;
      info.cycle = cycle;
      info.time = time_;
      info.agent = agent_;
      info.map = &map_;
      info.field = &field;
      info.viewpoints = &vps;
      info.clusters = &clusters;
      info.global = &global;
      info.local = &local;
      info.cost_evaluations = evals;
      observer_(info);
    }

    if (local.legs.empty() || local.order.empty()) stall(cycle, "local plan produced no leg");
    Goal goal;
    goal.surface_id = local.order.front().cluster_id;
    if (auto it = cells_of.find(goal.surface_id); it != cells_of.end()) goal.cells = it->second;

    const bool arrival_learned = fly(local.legs.front(), goal);
    if (!arrival_learned && !goal.cells.empty() &&
        !detail::cluster_resolved(map_, cfg_.map, goal.cells)) {
      // Standing at the viewpoint taught nothing: never pick this pose again.
      fruitless_.push_back({local.order.front().position, local.order.front().yaw});
    }
  }

  // Executes one leg with periodic sensing. Returns false only when the leg
  // reached its end and the sensing there changed nothing.
  bool fly(const LocalLeg& leg, const Goal& goal) {
    const std::vector<Vec3>& pts = leg.points;
    const double L = leg.length;
    const double yaw0 = agent_.yaw;
    const double yaw1 = leg.yaw.value_or(yaw0);
    const double dyaw = wrap_angle(yaw1 - yaw0);
    const Vec3 target = pts.back();
    const VelocitySplit vs = split_velocity(agent_.velocity, agent_.position, target);
    const double v0 = vs.aligned;
    const double natural = time_aligned(v0, L, cfg_.motion);
    const double D = std::max(leg.duration, natural);
    const double t0 = time_;

    std::vector<double> cum{0.0};
    for (std::size_t k = 1; k < pts.size(); ++k) cum.push_back(cum.back() + (pts[k] - pts[k - 1]).norm());

    auto arc_at = [&](double tau) {
      if (D <= 0.0) return L;
      const double s = profile_distance(v0, std::min(tau, D) * natural / D, cfg_.motion);
      return std::min(L, s);
    };
    auto point_at = [&](double s, std::size_t* seg) {
      std::size_t k = 1;
      while (k + 1 < pts.size() && cum[k] < s) ++k;
      if (seg) *seg = k;
      if (pts.size() < 2) return pts.front();
      const double span = cum[k] - cum[k - 1];
      const double u = span > 0.0 ? std::clamp((s - cum[k - 1]) / span, 0.0, 1.0) : 1.0;
      return Vec3(pts[k - 1] + u * (pts[k] - pts[k - 1]));
    };
    auto yaw_at = [&](double tau) {
      return D > 0.0 ? wrap_angle(yaw0 + dyaw * std::min(1.0, tau / D)) : yaw1;
    };

    bool learned = true;
    std::size_t next_vertex = 1;
    double tau = 0.0;
    bool aborted = false;
    while (true) {
      const double tick = next_sense_ - t0;
      const bool arrive = tick >= D;
      tau = arrive ? D : tick;
      const double s = arc_at(tau);
      std::size_t seg = 1;
      const Vec3 p = point_at(s, &seg);
      // Polyline vertices passed on the way.
      while (next_vertex < pts.size() && cum[next_vertex] < s - 1e-12) {
        if (next_vertex + 1 < pts.size() || !arrive) {
          time_ = t0 + time_for_arc(v0, cum[next_vertex], natural, D);
          record(pts[next_vertex], yaw_at(time_ - t0));
        }
        ++next_vertex;
      }
      time_ = t0 + tau;
      agent_.position = p;
      agent_.yaw = yaw_at(tau);
      const double speed = D > 0.0 ? profile_speed(v0, tau * natural / D, cfg_.motion) * natural / D : 0.0;
      const Vec3 dir = pts.size() >= 2 ? Vec3(pts[seg] - pts[seg - 1]) : Vec3::Zero();
      agent_.velocity = dir.norm() > 0.0 && s < L ? Vec3(dir.normalized() * speed) : Vec3::Zero();
      if (arrive) {
        agent_.position = target;
        agent_.yaw = yaw1;
        agent_.velocity = Vec3::Zero();  // stops to observe
      }
      record(agent_.position, agent_.yaw);
      const bool changed = sense();
      if (arrive) learned = changed;
      if (!arrive) next_sense_ += cfg_.sense_interval;
      if (arrive) break;
      if (time_ >= cfg_.budget) {
        aborted = true;
        break;
      }
      if (cfg_.replan_trigger == ReplanTrigger::EveryMapChange && changed) {
        aborted = true;
        break;
      }
      if (!goal.cells.empty() && detail::cluster_resolved(map_, cfg_.map, goal.cells)) {
        aborted = true;
        break;
      }
    }
    if (!aborted && next_sense_ <= time_) next_sense_ = time_ + cfg_.sense_interval;
    return learned;
  }

  bool fruitless(const ViewpointCandidate& vp) const {
    for (const Pose& p : fruitless_)
      if ((p.position - vp.position).norm() < 0.3 && std::abs(wrap_angle(p.yaw - vp.yaw)) < 0.3)
        return true;
    return false;
  }

  double time_for_arc(double v0, double s, double natural, double D) const {
    if (natural <= 0.0) return 0.0;
    return time_aligned(v0, s, cfg_.motion) * D / natural;
  }

  [[noreturn]] void stall(std::size_t cycle, const std::string& why) {
    std::string path;
    if (!cfg_.dump_dir.empty()) {
      std::filesystem::create_directories(cfg_.dump_dir);
      path = (std::filesystem::path(cfg_.dump_dir) / "stall.snapshot").string();
      std::ofstream os(path, std::ios::binary);
      write_snapshot(map_, os);
      std::ofstream txt(std::filesystem::path(cfg_.dump_dir) / "stall.txt");
      txt << "cycle " << cycle << " t=" << time_ << " agent " << agent_.position.transpose() << "\n"
          << why << "\n";
      const int zc = map_.world_to_index(agent_.position).z();
      txt << slice_ascii(map_, cfg_.map, zc);
    }
    std::ostringstream msg;
    msg << "search stalled at cycle " << cycle << " (t=" << time_ << "): " << why;
    throw StallError(msg.str(), path);
  }

  RunResult finish() {
    metrics_.seed = cfg_.seed;
    metrics_.model_time = time_;
    const std::size_t n = pw_.world.targets.size();
    metrics_.completeness = n == 0 ? 1.0 : static_cast<double>(metrics_.targets_found.size()) / n;
    if (!latency_.empty()) {
      double s = 0.0;
      for (double v : latency_) s += v;
      metrics_.mean_latency_ms = s / latency_.size();
      metrics_.max_latency_ms = *std::max_element(latency_.begin(), latency_.end());
    }
    RunResult r;
    r.metrics = metrics_;
    r.trajectory = std::move(traj_);
    r.map = std::move(map_);
    r.route_log = std::move(route_log_);
    r.latency_ms = std::move(latency_);
    return r;
  }

  const PreparedWorld& pw_;
  SimConfig cfg_;
  CycleObserver observer_;
  VoxelGrid map_;
  AgentState agent_;
  double time_ = 0.0;
  double next_sense_ = 0.0;
  HistoryState history_;
  std::optional<GlobalRoute> prev_route_;
  std::map<std::uint64_t, ViewpointCandidate> cache_;
  std::vector<Pose> fruitless_;
  SearchMetrics metrics_;
  std::vector<TrajectorySample> traj_;
  std::vector<std::string> route_log_;
  std::vector<double> latency_;
};

inline RunResult run(const PreparedWorld& pw, const SimConfig& cfg, CycleObserver observer = {}) {
  Simulation sim(pw, cfg, std::move(observer));
  return sim.run();
}

inline RunResult run(const GroundTruthWorld& world, const Pose& start, const SimConfig& cfg,
                     CycleObserver observer = {}) {
  const PreparedWorld pw = prepare_world(world, start, cfg);
  return run(pw, cfg, std::move(observer));
}

struct AblationToggles {
  bool vc = true;
  bool hagp = true;
};

inline SearchMetrics run_ablation(const PreparedWorld& pw, SimConfig cfg, AblationToggles t) {
  cfg.toggle_vc = t.vc;
  cfg.toggle_hagp = t.hagp;
  return run(pw, cfg).metrics;
}

}  // namespace tsearch
