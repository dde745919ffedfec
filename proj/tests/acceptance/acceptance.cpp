// Acceptance checks. Prints one PASS/FAIL line per criterion, exits nonzero
// when any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "tsearch/config.hpp"
#include "tsearch/report.hpp"
#include "tsearch/scenario.hpp"
#include "tsearch/simulator.hpp"

using namespace tsearch;

namespace {

std::string data(const std::string& rel) { return std::string(TSEARCH_DATA_DIR) + "/" + rel; }

using Clock = std::chrono::steady_clock;
double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

int failures = 0;
void report(int id, bool ok, const std::string& what, double secs) {
  std::printf("%s criterion %d: %s (%.1f s)\n", ok ? "PASS" : "FAIL", id, what.c_str(), secs);
  std::fflush(stdout);
  if (!ok) ++failures;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

struct World {
  Scenario scn;
  SimConfig cfg;
  PreparedWorld pw;
};

World load_world(const std::string& name) {
  World w;
  w.scn = load_scenario(data("scenarios/" + name + ".scn"));
  w.cfg = load_config(data("configs/default.cfg"));
  apply_scenario(w.cfg, w.scn);
  w.pw = prepare_world(build_world(w.scn), scenario_start(w.scn), w.cfg);
  return w;
}

// Visibility audit shared by every clustered run.
struct CliqueAudit {
  std::size_t clusterings = 0;
  std::size_t pairs = 0;
  std::size_t violations = 0;
  std::size_t partition_errors = 0;
};

void audit_clusters(const CycleInfo& ci, const VoxelGrid& truth, CliqueAudit& a) {
  ++a.clusterings;
  std::size_t members = 0;
  for (const auto& c : *ci.clusters) {
    members += c.members.size();
    for (std::size_t i = 0; i < c.members.size(); ++i)
      for (std::size_t j = i + 1; j < c.members.size(); ++j) {
        ++a.pairs;
        const Vec3& p = c.members[i].position;
        const Vec3& q = c.members[j].position;
        if (raycast(*ci.map, p, q).hit || raycast(truth, p, q).hit) ++a.violations;
      }
  }
  if (members != ci.viewpoints->size()) ++a.partition_errors;
}

struct Run {
  SearchMetrics m;
  bool stalled = false;
  std::string error;
};

Run run_one(const World& w, std::uint64_t seed, bool vc, bool hagp, CliqueAudit* audit,
            CycleObserver extra = {}) {
  SimConfig cfg = w.cfg;
  cfg.seed = seed;
  cfg.toggle_vc = vc;
  cfg.toggle_hagp = hagp;
  Run r;
  try {
    r.m = run(w.pw, cfg, [&](const CycleInfo& ci) {
            if (audit && vc) audit_clusters(ci, w.pw.world.grid, *audit);
            if (extra) extra(ci);
          }).metrics;
  } catch (const std::exception& e) {
    r.stalled = true;
    r.error = e.what();
  }
  return r;
}

// Time-stepped integration of the accelerate-then-cruise profile.
double integrate_profile(double v0, double l, const MotionModel& m, double dt) {
  if (l <= 0) return 0;
  double v = std::clamp(v0, 0.0, m.v_max), s = 0, t = 0;
  while (true) {
    const double v_next = std::min(m.v_max, v + m.a_max * dt);
    const double ds = 0.5 * (v + v_next) * dt;
    if (s + ds >= l) {
      const double rem = l - s;
      const double tau = v_next > v ? (-v + std::sqrt(v * v + 2 * m.a_max * rem)) / m.a_max : rem / v;
      return t + tau;
    }
    s += ds;
    t += dt;
    v = v_next;
  }
}

void criterion3() {
  const auto t0 = Clock::now();
  const MotionModel m;
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> uv(0.0, m.v_max), ul(0.0, 20.0);
  double worst = 0.0;
  for (int k = 0; k < 1000; ++k) {
    const double v = uv(rng), l = ul(rng);
    worst = std::max(worst, std::abs(time_aligned(v, l, m) - integrate_profile(v, l, m, 1e-5)));
  }
  double jump = 0.0;
  for (int k = 0; k < 200; ++k) {
    const double v = m.v_max * k / 200.0;
    const double lc = (m.v_max * m.v_max - v * v) / (2 * m.a_max);
    jump = std::max(jump, std::abs(time_aligned(v, lc * (1 - 1e-13), m) - time_aligned(v, lc * (1 + 1e-13), m)));
  }
  char buf[160];
  std::snprintf(buf, sizeof(buf), "aligned-time oracle max err %.2e s (tol 1e-6), branch jump %.2e s (tol 1e-9)",
                worst, jump);
  report(3, worst <= 1e-6 && jump <= 1e-9, buf, since(t0));
}

CostMatrix random_matrix(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(1.0, 100.0);
  CostMatrix c(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) c.at(i, j) = u(rng);
  return c;
}

void criterion4() {
  const auto t0 = Clock::now();
  std::mt19937_64 rng(77);
  int equal = 0, lower = 0;
  for (int k = 0; k < 100; ++k) {
    const CostMatrix c = random_matrix(8, rng);
    AtspOptions o;
    o.seed = k;
    const double h = heuristic_atsp(c, TourMode::OpenFromStart, o).cost;
    const double e = brute_force_atsp(c, TourMode::OpenFromStart).cost;
    if (std::abs(h - e) <= 1e-9 * e) ++equal;
    if (h < e - 1e-9 * e) ++lower;
  }
  int fixed_ok = 0;
  for (int k = 0; k < 50; ++k) {
    const std::size_t n = 3 + k % 7;
    const CostMatrix c = random_matrix(n, rng);
    std::vector<std::size_t> mid;
    for (std::size_t i = 1; i + 1 < n; ++i) mid.push_back(i);
    double best = std::numeric_limits<double>::infinity();
    do {
      std::vector<std::size_t> o{0};
      o.insert(o.end(), mid.begin(), mid.end());
      o.push_back(n - 1);
      best = std::min(best, path_cost(c, o));
    } while (std::next_permutation(mid.begin(), mid.end()));
    const Tour t = solve_atsp(c, TourMode::FixedStartEnd);
    const bool ends = t.order.front() == 0 && t.order.back() == n - 1 && t.order.size() == n;
    if (ends && std::abs(t.cost - best) <= 1e-9 * best && std::abs(path_cost(c, t.order) - t.cost) <= 1e-9 * best)
      ++fixed_ok;
  }
  char buf[200];
  std::snprintf(buf, sizeof(buf),
                "heuristic equals exact on %d/100 8-node instances (need 90), lower on %d; "
                "fixed-end exact on %d/50",
                equal, lower, fixed_ok);
  report(4, equal >= 90 && lower == 0 && fixed_ok == 50, buf, since(t0));
}

void criterion8() {
  const auto t0 = Clock::now();
  const World w = load_world("target-room");
  auto once = [&](std::string& metrics, std::string& traj) {
    SimConfig cfg = w.cfg;
    cfg.seed = 11;
    const RunResult r = run(w.pw, cfg);
    std::ostringstream a, b;
    write_metrics_csv({r.metrics}, a);
    write_trajectory_csv(r.trajectory, b);
    metrics = a.str();
    traj = b.str();
  };
  std::string m1, t1, m2, t2;
  once(m1, t1);
  once(m2, t2);
  report(8, m1 == m2 && t1 == t2 && !t1.empty(),
         "metrics.csv and trajectory.csv identical across two runs (" + std::to_string(t1.size()) + " bytes)",
         since(t0));
}

// Least-squares slope of log(y) against log(x).
double fit_exponent(const std::vector<std::pair<double, double>>& xy) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(xy.size());
  for (const auto& [x, y] : xy) {
    const double lx = std::log(x), ly = std::log(y);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace

int main() {
  criterion3();
  criterion4();
  criterion8();

  const World maze = load_world("small-maze");
  const std::size_t kSeeds = 20;
  CliqueAudit audit;
  auto t_audit = Clock::duration::zero();

  // 5: counters on one full run, flat matrix rebuilt at the largest cycle.
  {
    const auto t0 = Clock::now();
    std::size_t best_n = 0;
    std::uint64_t hier = 0;
    AgentState agent;
    VoxelGrid map_at;
    ClearanceField field_at;
    std::vector<ViewpointCandidate> vps_at;
    run_one(maze, 0, true, true, nullptr, [&](const CycleInfo& ci) {
      if (ci.viewpoints->size() <= best_n) return;
      best_n = ci.viewpoints->size();
      hier = ci.cost_evaluations;
      agent = ci.agent;
      map_at = *ci.map;
      field_at = *ci.field;
      vps_at = *ci.viewpoints;
    });
    std::vector<PlanNode> nodes;
    for (const auto& v : vps_at) nodes.push_back({v.position, std::nullopt});
    reset_cost_evaluations();
    build_cost_matrix(agent, nodes, map_at, field_at, maze.cfg.motion, CostMode::Global);
    const std::uint64_t flat = cost_evaluations();

    std::vector<std::pair<double, double>> growth;
    run_one(maze, 0, false, false, nullptr, [&](const CycleInfo& ci) {
      if (ci.viewpoints->size() >= 3)
        growth.push_back({static_cast<double>(ci.viewpoints->size()), static_cast<double>(ci.cost_evaluations)});
    });
    const double k = growth.size() >= 2 ? fit_exponent(growth) : 0.0;
    const double ratio = flat ? static_cast<double>(hier) / flat : 1.0;
    char buf[200];
    std::snprintf(buf, sizeof(buf),
                  "at N=%zu hierarchical %llu vs flat %llu evaluations (ratio %.3f, need <= 0.3); "
                  "flat growth exponent %.2f over %zu cycles (need > 1.5)",
                  best_n, static_cast<unsigned long long>(hier), static_cast<unsigned long long>(flat), ratio, k,
                  growth.size());
    report(5, ratio <= 0.3 && k > 1.5, buf, since(t0));
  }

  // 1, 7 and the maze part of 2 share these runs.
  const auto t_maze = Clock::now();
  std::vector<Run> full, flat, vc_only;
  for (std::size_t s = 0; s < kSeeds; ++s) {
    const auto ta = Clock::now();
    full.push_back(run_one(maze, s, true, true, &audit));
    t_audit += Clock::now() - ta;
    flat.push_back(run_one(maze, s, false, false, nullptr));
    const auto tb = Clock::now();
    vc_only.push_back(run_one(maze, s, true, false, &audit));
    t_audit += Clock::now() - tb;
  }
  {
    std::vector<double> lf, lb;
    bool all_ok = true;
    for (std::size_t s = 0; s < kSeeds; ++s) {
      all_ok = all_ok && !full[s].stalled && !flat[s].stalled && full[s].m.complete && flat[s].m.complete;
      lf.push_back(full[s].m.path_length);
      lb.push_back(flat[s].m.path_length);
    }
    const double mf = median(lf), mb = median(lb);
    char buf[200];
    std::snprintf(buf, sizeof(buf),
                  "small-maze median path %.1f m full vs %.1f m flat (%.1f%% lower, need >= 10%%)", mf, mb,
                  100.0 * (mb - mf) / mb);
    report(1, all_ok && mf <= 0.9 * mb, buf, since(t_maze));
  }
  {
    int lower = 0;
    for (std::size_t s = 0; s < kSeeds; ++s)
      if (full[s].m.route_inversion_count < vc_only[s].m.route_inversion_count) ++lower;
    char buf[160];
    std::snprintf(buf, sizeof(buf), "history planning has strictly fewer route inversions on %d/%zu seeds (need %d)",
                  lower, kSeeds, 14);
    report(7, lower >= 14, buf, since(t_maze));
  }

  // 2: every seeded full run terminates complete.
  {
    const auto t0 = Clock::now();
    std::size_t runs = 0, good = 0;
    std::string first_bad;
    for (std::size_t s = 0; s < kSeeds; ++s) {
      ++runs;
      if (!full[s].stalled && full[s].m.complete && full[s].m.completeness == 1.0) ++good;
      else if (first_bad.empty()) first_bad = "small-maze seed " + std::to_string(s) + " " + full[s].error;
    }
    for (const char* name : {"subt-corridor", "relic-column", "target-room"}) {
      const World w = load_world(name);
      for (std::uint64_t s = 0; s < 5; ++s) {
        ++runs;
        const auto ta = Clock::now();
        const Run r = run_one(w, s, true, true, &audit);
        t_audit += Clock::now() - ta;
        if (!r.stalled && r.m.complete && r.m.completeness == 1.0) ++good;
        else if (first_bad.empty()) first_bad = std::string(name) + " seed " + std::to_string(s) + " " + r.error;
      }
    }
    std::string what = std::to_string(good) + "/" + std::to_string(runs) +
                       " full runs complete with completeness 1.0 on four scenarios";
    if (!first_bad.empty()) what += "; first failure: " + first_bad;
    report(2, good == runs, what, since(t0));
  }

  // 6: audited inside every clustered run above.
  {
    char buf[200];
    std::snprintf(buf, sizeof(buf),
                  "%zu clusterings, %zu same-cluster pairs raycast, %zu blocked pairs, %zu partition errors",
                  audit.clusterings, audit.pairs, audit.violations, audit.partition_errors);
    report(6, audit.clusterings > 0 && audit.violations == 0 && audit.partition_errors == 0, buf,
           std::chrono::duration<double>(t_audit).count());
  }

  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
