#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <istream>
#include <limits>
#include <numeric>
#include <optional>
#include <ostream>
#include <queue>
#include <random>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "tsearch/clearance.hpp"
#include "tsearch/motion_model.hpp"
#include "tsearch/voxel_map.hpp"

namespace tsearch {

class Unreachable : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// Cost-evaluation counter. One tick per pairwise cost entry evaluated.

namespace detail {
inline std::atomic<std::uint64_t>& eval_counter() {
  static std::atomic<std::uint64_t> c{0};
  return c;
}
}  // namespace detail

inline std::uint64_t cost_evaluations() { return detail::eval_counter().load(); }
inline void reset_cost_evaluations() { detail::eval_counter().store(0); }
inline void count_cost_evaluations(std::uint64_t n) { detail::eval_counter().fetch_add(n); }

// ---------------------------------------------------------------------------
// Grid path search.

struct GridPath {
  std::vector<Vec3> points;
  double length = 0.0;
};

namespace detail {

struct Step {
  Index3 offset;
  double cost;
};

inline std::vector<Step> grid_steps(const VoxelGrid& grid) {
  std::vector<Step> steps;
  const bool flat = grid.dims().z() == 1;
  for (int dz = flat ? 0 : -1; dz <= (flat ? 0 : 1); ++dz)
    for (int dy = -1; dy <= 1; ++dy)
      for (int dx = -1; dx <= 1; ++dx) {
        if (!dx && !dy && !dz) continue;
        steps.push_back({Index3(dx, dy, dz),
                         grid.resolution() * std::sqrt(double(dx * dx + dy * dy + dz * dz))});
      }
  return steps;
}

inline double polyline_length(const std::vector<Vec3>& pts) {
  double len = 0.0;
  for (std::size_t i = 1; i < pts.size(); ++i) len += (pts[i] - pts[i - 1]).norm();
  return len;
}

using HeapItem = std::pair<double, std::size_t>;
using MinHeap = std::priority_queue<HeapItem, std::vector<HeapItem>, std::greater<>>;

}  // namespace detail

/// Shortest 26-connected path between the cells of `from` and `to` through
/// traversable cells (Unknown never is), Euclidean heuristic. The polyline is
/// from, centre of every cell on the way, to; the start cell may itself be
/// non-traversable. Throws Unreachable when no path exists.
inline GridPath astar(const VoxelGrid& grid, const ClearanceField& field, const Vec3& from,
                      const Vec3& to) {
  if (from == to) return {{from}, 0.0};
  const std::size_t s = grid.linear(grid.world_to_index(from));
  const std::size_t g = grid.linear(grid.world_to_index(to));
  if (s == g) return {{from, to}, (to - from).norm()};
  if (!field.can_stand(g)) throw Unreachable("goal cell is not traversable");

  const Vec3 goal_c = grid.center(g);
  const auto steps = detail::grid_steps(grid);
  std::vector<double> cost(grid.size(), std::numeric_limits<double>::infinity());
  std::vector<std::int64_t> parent(grid.size(), -1);
  detail::MinHeap open;
  cost[s] = 0.0;
  open.push({(grid.center(s) - goal_c).norm(), s});
  while (!open.empty()) {
    const auto [f, cur] = open.top();
    open.pop();
    if (cur == g) break;
    const double gc = cost[cur];
    if (f > gc + (grid.center(cur) - goal_c).norm() + 1e-12) continue;
    const Index3 ci = grid.unlinear(cur);
    for (const auto& st : steps) {
      const Index3 ni = ci + st.offset;
      if (!grid.contains(ni)) continue;
      const std::size_t nl = grid.linear(ni);
      if (!field.can_stand(nl)) continue;
      const double nc = gc + st.cost;
      if (nc < cost[nl]) {
        cost[nl] = nc;
        parent[nl] = static_cast<std::int64_t>(cur);
        open.push({nc + (grid.center(nl) - goal_c).norm(), nl});
      }
    }
  }
  if (!std::isfinite(cost[g])) throw Unreachable("no collision-free path between the points");

  std::vector<Vec3> rev{to};
  for (std::int64_t c = static_cast<std::int64_t>(g); c >= 0; c = parent[c])
    rev.push_back(grid.center(static_cast<std::size_t>(c)));
  rev.push_back(from);
  GridPath out;
  out.points.assign(rev.rbegin(), rev.rend());
  out.length = detail::polyline_length(out.points);
  return out;
}

/// Path lengths from `from` to each target, measured the same way as astar;
/// +inf where unreachable. Single Dijkstra sweep, stops once all targets are
/// settled.
inline std::vector<double> path_lengths(const VoxelGrid& grid, const ClearanceField& field,
                                        const Vec3& from, std::span<const Vec3> targets) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> out(targets.size(), inf);
  const std::size_t s = grid.linear(grid.world_to_index(from));
  std::vector<std::size_t> goal_cells(targets.size());
  std::size_t pending = 0;
  std::vector<std::uint8_t> wanted(grid.size(), 0);
  for (std::size_t k = 0; k < targets.size(); ++k) {
    goal_cells[k] = grid.linear(grid.world_to_index(targets[k]));
    if (targets[k] == from) {
      out[k] = 0.0;
    } else if (goal_cells[k] == s) {
      out[k] = (targets[k] - from).norm();
    } else if (field.can_stand(goal_cells[k]) && !wanted[goal_cells[k]]) {
      wanted[goal_cells[k]] = 1;
      ++pending;
    }
  }
  if (pending == 0) return out;

  const auto steps = detail::grid_steps(grid);
  std::vector<double> cost(grid.size(), inf);
  detail::MinHeap open;
  cost[s] = 0.0;
  open.push({0.0, s});
  while (!open.empty() && pending > 0) {
    const auto [c, cur] = open.top();
    open.pop();
    if (c > cost[cur]) continue;
    if (wanted[cur]) {
      wanted[cur] = 0;
      --pending;
    }
    const Index3 ci = grid.unlinear(cur);
    for (const auto& st : steps) {
      const Index3 ni = ci + st.offset;
      if (!grid.contains(ni)) continue;
      const std::size_t nl = grid.linear(ni);
      if (!field.can_stand(nl)) continue;
      const double nc = c + st.cost;
      if (nc < cost[nl]) {
        cost[nl] = nc;
        open.push({nc, nl});
      }
    }
  }
  const Vec3 sc = grid.center(s);
  for (std::size_t k = 0; k < targets.size(); ++k) {
    if (std::isfinite(out[k]) || !std::isfinite(cost[goal_cells[k]])) continue;
    out[k] = (sc - from).norm() + cost[goal_cells[k]] +
             (targets[k] - grid.center(goal_cells[k])).norm();
  }
  return out;
}

// ---------------------------------------------------------------------------
// Cost matrices.

class CostMatrix {
 public:
  CostMatrix() = default;
  explicit CostMatrix(std::size_t n, double fill = 0.0) : n_(n), c_(n * n, fill) {
    for (std::size_t i = 0; i < n; ++i) at(i, i) = 0.0;
  }

  std::size_t size() const { return n_; }
  double& at(std::size_t i, std::size_t j) { return c_[i * n_ + j]; }
  double at(std::size_t i, std::size_t j) const { return c_[i * n_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return at(i, j); }

  double max_finite() const {
    double m = 0.0;
    for (double v : c_)
      if (std::isfinite(v)) m = std::max(m, v);
    return m;
  }

  /// Replaces non-finite entries by 10x the largest finite entry.
  void apply_sentinel() {
    const double m = max_finite();
    const double sentinel = 10.0 * (m > 0.0 ? m : 1.0);
    for (double& v : c_)
      if (!std::isfinite(v)) {
        v = sentinel;
        sentinel_ = sentinel;
      }
  }

  /// Value given to unreachable pairs; +inf when there were none.
  double sentinel() const { return sentinel_; }
  bool is_sentinel(std::size_t i, std::size_t j) const { return at(i, j) >= sentinel_; }

  CostMatrix submatrix(std::span<const std::size_t> idx) const {
    CostMatrix s(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i)
      for (std::size_t j = 0; j < idx.size(); ++j) s.at(i, j) = at(idx[i], idx[j]);
    s.sentinel_ = sentinel_;
    return s;
  }

 private:
  std::size_t n_ = 0;
  std::vector<double> c_;
  double sentinel_ = std::numeric_limits<double>::infinity();
};

enum class CostMode { Global, Local };

/// A planning node after the agent. Nodes without yaw (route endpoints)
/// contribute no turning cost.
struct PlanNode {
  Vec3 position = Vec3::Zero();
  std::optional<double> yaw;
};

/// Node 0 is the agent; node k >= 1 is nodes[k - 1].
///   Global: path length / v_max between every pair.
///   Local:  row 0 from the agent state (aligned manoeuvre, perpendicular
///           velocity, turning); other rows max(length / v_max, turn time).
/// Unreachable pairs get the sentinel. Counts n * (n - 1) evaluations.
inline CostMatrix build_cost_matrix(const AgentState& agent, std::span<const PlanNode> nodes,
                                    const VoxelGrid& grid, const ClearanceField& field,
                                    const MotionModel& motion, CostMode mode) {
  const std::size_t n = nodes.size() + 1;
  CostMatrix m(n);
  if (n == 1) return m;
  std::vector<Vec3> pos{agent.position};
  std::vector<std::optional<double>> yaw{agent.yaw};
  for (const auto& nd : nodes) {
    pos.push_back(nd.position);
    yaw.push_back(nd.yaw);
  }
  for (std::size_t i = 0; i < n; ++i) {
    const std::vector<double> len = path_lengths(grid, field, pos[i], pos);
    count_cost_evaluations(n - 1);
    for (std::size_t j = 0; j < n; ++j) {
      if (i == j) continue;
      if (!std::isfinite(len[j])) {
        m.at(i, j) = std::numeric_limits<double>::infinity();
        continue;
      }
      if (mode == CostMode::Global) {
        m.at(i, j) = len[j] / motion.v_max;
      } else if (i == 0) {
        m.at(i, j) = state_cost(agent, pos[j], yaw[j].value_or(agent.yaw), len[j], motion);
      } else {
        const double yi = yaw[i].value_or(yaw[j].value_or(0.0));
        const double yj = yaw[j].value_or(yi);
        m.at(i, j) = pair_cost(yi, yj, len[j], motion);
      }
    }
  }
  m.apply_sentinel();
  return m;
}

// ---------------------------------------------------------------------------
// ATSP.

enum class TourMode { OpenFromStart, FixedStartEnd };

struct Tour {
  std::vector<std::size_t> order;
  double cost = 0.0;
  TourMode mode = TourMode::OpenFromStart;
};

inline double path_cost(const CostMatrix& m, std::span<const std::size_t> order) {
  double c = 0.0;
  for (std::size_t k = 1; k < order.size(); ++k) c += m(order[k - 1], order[k]);
  return c;
}

struct AtspOptions {
  std::optional<std::size_t> end;  // FixedStartEnd; defaults to n - 1
  std::uint64_t seed = 0;
  std::size_t exact_limit = 13;
  int kicks = -1;  // perturbation rounds; < 0 picks by size
};

inline constexpr std::size_t kMaxExactNodes = 13;

namespace detail {

inline std::size_t resolve_end(const CostMatrix& m, TourMode mode, const AtspOptions& o) {
  if (mode != TourMode::FixedStartEnd) return 0;
  const std::size_t e = o.end.value_or(m.size() - 1);
  if (e == 0 || e >= m.size()) throw std::invalid_argument("invalid tour end node");
  return e;
}

}  // namespace detail

/// Exact optimum by dynamic programming over subsets (start fixed at node 0).
/// Refuses instances above kMaxExactNodes.
inline Tour brute_force_atsp(const CostMatrix& m, TourMode mode, const AtspOptions& opt = {}) {
  const std::size_t n = m.size();
  if (n == 0) throw std::invalid_argument("empty cost matrix");
  if (n > kMaxExactNodes) throw std::length_error("exact ATSP limited to 13 nodes");
  Tour t;
  t.mode = mode;
  if (n == 1) {
    t.order = {0};
    return t;
  }
  const std::size_t end = detail::resolve_end(m, mode, opt);
  if (n == 2) {
    t.order = {0, 1};
    t.cost = m(0, 1);
    return t;
  }
  // Free nodes: everything but 0 (and the fixed end).
  std::vector<std::size_t> free_nodes;
  for (std::size_t v = 1; v < n; ++v)
    if (mode == TourMode::OpenFromStart || v != end) free_nodes.push_back(v);
  const std::size_t k = free_nodes.size();
  const std::size_t full = (std::size_t{1} << k) - 1;
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> dp((full + 1) * k, inf);
  std::vector<std::int32_t> par((full + 1) * k, -1);
  for (std::size_t j = 0; j < k; ++j) dp[(std::size_t{1} << j) * k + j] = m(0, free_nodes[j]);
  for (std::size_t mask = 1; mask <= full; ++mask) {
    for (std::size_t j = 0; j < k; ++j) {
      if (!(mask & (std::size_t{1} << j))) continue;
      const double cur = dp[mask * k + j];
      if (!std::isfinite(cur)) continue;
      for (std::size_t q = 0; q < k; ++q) {
        if (mask & (std::size_t{1} << q)) continue;
        const std::size_t nm = mask | (std::size_t{1} << q);
        const double c = cur + m(free_nodes[j], free_nodes[q]);
        if (c < dp[nm * k + q]) {
          dp[nm * k + q] = c;
          par[nm * k + q] = static_cast<std::int32_t>(j);
        }
      }
    }
  }
  double best = inf;
  std::size_t last = 0;
  for (std::size_t j = 0; j < k; ++j) {
    double c = dp[full * k + j];
    if (mode == TourMode::FixedStartEnd) c += m(free_nodes[j], end);
    if (c < best) {
      best = c;
      last = j;
    }
  }
  std::vector<std::size_t> rev;
  std::size_t mask = full;
  std::int64_t j = static_cast<std::int64_t>(last);
  while (j >= 0) {
    rev.push_back(free_nodes[static_cast<std::size_t>(j)]);
    const std::int32_t p = par[mask * k + static_cast<std::size_t>(j)];
    mask &= ~(std::size_t{1} << j);
    j = p;
  }
  t.order = {0};
  t.order.insert(t.order.end(), rev.rbegin(), rev.rend());
  if (mode == TourMode::FixedStartEnd) t.order.push_back(end);
  t.cost = path_cost(m, t.order);
  return t;
}

namespace detail {

// Local search on a cyclic tour with node 0 pinned at position 0.
class CyclicImprover {
 public:
  explicit CyclicImprover(const CostMatrix& c) : c_(c), n_(c.size()) {}

  double cycle_cost(const std::vector<std::size_t>& t) const {
    double s = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) s += c_(t[i], t[(i + 1) % t.size()]);
    return s;
  }

  void optimize(std::vector<std::size_t>& t) const {
    if (n_ < 4) return;
    bool improved = true;
    while (improved) {
      improved = two_opt(t) || or_opt(t) || segment_swap(t);
    }
  }

 private:
  static constexpr double kEps = 1e-10;

  // Segment reversal t[i..j], 1 <= i < j <= n-1.
  bool two_opt(std::vector<std::size_t>& t) const {
    std::vector<double> fwd(n_, 0.0), rev(n_, 0.0);
    for (std::size_t k = 1; k < n_; ++k) {
      fwd[k] = fwd[k - 1] + c_(t[k - 1], t[k]);
      rev[k] = rev[k - 1] + c_(t[k], t[k - 1]);
    }
    for (std::size_t i = 1; i + 1 < n_; ++i) {
      const std::size_t a = t[i - 1];
      for (std::size_t j = i + 1; j < n_; ++j) {
        const std::size_t b = t[(j + 1) % n_];
        const double before = c_(a, t[i]) + (fwd[j] - fwd[i]) + c_(t[j], b);
        const double after = c_(a, t[j]) + (rev[j] - rev[i]) + c_(t[i], b);
        if (after < before - kEps) {
          std::reverse(t.begin() + static_cast<std::ptrdiff_t>(i),
                       t.begin() + static_cast<std::ptrdiff_t>(j) + 1);
          return true;
        }
      }
    }
    return false;
  }

  // Move a run of 1..3 nodes elsewhere, optionally reversed.
  bool or_opt(std::vector<std::size_t>& t) const {
    for (std::size_t len = 1; len <= 3; ++len) {
      for (std::size_t i = 1; i + len <= n_; ++i) {
        const std::size_t j = i + len - 1;
        const std::size_t prev = t[i - 1];
        const std::size_t next = t[(j + 1) % n_];
        double inner_f = 0.0, inner_r = 0.0;
        for (std::size_t k = i; k < j; ++k) {
          inner_f += c_(t[k], t[k + 1]);
          inner_r += c_(t[k + 1], t[k]);
        }
        const double removed = c_(prev, t[i]) + c_(t[j], next) - c_(prev, next);
        for (std::size_t p = 0; p < n_; ++p) {
          // Insert between t[p] and t[p+1], outside the run.
          if (p + 1 >= i && p <= j) continue;
          const std::size_t u = t[p];
          const std::size_t v = t[(p + 1) % n_];
          const double fwd = c_(u, t[i]) + inner_f + c_(t[j], v) - c_(u, v);
          const double bwd = c_(u, t[j]) + inner_r + c_(t[i], v) - c_(u, v);
          const bool use_rev = bwd < fwd;
          const double gain = removed - inner_f - std::min(fwd, bwd);
          if (gain > kEps) {
            std::vector<std::size_t> seg(t.begin() + static_cast<std::ptrdiff_t>(i),
                                         t.begin() + static_cast<std::ptrdiff_t>(j) + 1);
            if (use_rev) std::reverse(seg.begin(), seg.end());
            std::vector<std::size_t> rest;
            rest.reserve(n_);
            for (std::size_t k = 0; k < n_; ++k) {
              if (k < i || k > j) rest.push_back(t[k]);
              if (k == p) rest.insert(rest.end(), seg.begin(), seg.end());
            }
            t.swap(rest);
            return true;
          }
        }
      }
    }
    return false;
  }

  // Oriented 3-opt: a B C d -> a C B d, no reversal, so asymmetric costs
  // inside both runs are kept.
  bool segment_swap(std::vector<std::size_t>& t) const {
    for (std::size_t i = 1; i + 1 < n_; ++i)
      for (std::size_t j = i + 1; j < n_; ++j)
        for (std::size_t k = j; k < n_; ++k) {
          // B = t[i..j-1], C = t[j..k]
          const std::size_t a = t[i - 1], d = t[(k + 1) % n_];
          const double before = c_(a, t[i]) + c_(t[j - 1], t[j]) + c_(t[k], d);
          const double after = c_(a, t[j]) + c_(t[k], t[i]) + c_(t[j - 1], d);
          if (after < before - kEps) {
            std::rotate(t.begin() + static_cast<std::ptrdiff_t>(i), t.begin() + static_cast<std::ptrdiff_t>(j),
                        t.begin() + static_cast<std::ptrdiff_t>(k) + 1);
            return true;
          }
        }
    return false;
  }

  const CostMatrix& c_;
  std::size_t n_;
};

}  // namespace detail

/// Nearest-neighbour construction, then 2-opt / Or-opt / segment swaps to a local optimum,
/// iterated with seeded double-bridge kicks. Open and fixed-end tours are
/// solved as cycles: return edges into node 0 cost nothing (open), or the
/// end node's only cheap exit is back to 0 (fixed).
inline Tour heuristic_atsp(const CostMatrix& m, TourMode mode, const AtspOptions& opt = {}) {
  const std::size_t n = m.size();
  if (n == 0) throw std::invalid_argument("empty cost matrix");
  Tour out;
  out.mode = mode;
  if (n == 1) {
    out.order = {0};
    return out;
  }
  const std::size_t end = detail::resolve_end(m, mode, opt);
  if (n == 2) {
    out.order = {0, 1};
    out.cost = m(0, 1);
    return out;
  }

  CostMatrix c = m;
  double total = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) total += m(i, j);
  const double forbidden = total + 1.0;
  if (mode == TourMode::OpenFromStart) {
    for (std::size_t i = 1; i < n; ++i) c.at(i, 0) = 0.0;
  } else {
    for (std::size_t j = 1; j < n; ++j)
      if (j != end) c.at(end, j) = forbidden;
    c.at(end, 0) = 0.0;
  }

  std::vector<std::size_t> tour{0};
  std::vector<bool> used(n, false);
  used[0] = true;
  for (std::size_t step = 1; step < n; ++step) {
    const std::size_t cur = tour.back();
    std::size_t best = n;
    for (std::size_t j = 0; j < n; ++j)
      if (!used[j] && (best == n || c(cur, j) < c(cur, best))) best = j;
    used[best] = true;
    tour.push_back(best);
  }

  const detail::CyclicImprover improver(c);
  improver.optimize(tour);
  std::vector<std::size_t> best_tour = tour;
  double best_cost = improver.cycle_cost(tour);

  const int kicks = opt.kicks >= 0 ? opt.kicks : (n <= 20 ? 150 : n <= 60 ? 40 : 15);
  std::mt19937_64 rng(opt.seed ^ 0x9E3779B97F4A7C15ULL);
  if (n >= 5) {
    for (int k = 0; k < kicks; ++k) {
      std::vector<std::size_t> cand = best_tour;
      if (k % 10 == 9) {
        // Occasional restart from a shuffled tour.
        std::shuffle(cand.begin() + 1, cand.end(), rng);
        improver.optimize(cand);
        const double rc = improver.cycle_cost(cand);
        if (rc < best_cost - 1e-10) {
          best_cost = rc;
          best_tour = std::move(cand);
        }
        continue;
      }
      // Three distinct cut points in [1, n-1].
      std::size_t p[3];
      do {
        for (auto& x : p) x = 1 + static_cast<std::size_t>(rng() % (n - 1));
        std::sort(std::begin(p), std::end(p));
      } while (p[0] == p[1] || p[1] == p[2]);
      std::vector<std::size_t> kicked(cand.begin(), cand.begin() + static_cast<std::ptrdiff_t>(p[0]));
      kicked.insert(kicked.end(), cand.begin() + static_cast<std::ptrdiff_t>(p[1]),
                    cand.begin() + static_cast<std::ptrdiff_t>(p[2]));
      kicked.insert(kicked.end(), cand.begin() + static_cast<std::ptrdiff_t>(p[0]),
                    cand.begin() + static_cast<std::ptrdiff_t>(p[1]));
      kicked.insert(kicked.end(), cand.begin() + static_cast<std::ptrdiff_t>(p[2]), cand.end());
      improver.optimize(kicked);
      const double kc = improver.cycle_cost(kicked);
      if (kc < best_cost - 1e-10) {
        best_cost = kc;
        best_tour = std::move(kicked);
      }
    }
  }

  if (mode == TourMode::FixedStartEnd && best_tour.back() != end) {
    std::erase(best_tour, end);
    best_tour.push_back(end);
  }
  out.order = std::move(best_tour);
  out.cost = path_cost(m, out.order);
  return out;
}

/// Exact below the size limit, heuristic above it.
inline Tour solve_atsp(const CostMatrix& m, TourMode mode, const AtspOptions& opt = {}) {
  if (m.size() <= std::min(opt.exact_limit, kMaxExactNodes)) return brute_force_atsp(m, mode, opt);
  return heuristic_atsp(m, mode, opt);
}

// ---------------------------------------------------------------------------
// Plain-text fixtures: "n" then n rows of costs; tours as one index list.

inline void write_cost_matrix(const CostMatrix& m, std::ostream& os) {
  os << m.size() << '\n';
  os.precision(17);
  for (std::size_t i = 0; i < m.size(); ++i) {
    for (std::size_t j = 0; j < m.size(); ++j) os << (j ? " " : "") << m(i, j);
    os << '\n';
  }
}

inline CostMatrix read_cost_matrix(std::istream& is) {
  std::size_t n = 0;
  if (!(is >> n)) throw std::runtime_error("cost matrix: missing size");
  CostMatrix m(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (!(is >> m.at(i, j))) throw std::runtime_error("cost matrix: truncated rows");
  return m;
}

inline void write_tour(const Tour& t, std::ostream& os) {
  for (std::size_t k = 0; k < t.order.size(); ++k) os << (k ? " " : "") << t.order[k];
  os << '\n';
}

inline std::vector<std::size_t> read_tour(std::istream& is) {
  std::string line;
  std::getline(is, line);
  std::istringstream ls(line);
  std::vector<std::size_t> order;
  std::size_t v;
  while (ls >> v) order.push_back(v);
  return order;
}

}  // namespace tsearch
