#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <ostream>
#include <string>
#include <vector>

#include "tsearch/scenario.hpp"
#include "tsearch/simulator.hpp"

namespace tsearch {

namespace detail {

inline std::string fixed(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
  return buf;
}

inline double mean_of(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

// Population standard deviation; 0 for a single sample.
inline double std_of(const std::vector<double>& v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size()));
}

}  // namespace detail

inline const std::vector<std::string>& metrics_columns() {
  static const std::vector<std::string> cols = {
      "seed",          "complete",        "path_length",      "model_time",
      "completeness",  "targets_found",   "first_detection",  "replan_count",
      "route_inversions", "cost_evals_total", "cost_evals_max", "max_viewpoints"};
  return cols;
}

/// One row per run, then `mean` and `std` rows over the numeric columns.
/// Wall-clock latency is deliberately absent so the file is reproducible.
inline void write_metrics_csv(const std::vector<SearchMetrics>& runs, std::ostream& os) {
  const auto& cols = metrics_columns();
  for (std::size_t k = 0; k < cols.size(); ++k) os << (k ? "," : "") << cols[k];
  os << '\n';
  std::vector<std::vector<double>> values(cols.size());
  for (const SearchMetrics& m : runs) {
    std::uint64_t total = 0, peak = 0;
    for (auto e : m.cost_eval_counts) {
      total += e;
      peak = std::max(peak, e);
    }
    const double first = m.targets_found.empty() ? -1.0 : m.targets_found.front().time;
    const std::vector<double> row = {static_cast<double>(m.seed),
                                     m.complete ? 1.0 : 0.0,
                                     m.path_length,
                                     m.model_time,
                                     m.completeness,
                                     static_cast<double>(m.targets_found.size()),
                                     first,
                                     static_cast<double>(m.replan_count),
                                     static_cast<double>(m.route_inversion_count),
                                     static_cast<double>(total),
                                     static_cast<double>(peak),
                                     static_cast<double>(m.max_viewpoints)};
    os << m.seed << ',' << (m.complete ? 1 : 0) << ',' << detail::fixed(m.path_length) << ','
       << detail::fixed(m.model_time) << ',' << detail::fixed(m.completeness) << ','
       << m.targets_found.size() << ',' << detail::fixed(first) << ',' << m.replan_count << ','
       << m.route_inversion_count << ',' << total << ',' << peak << ',' << m.max_viewpoints << '\n';
    for (std::size_t k = 0; k < row.size(); ++k) values[k].push_back(row[k]);
  }
  for (const char* label : {"mean", "std"}) {
    os << label;
    for (std::size_t k = 1; k < cols.size(); ++k) {
      const double v = std::string(label) == "mean" ? detail::mean_of(values[k]) : detail::std_of(values[k]);
      os << ',' << detail::fixed(v);
    }
    os << '\n';
  }
}

inline void write_trajectory_csv(const std::vector<TrajectorySample>& traj, std::ostream& os) {
  os << "t,x,y,z,yaw\n";
  for (const auto& s : traj)
    os << detail::fixed(s.t) << ',' << detail::fixed(s.position.x()) << ','
       << detail::fixed(s.position.y()) << ',' << detail::fixed(s.position.z()) << ','
       << detail::fixed(s.yaw) << '\n';
}

inline void write_latency_csv(const std::vector<double>& ms, std::ostream& os) {
  os << "cycle,latency_ms\n";
  for (std::size_t k = 0; k < ms.size(); ++k) os << k << ',' << detail::fixed(ms[k], 3) << '\n';
}

struct AblationCell {
  bool vc = true;
  bool hagp = true;
  std::vector<SearchMetrics> runs;
};

/// One row per toggle cell: mean/std of model time and path length.
inline void write_ablation_csv(const std::vector<AblationCell>& cells, std::ostream& os) {
  os << "vc,hagp,runs,time_mean,time_std,length_mean,length_std,length_median,"
        "completeness_mean,inversions_mean,cost_evals_mean\n";
  for (const AblationCell& c : cells) {
    std::vector<double> t, l, comp, inv, ev;
    for (const auto& m : c.runs) {
      t.push_back(m.model_time);
      l.push_back(m.path_length);
      comp.push_back(m.completeness);
      inv.push_back(static_cast<double>(m.route_inversion_count));
      ev.push_back(static_cast<double>(
          std::accumulate(m.cost_eval_counts.begin(), m.cost_eval_counts.end(), std::uint64_t{0})));
    }
    std::vector<double> sorted = l;
    std::sort(sorted.begin(), sorted.end());
    double median = 0.0;
    if (!sorted.empty())
      median = sorted.size() % 2 ? sorted[sorted.size() / 2]
                                 : 0.5 * (sorted[sorted.size() / 2 - 1] + sorted[sorted.size() / 2]);
    os << (c.vc ? 1 : 0) << ',' << (c.hagp ? 1 : 0) << ',' << c.runs.size() << ','
       << detail::fixed(detail::mean_of(t)) << ',' << detail::fixed(detail::std_of(t)) << ','
       << detail::fixed(detail::mean_of(l)) << ',' << detail::fixed(detail::std_of(l)) << ','
       << detail::fixed(median) << ',' << detail::fixed(detail::mean_of(comp)) << ','
       << detail::fixed(detail::mean_of(inv)) << ',' << detail::fixed(detail::mean_of(ev)) << '\n';
  }
}

/// Top-down plot: occupied columns grey, trajectory coloured from blue
/// (start) to red (end), targets as circles (green when found).
inline void write_trajectory_svg(const GroundTruthWorld& world, const RunResult& run,
                                 std::ostream& os, double px_per_m = 40.0) {
  const VoxelGrid& g = world.grid;
  const Vec3 lo = g.min_corner();
  const Vec3 hi = g.max_corner();
  const double w = (hi.x() - lo.x()) * px_per_m;
  const double h = (hi.y() - lo.y()) * px_per_m;
  auto X = [&](double x) { return detail::fixed((x - lo.x()) * px_per_m, 2); };
  auto Y = [&](double y) { return detail::fixed((hi.y() - y) * px_per_m, 2); };
  const double cell = g.resolution() * px_per_m;

  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << detail::fixed(w, 0) << "\" height=\""
     << detail::fixed(h, 0) << "\" viewBox=\"0 0 " << detail::fixed(w, 2) << ' ' << detail::fixed(h, 2)
     << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  std::vector<std::uint8_t> column(static_cast<std::size_t>(g.dims().x()) * g.dims().y(), 0);
  for (std::size_t lin : g.occupied()) {
    const Index3 i = g.unlinear(lin);
    column[static_cast<std::size_t>(i.y()) * g.dims().x() + i.x()] = 1;
  }
  os << "<g fill=\"#9a9a9a\">\n";
  for (int y = 0; y < g.dims().y(); ++y)
    for (int x = 0; x < g.dims().x(); ++x) {
      if (!column[static_cast<std::size_t>(y) * g.dims().x() + x]) continue;
      const double wx = lo.x() + x * g.resolution();
      const double wy = lo.y() + (y + 1) * g.resolution();
      os << "<rect x=\"" << X(wx) << "\" y=\"" << Y(wy) << "\" width=\"" << detail::fixed(cell, 2)
         << "\" height=\"" << detail::fixed(cell, 2) << "\"/>\n";
    }
  os << "</g>\n";

  const auto& tr = run.trajectory;
  const double t_end = tr.empty() ? 1.0 : std::max(1e-9, tr.back().t);
  for (std::size_t k = 1; k < tr.size(); ++k) {
    const double u = tr[k].t / t_end;
    const int r = static_cast<int>(std::lround(255 * u));
    const int b = 255 - r;
    char color[16];
    std::snprintf(color, sizeof(color), "#%02x30%02x", r, b);
    os << "<line x1=\"" << X(tr[k - 1].position.x()) << "\" y1=\"" << Y(tr[k - 1].position.y())
       << "\" x2=\"" << X(tr[k].position.x()) << "\" y2=\"" << Y(tr[k].position.y())
       << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
  }
  std::vector<bool> found(world.targets.size(), false);
  for (const auto& d : run.metrics.targets_found) found[d.index] = true;
  for (std::size_t i = 0; i < world.targets.size(); ++i)
    os << "<circle cx=\"" << X(world.targets[i].x()) << "\" cy=\"" << Y(world.targets[i].y())
       << "\" r=\"5\" fill=\"" << (found[i] ? "#20a040" : "none") << "\" stroke=\"#c01010\" stroke-width=\"2\"/>\n";
  os << "</svg>\n";
}

}  // namespace tsearch
