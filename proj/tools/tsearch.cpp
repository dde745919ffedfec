// Command-line driver: seeded runs and the VC/HAGP ablation grid.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "tsearch/config.hpp"
#include "tsearch/report.hpp"
#include "tsearch/scenario.hpp"
#include "tsearch/simulator.hpp"

namespace fs = std::filesystem;
using namespace tsearch;

namespace {

struct Common {
  std::string scenario;
  std::string config;
  std::uint64_t seed = 0;
  int runs = 1;
  std::string out = "out";
  std::optional<double> budget;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--scenario", c.scenario, "scenario file")->required();
  sub->add_option("--config", c.config, "key = value config file");
  sub->add_option("--seed", c.seed, "first seed");
  sub->add_option("--runs", c.runs, "number of consecutive seeds");
  sub->add_option("--out", c.out, "output directory");
  sub->add_option("--budget", c.budget, "model-time budget (s)");
}

struct Loaded {
  Scenario scenario;
  SimConfig cfg;
  GroundTruthWorld world;
};

Loaded load(const Common& c) {
  Loaded l;
  l.scenario = load_scenario(c.scenario);
  if (!c.config.empty()) l.cfg = load_config(c.config);
  apply_scenario(l.cfg, l.scenario);
  if (c.budget) l.cfg.budget = *c.budget;
  l.world = build_world(l.scenario, l.cfg.resolution);
  return l;
}

template <typename F>
void write_file(const fs::path& p, F&& f) {
  // Write to a temporary and rename, so a crashed run never leaves half a file.
  const fs::path tmp = p.string() + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + p.string());
    f(os);
  }
  fs::rename(tmp, p);
}

int cmd_run(const Common& c, std::optional<bool> vc, std::optional<bool> hagp) {
  if (c.runs < 1) throw CLI::ValidationError("--runs", "needs at least one run");
  Loaded l = load(c);
  if (vc) l.cfg.toggle_vc = *vc;
  if (hagp) l.cfg.toggle_hagp = *hagp;
  fs::create_directories(c.out);
  const PreparedWorld pw = prepare_world(l.world, scenario_start(l.scenario), l.cfg);

  std::vector<SearchMetrics> rows;
  for (int k = 0; k < c.runs; ++k) {
    SimConfig cfg = l.cfg;
    cfg.seed = c.seed + static_cast<std::uint64_t>(k);
    const fs::path dir = c.runs == 1 ? fs::path(c.out) : fs::path(c.out) / ("seed_" + std::to_string(cfg.seed));
    fs::create_directories(dir);
    cfg.dump_dir = (dir / "stall").string();
    RunResult r;
    try {
      r = run(pw, cfg);
    } catch (const StallError& e) {
      std::cerr << e.what() << "\n";
      if (!e.dump_path().empty()) std::cerr << "diagnostics: " << e.dump_path() << "\n";
      return 3;
    }
    write_file(dir / "trajectory.csv", [&](std::ostream& os) { write_trajectory_csv(r.trajectory, os); });
    write_file(dir / "latency.csv", [&](std::ostream& os) { write_latency_csv(r.latency_ms, os); });
    write_file(dir / "routes.log", [&](std::ostream& os) {
      for (const auto& line : r.route_log) os << line;
    });
    write_file(dir / "map.snapshot", [&](std::ostream& os) { write_snapshot(r.map, os); });
    write_file(dir / "trajectory.svg", [&](std::ostream& os) { write_trajectory_svg(pw.world, r, os); });
    std::cout << "seed " << cfg.seed << ": " << (r.metrics.complete ? "complete" : "incomplete")
              << " length " << r.metrics.path_length << " m, time " << r.metrics.model_time
              << " s, targets " << r.metrics.targets_found.size() << "/" << pw.world.targets.size()
              << "\n";
    rows.push_back(r.metrics);
  }
  write_file(fs::path(c.out) / "metrics.csv", [&](std::ostream& os) { write_metrics_csv(rows, os); });
  return 0;
}

int cmd_ablation(const Common& c) {
  if (c.runs < 1) throw CLI::ValidationError("--runs", "empty seed list");
  Loaded l = load(c);
  fs::create_directories(c.out);
  const PreparedWorld pw = prepare_world(l.world, scenario_start(l.scenario), l.cfg);
  std::vector<AblationCell> cells = {{false, false, {}}, {true, false, {}}, {false, true, {}},
                                     {true, true, {}}};
  for (auto& cell : cells) {
    for (int k = 0; k < c.runs; ++k) {
      SimConfig cfg = l.cfg;
      cfg.seed = c.seed + static_cast<std::uint64_t>(k);
      try {
        cell.runs.push_back(run_ablation(pw, cfg, {cell.vc, cell.hagp}));
      } catch (const StallError& e) {
        std::cerr << "vc=" << cell.vc << " hagp=" << cell.hagp << " seed " << cfg.seed << ": "
                  << e.what() << "\n";
        return 3;
      }
    }
    std::cout << "vc=" << cell.vc << " hagp=" << cell.hagp << ": " << cell.runs.size() << " runs\n";
  }
  write_file(fs::path(c.out) / "ablation.csv", [&](std::ostream& os) { write_ablation_csv(cells, os); });
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Closed-loop target search simulator"};
  app.require_subcommand(1);

  Common run_opts;
  std::optional<bool> vc, hagp;
  CLI::App* run_cmd = app.add_subcommand("run", "seeded runs of the full pipeline");
  add_common(run_cmd, run_opts);
  run_cmd->add_option("--toggle-vc", vc, "viewpoint clustering on/off");
  run_cmd->add_option("--toggle-hagp", hagp, "history-aware global planning on/off");

  Common abl_opts;
  CLI::App* abl_cmd = app.add_subcommand("ablation", "four-cell VC x HAGP grid per seed");
  add_common(abl_cmd, abl_opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*run_cmd) return cmd_run(run_opts, vc, hagp);
    return cmd_ablation(abl_opts);
  } catch (const CLI::ValidationError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return 2;
  } catch (const ScenarioError& e) {
    std::cerr << "scenario error: " << e.what() << "\n";
    return 1;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
