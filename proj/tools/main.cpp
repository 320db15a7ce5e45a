// Command-line front end: simulate / resume / compare / netgen.
//
// Exit codes: 0 success, 1 usage or config error, 2 runtime error,
// 3 comparison rejected at the requested significance level.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hivnet/config.hpp"
#include "hivnet/engine.hpp"
#include "hivnet/graph_export.hpp"
#include "hivnet/stats.hpp"

namespace fs = std::filesystem;
using namespace hivnet;

namespace {

std::string run_csv_name(std::uint32_t run_index) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "run_%02u.csv", run_index);
  return buf;
}

void write_text_file(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  out << text;
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

// Registers the named output actions and, when a cadence is given, schedules
// them at whole-year times after the current clock. Priorities 4 and 5 place
// them after the statistics operator within a year block. Registration alone
// also rebinds actions a restored snapshot may still have queued.
void arm_output_events(Simulation& sim, const fs::path& out_dir, int snapshot_every,
                       int checkpoint_every, int horizon) {
  sim.register_action("snapshot", [out_dir](Simulation& s) {
    char name[64];
    std::snprintf(name, sizeof(name), "snapshot_run%02u_year%d.graphml", s.run_index(),
                  s.start_year() + static_cast<int>(s.clock()));
    std::ofstream out(out_dir / name, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write snapshot file");
    export_graphml(s.network(), out);
  });
  sim.register_action("checkpoint", [out_dir](Simulation& s) {
    char name[64];
    std::snprintf(name, sizeof(name), "checkpoint_run%02u_year%d.bin", s.run_index(),
                  s.start_year() + static_cast<int>(s.clock()));
    s.save_checkpoint_file((out_dir / name).string());
  });
  if (snapshot_every > 0) {
    for (int t = snapshot_every; t <= horizon; t += snapshot_every) {
      if (t >= sim.clock()) sim.schedule_special(t, 4, "snapshot");
    }
  }
  if (checkpoint_every > 0) {
    for (int t = checkpoint_every; t <= horizon; t += checkpoint_every) {
      if (t >= sim.clock()) sim.schedule_special(t, 5, "checkpoint");
    }
  }
}

int cmd_simulate(const std::string& config_path, std::optional<std::uint64_t> seed,
                 std::optional<int> runs, std::optional<int> start_year,
                 std::optional<int> end_year, const std::string& out_dir, int snapshot_every,
                 int checkpoint_every, std::optional<int> stats_interval, int threads) {
  ModelParams params = config_path.empty() ? ModelParams::defaults() : load_config_file(config_path);
  if (seed) params.run.seed = *seed;
  if (runs) params.run.n_runs = *runs;
  if (start_year) params.run.start_year = *start_year;
  if (end_year) params.run.end_year = *end_year;
  if (stats_interval) params.run.stats_interval = *stats_interval;
  params.validate();

  fs::create_directories(out_dir);
  const int horizon = params.run.end_year - params.run.start_year;
  auto configure = [&](Simulation& sim) {
    arm_output_events(sim, out_dir, snapshot_every, checkpoint_every, horizon);
  };

  const EnsembleResult result =
      run_ensemble(params, params.run.n_runs, params.run.seed, threads, configure);

  for (std::size_t i = 0; i < result.runs.size(); ++i) {
    write_text_file(fs::path(out_dir) / run_csv_name(static_cast<std::uint32_t>(i)),
                    csv_string(result.runs[i]));
  }
  std::ostringstream agg;
  export_ensemble_csv(result.aggregate, agg);
  write_text_file(fs::path(out_dir) / "ensemble.csv", agg.str());

  std::cout << "wrote " << result.runs.size() << " run file(s) and ensemble.csv to " << out_dir
            << "\n";
  return 0;
}

int cmd_resume(const std::string& snapshot_path, std::optional<int> end_year,
               const std::string& out_dir, int snapshot_every, int checkpoint_every) {
  Simulation sim = Simulation::restore_checkpoint_file(snapshot_path);
  const int target = end_year ? *end_year : sim.params().run.end_year;
  fs::create_directories(out_dir);
  arm_output_events(sim, out_dir, snapshot_every, checkpoint_every,
                    target - sim.params().run.start_year);
  sim.run_until(target);
  write_text_file(fs::path(out_dir) / run_csv_name(sim.run_index()), csv_string(sim.stats_log()));
  std::cout << "resumed run " << sim.run_index() << " to " << target << ", wrote "
            << run_csv_name(sim.run_index()) << " to " << out_dir << "\n";
  return 0;
}

int cmd_compare(const std::string& sim_path, const std::string& ref_path, double alpha) {
  std::ifstream sim_in(sim_path);
  if (!sim_in) throw std::runtime_error("cannot open: " + sim_path);
  std::string header;
  std::getline(sim_in, header);
  sim_in.seekg(0);

  std::vector<std::pair<int, double>> sim_series;
  if (header.rfind("year,population_mean", 0) == 0) {
    for (const auto& row : parse_ensemble_csv(sim_in)) {
      sim_series.emplace_back(row.calendar_year, row.incidence.mean);
    }
  } else {
    for (const auto& row : parse_stats_csv(sim_in)) {
      sim_series.emplace_back(row.calendar_year, row.incidence);
    }
  }

  std::ifstream ref_in(ref_path);
  if (!ref_in) throw std::runtime_error("cannot open: " + ref_path);
  const ReferenceSeries reference = load_reference_csv(ref_in);

  const ChiSquareResult r = chi_square_compare(sim_series, reference, alpha);
  for (const int year : r.skipped_years) {
    std::cerr << "warning: year " << year << " skipped (zero reference value)\n";
  }
  std::printf("chi_square=%.6f df=%d critical=%.6f alpha=%.3f -> %s\n", r.statistic,
              r.degrees_of_freedom, r.critical_value, r.alpha,
              r.accepted ? "accepted" : "rejected");
  return r.accepted ? 0 : 3;
}

int cmd_netgen(const std::string& config_path, const std::string& out_path,
               std::optional<std::uint64_t> seed) {
  ModelParams params = config_path.empty() ? ModelParams::defaults() : load_config_file(config_path);
  if (seed) params.run.seed = *seed;
  params.validate();
  RandomStream stream(params.run.seed, 0);
  RandomStream build = stream.substream(1);
  const ContactNetwork net = build_network(params.network, params.cascade, params.run.start_year,
                                           params.run.initial_positive, build);
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + out_path);
  export_graphml(net, out);
  const NetworkMetrics m = network_metrics(net);
  std::printf("vertices=%zu edges=%zu mean_degree=%.4f steady_fraction=%.4f components=%d\n",
              net.agents.size(), net.edges.size(), m.mean_degree, m.steady_fraction,
              m.component_count);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stochastic simulator of HIV spread on an evolving MSM contact network"};
  app.require_subcommand(1);

  std::string config_path, out_dir = "out", snapshot_path, sim_csv, ref_csv, graphml_out;
  std::optional<std::uint64_t> seed;
  std::optional<int> runs, start_year, end_year, stats_interval;
  int snapshot_every = 0, checkpoint_every = 0, threads = 0;
  double alpha = 0.05;

  auto* simulate = app.add_subcommand("simulate", "Run an ensemble and write CSV time series");
  simulate->add_option("--config", config_path, "JSON config file (defaults when omitted)");
  simulate->add_option("--seed", seed, "Master seed");
  simulate->add_option("--runs", runs, "Number of ensemble runs (default 24)");
  simulate->add_option("--start-year", start_year, "First calendar year (default 1984)");
  simulate->add_option("--end-year", end_year, "Last calendar year (default 2006)");
  simulate->add_option("--out", out_dir, "Output directory (default ./out)");
  simulate->add_option("--snapshot-every", snapshot_every,
                       "GraphML snapshot every K years (0 = off)");
  simulate->add_option("--checkpoint-every", checkpoint_every,
                       "Checkpoint every K years (0 = off)");
  simulate->add_option("--stats-interval", stats_interval, "Statistics interval in years");
  simulate->add_option("--threads", threads, "Worker threads (0 = hardware)");

  auto* resume = app.add_subcommand("resume", "Resume a checkpointed run");
  resume->add_option("--from", snapshot_path, "Snapshot file")->required();
  resume->add_option("--end-year", end_year, "Override end year");
  resume->add_option("--out", out_dir, "Output directory (default ./out)");
  resume->add_option("--snapshot-every", snapshot_every, "GraphML snapshot every K years");
  resume->add_option("--checkpoint-every", checkpoint_every, "Checkpoint every K years");

  auto* compare = app.add_subcommand("compare", "Chi-square test of a simulated series");
  compare->add_option("--sim", sim_csv, "Simulated CSV (run or ensemble)")->required();
  compare->add_option("--ref", ref_csv, "Reference CSV (year,value)")->required();
  compare->add_option("--alpha", alpha, "Significance level (default 0.05)");

  auto* netgen = app.add_subcommand("netgen", "Build one network and export GraphML");
  netgen->add_option("--config", config_path, "JSON config file");
  netgen->add_option("--out", graphml_out, "Output GraphML path")->required();
  netgen->add_option("--seed", seed, "Master seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (*simulate) {
      return cmd_simulate(config_path, seed, runs, start_year, end_year, out_dir, snapshot_every,
                          checkpoint_every, stats_interval, threads);
    }
    if (*resume) {
      return cmd_resume(snapshot_path, end_year, out_dir, snapshot_every, checkpoint_every);
    }
    if (*compare) {
      return cmd_compare(sim_csv, ref_csv, alpha);
    }
    if (*netgen) {
      return cmd_netgen(config_path, graphml_out, seed);
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
