// Command-line front end: run a case, convergence and AMR studies, partition benchmark.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "zamr/errors.hpp"
#include "zamr/harness.hpp"

namespace {

using namespace zamr;

std::pair<int, int> parse_range(const std::string& text) {
  const auto dots = text.find("..");
  try {
    if (dots == std::string::npos) {
      const int v = std::stoi(text);
      return {v, v};
    }
    return {std::stoi(text.substr(0, dots)), std::stoi(text.substr(dots + 2))};
  } catch (const std::exception&) {
    throw ConfigError("expected a range like 4..7, got '" + text + "'");
  }
}

std::ofstream open_csv(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  os.precision(17);
  return os;
}

struct Common {
  std::string config;
  std::optional<std::string> out;
  std::optional<int> ranks;
  std::optional<double> t_end;

  RunConfig load() const {
    RunConfig cfg = load_config(config);
    if (out) cfg.output.dir = *out;
    if (ranks) cfg.ranks = *ranks;
    if (t_end) cfg.t_end = *t_end;
    cfg.validate();
    return cfg;
  }
};

void add_common(CLI::App* sub, Common& c, bool with_ranks) {
  sub->add_option("config", c.config, "Run configuration file")->required()->check(CLI::ExistingFile);
  sub->add_option("--out", c.out, "Output directory (overrides output.dir)");
  sub->add_option("--t-end", c.t_end, "Final time (overrides time.t_end)");
  if (with_ranks) sub->add_option("--ranks", c.ranks, "Simulated rank count (overrides parallel.ranks)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Adaptive two-phase finite-volume solver on a linear forest of quadtrees and octrees"};
  app.require_subcommand(1);

  Common run_opts;
  auto* run_cmd = app.add_subcommand("run", "Run a case and write snapshots, history, profile and partition data");
  add_common(run_cmd, run_opts, true);

  Common conv_opts;
  std::string levels = "4..7";
  std::vector<int> orders{1, 2};
  auto* conv_cmd = app.add_subcommand("converge", "Uniform-mesh convergence study of an advection case");
  add_common(conv_cmd, conv_opts, true);
  conv_cmd->add_option("--levels", levels, "Level range L0..L1")->capture_default_str();
  conv_cmd->add_option("--orders", orders, "Scheme orders")->delimiter(',')->capture_default_str();

  Common amr_opts;
  double xi = 5e-5;
  std::string compression = "0..4";
  auto* amr_cmd = app.add_subcommand("compare-amr", "AMR error and mesh size against the uniform finest mesh");
  add_common(amr_cmd, amr_opts, true);
  amr_cmd->add_option("--xi", xi, "Refinement threshold")->capture_default_str();
  amr_cmd->add_option("--compression", compression, "Range of max_level - min_level")->capture_default_str();

  Common bench_opts;
  std::vector<int> rank_list{1, 2, 4, 8};
  auto* bench_cmd = app.add_subcommand("bench-partition", "Partition quality and timing for several rank counts");
  add_common(bench_cmd, bench_opts, false);
  bench_cmd->add_option("--ranks", rank_list, "Rank counts")->delimiter(',')->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*run_cmd) {
      const RunConfig cfg = run_opts.load();
      const RunSummary s = run(cfg, true, &std::cout);
      std::cout << "wrote " << cfg.output.dir.string() << " (loop " << s.loop_seconds << " s, mean leaves "
                << s.mean_leaves << ")\n";
    } else if (*conv_cmd) {
      const RunConfig cfg = conv_opts.load();
      const auto [lo, hi] = parse_range(levels);
      const auto rows = converge(cfg, lo, hi, orders, &std::cout);
      std::ofstream os = open_csv(cfg.output.dir / "convergence.csv");
      os << "order,level,dx,l1,l2,linf,steps,seconds\n";
      for (const auto& r : rows) {
        os << r.order << ',' << r.level << ',' << r.dx << ',' << r.error.l1 << ',' << r.error.l2 << ',' << r.error.linf
           << ',' << r.steps << ',' << r.seconds << '\n';
      }
      if (rows.size() > 1) {
        for (const auto& r : convergence_rates(rows)) {
          std::cout << "order " << r.order << ": L1 rate " << r.l1 << ", L2 rate " << r.l2 << '\n';
        }
      }
    } else if (*amr_cmd) {
      const RunConfig cfg = amr_opts.load();
      const auto [lo, hi] = parse_range(compression);
      const auto rows = compare_amr(cfg, xi, lo, hi, &std::cout);
      std::ofstream os = open_csv(cfg.output.dir / "compare_amr.csv");
      os << "compression,xi,l1,l2,mean_leaves,final_leaves,mean_compression_rate,seconds\n";
      for (const auto& r : rows) {
        os << r.compression << ',' << r.xi << ',' << r.error.l1 << ',' << r.error.l2 << ',' << r.mean_leaves << ','
           << r.final_leaves << ',' << r.mean_compression << ',' << r.seconds << '\n';
      }
    } else if (*bench_cmd) {
      const RunConfig cfg = bench_opts.load();
      std::vector<std::vector<RankMetrics>> metrics;
      const auto rows = bench_partition(cfg, rank_list, &metrics, &std::cout);
      std::ofstream os = open_csv(cfg.output.dir / "bench_partition.csv");
      os << "ranks,leaves,max_load,min_load,frontier_ratio,max_components,seconds,max_field_difference\n";
      for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        os << r.ranks << ',' << r.leaves << ',' << r.max_load << ',' << r.min_load << ',' << r.frontier_ratio << ','
           << r.max_components << ',' << r.seconds << ',' << r.max_field_difference << '\n';
        std::ofstream m = open_csv(cfg.output.dir / ("partition_P" + std::to_string(r.ranks) + ".csv"));
        write_metrics_csv(m, metrics[i]);
      }
      for (std::size_t i = 1; i < rows.size(); ++i) {
        if (rows[i].frontier_ratio < rows[i - 1].frontier_ratio) {
          std::cout << "note: frontier ratio decreased from P=" << rows[i - 1].ranks << " to P=" << rows[i].ranks
                    << '\n';
        }
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "zamr: error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
