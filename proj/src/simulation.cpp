#include <chrono>
#include <cstdio>
#include <fstream>
#include <ostream>

#include "zamr/errors.hpp"
#include "zamr/harness.hpp"

namespace zamr {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string snapshot_name(const RunConfig& cfg, long step, const char* suffix) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "_%06ld", step);
  return cfg.case_name + buf + suffix;
}

void write_history(const std::filesystem::path& path, const std::vector<HistoryRow>& rows) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
  os.precision(17);
  os << "step,time,dt,leaves,compression,mass,rhoY,mom_x,mom_y,mom_z\n";
  for (const HistoryRow& r : rows) {
    os << r.step << ',' << r.time << ',' << r.dt << ',' << r.leaves << ',' << r.compression << ',' << r.totals.mass << ','
       << r.totals.partial_mass << ',' << r.totals.momentum[0] << ',' << r.totals.momentum[1] << ','
       << r.totals.momentum[2] << '\n';
  }
  if (!os) throw std::runtime_error("write failed: " + path.string());
}

}  // namespace

Simulation::Simulation(RunConfig cfg) : Simulation(cfg, init_case(cfg)) {}

Simulation::Simulation(RunConfig cfg, CaseSetup setup)
    : Simulation(std::move(cfg), std::move(setup.forest), std::move(setup.field)) {}

Simulation::Simulation(RunConfig cfg, Forest forest, FieldArray field)
    : cfg_(std::move(cfg)),
      forest_(std::move(forest)),
      field_(std::move(field)),
      pm_(zamr::partition(forest_, cfg_.ranks)),
      adj_(build_adjacency(forest_)),
      topo_(forest_, pm_) {
  cfg_.validate();
  if (field_.size() != forest_.size()) throw ContractError("initial field does not match the forest");
  ghosts_.reserve(static_cast<std::size_t>(pm_.ranks));
  for (int r = 0; r < pm_.ranks; ++r) ghosts_.push_back(ghost_layer(forest_, adj_, pm_, r));
}

bool Simulation::done() const {
  return t_ >= cfg_.t_end || (cfg_.max_steps > 0 && steps_ >= cfg_.max_steps);
}

double Simulation::advance() {
  if (done()) return 0.0;
  try {
    double dt = compute_dt(topo_, field_, cfg_.scheme, cfg_.fluids, &prof_);
    bool last = false;
    if (t_ + dt >= cfg_.t_end) {
      dt = cfg_.t_end - t_;
      last = true;
    }
    field_ = zamr::advance(topo_, field_, dt, cfg_.scheme, cfg_.fluids, &stats_, &prof_);
    t_ = last ? cfg_.t_end : t_ + dt;
    ++steps_;
    leaf_steps_ += static_cast<double>(forest_.size());
    if (cfg_.adapt && steps_ % cfg_.adapt_every == 0 && !done()) adapt();
    return dt;
  } catch (const NumericError& e) {
    throw NumericError(std::string(e.what()) + " (step " + std::to_string(steps_ + 1) + ", t = " +
                       std::to_string(t_) + ")");
  }
}

void Simulation::adapt() {
  AdaptResult r = adapt_once(forest_, adj_, field_, cfg_, &pm_, &prof_);
  if (!r.changed) return;
  forest_ = std::move(r.forest);
  field_ = std::move(r.field);
  rebuild();
}

void Simulation::rebuild() {
  {
    ScopedPhase timer(&prof_, Phase::Partition);
    pm_ = zamr::partition(forest_, cfg_.ranks);
  }
  ScopedPhase timer(&prof_, Phase::Ghost);
  adj_ = build_adjacency(forest_);
  ghosts_.clear();
  for (int r = 0; r < pm_.ranks; ++r) ghosts_.push_back(ghost_layer(forest_, adj_, pm_, r));
  topo_ = MeshTopology(forest_, pm_);
}

RunSummary run(const RunConfig& cfg, bool write_files, std::ostream* log) {
  const auto wall_start = Clock::now();
  Simulation sim(cfg);
  const std::optional<ExactAlpha> exact = exact_alpha(cfg);
  const std::filesystem::path dir = cfg.output.dir;

  auto snapshot = [&] {
    if (!write_files) return;
    if (cfg.output.vtk) {
      write_vtk(dir / snapshot_name(cfg, sim.steps(), ".vtk"), sim.forest(), sim.field(), cfg.fluids, sim.partition());
    }
    if (cfg.output.cut) {
      write_csv_cut(dir / snapshot_name(cfg, sim.steps(), "_cut.csv"), sim.forest(), sim.field(), cfg.fluids,
                    *cfg.output.cut);
    }
  };

  RunSummary s;
  s.initial = totals(sim.forest(), sim.field());
  std::vector<HistoryRow> history;
  history.push_back({0, 0.0, 0.0, sim.forest().size(), compression_rate(sim.forest(), cfg.max_level), s.initial});
  if (write_files) {
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw std::runtime_error("cannot create output directory " + dir.string() + ": " + ec.message());
  }
  snapshot();

  const auto loop_start = Clock::now();
  long last_snapshot = 0;
  while (!sim.done()) {
    const double dt = sim.advance();
    ScopedPhase timer(&sim.profile(), Phase::Io);
    history.push_back({sim.steps(), sim.time(), dt, sim.forest().size(),
                       compression_rate(sim.forest(), cfg.max_level), totals(sim.forest(), sim.field())});
    if (cfg.output.every > 0 && sim.steps() % cfg.output.every == 0) {
      snapshot();
      last_snapshot = sim.steps();
    }
    if (log && cfg.output.every > 0 && sim.steps() % cfg.output.every == 0) {
      *log << "step " << sim.steps() << "  t = " << sim.time() << "  leaves = " << sim.forest().size() << '\n';
    }
  }
  {
    ScopedPhase timer(&sim.profile(), Phase::Io);
    if (last_snapshot != sim.steps()) snapshot();
  }
  s.loop_seconds = seconds_since(loop_start);

  s.time = sim.time();
  s.steps = sim.steps();
  s.final_leaves = sim.forest().size();
  s.mean_leaves = s.steps > 0 ? sim.leaf_steps() / static_cast<double>(s.steps) : static_cast<double>(s.final_leaves);
  s.final = history.back().totals;
  s.muscl_fallbacks = sim.stats().muscl_fallbacks;
  if (exact) {
    const double t = sim.time();
    s.alpha_error = alpha_error(sim.forest(), sim.field(), cfg.fluids, [&](const Point& x) { return (*exact)(x, t); });
  }
  s.profile = sim.profile();

  if (write_files) {
    write_history(dir / "history.csv", history);
    {
      std::ofstream os(dir / "partition.csv");
      write_metrics_csv(os, balance_metrics(sim.forest(), sim.adjacency(), sim.partition()));
      if (!os) throw std::runtime_error("write failed: " + (dir / "partition.csv").string());
    }
    {
      std::ofstream os(dir / "forest.txt");
      dump_leaves(sim.forest(), os);
      if (!os) throw std::runtime_error("write failed: " + (dir / "forest.txt").string());
    }
  }
  s.wall_seconds = seconds_since(wall_start);
  if (write_files) {
    std::ofstream os(dir / "profile.csv");
    s.profile.write_csv(os, s.loop_seconds);
    if (!os) throw std::runtime_error("write failed: " + (dir / "profile.csv").string());
  }
  if (log) {
    *log << cfg.case_name << ": " << s.steps << " steps to t = " << s.time << ", " << s.final_leaves << " leaves, "
         << s.loop_seconds << " s\n";
    if (s.alpha_error) *log << "alpha error  L1 " << s.alpha_error->l1 << "  L2 " << s.alpha_error->l2 << '\n';
  }
  return s;
}

}  // namespace zamr
