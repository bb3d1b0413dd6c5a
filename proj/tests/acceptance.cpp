// Acceptance checks. Prints one PASS/FAIL line per criterion; exit status is
// nonzero when any selected criterion fails.
//
//   acceptance                 all criteria
//   acceptance -c 3 -c 7       selected criteria

#include <CLI11.hpp>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <limits>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "checks.hpp"
#include "zamr/errors.hpp"
#include "zamr/harness.hpp"

namespace {

using namespace zamr;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

RunConfig config(const std::string& name) { return load_config(std::string(ZAMR_CONFIG_DIR) + "/" + name + ".cfg"); }

const std::vector<ConvergenceRow>& convergence_rows() {
  static const std::vector<ConvergenceRow> rows = [] {
    const std::vector<int> orders{1, 2};
    return converge(config("smooth_advection"), 4, 7, orders);
  }();
  return rows;
}

Outcome convergence() {
  const auto rates = convergence_rates(convergence_rows());
  const ConvergenceRates& o1 = rates.at(0);
  const ConvergenceRates& o2 = rates.at(1);
  const bool ok = o1.l1 >= 0.7 && o2.l1 >= 1.4 && std::abs(o1.l2 - o1.l1) <= 0.25 && std::abs(o2.l2 - o2.l1) <= 0.25;
  return {ok, fmt("L1 rates %.3f (order 1, need 0.7) and %.3f (order 2, need 1.4); L2 rates %.3f, %.3f", o1.l1,
                  o2.l1, o1.l2, o2.l2)};
}

Outcome exact_transport() {
  double e1 = 0, e2 = 0;
  for (const ConvergenceRow& r : convergence_rows()) {
    if (r.level != 7) continue;
    (r.order == 1 ? e1 : e2) = r.error.l1;
  }
  return {e2 < e1, fmt("L1 at dx = 2^-7: order 2 %.4g, order 1 %.4g", e2, e1)};
}

Outcome amr_fidelity() {
  const RunConfig base = config("disk_advection");
  const auto fine = compare_amr(base, 5e-5, 0, 4);
  const auto coarse = compare_amr(base, 5e-4, 4, 4);
  const double uniform_error = fine.front().error.l1;
  bool accurate = true, compressed = true;
  std::ostringstream os;
  os << fmt("uniform L1 %.6g;", uniform_error);
  for (std::size_t i = 1; i < fine.size(); ++i) {
    const CompareAmrRow& r = fine[i];
    accurate = accurate && r.error.l1 <= 2 * uniform_error;
    compressed = compressed && r.mean_compression < 0.7;
    os << fmt(" c%d: L1 %.6g, cells %.3f;", r.compression, r.error.l1, r.mean_compression);
  }
  const bool threshold = coarse.front().error.l1 > fine.back().error.l1;
  os << fmt(" xi 5e-4 at c4: L1 %.6g.", coarse.front().error.l1);
  os << " error within 2x: " << (accurate ? "yes" : "no") << ", cells below 70%: " << (compressed ? "yes" : "no")
     << ", larger xi loses accuracy: " << (threshold ? "yes" : "no");
  return {accurate && compressed && threshold, os.str()};
}

Outcome conservation() {
  RunConfig cfg = config("disk_advection");
  cfg.adapt_every = 2;
  cfg.max_steps = 200;
  Simulation sim(cfg);
  const Totals t0 = totals(sim.forest(), sim.field());
  double worst_mass = 0, worst_partial = 0;
  std::size_t changes = 0, last = sim.forest().size();
  while (!sim.done()) {
    sim.advance();
    const Totals t = totals(sim.forest(), sim.field());
    worst_mass = std::max(worst_mass, std::abs(t.mass - t0.mass) / t0.mass);
    worst_partial = std::max(worst_partial, std::abs(t.partial_mass - t0.partial_mass) / t0.partial_mass);
    changes += sim.forest().size() != last;
    last = sim.forest().size();
  }
  const bool ok = sim.steps() == 200 && worst_mass <= 1e-11 && worst_partial <= 1e-11 && changes > 0;
  return {ok, fmt("%ld steps, %zu mesh changes; drift mass %.2e, rho Y %.2e", sim.steps(), changes, worst_mass,
                  worst_partial)};
}

Outcome tree_invariants() {
  std::size_t patterns[2] = {0, 0}, biggest = 0;
  for (int dim : {2, 3}) {
    oracle::FuzzStats stats;
    for (std::uint64_t seed = 1; stats.patterns < 1000; ++seed) {
      const std::string err = oracle::fuzz_adapt(seed * 7919 + dim, dim, 3, &stats);
      if (!err.empty()) return {false, err};
    }
    patterns[dim - 2] = stats.patterns;
    biggest = std::max(biggest, stats.max_leaves);
  }
  return {true, fmt("%zu patterns in 2D and %zu in 3D agree with the pointer tree (up to %zu leaves)", patterns[0],
                    patterns[1], biggest)};
}

Outcome morton_oracle() {
  int cases = 0;
  for (int b = 0; b <= 4; ++b, ++cases) {
    if (auto e = oracle::check_morton(2, b); !e.empty()) return {false, fmt("2D b = %d: %s", b, e.c_str())};
  }
  for (int b = 0; b <= 3; ++b, ++cases) {
    if (auto e = oracle::check_morton(3, b); !e.empty()) return {false, fmt("3D b = %d: %s", b, e.c_str())};
  }
  return {true, "exhaustive agreement for b <= 4 in 2D and b <= 3 in 3D"};
}

// Random balanced forest on a brick, refined a few times at random.
Forest random_forest(const oracle::Brick& brick, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  Forest f = Forest::uniform(oracle::to_connectivity(brick), 1, brick.b);
  for (int round = 0; round < brick.b - 1; ++round) {
    AdaptMarks m(f.size(), Mark::Keep);
    for (Mark& k : m) k = std::uniform_real_distribution<double>(0, 1)(rng) < 0.3 ? Mark::Refine : Mark::Keep;
    f = balance(refine(f, m).forest).forest;
  }
  return f;
}

double max_relative_difference(const FieldArray& a, const FieldArray& b) {
  double scale[kNumComponents] = {};
  for (const StateD& w : a) {
    for (int k = 0; k < kNumComponents; ++k) scale[k] = std::max(scale[k], std::abs(w[k]));
  }
  double d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (int k = 0; k < kNumComponents; ++k) {
      if (scale[k] > 0) d = std::max(d, std::abs(a[i][k] - b[i][k]) / scale[k]);
    }
  }
  return d;
}

Outcome partition_quality() {
  std::vector<oracle::Brick> bricks(4);
  bricks[0] = {2, {1, 1, 1}, {false, false, false}, 6};
  bricks[1] = {2, {3, 2, 1}, {true, false, false}, 4};
  bricks[2] = {3, {1, 1, 1}, {true, true, true}, 3};
  bricks[3] = {3, {2, 1, 1}, {false, false, false}, 3};
  int forests = 0;
  for (std::size_t k = 0; k < bricks.size(); ++k) {
    for (std::uint64_t seed = 1; seed <= 3; ++seed, ++forests) {
      const Forest f = random_forest(bricks[k], 100 * k + seed);
      for (int p = 1; p <= 16; ++p) {
        if (auto e = oracle::check_partition(f, bricks[k], p); !e.empty()) return {false, e};
      }
    }
  }

  RunConfig cfg = config("disk_advection");
  cfg.max_level = 6;
  cfg.max_steps = 40;
  FieldArray reference;
  std::vector<Octant> ref_leaves;
  double worst = 0;
  for (int p : {1, 2, 3, 4, 7, 16}) {
    cfg.ranks = p;
    Simulation sim(cfg);
    while (!sim.done()) sim.advance();
    if (p == 1) {
      reference = sim.field();
      ref_leaves.assign(sim.forest().leaves().begin(), sim.forest().leaves().end());
      continue;
    }
    const auto leaves = sim.forest().leaves();
    if (!std::equal(leaves.begin(), leaves.end(), ref_leaves.begin(), ref_leaves.end())) {
      return {false, fmt("the adapted mesh differs between P = 1 and P = %d", p)};
    }
    worst = std::max(worst, max_relative_difference(reference, sim.field()));
  }
  return {worst <= 1e-13, fmt("%d forests x P = 1..16 checked; physics difference across P %.2e", forests, worst)};
}

Outcome contact_free_stream() {
  const Fluids fp = config("disk_advection").fluids;
  double worst_uniform = 0;
  for (const oracle::Brick& brick : {oracle::Brick{2, {2, 1, 1}, {true, true, false}, 5},
                                     oracle::Brick{3, {1, 1, 1}, {true, true, true}, 3}}) {
    const Forest f = random_forest(brick, 17);
    const MeshTopology topo(f, partition(f, 2));
    const StateD w0 = state_from_alpha_pressure(0.3, 1e5, Velocity<double>(3.0, -2.0, 1.0), fp);
    FieldArray u(f.size(), w0);
    SweepConfig sc;
    sc.order = 2;
    sc.splitting = Splitting::Strang;
    for (int n = 0; n < 100; ++n) u = step(topo, u, sc, fp).u;
    // zero components are measured against rho times 1 m/s
    for (const StateD& w : u) {
      for (int k = 0; k < kNumComponents; ++k) {
        const double scale = w0[k] != 0.0 ? std::abs(w0[k]) : w0[kRho];
        worst_uniform = std::max(worst_uniform, std::abs(w[k] - w0[k]) / scale);
      }
    }
  }

  RunConfig cfg = config("disk_advection");
  cfg.max_level = 6;
  cfg.max_steps = 100;
  Simulation sim(cfg);
  const double p0 = cfg.param("pressure", 1e5);
  const auto u0 = cfg.param_vector("velocity", {1, 1});
  double dp = 0, du = 0;
  while (!sim.done()) {
    sim.advance();
    for (const StateD& w : sim.field()) {
      dp = std::max(dp, std::abs(thermo(w, cfg.fluids).pressure - p0) / p0);
      const Velocity<double> v = velocity(w);
      du = std::max({du, std::abs(v[0] - u0[0]), std::abs(v[1] - u0[1])});
    }
  }
  const bool ok = worst_uniform <= 1e-14 && dp <= 1e-9 && du <= 1e-9;
  return {ok, fmt("uniform state: %.2e after 100 steps; disk contact over %ld adaptive steps: p %.2e, u %.2e",
                  worst_uniform, sim.steps(), dp, du)};
}

struct TubeRun {
  std::vector<double> rho;
  double worst_entropy_rise = -std::numeric_limits<double>::infinity();
  double entropy_drop = 0;
  long steps = 0;
};

TubeRun shock_tube(int cells) {
  RunConfig cfg = config("shock_tube");
  cfg.domain.tree_dims = {cells, 1, 1};
  cfg.domain.tree_extent = 1.0 / cells;
  cfg.scheme.order = 1;
  cfg.scheme.splitting = Splitting::Lie;
  Simulation sim(cfg);
  TubeRun out;
  // mean density; the domain is one cell tall
  const double ref = totals(sim.forest(), sim.field()).mass * cells;
  double s = total_entropy(sim.forest(), sim.field(), cfg.fluids, ref);
  const double s0 = s;
  while (!sim.done()) {
    sim.advance();
    const double next = total_entropy(sim.forest(), sim.field(), cfg.fluids, ref);
    out.worst_entropy_rise = std::max(out.worst_entropy_rise, next - s);
    s = next;
  }
  out.steps = sim.steps();
  out.entropy_drop = s0 - s;
  for (const StateD& w : sim.field()) out.rho.push_back(w[kRho]);
  return out;
}

Outcome shock_tube_convergence() {
  const int base = 64;
  const TubeRun ref = shock_tube(16 * 4 * base);
  std::vector<double> dist;
  double rise = ref.worst_entropy_rise;
  double drop = ref.entropy_drop;
  for (int n : {base, 2 * base, 4 * base}) {
    const TubeRun r = shock_tube(n);
    rise = std::max(rise, r.worst_entropy_rise);
    drop = std::min(drop, r.entropy_drop);
    const std::size_t block = ref.rho.size() / r.rho.size();
    double l1 = 0;
    for (std::size_t i = 0; i < r.rho.size(); ++i) {
      double mean = 0;
      for (std::size_t j = 0; j < block; ++j) mean += ref.rho[i * block + j];
      l1 += std::abs(r.rho[i] - mean / block) / static_cast<double>(r.rho.size());
    }
    dist.push_back(l1);
  }
  const bool ok = dist[1] < dist[0] && dist[2] < dist[1] && rise <= 1e-10;
  return {ok, fmt("L1(rho) to the %zu-cell reference: %.4g, %.4g, %.4g; largest entropy change per step %.2e "
                  "(total dissipation at least %.3g)",
                  ref.rho.size(), dist[0], dist[1], dist[2], rise, drop)};
}

Outcome profiling_and_frontier() {
  RunConfig cfg = config("disk_advection");
  cfg.t_end = 0.25;
  const RunSummary s = run(cfg, false);
  const double coverage = s.profile.total() / s.loop_seconds;

  RunConfig bench = config("disk_advection");
  bench.max_steps = 20;
  const std::vector<int> ranks{1, 2, 4, 8, 16};
  const auto rows = bench_partition(bench, ranks);
  std::ostringstream os;
  bool monotone = true;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    os << fmt(" P%d %.4f", rows[i].ranks, rows[i].frontier_ratio);
    if (i > 0 && rows[i].frontier_ratio < rows[i - 1].frontier_ratio) monotone = false;
  }
  return {coverage >= 0.9 && monotone,
          fmt("profile covers %.1f%% of the loop; frontier ratio", 100 * coverage) + os.str() +
              (monotone ? " (non-decreasing)" : " (NOT monotone)")};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  std::vector<int> selected;
  app.add_option("-c,--criterion", selected, "Criterion number (1-10), repeatable")->check(CLI::Range(1, 10));
  CLI11_PARSE(app, argc, argv);
  if (selected.empty()) {
    for (int i = 1; i <= 10; ++i) selected.push_back(i);
  }

  const std::map<int, std::function<Outcome()>> criteria{
      {1, convergence},           {2, exact_transport},     {3, amr_fidelity},
      {4, conservation},          {5, tree_invariants},     {6, morton_oracle},
      {7, partition_quality},     {8, contact_free_stream}, {9, shock_tube_convergence},
      {10, profiling_and_frontier}};

  int failures = 0;
  for (int c : selected) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria.at(c)();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::cout << "criterion " << c << ": " << (o.pass ? "PASS" : "FAIL") << "  " << o.detail << fmt("  [%.1f s]", secs)
              << std::endl;
    failures += !o.pass;
  }
  return failures == 0 ? 0 : 1;
}
