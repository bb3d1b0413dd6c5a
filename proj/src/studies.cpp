#include <algorithm>
#include <chrono>
#include <cmath>
#include <map>
#include <ostream>

#include "zamr/errors.hpp"
#include "zamr/harness.hpp"

namespace zamr {

namespace {

double elapsed(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// Largest component difference, scaled per component by the field's magnitude.
double field_difference(const FieldArray& a, const FieldArray& b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  StateD scale = StateD::Zero();
  for (const StateD& w : a) scale = scale.cwiseMax(w.cwiseAbs());
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (int k = 0; k < kNumComponents; ++k) {
      const double diff = std::abs(a[i][k] - b[i][k]);
      if (diff > 0.0) d = std::max(d, scale[k] > 0.0 ? diff / scale[k] : diff);
    }
  }
  return d;
}

}  // namespace

std::vector<ConvergenceRow> converge(const RunConfig& base, int level_lo, int level_hi, std::span<const int> orders,
                                     std::ostream* log) {
  if (level_lo > level_hi) throw ConfigError("empty level range");
  if (!exact_alpha(base)) throw ConfigError("case '" + base.case_name + "' has no exact solution");
  std::vector<ConvergenceRow> rows;
  for (int order : orders) {
    for (int level = level_lo; level <= level_hi; ++level) {
      RunConfig cfg = base;
      cfg.adapt = false;
      cfg.min_level = cfg.max_level = level;
      cfg.lattice_level = std::max(level, base.lattice_level);
      cfg.scheme.order = order;
      cfg.scheme.splitting = order == 1 ? Splitting::Lie : Splitting::Strang;
      const auto start = std::chrono::steady_clock::now();
      const RunSummary s = run(cfg, false);
      ConvergenceRow row{order, level, std::ldexp(cfg.domain.tree_extent, -level), *s.alpha_error, s.steps,
                         elapsed(start)};
      if (log) {
        *log << "order " << order << "  level " << level << "  L1 " << row.error.l1 << "  L2 " << row.error.l2 << "  ("
             << row.steps << " steps, " << row.seconds << " s)\n";
      }
      rows.push_back(row);
    }
  }
  return rows;
}

std::vector<ConvergenceRates> convergence_rates(std::span<const ConvergenceRow> rows) {
  std::map<int, std::array<std::vector<double>, 3>> by_order;
  for (const ConvergenceRow& r : rows) {
    auto& v = by_order[r.order];
    v[0].push_back(r.dx);
    v[1].push_back(r.error.l1);
    v[2].push_back(r.error.l2);
  }
  std::vector<ConvergenceRates> out;
  for (const auto& [order, v] : by_order) {
    out.push_back({order, convergence_rate(v[1], v[0]), convergence_rate(v[2], v[0])});
  }
  return out;
}

std::vector<CompareAmrRow> compare_amr(const RunConfig& base, double xi, int c_lo, int c_hi, std::ostream* log) {
  if (c_lo < 0 || c_lo > c_hi) throw ConfigError("compression range must satisfy 0 <= lo <= hi");
  if (c_hi > base.max_level) throw ConfigError("compression level exceeds max_level");
  if (!exact_alpha(base)) throw ConfigError("case '" + base.case_name + "' has no exact solution");
  std::vector<CompareAmrRow> rows;
  for (int c = c_lo; c <= c_hi; ++c) {
    RunConfig cfg = base;
    cfg.adapt = c > 0;
    cfg.min_level = base.max_level - c;
    cfg.criterion.xi = xi;
    const auto start = std::chrono::steady_clock::now();
    const RunSummary s = run(cfg, false);
    const double uniform = cfg.domain.num_trees() * std::ldexp(1.0, cfg.domain.dim * cfg.max_level);
    CompareAmrRow row{c, xi, *s.alpha_error, s.mean_leaves, s.final_leaves, s.mean_leaves / uniform, elapsed(start)};
    if (log) {
      *log << "compression " << c << "  xi " << xi << "  L1 " << row.error.l1 << "  mean leaves " << row.mean_leaves
           << " (" << row.mean_compression << ")  " << row.seconds << " s\n";
    }
    rows.push_back(row);
  }
  return rows;
}

std::vector<PartitionBenchRow> bench_partition(const RunConfig& base, std::span<const int> ranks,
                                               std::vector<std::vector<RankMetrics>>* per_rank, std::ostream* log) {
  if (ranks.empty()) throw ConfigError("no rank counts given");
  std::vector<PartitionBenchRow> rows;
  FieldArray reference;
  for (int p : ranks) {
    RunConfig cfg = base;
    cfg.ranks = p;
    const auto start = std::chrono::steady_clock::now();
    Simulation sim(cfg);
    while (!sim.done()) sim.advance();
    const double seconds = elapsed(start);

    const std::vector<RankMetrics> m = balance_metrics(sim.forest(), sim.adjacency(), sim.partition());
    PartitionBenchRow row;
    row.ranks = p;
    row.leaves = sim.forest().size();
    row.seconds = seconds;
    row.min_load = m.front().leaves;
    std::size_t frontier = 0;
    for (const RankMetrics& r : m) {
      row.max_load = std::max(row.max_load, r.leaves);
      row.min_load = std::min(row.min_load, r.leaves);
      row.max_components = std::max(row.max_components, static_cast<std::size_t>(r.components));
      frontier += r.frontier;
    }
    row.frontier_ratio = static_cast<double>(frontier) / static_cast<double>(row.leaves);
    if (reference.empty()) reference = sim.field();
    row.max_field_difference = field_difference(reference, sim.field());
    if (log) {
      *log << "ranks " << p << "  load " << row.min_load << ".." << row.max_load << "  frontier ratio "
           << row.frontier_ratio << "  components <= " << row.max_components << "  field diff "
           << row.max_field_difference << "  " << seconds << " s\n";
    }
    if (per_rank) per_rank->push_back(m);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace zamr
