#pragma once

// Test cases, the adaptive time loop, error norms, output writers and parameter studies.

#include <array>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "zamr/config.hpp"
#include "zamr/criteria.hpp"
#include "zamr/forest.hpp"
#include "zamr/partition.hpp"
#include "zamr/profile.hpp"
#include "zamr/solver.hpp"

namespace zamr {

using Point = std::array<double, 3>;

/// Initial state at a point, for a configured case.
using InitialState = std::function<StateD(const Point&)>;

/// Throws ConfigError for unknown case names.
InitialState initial_condition(const RunConfig& cfg);

/// Exact volume fraction alpha(x, t) for the advection cases.
using ExactAlpha = std::function<double(const Point&, double)>;
std::optional<ExactAlpha> exact_alpha(const RunConfig& cfg);

/// Mixture at pressure p with mass fraction y: phase densities from p, 1/rho = y/rho1 + (1-y)/rho2.
StateD state_from_y_pressure(double y, double p, const Velocity<double>& u, const Fluids& fp);

FieldArray sample(const Forest& f, const InitialState& ic);

struct CaseSetup {
  Forest forest;
  FieldArray field;
};

/// Samples the initial condition and adapts the mesh to it until it stops changing.
CaseSetup init_case(const RunConfig& cfg);

/// One adapt cycle: mark, refine, coarsen, balance, then project the field.
struct AdaptResult {
  Forest forest;
  FieldArray field;
  bool changed = false;
};
AdaptResult adapt_once(const Forest& f, const LeafAdjacency& adj, const FieldArray& u, const RunConfig& cfg,
                       const PartitionMap* pm = nullptr, ProfileReport* prof = nullptr);

double compression_rate(const Forest& f, int max_level);

struct Totals {
  double mass = 0.0;
  double partial_mass = 0.0;  // integral of rho Y
  std::array<double, 3> momentum{};
};
Totals totals(const Forest& f, const FieldArray& u);

/// Sum over cells of |K| (rho F(rho, Y) + rho |u|^2 / 2), with F measured from rho_ref.
double total_entropy(const Forest& f, const FieldArray& u, const Fluids& fp, double rho_ref);

struct ErrorNorms {
  double l1 = 0.0;
  double l2 = 0.0;
  double linf = 0.0;
};

/// Volume-weighted norms of a per-cell error.
ErrorNorms error_norms(const Forest& f, std::span<const double> err);
/// alpha_i minus the exact value at the cell center.
ErrorNorms alpha_error(const Forest& f, const FieldArray& u, const Fluids& fp,
                       const std::function<double(const Point&)>& exact);
double l1_error(const Forest& f, const FieldArray& u, const Fluids& fp, const std::function<double(const Point&)>& exact);
double l2_error(const Forest& f, const FieldArray& u, const Fluids& fp, const std::function<double(const Point&)>& exact);

/// Least-squares slope of log(error) against log(dx). Throws ConfigError with fewer than two points.
double convergence_rate(std::span<const double> errors, std::span<const double> dxs);

/// Per-cell output quantities.
struct CellRecord {
  double rho, y, alpha, p;
  std::array<double, 3> u;
  int level;
  int rank;
};
std::vector<CellRecord> cell_records(const Forest& f, const FieldArray& u, const Fluids& fp, const PartitionMap& pm);

void write_vtk(std::ostream& os, const Forest& f, const FieldArray& u, const Fluids& fp, const PartitionMap& pm);
void write_vtk(const std::filesystem::path& path, const Forest& f, const FieldArray& u, const Fluids& fp,
               const PartitionMap& pm);

/// Contents of a legacy VTK file written by write_vtk.
struct VtkData {
  std::vector<Point> points;
  std::vector<std::vector<std::size_t>> cells;
  std::vector<int> cell_types;
  std::vector<std::pair<std::string, std::vector<double>>> scalars;
  std::vector<std::pair<std::string, std::vector<Point>>> vectors;

  const std::vector<double>* scalar(const std::string& name) const;
};
VtkData read_vtk(std::istream& is);
VtkData read_vtk(const std::filesystem::path& path);

/// Cells crossed by the segment, ordered by the arclength of the entry point.
void write_csv_cut(std::ostream& os, const Forest& f, const FieldArray& u, const Fluids& fp, const CutLine& line);
void write_csv_cut(const std::filesystem::path& path, const Forest& f, const FieldArray& u, const Fluids& fp,
                   const CutLine& line);

struct HistoryRow {
  long step = 0;
  double time = 0.0;
  double dt = 0.0;
  std::size_t leaves = 0;
  double compression = 0.0;
  Totals totals;
};

/// Adaptive time loop state. Mesh work and output run between sweeps, never during them.
class Simulation {
 public:
  explicit Simulation(RunConfig cfg);
  Simulation(RunConfig cfg, CaseSetup setup);
  Simulation(RunConfig cfg, Forest forest, FieldArray field);

  const RunConfig& config() const { return cfg_; }
  const Forest& forest() const { return forest_; }
  const FieldArray& field() const { return field_; }
  const PartitionMap& partition() const { return pm_; }
  const MeshTopology& topology() const { return topo_; }
  const LeafAdjacency& adjacency() const { return adj_; }
  const std::vector<GhostLayer>& ghosts() const { return ghosts_; }
  double time() const { return t_; }
  long steps() const { return steps_; }
  bool done() const;

  /// Advances one step (dt clipped to t_end) and adapts when due. Returns dt.
  double advance();
  void adapt();

  const ProfileReport& profile() const { return prof_; }
  ProfileReport& profile() { return prof_; }
  const SweepStats& stats() const { return stats_; }
  /// Sum over steps of the leaf count, for time-averaged mesh size.
  double leaf_steps() const { return leaf_steps_; }

 private:
  void rebuild();

  RunConfig cfg_;
  Forest forest_;
  FieldArray field_;
  PartitionMap pm_;
  LeafAdjacency adj_;
  std::vector<GhostLayer> ghosts_;
  MeshTopology topo_;
  double t_ = 0.0;
  long steps_ = 0;
  double leaf_steps_ = 0.0;
  ProfileReport prof_;
  SweepStats stats_;
};

struct RunSummary {
  double time = 0.0;
  long steps = 0;
  std::size_t final_leaves = 0;
  double mean_leaves = 0.0;
  double wall_seconds = 0.0;
  double loop_seconds = 0.0;
  ProfileReport profile;
  std::optional<ErrorNorms> alpha_error;
  Totals initial;
  Totals final;
  std::size_t muscl_fallbacks = 0;
};

/// Runs a configured case to t_end. With write_files, VTK snapshots, cuts,
/// history.csv, profile.csv, partition.csv and forest.txt go to cfg.output.dir.
RunSummary run(const RunConfig& cfg, bool write_files = true, std::ostream* log = nullptr);

struct ConvergenceRow {
  int order = 1;
  int level = 0;
  double dx = 0.0;
  ErrorNorms error;
  long steps = 0;
  double seconds = 0.0;
};

struct ConvergenceRates {
  int order = 1;
  double l1 = 0.0;
  double l2 = 0.0;
};

/// Uniform-mesh runs at each level and order. Order 1 uses Lie splitting,
/// order 2 Strang splitting.
std::vector<ConvergenceRow> converge(const RunConfig& base, int level_lo, int level_hi, std::span<const int> orders,
                                     std::ostream* log = nullptr);
std::vector<ConvergenceRates> convergence_rates(std::span<const ConvergenceRow> rows);

struct CompareAmrRow {
  int compression = 0;  // max_level - min_level
  double xi = 0.0;
  ErrorNorms error;
  double mean_leaves = 0.0;
  std::size_t final_leaves = 0;
  double mean_compression = 0.0;
  double seconds = 0.0;
};

/// Same case at fixed finest level with min_level = max_level - c for each compression level c.
std::vector<CompareAmrRow> compare_amr(const RunConfig& base, double xi, int c_lo, int c_hi,
                                       std::ostream* log = nullptr);

struct PartitionBenchRow {
  int ranks = 1;
  std::size_t leaves = 0;
  std::size_t max_load = 0;
  std::size_t min_load = 0;
  double frontier_ratio = 0.0;  // total frontier leaves over total leaves
  std::size_t max_components = 0;
  double seconds = 0.0;
  double max_field_difference = 0.0;  // against the first rank count
};

/// Runs the case once per rank count and reports partition quality on the final mesh.
std::vector<PartitionBenchRow> bench_partition(const RunConfig& base, std::span<const int> ranks,
                                               std::vector<std::vector<RankMetrics>>* per_rank = nullptr,
                                               std::ostream* log = nullptr);

}  // namespace zamr
