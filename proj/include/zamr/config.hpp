#pragma once

// Run configuration: line-based `key = value` text grouped in [sections].

#include <array>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "zamr/criteria.hpp"
#include "zamr/forest.hpp"
#include "zamr/solver.hpp"

namespace zamr {

struct CutLine {
  std::array<double, 3> from{};
  std::array<double, 3> to{};
};

struct OutputConfig {
  std::filesystem::path dir = "out";
  int every = 0;  // steps between snapshots; 0 writes the initial and final states only
  bool vtk = true;
  std::optional<CutLine> cut;
};

struct RunConfig {
  std::string case_name = "smooth_advection";
  std::map<std::string, std::string> case_params;

  Connectivity domain;
  int lattice_level = -1;  // b; defaults to max_level
  int min_level = 3;
  int max_level = 6;

  bool adapt = true;
  Criterion criterion;
  int adapt_every = 2;

  SweepConfig scheme;
  Fluids fluids{{1e5, 1.0, 10.0}, {1e5, 1000.0, 10.0}, 1.05};

  double t_end = 1.0;
  long max_steps = 0;  // 0: unlimited
  int ranks = 1;
  OutputConfig output;

  int lattice() const { return lattice_level >= 0 ? lattice_level : max_level; }
  /// Throws ConfigError on inconsistent settings.
  void validate() const;

  double param(const std::string& key, double fallback) const;
  std::vector<double> param_vector(const std::string& key, std::vector<double> fallback) const;
};

RunConfig parse_config(std::istream& is);
RunConfig load_config(const std::filesystem::path& path);
void write_config(std::ostream& os, const RunConfig& cfg);

}  // namespace zamr
