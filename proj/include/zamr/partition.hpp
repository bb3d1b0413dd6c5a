#pragma once

// Equal division of the z-ordered leaf array among simulated ranks.

#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "zamr/forest.hpp"

namespace zamr {

struct PartitionMap {
  int ranks = 1;
  std::vector<std::size_t> offsets;  // ranks + 1 entries, offsets[0] = 0, offsets[ranks] = N

  std::size_t begin(int r) const { return offsets[r]; }
  std::size_t end(int r) const { return offsets[r + 1]; }
  std::size_t count(int r) const { return end(r) - begin(r); }
  int owner(std::size_t leaf) const;
};

/// Sizes are floor(N/P) or ceil(N/P), the larger ones first. Throws ConfigError if P < 1 or P > N.
PartitionMap partition(std::size_t num_leaves, int ranks);
PartitionMap partition(const Forest& f, int ranks);

struct GhostLayer {
  int rank = 0;
  std::vector<std::size_t> ghosts;  // sorted, unique
};

GhostLayer ghost_layer(const Forest& f, const LeafAdjacency& adj, const PartitionMap& pm, int rank);
GhostLayer ghost_layer(const Forest& f, const PartitionMap& pm, int rank);

struct RankMetrics {
  int rank = 0;
  std::size_t leaves = 0;
  std::size_t frontier = 0;  // owned leaves with a face neighbor owned elsewhere
  double ratio = 0.0;        // frontier / leaves
  int components = 0;        // face-connected pieces of the owned region
};

std::vector<RankMetrics> balance_metrics(const Forest& f, const LeafAdjacency& adj, const PartitionMap& pm);
std::vector<RankMetrics> balance_metrics(const Forest& f, const PartitionMap& pm);

/// Header `rank,leaves,frontier,ratio,components` then one row per rank.
void write_metrics_csv(std::ostream& os, std::span<const RankMetrics> metrics);

}  // namespace zamr
