#include "zamr/partition.hpp"

#include <algorithm>
#include <iomanip>
#include <numeric>
#include <ostream>
#include <string>

#include "zamr/errors.hpp"

namespace zamr {

int PartitionMap::owner(std::size_t leaf) const {
  const auto it = std::upper_bound(offsets.begin(), offsets.end(), leaf);
  return static_cast<int>(it - offsets.begin()) - 1;
}

PartitionMap partition(std::size_t num_leaves, int ranks) {
  if (ranks < 1) throw ConfigError("rank count must be >= 1");
  if (static_cast<std::size_t>(ranks) > num_leaves) {
    throw ConfigError("rank count " + std::to_string(ranks) + " exceeds leaf count " + std::to_string(num_leaves));
  }
  PartitionMap pm;
  pm.ranks = ranks;
  pm.offsets.resize(ranks + 1);
  const std::size_t base = num_leaves / ranks;
  const std::size_t extra = num_leaves % ranks;
  pm.offsets[0] = 0;
  for (int r = 0; r < ranks; ++r) {
    pm.offsets[r + 1] = pm.offsets[r] + base + (static_cast<std::size_t>(r) < extra ? 1 : 0);
  }
  return pm;
}

PartitionMap partition(const Forest& f, int ranks) { return partition(f.size(), ranks); }

GhostLayer ghost_layer(const Forest& f, const LeafAdjacency& adj, const PartitionMap& pm, int rank) {
  (void)f;
  GhostLayer g;
  g.rank = rank;
  const std::size_t lo = pm.begin(rank);
  const std::size_t hi = pm.end(rank);
  for (std::size_t i = lo; i < hi; ++i) {
    for (std::size_t j : adj.of(i)) {
      if (j < lo || j >= hi) g.ghosts.push_back(j);
    }
  }
  std::sort(g.ghosts.begin(), g.ghosts.end());
  g.ghosts.erase(std::unique(g.ghosts.begin(), g.ghosts.end()), g.ghosts.end());
  return g;
}

GhostLayer ghost_layer(const Forest& f, const PartitionMap& pm, int rank) {
  return ghost_layer(f, build_adjacency(f), pm, rank);
}

std::vector<RankMetrics> balance_metrics(const Forest& f, const LeafAdjacency& adj, const PartitionMap& pm) {
  (void)f;
  std::vector<RankMetrics> out;
  out.reserve(pm.ranks);
  for (int r = 0; r < pm.ranks; ++r) {
    const std::size_t lo = pm.begin(r);
    const std::size_t hi = pm.end(r);
    RankMetrics m;
    m.rank = r;
    m.leaves = hi - lo;

    // union-find over owned leaves, indices relative to lo
    std::vector<std::size_t> root(m.leaves);
    std::iota(root.begin(), root.end(), std::size_t{0});
    auto find = [&root](std::size_t x) {
      while (root[x] != x) {
        root[x] = root[root[x]];
        x = root[x];
      }
      return x;
    };

    for (std::size_t i = lo; i < hi; ++i) {
      bool frontier = false;
      for (std::size_t j : adj.of(i)) {
        if (j < lo || j >= hi) {
          frontier = true;
        } else {
          const std::size_t a = find(i - lo);
          const std::size_t b = find(j - lo);
          if (a != b) root[std::max(a, b)] = std::min(a, b);
        }
      }
      if (frontier) ++m.frontier;
    }
    for (std::size_t k = 0; k < m.leaves; ++k) {
      if (find(k) == k) ++m.components;
    }
    m.ratio = m.leaves ? static_cast<double>(m.frontier) / static_cast<double>(m.leaves) : 0.0;
    out.push_back(m);
  }
  return out;
}

std::vector<RankMetrics> balance_metrics(const Forest& f, const PartitionMap& pm) {
  return balance_metrics(f, build_adjacency(f), pm);
}

void write_metrics_csv(std::ostream& os, std::span<const RankMetrics> metrics) {
  os << "rank,leaves,frontier,ratio,components\n";
  for (const auto& m : metrics) {
    os << m.rank << ',' << m.leaves << ',' << m.frontier << ',' << std::setprecision(10) << m.ratio << ','
       << m.components << '\n';
  }
}

}  // namespace zamr
