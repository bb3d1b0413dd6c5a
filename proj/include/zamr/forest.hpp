#pragma once

// Brick macro-mesh plus a linear, z-order sorted array of leaf octants.
//
// Trees are laid out on an axis-aligned grid (tree id = tx + nx*(ty + ny*tz))
// and share one coordinate frame, so crossing a tree face only shifts the
// tree index and wraps the lattice coordinate.

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "zamr/morton.hpp"

namespace zamr {

struct Connectivity {
  int dim = 2;
  std::array<int, 3> tree_dims{1, 1, 1};
  std::array<bool, 3> periodic{false, false, false};
  double tree_extent = 1.0;  // meters

  void validate() const;
  int num_trees() const;
  std::array<int, 3> tree_coords(int tree) const;
  int tree_id(const std::array<int, 3>& tc) const;
  /// Tree across the given face, or nullopt on a non-periodic domain boundary.
  std::optional<int> face_tree(int tree, int axis, int sign) const;
  std::array<double, 3> domain_size() const;
};

enum class Mark : std::uint8_t { Keep, Refine, Coarsen };
using AdaptMarks = std::vector<Mark>;

/// Where a new leaf came from. Refined: copy of old leaf `first`;
/// Coarsened: mean of old leaves [first, first + count).
struct AdaptEntry {
  enum class Origin : std::uint8_t { Kept, Refined, Coarsened };
  Origin origin = Origin::Kept;
  std::uint32_t first = 0;
  std::uint32_t count = 1;

  friend bool operator==(const AdaptEntry&, const AdaptEntry&) = default;
};
using AdaptMap = std::vector<AdaptEntry>;

class Forest {
 public:
  /// Every tree refined uniformly to `level`. Requires min_level <= level <= max_level.
  static Forest uniform(const Connectivity& conn, int level, int max_level, int min_level = 0);

  /// Adopts a leaf array; throws ContractError unless it is sorted, valid and tiles every tree.
  static Forest from_leaves(const Connectivity& conn, int max_level, int min_level, std::vector<Octant> leaves);

  const Connectivity& connectivity() const { return conn_; }
  const Lattice& lattice() const { return lat_; }
  int dim() const { return lat_.dim; }
  int max_level() const { return lat_.max_level; }
  int min_level() const { return min_level_; }

  std::size_t size() const { return leaves_.size(); }
  std::span<const Octant> leaves() const { return leaves_; }
  const Octant& leaf(std::size_t i) const { return leaves_[i]; }

  /// Index of the leaf whose region contains the lattice point, if the point is covered.
  std::optional<std::size_t> find_containing(int tree, const Coords& point) const;
  /// Index of a leaf identical to o.
  std::optional<std::size_t> find_exact(const Octant& o) const;

  friend bool operator==(const Forest& a, const Forest& b) { return a.leaves_ == b.leaves_; }

 private:
  Forest(const Connectivity& conn, int max_level, int min_level, std::vector<Octant> leaves);
  std::size_t upper_index(int tree, std::uint64_t key) const;

  Connectivity conn_;
  Lattice lat_;
  int min_level_ = 0;
  std::vector<Octant> leaves_;
  std::vector<std::uint64_t> keys_;
};

struct Adapted {
  Forest forest;
  AdaptMap map;
};

/// Replaces Refine-marked leaves below max_level by their children, in place.
Adapted refine(const Forest& f, const AdaptMarks& marks);
/// Merges complete sibling groups that are all marked Coarsen and whose parent is >= min_level.
Adapted coarsen(const Forest& f, const AdaptMarks& marks);
/// Minimal refinement making face-adjacent leaves differ by at most one level.
Adapted balance(const Forest& f);
bool is_balanced(const Forest& f);

/// Transports marks through a refine map; children of refined leaves get Keep.
AdaptMarks carry_marks(const AdaptMap& map, const AdaptMarks& marks);
/// Composes old->mid with mid->new when the second map never coarsens.
AdaptMap compose(const AdaptMap& first, const AdaptMap& second);

struct NeighborFace {
  std::size_t leaf = 0;
  double area = 0.0;      // |Gamma_ij|, m^(d-1)
  double distance = 0.0;  // center-to-center distance along the axis, m
};

struct NeighborSet {
  enum class Kind : std::uint8_t { Boundary, SameOrCoarser, Finer };
  Kind kind = Kind::Boundary;
  int face = 0;
  int count = 0;
  std::array<NeighborFace, 4> faces{};

  std::span<const NeighborFace> span() const { return {faces.data(), static_cast<std::size_t>(count)}; }
};

/// Face neighbors of leaf i across (axis, sign). Throws ContractError on 2:1 violations.
NeighborSet leaf_neighbors(const Forest& f, std::size_t i, int axis, int sign);

struct CellGeometry {
  std::array<double, 3> center{};
  double dx = 0.0;
  double volume = 0.0;
};

CellGeometry cell_geometry(const Forest& f, std::size_t i);

/// All face neighbors of every leaf in compressed row form (boundaries omitted).
struct LeafAdjacency {
  std::vector<std::size_t> offsets;
  std::vector<std::size_t> neighbors;

  std::span<const std::size_t> of(std::size_t i) const {
    return {neighbors.data() + offsets[i], offsets[i + 1] - offsets[i]};
  }
};

LeafAdjacency build_adjacency(const Forest& f);

/// One line per leaf: `tree level x y [z] key`.
void dump_leaves(const Forest& f, std::ostream& os);

}  // namespace zamr
