#pragma once

// Morton (z-order) arithmetic on a 2^b integer lattice.
//
// An octant is anchored at its lower corner on the finest lattice, so a
// level-l octant has coordinates that are multiples of 2^(b-l). Keys interleave
// the coordinate bits x0 y0 [z0] x1 y1 [z1] ... from the least significant end.

#include <array>
#include <compare>
#include <cstdint>
#include <variant>
#include <vector>

namespace zamr {

using Coords = std::array<std::uint32_t, 3>;

/// Largest lattice depth b representable with 64-bit keys.
constexpr int max_supported_level(int dim) { return dim == 2 ? 31 : 21; }

/// Dimension and maximum refinement level b shared by every octant of a forest.
struct Lattice {
  int dim = 2;
  int max_level = 0;

  /// Throws ConfigError unless dim in {2,3} and 0 <= max_level <= max_supported_level(dim).
  void validate() const;
  std::uint32_t root_length() const { return std::uint32_t{1} << max_level; }
  std::uint32_t length(int level) const { return std::uint32_t{1} << (max_level - level); }
  int num_children() const { return 1 << dim; }
};

struct Octant {
  std::int32_t tree = 0;
  std::int32_t level = 0;
  Coords coords{};

  friend bool operator==(const Octant&, const Octant&) = default;
};

/// Key plus level; ancestors compare before their descendants.
struct MortonKey {
  std::uint64_t key = 0;
  std::int32_t level = 0;

  friend auto operator<=>(const MortonKey&, const MortonKey&) = default;
};

/// Exit marker returned when a face neighbor leaves the tree. face = 2*axis + (sign > 0).
struct OutsideTree {
  int face = 0;
  friend bool operator==(const OutsideTree&, const OutsideTree&) = default;
};

using FaceNeighbor = std::variant<Octant, OutsideTree>;

constexpr int face_index(int axis, int sign) { return 2 * axis + (sign > 0 ? 1 : 0); }

std::uint64_t encode(const Coords& coords, int dim);
Coords decode(std::uint64_t key, int dim);

MortonKey morton_key(const Lattice& lat, const Octant& o);

/// True if o satisfies the lattice invariants (alignment, level bound, range).
bool is_valid(const Lattice& lat, const Octant& o);

Octant parent(const Lattice& lat, const Octant& o);
Octant child(const Lattice& lat, const Octant& o, int which);
std::vector<Octant> children(const Lattice& lat, const Octant& o);
int child_id(const Lattice& lat, const Octant& o);
Octant sibling(const Lattice& lat, const Octant& o, int which);

FaceNeighbor face_neighbor(const Lattice& lat, const Octant& o, int axis, int sign);

bool is_ancestor(const Lattice& lat, const Octant& a, const Octant& d);

/// Strict (tree, key, level) ordering used for the linear leaf array.
bool zorder_less(const Lattice& lat, const Octant& a, const Octant& b);

}  // namespace zamr
