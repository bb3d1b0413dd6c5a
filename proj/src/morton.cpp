#include "zamr/morton.hpp"

#include <stdexcept>
#include <string>

#include "zamr/errors.hpp"

namespace zamr {
namespace {

std::uint64_t spread_by_one(std::uint64_t x) {
  x &= 0xffffffffULL;
  x = (x | (x << 16)) & 0x0000ffff0000ffffULL;
  x = (x | (x << 8)) & 0x00ff00ff00ff00ffULL;
  x = (x | (x << 4)) & 0x0f0f0f0f0f0f0f0fULL;
  x = (x | (x << 2)) & 0x3333333333333333ULL;
  x = (x | (x << 1)) & 0x5555555555555555ULL;
  return x;
}

std::uint64_t compact_by_one(std::uint64_t x) {
  x &= 0x5555555555555555ULL;
  x = (x | (x >> 1)) & 0x3333333333333333ULL;
  x = (x | (x >> 2)) & 0x0f0f0f0f0f0f0f0fULL;
  x = (x | (x >> 4)) & 0x00ff00ff00ff00ffULL;
  x = (x | (x >> 8)) & 0x0000ffff0000ffffULL;
  x = (x | (x >> 16)) & 0x00000000ffffffffULL;
  return x;
}

std::uint64_t spread_by_two(std::uint64_t x) {
  x &= 0x1fffffULL;
  x = (x | (x << 32)) & 0x001f00000000ffffULL;
  x = (x | (x << 16)) & 0x001f0000ff0000ffULL;
  x = (x | (x << 8)) & 0x100f00f00f00f00fULL;
  x = (x | (x << 4)) & 0x10c30c30c30c30c3ULL;
  x = (x | (x << 2)) & 0x1249249249249249ULL;
  return x;
}

std::uint64_t compact_by_two(std::uint64_t x) {
  x &= 0x1249249249249249ULL;
  x = (x | (x >> 2)) & 0x10c30c30c30c30c3ULL;
  x = (x | (x >> 4)) & 0x100f00f00f00f00fULL;
  x = (x | (x >> 8)) & 0x001f0000ff0000ffULL;
  x = (x | (x >> 16)) & 0x001f00000000ffffULL;
  x = (x | (x >> 32)) & 0x1fffffULL;
  return x;
}

void check_dim(int dim) {
  if (dim != 2 && dim != 3) throw ConfigError("dimension must be 2 or 3, got " + std::to_string(dim));
}

}  // namespace

void Lattice::validate() const {
  check_dim(dim);
  if (max_level < 0 || max_level > max_supported_level(dim)) {
    throw ConfigError("max level " + std::to_string(max_level) + " outside [0, " +
                      std::to_string(max_supported_level(dim)) + "] for dim " + std::to_string(dim));
  }
}

std::uint64_t encode(const Coords& coords, int dim) {
  check_dim(dim);
  const std::uint64_t limit = std::uint64_t{1} << max_supported_level(dim);
  for (int a = 0; a < dim; ++a) {
    if (coords[a] >= limit) {
      throw std::domain_error("coordinate " + std::to_string(coords[a]) + " exceeds the key width");
    }
  }
  if (dim == 2) return spread_by_one(coords[0]) | (spread_by_one(coords[1]) << 1);
  return spread_by_two(coords[0]) | (spread_by_two(coords[1]) << 1) | (spread_by_two(coords[2]) << 2);
}

Coords decode(std::uint64_t key, int dim) {
  check_dim(dim);
  const int bits = dim * max_supported_level(dim);
  if (key >> bits) throw std::domain_error("Morton key exceeds " + std::to_string(bits) + " bits");
  if (dim == 2) {
    return {static_cast<std::uint32_t>(compact_by_one(key)),
            static_cast<std::uint32_t>(compact_by_one(key >> 1)), 0};
  }
  return {static_cast<std::uint32_t>(compact_by_two(key)), static_cast<std::uint32_t>(compact_by_two(key >> 1)),
          static_cast<std::uint32_t>(compact_by_two(key >> 2))};
}

MortonKey morton_key(const Lattice& lat, const Octant& o) { return {encode(o.coords, lat.dim), o.level}; }

bool is_valid(const Lattice& lat, const Octant& o) {
  if (o.tree < 0 || o.level < 0 || o.level > lat.max_level) return false;
  const std::uint32_t h = lat.length(o.level);
  for (int a = 0; a < 3; ++a) {
    if (a >= lat.dim) {
      if (o.coords[a] != 0) return false;
      continue;
    }
    if (o.coords[a] % h != 0) return false;
    if (o.coords[a] > lat.root_length() - h) return false;
  }
  return true;
}

Octant parent(const Lattice& lat, const Octant& o) {
  if (o.level == 0) throw ContractError("root octant has no parent");
  Octant p = o;
  p.level = o.level - 1;
  const std::uint32_t bit = lat.length(o.level);
  for (int a = 0; a < lat.dim; ++a) p.coords[a] &= ~bit;
  return p;
}

Octant child(const Lattice& lat, const Octant& o, int which) {
  if (o.level >= lat.max_level) throw ContractError("octant already at the maximum level");
  Octant c = o;
  c.level = o.level + 1;
  const std::uint32_t h = lat.length(c.level);
  for (int a = 0; a < lat.dim; ++a) {
    if ((which >> a) & 1) c.coords[a] += h;
  }
  return c;
}

std::vector<Octant> children(const Lattice& lat, const Octant& o) {
  std::vector<Octant> out;
  out.reserve(lat.num_children());
  for (int i = 0; i < lat.num_children(); ++i) out.push_back(child(lat, o, i));
  return out;
}

int child_id(const Lattice& lat, const Octant& o) {
  if (o.level == 0) return 0;
  const std::uint32_t bit = lat.length(o.level);
  int id = 0;
  for (int a = 0; a < lat.dim; ++a) {
    if (o.coords[a] & bit) id |= 1 << a;
  }
  return id;
}

Octant sibling(const Lattice& lat, const Octant& o, int which) {
  if (o.level == 0) return o;
  return child(lat, parent(lat, o), which);
}

FaceNeighbor face_neighbor(const Lattice& lat, const Octant& o, int axis, int sign) {
  const std::uint32_t h = lat.length(o.level);
  Octant n = o;
  if (sign > 0) {
    if (o.coords[axis] + h >= lat.root_length()) return OutsideTree{face_index(axis, sign)};
    n.coords[axis] += h;
  } else {
    if (o.coords[axis] < h) return OutsideTree{face_index(axis, sign)};
    n.coords[axis] -= h;
  }
  return n;
}

bool is_ancestor(const Lattice& lat, const Octant& a, const Octant& d) {
  if (a.tree != d.tree || a.level >= d.level) return false;
  const std::uint32_t h = lat.length(a.level);
  for (int ax = 0; ax < lat.dim; ++ax) {
    if (d.coords[ax] < a.coords[ax] || d.coords[ax] >= a.coords[ax] + h) return false;
  }
  return true;
}

bool zorder_less(const Lattice& lat, const Octant& a, const Octant& b) {
  if (a.tree != b.tree) return a.tree < b.tree;
  return morton_key(lat, a) < morton_key(lat, b);
}

}  // namespace zamr
