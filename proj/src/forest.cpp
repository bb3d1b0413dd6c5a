#include "zamr/forest.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "zamr/errors.hpp"

namespace zamr {
namespace {

std::uint64_t key_span(const Lattice& lat, int level) {
  return std::uint64_t{1} << (lat.dim * (lat.max_level - level));
}

void check_marks(const Forest& f, const AdaptMarks& marks) {
  if (marks.size() != f.size()) {
    throw ContractError("adapt marks size " + std::to_string(marks.size()) + " != leaf count " +
                        std::to_string(f.size()));
  }
}

/// Same-size neighbor across a face, following the brick connectivity.
std::optional<Octant> same_level_neighbor(const Forest& f, const Octant& o, int axis, int sign) {
  const Lattice& lat = f.lattice();
  const FaceNeighbor fn = face_neighbor(lat, o, axis, sign);
  if (const auto* inside = std::get_if<Octant>(&fn)) return *inside;
  const auto tree = f.connectivity().face_tree(o.tree, axis, sign);
  if (!tree) return std::nullopt;
  Octant n = o;
  n.tree = *tree;
  n.coords[axis] = sign > 0 ? 0 : lat.root_length() - lat.length(o.level);
  return n;
}

}  // namespace

// ---------------------------------------------------------------------------
// Connectivity

void Connectivity::validate() const {
  if (dim != 2 && dim != 3) throw ConfigError("dimension must be 2 or 3");
  for (int a = 0; a < dim; ++a) {
    if (tree_dims[a] < 1) throw ConfigError("tree counts must be >= 1 on every axis");
  }
  if (!(tree_extent > 0.0)) throw ConfigError("tree extent must be positive");
}

int Connectivity::num_trees() const {
  int n = 1;
  for (int a = 0; a < dim; ++a) n *= tree_dims[a];
  return n;
}

std::array<int, 3> Connectivity::tree_coords(int tree) const {
  std::array<int, 3> tc{0, 0, 0};
  tc[0] = tree % tree_dims[0];
  tc[1] = (tree / tree_dims[0]) % tree_dims[1];
  if (dim == 3) tc[2] = tree / (tree_dims[0] * tree_dims[1]);
  return tc;
}

int Connectivity::tree_id(const std::array<int, 3>& tc) const {
  return tc[0] + tree_dims[0] * (tc[1] + (dim == 3 ? tree_dims[1] * tc[2] : 0));
}

std::optional<int> Connectivity::face_tree(int tree, int axis, int sign) const {
  auto tc = tree_coords(tree);
  tc[axis] += sign > 0 ? 1 : -1;
  if (tc[axis] < 0 || tc[axis] >= tree_dims[axis]) {
    if (!periodic[axis]) return std::nullopt;
    tc[axis] = (tc[axis] + tree_dims[axis]) % tree_dims[axis];
  }
  return tree_id(tc);
}

std::array<double, 3> Connectivity::domain_size() const {
  std::array<double, 3> s{0.0, 0.0, 0.0};
  for (int a = 0; a < dim; ++a) s[a] = tree_dims[a] * tree_extent;
  return s;
}

// ---------------------------------------------------------------------------
// Forest

Forest::Forest(const Connectivity& conn, int max_level, int min_level, std::vector<Octant> leaves)
    : conn_(conn), lat_{conn.dim, max_level}, min_level_(min_level), leaves_(std::move(leaves)) {
  keys_.reserve(leaves_.size());
  for (const auto& o : leaves_) keys_.push_back(encode(o.coords, lat_.dim));
}

Forest Forest::uniform(const Connectivity& conn, int level, int max_level, int min_level) {
  conn.validate();
  Lattice{conn.dim, max_level}.validate();
  if (min_level < 0 || level < min_level || level > max_level) {
    throw ConfigError("uniform level " + std::to_string(level) + " must lie in [min_level " +
                      std::to_string(min_level) + ", max_level " + std::to_string(max_level) + "]");
  }
  const Lattice lat{conn.dim, max_level};
  const std::uint64_t per_tree = std::uint64_t{1} << (conn.dim * level);
  const std::uint64_t step = key_span(lat, level);
  std::vector<Octant> leaves;
  leaves.reserve(per_tree * conn.num_trees());
  for (int t = 0; t < conn.num_trees(); ++t) {
    for (std::uint64_t m = 0; m < per_tree; ++m) {
      leaves.push_back(Octant{t, level, decode(m * step, conn.dim)});
    }
  }
  return Forest(conn, max_level, min_level, std::move(leaves));
}

Forest Forest::from_leaves(const Connectivity& conn, int max_level, int min_level, std::vector<Octant> leaves) {
  conn.validate();
  Forest f(conn, max_level, min_level, std::move(leaves));
  f.lat_.validate();
  const Lattice& lat = f.lat_;
  const std::uint64_t full = key_span(lat, 0);
  int tree = 0;
  std::uint64_t expect = 0;
  for (std::size_t i = 0; i < f.leaves_.size(); ++i) {
    const Octant& o = f.leaves_[i];
    if (!is_valid(lat, o) || o.tree >= conn.num_trees()) throw ContractError("invalid leaf octant");
    if (o.tree != tree) {
      if (o.tree != tree + 1 || expect != full) throw ContractError("leaf array does not tile every tree");
      tree = o.tree;
      expect = 0;
    }
    if (f.keys_[i] != expect) throw ContractError("leaf array is not a sorted, gap-free tiling");
    expect += key_span(lat, o.level);
  }
  if (tree != conn.num_trees() - 1 || expect != full) throw ContractError("leaf array does not tile every tree");
  return f;
}

std::size_t Forest::upper_index(int tree, std::uint64_t key) const {
  std::size_t lo = 0;
  std::size_t hi = leaves_.size();
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    const bool le = leaves_[mid].tree < tree || (leaves_[mid].tree == tree && keys_[mid] <= key);
    if (le) {
      lo = mid + 1;
    } else {
      hi = mid;
    }
  }
  return lo;
}

std::optional<std::size_t> Forest::find_containing(int tree, const Coords& point) const {
  const std::uint64_t key = encode(point, lat_.dim);
  const std::size_t up = upper_index(tree, key);
  if (up == 0) return std::nullopt;
  const std::size_t k = up - 1;
  if (leaves_[k].tree != tree || key - keys_[k] >= key_span(lat_, leaves_[k].level)) return std::nullopt;
  return k;
}

std::optional<std::size_t> Forest::find_exact(const Octant& o) const {
  auto k = find_containing(o.tree, o.coords);
  if (k && leaves_[*k] == o) return k;
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Adaptation

Adapted refine(const Forest& f, const AdaptMarks& marks) {
  check_marks(f, marks);
  const Lattice& lat = f.lattice();
  std::vector<Octant> out;
  AdaptMap map;
  out.reserve(f.size());
  map.reserve(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) {
    const Octant& o = f.leaf(i);
    const auto idx = static_cast<std::uint32_t>(i);
    if (marks[i] == Mark::Refine && o.level < lat.max_level) {
      for (int c = 0; c < lat.num_children(); ++c) {
        out.push_back(child(lat, o, c));
        map.push_back({AdaptEntry::Origin::Refined, idx, 1});
      }
    } else {
      out.push_back(o);
      map.push_back({AdaptEntry::Origin::Kept, idx, 1});
    }
  }
  return {Forest::from_leaves(f.connectivity(), f.max_level(), f.min_level(), std::move(out)), std::move(map)};
}

Adapted coarsen(const Forest& f, const AdaptMarks& marks) {
  check_marks(f, marks);
  const Lattice& lat = f.lattice();
  const std::size_t nc = static_cast<std::size_t>(lat.num_children());
  std::vector<Octant> out;
  AdaptMap map;
  out.reserve(f.size());
  map.reserve(f.size());
  std::size_t i = 0;
  while (i < f.size()) {
    const Octant& o = f.leaf(i);
    bool merge = o.level > f.min_level() && child_id(lat, o) == 0 && i + nc <= f.size();
    for (std::size_t k = 0; merge && k < nc; ++k) {
      merge = marks[i + k] == Mark::Coarsen && f.leaf(i + k) == sibling(lat, o, static_cast<int>(k));
    }
    if (merge) {
      out.push_back(parent(lat, o));
      map.push_back({AdaptEntry::Origin::Coarsened, static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(nc)});
      i += nc;
    } else {
      out.push_back(o);
      map.push_back({AdaptEntry::Origin::Kept, static_cast<std::uint32_t>(i), 1});
      ++i;
    }
  }
  return {Forest::from_leaves(f.connectivity(), f.max_level(), f.min_level(), std::move(out)), std::move(map)};
}

namespace {

/// Marks every leaf that is two or more levels coarser than a face neighbor.
AdaptMarks balance_violations(const Forest& f, bool& any) {
  AdaptMarks marks(f.size(), Mark::Keep);
  any = false;
  for (std::size_t j = 0; j < f.size(); ++j) {
    const Octant& o = f.leaf(j);
    if (o.level < 2) continue;
    for (int axis = 0; axis < f.dim(); ++axis) {
      for (int sign : {-1, 1}) {
        const auto n = same_level_neighbor(f, o, axis, sign);
        if (!n) continue;
        const auto k = f.find_containing(n->tree, n->coords);
        if (k && f.leaf(*k).level < o.level - 1) {
          marks[*k] = Mark::Refine;
          any = true;
        }
      }
    }
  }
  return marks;
}

}  // namespace

Adapted balance(const Forest& f) {
  AdaptMap map(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) map[i] = {AdaptEntry::Origin::Kept, static_cast<std::uint32_t>(i), 1};
  Forest current = f;
  for (;;) {
    bool any = false;
    const AdaptMarks marks = balance_violations(current, any);
    if (!any) break;
    Adapted next = refine(current, marks);
    map = compose(map, next.map);
    current = std::move(next.forest);
  }
  return {std::move(current), std::move(map)};
}

bool is_balanced(const Forest& f) {
  bool any = false;
  balance_violations(f, any);
  return !any;
}

AdaptMarks carry_marks(const AdaptMap& map, const AdaptMarks& marks) {
  AdaptMarks out(map.size(), Mark::Keep);
  for (std::size_t i = 0; i < map.size(); ++i) {
    if (map[i].origin == AdaptEntry::Origin::Kept) out[i] = marks.at(map[i].first);
  }
  return out;
}

AdaptMap compose(const AdaptMap& first, const AdaptMap& second) {
  using Origin = AdaptEntry::Origin;
  AdaptMap out;
  out.reserve(second.size());
  for (const AdaptEntry& e : second) {
    const AdaptEntry& m = first.at(e.first);
    switch (e.origin) {
      case Origin::Kept:
        out.push_back(m);
        break;
      case Origin::Refined:
        // a child copies whatever value its parent carried
        out.push_back(m.origin == Origin::Coarsened ? m : AdaptEntry{Origin::Refined, m.first, 1});
        break;
      case Origin::Coarsened: {
        for (std::uint32_t k = 0; k < e.count; ++k) {
          const AdaptEntry& mk = first.at(e.first + k);
          if (mk.origin != Origin::Kept || mk.first != m.first + k) {
            throw ContractError("cannot compose a coarsening over previously adapted leaves");
          }
        }
        out.push_back({Origin::Coarsened, m.first, e.count});
        break;
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Queries

NeighborSet leaf_neighbors(const Forest& f, std::size_t i, int axis, int sign) {
  const Lattice& lat = f.lattice();
  const Octant& o = f.leaf(i);
  const double dx = f.connectivity().tree_extent / static_cast<double>(std::uint64_t{1} << o.level);
  const int face = face_index(axis, sign);
  NeighborSet ns;
  ns.face = face;

  const auto n = same_level_neighbor(f, o, axis, sign);
  if (!n) {
    ns.kind = NeighborSet::Kind::Boundary;
    return ns;
  }
  const auto k = f.find_containing(n->tree, n->coords);
  if (!k) throw ContractError("neighbor region not covered by any leaf");
  const Octant& nb = f.leaf(*k);
  if (nb.level <= o.level) {
    if (nb.level < o.level - 1) throw ContractError("forest is not 2:1 balanced at leaf " + std::to_string(i));
    const double dxn = f.connectivity().tree_extent / static_cast<double>(std::uint64_t{1} << nb.level);
    ns.kind = NeighborSet::Kind::SameOrCoarser;
    ns.count = 1;
    ns.faces[0] = {*k, std::pow(dx, f.dim() - 1), 0.5 * (dx + dxn)};
    return ns;
  }
  ns.kind = NeighborSet::Kind::Finer;
  const int touching_bit = sign > 0 ? 0 : 1;
  const double area = std::pow(0.5 * dx, f.dim() - 1);
  for (int c = 0; c < lat.num_children(); ++c) {
    if (((c >> axis) & 1) != touching_bit) continue;
    const auto kc = f.find_exact(child(lat, *n, c));
    if (!kc) throw ContractError("forest is not 2:1 balanced at leaf " + std::to_string(i));
    ns.faces[ns.count++] = {*kc, area, 0.75 * dx};
  }
  return ns;
}

CellGeometry cell_geometry(const Forest& f, std::size_t i) {
  const Connectivity& conn = f.connectivity();
  const Lattice& lat = f.lattice();
  const Octant& o = f.leaf(i);
  const auto tc = conn.tree_coords(o.tree);
  const double scale = conn.tree_extent / static_cast<double>(lat.root_length());
  const double h = static_cast<double>(lat.length(o.level));
  CellGeometry g;
  g.dx = conn.tree_extent / static_cast<double>(std::uint64_t{1} << o.level);
  g.volume = std::pow(g.dx, f.dim());
  for (int a = 0; a < f.dim(); ++a) {
    g.center[a] = tc[a] * conn.tree_extent + (static_cast<double>(o.coords[a]) + 0.5 * h) * scale;
  }
  return g;
}

LeafAdjacency build_adjacency(const Forest& f) {
  LeafAdjacency adj;
  adj.offsets.reserve(f.size() + 1);
  adj.offsets.push_back(0);
  std::vector<std::size_t> local;
  for (std::size_t i = 0; i < f.size(); ++i) {
    local.clear();
    for (int axis = 0; axis < f.dim(); ++axis) {
      for (int sign : {-1, 1}) {
        for (const auto& nf : leaf_neighbors(f, i, axis, sign).span()) {
          if (nf.leaf != i) local.push_back(nf.leaf);
        }
      }
    }
    std::sort(local.begin(), local.end());
    local.erase(std::unique(local.begin(), local.end()), local.end());
    adj.neighbors.insert(adj.neighbors.end(), local.begin(), local.end());
    adj.offsets.push_back(adj.neighbors.size());
  }
  return adj;
}

void dump_leaves(const Forest& f, std::ostream& os) {
  for (const Octant& o : f.leaves()) {
    os << o.tree << ' ' << o.level;
    for (int a = 0; a < f.dim(); ++a) os << ' ' << o.coords[a];
    os << ' ' << encode(o.coords, f.dim()) << '\n';
  }
}

}  // namespace zamr
