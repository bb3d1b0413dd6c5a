#include <doctest.h>

#include <cmath>
#include <map>
#include <random>
#include <sstream>

#include "checks.hpp"
#include "zamr/errors.hpp"
#include "zamr/forest.hpp"

using namespace zamr;

namespace {

// A balanced, nonuniform forest on a 2x1 periodic brick (or 1x1x1 in 3D).
Forest sample_forest(int dim, std::uint64_t seed, oracle::Brick* brick_out = nullptr) {
  oracle::Brick brick;
  brick.dim = dim;
  brick.b = dim == 2 ? 5 : 3;
  brick.trees = dim == 2 ? std::array<int, 3>{2, 1, 1} : std::array<int, 3>{1, 1, 1};
  brick.periodic = {true, dim == 2, false};
  Forest f = Forest::uniform(oracle::to_connectivity(brick), 1, brick.b);
  std::mt19937_64 rng(seed);
  for (int round = 0; round < brick.b - 1; ++round) {
    AdaptMarks m(f.size(), Mark::Keep);
    for (auto& x : m) x = rng() % 4 == 0 ? Mark::Refine : Mark::Keep;
    f = balance(refine(f, m).forest).forest;
  }
  if (brick_out) *brick_out = brick;
  return f;
}

}  // namespace

TEST_SUITE("forest") {

TEST_CASE("adapt fuzz against the pointer tree") {
  oracle::FuzzStats stats;
  for (std::uint64_t seed = 1; seed <= 60; ++seed) {
    for (int dim : {2, 3}) {
      const std::string err = oracle::fuzz_adapt(seed, dim, 3, &stats);
      CHECK_MESSAGE(err.empty(), err);
    }
  }
  CHECK(stats.patterns == 360);
  CHECK(stats.max_leaves > 500);
}

TEST_CASE("uniform forest") {
  Connectivity c;
  c.dim = 3;
  c.tree_dims = {2, 1, 3};
  const Forest f = Forest::uniform(c, 2, 4);
  CHECK(f.size() == 6u * 64u);
  oracle::Brick brick{3, {2, 1, 3}, {}, 4};
  CHECK(oracle::check_structure(f, brick, true) == "");
  CHECK_THROWS_AS(Forest::uniform(c, 5, 4), ConfigError);
  CHECK_THROWS_AS(Forest::uniform(c, 1, 4, 2), ConfigError);
}

TEST_CASE("from_leaves rejects broken arrays") {
  Connectivity c;
  const Lattice lat{2, 2};
  std::vector<Octant> good = children(lat, Octant{});
  CHECK_NOTHROW(Forest::from_leaves(c, 2, 0, good));

  auto swapped = good;
  std::swap(swapped[1], swapped[2]);
  CHECK_THROWS_AS(Forest::from_leaves(c, 2, 0, swapped), ContractError);

  auto gap = good;
  gap.pop_back();
  CHECK_THROWS_AS(Forest::from_leaves(c, 2, 0, gap), ContractError);

  auto overlap = good;
  overlap.insert(overlap.begin() + 1, child(lat, good[0], 3));
  CHECK_THROWS_AS(Forest::from_leaves(c, 2, 0, overlap), ContractError);

  auto misaligned = good;
  misaligned[1].coords[0] = 1;
  CHECK_THROWS_AS(Forest::from_leaves(c, 2, 0, misaligned), ContractError);

  auto wrong_tree = good;
  for (auto& o : wrong_tree) o.tree = 1;
  CHECK_THROWS_AS(Forest::from_leaves(c, 2, 0, wrong_tree), ContractError);
}

TEST_CASE("adjacency matches the raster oracle") {
  for (int dim : {2, 3}) {
    for (std::uint64_t seed : {3u, 11u}) {
      oracle::Brick brick;
      const Forest f = sample_forest(dim, seed, &brick);
      const LeafAdjacency adj = build_adjacency(f);
      const auto want = oracle::Raster(brick, oracle::to_oracle(f)).neighbor_sets(f.size());
      for (std::size_t i = 0; i < f.size(); ++i) {
        const auto got = adj.of(i);
        CHECK(std::set<std::size_t>(got.begin(), got.end()) == want[i]);
        CHECK(std::is_sorted(got.begin(), got.end()));
      }
    }
  }
}

TEST_CASE("face areas sum to the fine faces counted on the raster") {
  for (int dim : {2, 3}) {
    oracle::Brick brick;
    const Forest f = sample_forest(dim, 5, &brick);
    const oracle::Raster r(brick, oracle::to_oracle(f));
    const double fine_area = std::pow(std::ldexp(1.0, -brick.b), dim - 1);
    // (leaf, face) -> shared area counted from fine faces
    std::map<std::pair<std::size_t, int>, double> want;
    r.for_each_face([&](std::size_t lo, std::size_t hi, int axis) {
      if (lo == hi) return;
      want[{lo, face_index(axis, 1)}] += fine_area;
      want[{hi, face_index(axis, -1)}] += fine_area;
    });
    for (std::size_t i = 0; i < f.size(); ++i) {
      const double dx = cell_geometry(f, i).dx;
      for (int axis = 0; axis < dim; ++axis) {
        for (int sign : {-1, 1}) {
          const NeighborSet ns = leaf_neighbors(f, i, axis, sign);
          double area = 0.0;
          for (const NeighborFace& nf : ns.span()) {
            if (nf.leaf == i) continue;
            area += nf.area;
            const double dxn = cell_geometry(f, nf.leaf).dx;
            CHECK(nf.distance == doctest::Approx(0.5 * (dx + dxn)).epsilon(1e-14));
          }
          const auto it = want.find({i, face_index(axis, sign)});
          const double expect = it == want.end() ? 0.0 : it->second;
          CHECK(area == doctest::Approx(expect).epsilon(1e-12));
          if (ns.kind == NeighborSet::Kind::Finer) CHECK(ns.count == (1 << (dim - 1)));
        }
      }
    }
  }
}

TEST_CASE("walls give boundary neighbor sets") {
  Connectivity c;
  const Forest f = Forest::uniform(c, 1, 3);
  CHECK(leaf_neighbors(f, 0, 0, -1).kind == NeighborSet::Kind::Boundary);
  CHECK(leaf_neighbors(f, 0, 1, -1).kind == NeighborSet::Kind::Boundary);
  const NeighborSet right = leaf_neighbors(f, 0, 0, 1);
  CHECK(right.kind == NeighborSet::Kind::SameOrCoarser);
  CHECK(right.faces[0].leaf == 1);
  CHECK(right.faces[0].area == 0.5);
}

TEST_CASE("unbalanced forests are rejected by neighbor queries") {
  Connectivity c;
  const Lattice lat{2, 3};
  // refine the lower-left quadrant twice, leave its right neighbor at level 1
  std::vector<Octant> leaves;
  for (const Octant& q : children(lat, Octant{})) {
    if (child_id(lat, q) == 0) {
      for (const Octant& k : children(lat, q)) {
        for (const Octant& g : children(lat, k)) leaves.push_back(g);
      }
    } else {
      leaves.push_back(q);
    }
  }
  const Forest f = Forest::from_leaves(c, 3, 0, leaves);
  CHECK_FALSE(is_balanced(f));
  const auto q1 = f.find_exact(Octant{0, 1, {4, 0, 0}});
  REQUIRE(q1);
  CHECK_THROWS_AS(leaf_neighbors(f, *q1, 0, -1), ContractError);
  CHECK(is_balanced(balance(f).forest));
}

TEST_CASE("adapt maps point at the right old leaves") {
  const Forest f = sample_forest(2, 9);
  const Lattice& lat = f.lattice();
  std::mt19937_64 rng(9);
  AdaptMarks m(f.size());
  for (auto& x : m) x = static_cast<Mark>(rng() % 3);

  const Adapted r = refine(f, m);
  REQUIRE(r.map.size() == r.forest.size());
  for (std::size_t i = 0; i < r.map.size(); ++i) {
    const AdaptEntry& e = r.map[i];
    const Octant& old = f.leaf(e.first);
    if (e.origin == AdaptEntry::Origin::Refined) {
      CHECK(parent(lat, r.forest.leaf(i)) == old);
    } else {
      CHECK(r.forest.leaf(i) == old);
    }
  }

  const Adapted c = coarsen(f, m);
  for (std::size_t i = 0; i < c.map.size(); ++i) {
    const AdaptEntry& e = c.map[i];
    if (e.origin == AdaptEntry::Origin::Coarsened) {
      CHECK(e.count == 4u);
      for (std::uint32_t k = 0; k < e.count; ++k) CHECK(parent(lat, f.leaf(e.first + k)) == c.forest.leaf(i));
    } else {
      CHECK(c.forest.leaf(i) == f.leaf(e.first));
    }
  }

  // carry_marks keeps marks of kept leaves and resets new children
  const AdaptMarks carried = carry_marks(r.map, m);
  for (std::size_t i = 0; i < carried.size(); ++i) {
    if (r.map[i].origin == AdaptEntry::Origin::Kept) {
      CHECK(carried[i] == m[r.map[i].first]);
    } else {
      CHECK(carried[i] == Mark::Keep);
    }
  }
}

TEST_CASE("composed maps agree with stepwise transport") {
  const Forest f = sample_forest(2, 13);
  std::mt19937_64 rng(13);
  AdaptMarks m(f.size());
  for (auto& x : m) x = static_cast<Mark>(rng() % 3);
  const Adapted c = coarsen(f, m);
  const Adapted b = balance(c.forest);
  const AdaptMap composed = compose(c.map, b.map);
  REQUIRE(composed.size() == b.forest.size());

  // transport a leaf-index field through both maps separately and through the composition
  std::vector<double> v(f.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = static_cast<double>(i * i % 97);
  auto apply = [](const AdaptMap& map, const std::vector<double>& in) {
    std::vector<double> out;
    for (const AdaptEntry& e : map) {
      double s = 0.0;
      for (std::uint32_t k = 0; k < e.count; ++k) s += in[e.first + k];
      out.push_back(s / e.count);
    }
    return out;
  };
  CHECK(apply(composed, v) == apply(b.map, apply(c.map, v)));
}

TEST_CASE("find_containing and cell geometry") {
  const Forest f = sample_forest(3, 2);
  const Lattice& lat = f.lattice();
  for (std::size_t i = 0; i < f.size(); ++i) {
    const Octant& o = f.leaf(i);
    Coords inner = o.coords;
    for (int a = 0; a < 3; ++a) inner[a] += lat.length(o.level) - 1;
    CHECK(f.find_containing(o.tree, inner) == i);
    CHECK(f.find_exact(o) == i);
    const CellGeometry g = cell_geometry(f, i);
    CHECK(g.volume == doctest::Approx(std::pow(g.dx, 3)));
    CHECK(g.center[0] == doctest::Approx((o.coords[0] + 0.5 * lat.length(o.level)) / lat.root_length()));
  }
  if (f.leaf(0).level < lat.max_level) CHECK_FALSE(f.find_exact(child(lat, f.leaf(0), 0)));
}

TEST_CASE("dump format") {
  Connectivity c;
  const Forest f = Forest::uniform(c, 1, 2);
  std::ostringstream os;
  dump_leaves(f, os);
  CHECK(os.str() == "0 1 0 0 0\n0 1 2 0 4\n0 1 0 2 8\n0 1 2 2 12\n");
}

}  // TEST_SUITE
