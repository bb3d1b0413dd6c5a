#pragma once

// Brute-force recursive traversal of a single tree down to level b.
// Keys are built from the child-id path, never from bit interleaving.

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <tuple>
#include <vector>

namespace oracle {

struct MortonNode {
  int level = 0;
  std::array<std::uint32_t, 3> lo{};
  std::uint64_t key = 0;
  int child_id = 0;
  MortonNode* parent = nullptr;
  std::vector<std::unique_ptr<MortonNode>> kids;
};

class MortonTree {
 public:
  MortonTree(int dim, int b) : dim_(dim), b_(b) {
    root_ = std::make_unique<MortonNode>();
    grow(*root_);
  }

  int dim() const { return dim_; }
  int depth() const { return b_; }
  const MortonNode& root() const { return *root_; }
  /// Every node in depth-first preorder.
  const std::vector<const MortonNode*>& preorder() const { return order_; }

  const MortonNode* find(int level, const std::array<std::uint32_t, 3>& lo) const {
    const auto it = index_.find({level, lo[0], lo[1], lo[2]});
    return it == index_.end() ? nullptr : it->second;
  }

  std::uint32_t length(int level) const { return std::uint32_t{1} << (b_ - level); }

  /// Same-level node across a face, located by geometry.
  const MortonNode* neighbor(const MortonNode& n, int axis, int sign) const {
    const std::int64_t h = length(n.level);
    const std::int64_t c = static_cast<std::int64_t>(n.lo[axis]) + sign * h;
    if (c < 0 || c >= (std::int64_t{1} << b_)) return nullptr;
    auto lo = n.lo;
    lo[axis] = static_cast<std::uint32_t>(c);
    return find(n.level, lo);
  }

 private:
  void grow(MortonNode& n) {
    order_.push_back(&n);
    index_[{n.level, n.lo[0], n.lo[1], n.lo[2]}] = &n;
    if (n.level == b_) return;
    const std::uint32_t h = length(n.level + 1);
    for (int c = 0; c < (1 << dim_); ++c) {
      auto k = std::make_unique<MortonNode>();
      k->level = n.level + 1;
      k->lo = n.lo;
      for (int a = 0; a < dim_; ++a) {
        if (c & (1 << a)) k->lo[a] += h;
      }
      k->child_id = c;
      k->key = n.key + (static_cast<std::uint64_t>(c) << (dim_ * (b_ - k->level)));
      k->parent = &n;
      MortonNode& ref = *k;
      n.kids.push_back(std::move(k));
      grow(ref);
    }
  }

  int dim_;
  int b_;
  std::unique_ptr<MortonNode> root_;
  std::vector<const MortonNode*> order_;
  std::map<std::tuple<int, std::uint32_t, std::uint32_t, std::uint32_t>, const MortonNode*> index_;
};

}  // namespace oracle
