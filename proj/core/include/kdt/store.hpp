#pragma once

#include <cstdint>
#include <cstring>
#include <limits>
#include <unordered_map>
#include <vector>

#include "kdt/error.hpp"

namespace kdt {

using NodeRef = std::uint32_t;

inline constexpr NodeRef kWhite = 0;
inline constexpr NodeRef kBlack = 1;

enum class Tag : std::uint8_t {
  White,       // empty leaf
  Black,       // full leaf, no functional value
  Internal,    // binary split, no functional value
  BlackVal,    // full leaf carrying a functional value
  InternalVal, // binary split, value = max of the sons' values
};

inline constexpr double kNoValue = -std::numeric_limits<double>::infinity();

// Shared node arena. Nodes are immutable and hash-consed, so structurally
// identical subtrees get the same ref and leaf colors are canonical sentinels
// (refs 0 and 1). Normalizing constructors fold iso-colored sibling leaves.
class TreeStore {
public:
  TreeStore();

  NodeRef white() const { return kWhite; }
  NodeRef black() const { return kBlack; }
  NodeRef black_val(double v);

  // Normalizing constructors: two iso-colored leaf sons collapse to the leaf.
  // Valued leaves collapse only on exact value equality.
  NodeRef internal(NodeRef l, NodeRef r);
  NodeRef internal_val(NodeRef l, NodeRef r);

  // Non-normalizing variant, used by fission.
  NodeRef internal_raw(NodeRef l, NodeRef r);
  NodeRef internal_val_raw(NodeRef l, NodeRef r);

  Tag tag(NodeRef n) const { return nodes_[n].tag; }
  bool is_white(NodeRef n) const { return n == kWhite; }
  bool is_terminal(NodeRef n) const {
    Tag t = nodes_[n].tag;
    return t == Tag::White || t == Tag::Black || t == Tag::BlackVal;
  }
  bool is_black_leaf(NodeRef n) const {
    Tag t = nodes_[n].tag;
    return t == Tag::Black || t == Tag::BlackVal;
  }
  bool is_internal(NodeRef n) const { return !is_terminal(n); }
  bool is_valued(NodeRef n) const {
    Tag t = nodes_[n].tag;
    return t == Tag::BlackVal || t == Tag::InternalVal;
  }

  NodeRef left(NodeRef n) const {
    // Terminal nodes answer themselves, so blind descents stay well defined.
    return is_terminal(n) ? n : nodes_[n].l;
  }
  NodeRef right(NodeRef n) const { return is_terminal(n) ? n : nodes_[n].r; }

  // Max of the functional values below (the value itself for a valued leaf).
  // White answers -infinity.
  double value(NodeRef n) const { return nodes_[n].value; }

  // Splits a leaf into an internal node with two copies of it.
  NodeRef fission(NodeRef n) const;
  // Folds an internal node whose sons are iso-colored leaves; otherwise
  // answers the node unchanged.
  NodeRef merge(NodeRef n);
  // Recursive bottom-up merge.
  NodeRef normalize(NodeRef n);

  std::size_t size() const { return nodes_.size(); }

private:
  struct NodeRec {
    NodeRef l = 0;
    NodeRef r = 0;
    double value = kNoValue;
    Tag tag = Tag::White;
  };

  struct Key {
    std::uint8_t tag;
    NodeRef l, r;
    std::uint64_t vbits;
    bool operator==(const Key&) const = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const {
      std::uint64_t h = k.vbits * 0x9e3779b97f4a7c15ull;
      h ^= (std::uint64_t(k.l) << 32 | k.r) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
      h ^= k.tag + (h << 6) + (h >> 2);
      return std::size_t(h);
    }
  };

  NodeRef intern(Tag t, NodeRef l, NodeRef r, double v);

  std::vector<NodeRec> nodes_;
  std::unordered_map<Key, NodeRef, KeyHash> interned_;
  std::unordered_map<NodeRef, NodeRef> norm_memo_;
};

} // namespace kdt
