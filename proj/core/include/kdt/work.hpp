#pragma once

#include <cstdint>
#include <deque>
#include <limits>

#include "kdt/store.hpp"

namespace kdt {

inline constexpr std::int64_t kNilMark = std::numeric_limits<std::int64_t>::min();

// Mutable expansion of a canonical tree. Marking algorithms (boundary search,
// labeling, thinning, hull merging...) divide leaves in place and scribble in
// the mark field, then the result is folded back into the shared store.
// A terminal node answers itself for both sons.
struct WorkNode {
  WorkNode* l = nullptr;
  WorkNode* r = nullptr;
  bool black = false;
  bool valued = false;
  double fval = 0.0;
  std::int64_t mark = kNilMark;

  bool terminal() const { return l == nullptr; }
  bool white() const { return terminal() && !black; }
  WorkNode* left() { return terminal() ? this : l; }
  WorkNode* right() { return terminal() ? this : r; }
};

class WorkTree {
public:
  WorkTree() { root_ = alloc(); }
  explicit WorkTree(const TreeStore& store, NodeRef n) { root_ = expand(store, n); }

  WorkNode* root() { return root_; }

  WorkNode* alloc() {
    pool_.emplace_back();
    return &pool_.back();
  }

  // Splits a terminal node into two copies of itself.
  void divide(WorkNode* n) {
    if (!n->terminal()) return;
    WorkNode* a = alloc();
    WorkNode* b = alloc();
    a->black = b->black = n->black;
    a->valued = b->valued = n->valued;
    a->fval = b->fval = n->fval;
    n->l = a;
    n->r = b;
  }

  // Folds an internal node whose sons are unmarked iso-colored leaves.
  static void merge(WorkNode* n) {
    if (n->terminal()) return;
    WorkNode *a = n->l, *b = n->r;
    if (!a->terminal() || !b->terminal()) return;
    if (a->mark != kNilMark || b->mark != kNilMark) return;
    if (a->black != b->black) return;
    if (a->black && a->valued && (!b->valued || a->fval != b->fval)) return;
    if (a->black && a->valued != b->valued) return;
    n->black = a->black;
    n->valued = a->valued;
    n->fval = a->fval;
    n->l = n->r = nullptr;
  }

  static void blacken(WorkNode* n) {
    n->l = n->r = nullptr;
    n->black = true;
  }
  static void whiten(WorkNode* n) {
    n->l = n->r = nullptr;
    n->black = false;
    n->valued = false;
  }

  NodeRef fold(TreeStore& store) const { return fold(store, root_); }
  static NodeRef fold(TreeStore& store, const WorkNode* n);

private:
  WorkNode* expand(const TreeStore& store, NodeRef n);

  std::deque<WorkNode> pool_;
  WorkNode* root_ = nullptr;
};

} // namespace kdt
