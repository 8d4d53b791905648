#include "kdt/work.hpp"

namespace kdt {

WorkNode* WorkTree::expand(const TreeStore& store, NodeRef n) {
  WorkNode* w = alloc();
  if (store.is_terminal(n)) {
    w->black = store.is_black_leaf(n);
    if (store.tag(n) == Tag::BlackVal) {
      w->valued = true;
      w->fval = store.value(n);
    }
  } else {
    w->l = expand(store, store.left(n));
    w->r = expand(store, store.right(n));
    if (store.is_valued(n)) w->valued = true;
  }
  return w;
}

NodeRef WorkTree::fold(TreeStore& store, const WorkNode* n) {
  if (n->terminal()) {
    if (!n->black) return store.white();
    return n->valued ? store.black_val(n->fval) : store.black();
  }
  NodeRef l = fold(store, n->l);
  NodeRef r = fold(store, n->r);
  bool valued = store.is_valued(l) || store.is_valued(r);
  return valued ? store.internal_val(l, r) : store.internal(l, r);
}

} // namespace kdt
