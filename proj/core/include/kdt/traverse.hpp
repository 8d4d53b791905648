#pragma once

#include "kdt/space.hpp"
#include "kdt/store.hpp"

namespace kdt {

// Recursive scheme shared by most operators: descend until a leaf or the
// depth limit, with hooks before, between and after the two sons.
template <class Term, class Pre, class Post>
void traverse(const TreeStore& s, NodeRef n, int level, int depth, Term&& term, Pre&& pre,
              Post&& post) {
  if (s.is_terminal(n) || level == depth) {
    term(n, level);
    return;
  }
  pre(n, level);
  traverse(s, s.left(n), level + 1, depth, term, pre, post);
  traverse(s, s.right(n), level + 1, depth, term, pre, post);
  post(n, level);
}

template <class Term>
void traverse(const TreeStore& s, NodeRef n, int depth, Term&& term) {
  traverse(s, n, 0, depth, term, [](NodeRef, int) {}, [](NodeRef, int) {});
}

// Parallel descent of two trees. Stops a branch as soon as either operand is
// terminal (or the depth limit is hit) and hands the pair to the hook.
template <class Term>
void compare_traverse(const TreeStore& s, NodeRef a, NodeRef b, int level, int depth,
                      Term&& term) {
  if (s.is_terminal(a) || s.is_terminal(b) || level == depth) {
    term(a, b, level);
    return;
  }
  compare_traverse(s, s.left(a), s.left(b), level + 1, depth, term);
  compare_traverse(s, s.right(a), s.right(b), level + 1, depth, term);
}

} // namespace kdt
