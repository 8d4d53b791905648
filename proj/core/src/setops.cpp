#include "kdt/setops.hpp"

#include <algorithm>

namespace kdt {

namespace {

enum class Op { Union, Intersect, Diff, Exclude };

// A node cut at the depth limit collapses to a black leaf (upper hull).
NodeRef leafize(TreeStore& s, NodeRef n) {
  if (s.is_terminal(n)) return n;
  return s.is_valued(n) ? s.black_val(s.value(n)) : s.black();
}

NodeRef assert_rec(TreeStore& s, NodeRef a, int level, int depth) {
  if (s.is_terminal(a)) return a;
  if (level == depth) return leafize(s, a);
  NodeRef l = assert_rec(s, s.left(a), level + 1, depth);
  NodeRef r = assert_rec(s, s.right(a), level + 1, depth);
  return s.is_valued(a) ? s.internal_val(l, r) : s.internal(l, r);
}

NodeRef compl_rec(TreeStore& s, NodeRef a, int level, int depth) {
  if (s.is_white(a)) return s.black();
  if (s.is_terminal(a) || level == depth) return s.white();
  return s.internal(compl_rec(s, s.left(a), level + 1, depth),
                    compl_rec(s, s.right(a), level + 1, depth));
}

NodeRef combine_leaves(TreeStore& s, NodeRef a, NodeRef b, Op op, bool valued) {
  bool ab = !s.is_white(a), bb = !s.is_white(b);
  bool keep = false, common = false;
  switch (op) {
    case Op::Union: keep = ab || bb; common = ab && bb; break;
    case Op::Intersect: keep = common = ab && bb; break;
    case Op::Diff: keep = ab && !bb; break;
    case Op::Exclude: keep = ab != bb; break;
  }
  if (!keep) return s.white();
  if (!valued) return s.black();
  if (common) {
    double v = std::max(s.value(a), s.value(b));
    return v == kNoValue ? s.black() : s.black_val(v);
  }
  return leafize(s, ab ? a : b);
}

NodeRef bool_rec(TreeStore& s, NodeRef a, NodeRef b, int level, int depth, Op op, bool valued) {
  if (level == depth || (s.is_terminal(a) && s.is_terminal(b)))
    return combine_leaves(s, leafize(s, a), leafize(s, b), op, valued);

  // Shortcuts that need no descent.
  switch (op) {
    case Op::Union:
      if (s.is_white(a)) return assert_rec(s, b, level, depth);
      if (s.is_white(b)) return assert_rec(s, a, level, depth);
      if (!valued && (s.tag(a) == Tag::Black || s.tag(b) == Tag::Black)) return s.black();
      break;
    case Op::Intersect:
      if (s.is_white(a) || s.is_white(b)) return s.white();
      if (s.tag(a) == Tag::Black) return assert_rec(s, b, level, depth);
      if (s.tag(b) == Tag::Black) return assert_rec(s, a, level, depth);
      break;
    case Op::Diff:
      if (s.is_white(a)) return s.white();
      if (s.is_white(b)) return assert_rec(s, a, level, depth);
      if (s.is_black_leaf(b)) return s.white();
      break;
    case Op::Exclude:
      if (s.is_white(a)) return assert_rec(s, b, level, depth);
      if (s.is_white(b)) return assert_rec(s, a, level, depth);
      break;
  }

  NodeRef l = bool_rec(s, s.left(a), s.left(b), level + 1, depth, op, valued);
  NodeRef r = bool_rec(s, s.right(a), s.right(b), level + 1, depth, op, valued);
  return valued ? s.internal_val(l, r) : s.internal(l, r);
}

NodeRef run_op(TreeStore& s, const SpaceSpec& sp, NodeRef a, NodeRef b, int precision, Op op) {
  sp.check_precision(precision);
  bool valued = s.is_valued(a) || s.is_valued(b);
  if (op == Op::Diff || op == Op::Intersect) valued = s.is_valued(a) || (op == Op::Intersect && s.is_valued(b));
  return bool_rec(s, a, b, 0, sp.k * precision, op, valued);
}

} // namespace

NodeRef assert_at(TreeStore& s, const SpaceSpec& sp, NodeRef a, int precision) {
  sp.check_precision(precision);
  return assert_rec(s, a, 0, sp.k * precision);
}

NodeRef complement(TreeStore& s, const SpaceSpec& sp, NodeRef a, int precision) {
  sp.check_precision(precision);
  return compl_rec(s, a, 0, sp.k * precision);
}

NodeRef set_union(TreeStore& s, const SpaceSpec& sp, NodeRef a, NodeRef b, int precision) {
  return run_op(s, sp, a, b, precision, Op::Union);
}

NodeRef set_intersect(TreeStore& s, const SpaceSpec& sp, NodeRef a, NodeRef b, int precision) {
  return run_op(s, sp, a, b, precision, Op::Intersect);
}

NodeRef set_diff(TreeStore& s, const SpaceSpec& sp, NodeRef a, NodeRef b, int precision) {
  return run_op(s, sp, a, b, precision, Op::Diff);
}

NodeRef set_exclude(TreeStore& s, const SpaceSpec& sp, NodeRef a, NodeRef b, int precision) {
  return run_op(s, sp, a, b, precision, Op::Exclude);
}

namespace {

std::uint64_t count_rec(const TreeStore& s, NodeRef a, int level, int depth) {
  if (s.is_white(a)) return 0;
  if (s.is_terminal(a) || level == depth) return std::uint64_t(1) << (depth - level);
  return count_rec(s, s.left(a), level + 1, depth) + count_rec(s, s.right(a), level + 1, depth);
}

} // namespace

std::uint64_t cell_count(const TreeStore& s, const SpaceSpec& sp, NodeRef a, int precision) {
  sp.check_precision(precision);
  return count_rec(s, a, 0, sp.k * precision);
}

namespace {

struct SliceCtx {
  TreeStore& s;
  const SpaceSpec& sp;
  int precision;
  std::vector<int> fixed_bitpos; // per axis: -1 when free, else the coord
  std::vector<std::uint32_t> coords;
};

NodeRef extract_rec(SliceCtx& c, NodeRef n, int level) {
  if (c.s.is_white(n)) return c.s.white();
  if (level == c.sp.k * c.precision) return leafize(c.s, n);
  if (c.s.is_terminal(n)) return n; // black fills the remaining free structure
  int axis = c.sp.axis_at(level);
  int occ = level / c.sp.k;
  if (c.fixed_bitpos[axis] >= 0) {
    std::uint32_t bit = (c.coords[axis] >> (c.precision - 1 - occ)) & 1u;
    return extract_rec(c, bit ? c.s.right(n) : c.s.left(n), level + 1);
  }
  NodeRef l = extract_rec(c, c.s.left(n), level + 1);
  NodeRef r = extract_rec(c, c.s.right(n), level + 1);
  return c.s.is_valued(n) ? c.s.internal_val(l, r) : c.s.internal(l, r);
}

NodeRef embed_rec(SliceCtx& c, NodeRef slice, int level) {
  if (c.s.is_white(slice)) return c.s.white();
  if (level == c.sp.k * c.precision) return leafize(c.s, slice);
  int axis = c.sp.axis_at(level);
  int occ = level / c.sp.k;
  if (c.fixed_bitpos[axis] >= 0) {
    std::uint32_t bit = (c.coords[axis] >> (c.precision - 1 - occ)) & 1u;
    NodeRef sub = embed_rec(c, slice, level + 1);
    NodeRef l = bit ? c.s.white() : sub;
    NodeRef r = bit ? sub : c.s.white();
    return c.s.is_valued(slice) ? c.s.internal_val(l, r) : c.s.internal(l, r);
  }
  NodeRef l = embed_rec(c, c.s.left(slice), level + 1);
  NodeRef r = embed_rec(c, c.s.right(slice), level + 1);
  return c.s.is_valued(slice) ? c.s.internal_val(l, r) : c.s.internal(l, r);
}

SliceCtx make_ctx(TreeStore& s, const SpaceSpec& sp, const FixedAxes& fixed, int precision) {
  sp.check_precision(precision);
  SliceCtx c{s, sp, precision, std::vector<int>(sp.k, -1), std::vector<std::uint32_t>(sp.k, 0)};
  for (auto& [axis, coord] : fixed) {
    if (axis < 0 || axis >= sp.k) fail(Errc::AxisOutOfRange, "fixed axis out of range");
    if (c.fixed_bitpos[axis] >= 0) fail(Errc::AxisOutOfRange, "axis fixed twice");
    if (coord >= (std::uint32_t(1) << precision))
      fail(Errc::CoordOutOfRange, "fixed coordinate out of range");
    c.fixed_bitpos[axis] = 1;
    c.coords[axis] = coord;
  }
  return c;
}

} // namespace

NodeRef slice_extract(TreeStore& s, const SpaceSpec& sp, NodeRef a, const FixedAxes& fixed,
                      int precision, SpaceSpec* sub_space) {
  if (fixed.empty() || int(fixed.size()) >= sp.k)
    fail(Errc::AxisOutOfRange, "slice must fix between 1 and k-1 axes");
  SliceCtx c = make_ctx(s, sp, fixed, precision);
  if (sub_space) *sub_space = SpaceSpec(sp.k - int(fixed.size()), precision);
  return extract_rec(c, a, 0);
}

NodeRef slice_insert(TreeStore& s, const SpaceSpec& sp, NodeRef a, NodeRef slice,
                     const FixedAxes& fixed, int precision) {
  if (fixed.empty() || int(fixed.size()) >= sp.k)
    fail(Errc::AxisOutOfRange, "slice must fix between 1 and k-1 axes");
  SliceCtx c = make_ctx(s, sp, fixed, precision);
  NodeRef embedded = embed_rec(c, slice, 0);
  return set_union(s, sp, a, embedded, precision);
}

} // namespace kdt
