#include "kdt/raster.hpp"

namespace kdt {

namespace {

void check_guard(const SpaceSpec& sp, int precision) {
  sp.check_precision(precision);
  std::uint64_t cells = std::uint64_t(1) << (std::uint64_t(sp.k) * precision);
  if (cells > kGridGuard) fail(Errc::GridTooLarge, "grid exceeds the dense-raster guard");
}

template <class Paint>
void fill_rec(const TreeStore& s, const SpaceSpec& sp, NodeRef n, int precision, Cell& lo,
              Cell& hi, int level, Paint&& paint) {
  if (s.is_white(n)) return;
  if (s.is_terminal(n) || level == sp.k * precision) {
    Cell c = lo;
    // enumerate the block
    for (;;) {
      paint(c, n);
      int a = 0;
      for (; a < sp.k; ++a) {
        if (++c[a] < hi[a]) break;
        c[a] = lo[a];
      }
      if (a == sp.k) break;
    }
    return;
  }
  int axis = sp.axis_at(level);
  std::uint32_t mid = (lo[axis] + hi[axis]) / 2;
  std::uint32_t keep = hi[axis];
  hi[axis] = mid;
  fill_rec(s, sp, s.left(n), precision, lo, hi, level + 1, paint);
  hi[axis] = keep;
  keep = lo[axis];
  lo[axis] = mid;
  fill_rec(s, sp, s.right(n), precision, lo, hi, level + 1, paint);
  lo[axis] = keep;
}

} // namespace

Grid rasterize(const TreeStore& s, const SpaceSpec& sp, NodeRef root, int precision) {
  check_guard(sp, precision);
  Grid g;
  g.space = sp;
  g.precision = precision;
  g.bits.assign(std::size_t(1) << (std::size_t(sp.k) * precision), 0);
  Cell lo(sp.k, 0), hi(sp.k, std::uint32_t(1) << precision);
  fill_rec(s, sp, root, precision, lo, hi, 0, [&](const Cell& c, NodeRef) {
    g.bits[g.index(c)] = 1;
  });
  return g;
}

ValueGrid rasterize_values(const TreeStore& s, const SpaceSpec& sp, NodeRef root, int precision) {
  check_guard(sp, precision);
  ValueGrid g;
  g.space = sp;
  g.precision = precision;
  std::size_t n = std::size_t(1) << (std::size_t(sp.k) * precision);
  g.bits.assign(n, 0);
  g.values.assign(n, 0.0);
  Grid indexer{sp, precision, {}};
  Cell lo(sp.k, 0), hi(sp.k, std::uint32_t(1) << precision);
  fill_rec(s, sp, root, precision, lo, hi, 0, [&](const Cell& c, NodeRef leaf) {
    std::uint64_t idx = indexer.index(c);
    g.bits[idx] = 1;
    g.values[idx] = s.value(leaf); // node max for blocks cut at the depth limit
  });
  return g;
}

namespace {

template <class Leaf>
NodeRef grid_rec(TreeStore& s, const SpaceSpec& sp, int precision, Cell& lo, Cell& hi, int level,
                 bool valued, Leaf&& leaf_at) {
  if (level == sp.k * precision) {
    return leaf_at(lo);
  }
  int axis = sp.axis_at(level);
  std::uint32_t mid = (lo[axis] + hi[axis]) / 2;
  std::uint32_t keep = hi[axis];
  hi[axis] = mid;
  NodeRef l = grid_rec(s, sp, precision, lo, hi, level + 1, valued, leaf_at);
  hi[axis] = keep;
  keep = lo[axis];
  lo[axis] = mid;
  NodeRef r = grid_rec(s, sp, precision, lo, hi, level + 1, valued, leaf_at);
  lo[axis] = keep;
  return valued ? s.internal_val(l, r) : s.internal(l, r);
}

} // namespace

NodeRef build_from_grid(TreeStore& s, const Grid& g) {
  check_guard(g.space, g.precision);
  Cell lo(g.space.k, 0), hi(g.space.k, std::uint32_t(1) << g.precision);
  return grid_rec(s, g.space, g.precision, lo, hi, 0, false, [&](const Cell& c) {
    return g.bits[g.index(c)] ? s.black() : s.white();
  });
}

NodeRef build_from_grid(TreeStore& s, const ValueGrid& g) {
  check_guard(g.space, g.precision);
  Grid indexer{g.space, g.precision, {}};
  Cell lo(g.space.k, 0), hi(g.space.k, std::uint32_t(1) << g.precision);
  return grid_rec(s, g.space, g.precision, lo, hi, 0, true, [&](const Cell& c) {
    std::uint64_t idx = indexer.index(c);
    return g.bits[idx] ? s.black_val(g.values[idx]) : s.white();
  });
}

} // namespace kdt
