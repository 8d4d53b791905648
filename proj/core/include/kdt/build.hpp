#pragma once

#include <cstdint>
#include <vector>

#include "kdt/space.hpp"
#include "kdt/store.hpp"

namespace kdt {

using Cell = std::vector<std::uint32_t>;

// Quantizes a normalized coordinate in [0,1] to a cell index at precision r.
// The upper bound 1.0 falls in the last cell.
std::uint32_t quantize(double v, int r);

// Adds one cell at full resolution. With a value, builds/overwrites a valued
// leaf (re-adding a point replaces its value); without one, black regions
// already covering the cell are left alone.
NodeRef add_cell(TreeStore& s, const SpaceSpec& sp, NodeRef root, const Cell& cell);
NodeRef add_cell(TreeStore& s, const SpaceSpec& sp, NodeRef root, const Cell& cell, double value);

// Same, from normalized real coordinates.
NodeRef add_vector(TreeStore& s, const SpaceSpec& sp, NodeRef root, const std::vector<double>& v);
NodeRef add_vector(TreeStore& s, const SpaceSpec& sp, NodeRef root, const std::vector<double>& v,
                   double value);

// Tree of an axis-aligned box of cells, bounds [lo, hi) at full resolution.
NodeRef box_tree(TreeStore& s, const SpaceSpec& sp, const Cell& lo, const Cell& hi);

// Color of one cell at the given precision. Nodes still internal at the
// precision depth count as black (upper hull); *value receives the functional
// value if the probed spot is a valued leaf or covers one.
bool probe(const TreeStore& s, const SpaceSpec& sp, NodeRef root, const Cell& cell, int precision,
           double* value = nullptr);

// Cell extent of a block reached at `level` along one axis, in r-cells.
inline std::uint32_t block_extent(const SpaceSpec& sp, int level, int axis) {
  int splits = level / sp.k + (level % sp.k > axis ? 1 : 0);
  return sp.cells_per_axis() >> splits;
}

// Calls fn(lo, level, node) for every leaf reached at the given precision,
// where lo is the block's low corner in precision-r cells; per-axis extents
// follow from the level. Nodes internal at the depth limit are passed as they
// are (callers wanting the upper hull treat them as black).
template <class Fn>
void for_each_block(const TreeStore& s, const SpaceSpec& sp, NodeRef n, int precision, Fn&& fn) {
  Cell lo(sp.k, 0);
  int depth = sp.k * precision;
  auto rec = [&](auto&& self, NodeRef node, int level) -> void {
    if (s.is_terminal(node) || level == depth) {
      fn(static_cast<const Cell&>(lo), level, node);
      return;
    }
    int axis = sp.axis_at(level);
    std::uint32_t half = block_extent(sp, level, axis) / 2;
    self(self, s.left(node), level + 1);
    lo[axis] += half;
    self(self, s.right(node), level + 1);
    lo[axis] -= half;
  };
  rec(rec, n, 0);
}

} // namespace kdt
