#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "kdt/space.hpp"
#include "kdt/store.hpp"

namespace kdt {

// All set operators work at a precision p <= r: operands are first clipped to
// depth k*p, and a node still internal at that depth counts as black (upper
// hull, the conservative superset). Valued trees keep the maximum functional
// value on common parts; complement always drops values.

NodeRef assert_at(TreeStore& s, const SpaceSpec& sp, NodeRef a, int precision);
NodeRef complement(TreeStore& s, const SpaceSpec& sp, NodeRef a, int precision);
NodeRef set_union(TreeStore& s, const SpaceSpec& sp, NodeRef a, NodeRef b, int precision);
NodeRef set_intersect(TreeStore& s, const SpaceSpec& sp, NodeRef a, NodeRef b, int precision);
NodeRef set_diff(TreeStore& s, const SpaceSpec& sp, NodeRef a, NodeRef b, int precision);
NodeRef set_exclude(TreeStore& s, const SpaceSpec& sp, NodeRef a, NodeRef b, int precision);

// Number of black cells at the given precision (upper hull).
std::uint64_t cell_count(const TreeStore& s, const SpaceSpec& sp, NodeRef a, int precision);

// Hyperplane slices. Fixed axes are (axis, cell) pairs with cells expressed at
// the working precision; the slice lives in the sub-space spanned by the free
// axes, kept in increasing axis order, with resolution equal to `precision`.
using FixedAxes = std::vector<std::pair<int, std::uint32_t>>;

NodeRef slice_extract(TreeStore& s, const SpaceSpec& sp, NodeRef a, const FixedAxes& fixed,
                      int precision, SpaceSpec* sub_space = nullptr);

// Unions the slice (a sub-space tree) back into `a` at the given coordinates.
NodeRef slice_insert(TreeStore& s, const SpaceSpec& sp, NodeRef a, NodeRef slice,
                     const FixedAxes& fixed, int precision);

} // namespace kdt
