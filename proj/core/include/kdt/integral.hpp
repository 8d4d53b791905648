#pragma once

#include "kdt/setops.hpp"
#include "kdt/space.hpp"
#include "kdt/store.hpp"

namespace kdt {

// Shadow operators along one axis. The hypograph blackens every cell lying
// at or below a black cell of its line; the epigraph is the mirror image.
NodeRef hypograph(TreeStore& s, const SpaceSpec& sp, NodeRef t, int axis, int precision);
NodeRef epigraph(TreeStore& s, const SpaceSpec& sp, NodeRef t, int axis, int precision);

// Interior filling: intersection of hypograph and epigraph over every axis.
NodeRef fill(TreeStore& s, const SpaceSpec& sp, NodeRef t, int precision);

// Digital convex hull. In the plane the hull polygon of the cell centers is
// digitized exactly (cells whose center lies inside), which is idempotent.
// For k >= 3 the result is a conservative superset: the web of chords between
// the original cells, closed by fill.
NodeRef convex_hull(TreeStore& s, const SpaceSpec& sp, NodeRef t, int precision);

} // namespace kdt
