#pragma once

#include <vector>

#include "kdt/space.hpp"
#include "kdt/store.hpp"
#include "kdt/topo.hpp"

namespace kdt {

// Value extremes plus the balanced-recursion center and dispersion of a
// pyramid: each internal node averages its sons' centers and combines the
// dispersions with the squared half-gap, and the root dispersion is the
// square root of the accumulated variance term. White branches are skipped.
struct FunctionalStats {
  double fmin = 0;
  double fmax = 0;
  double center = 0;
  double dispersion = 0;
};

// Collapses one axis of a (k+1)-tree into functional values: descending the
// chosen axis halves the value interval, and at the bottom each black node
// becomes a leaf valued at its interval midpoint. Columns holding several
// black runs resolve by max-union, so a solid column yields the midpoint of
// its topmost value cell. The result lives in the k-dimensional sub-space of
// the remaining axes (returned through support_space when given).
NodeRef tree_to_pyramid(TreeStore& s, const SpaceSpec& sp, NodeRef t, int functional_axis,
                        SpaceSpec* support_space = nullptr);

// Inverse sampling: every support cell contributes one point whose value,
// quantized to floor(v * 2^r), becomes the coordinate on a new first axis.
// Values must lie in [0, 1].
NodeRef pyramid_to_tree(TreeStore& s, const SpaceSpec& sp, NodeRef p,
                        SpaceSpec* out_space = nullptr);

// support drops the functional values; colorize paints every black leaf with
// one value.
NodeRef support(TreeStore& s, const SpaceSpec& sp, NodeRef p);
NodeRef colorize(TreeStore& s, const SpaceSpec& sp, NodeRef t, double value);

FunctionalStats stats(TreeStore& s, const SpaceSpec& sp, NodeRef p);

// v -> (v - center) / dispersion on every leaf; the internal maxima refresh
// on the way back up.
NodeRef scale(TreeStore& s, const SpaceSpec& sp, NodeRef p, double center, double dispersion);

// Iterated majority diffusion: each pass, every unlabeled cell touching the
// labeled set takes the winning value of its labeled neighbors, until the
// whole frame is labeled. The vote scans the neighbor list in canonical
// offset order and the first value reaching the maximal count wins.
NodeRef pyramid_extend(TreeStore& s, const SpaceSpec& sp, NodeRef p, Metric metric);

// One simultaneous voting pass over the labeled cells; the cell's own label
// heads its neighbor list, so it wins exact ties.
NodeRef pyramid_median_filter(TreeStore& s, const SpaceSpec& sp, NodeRef p, Metric metric);

// Two-point blends between son values. The axis form weights fg by the
// g-side ratio (x - xg)/(xd - xg), so the blend crosses from fd at x = xg to
// fg at x = xd; the barycentric form uses the absolute projections onto the
// chord between the centers with the same pairing.
double interpolate(double x, double xg, double xd, double fg, double fd);
double barycentric_interpolate(const std::vector<double>& m, const std::vector<double>& cg,
                               const std::vector<double>& cd, double fg, double fd);

// Support cells with their functional values; plain black counts as 1.
std::vector<std::pair<Cell, double>> labeled_cells(const TreeStore& s, const SpaceSpec& sp,
                                                   NodeRef p, int precision);

} // namespace kdt
