#pragma once

#include <cstdint>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "kdt/space.hpp"
#include "kdt/store.hpp"

namespace kdt {

// Exponent multi-index, one entry per axis; the order is the exponent sum.
using MultiIndex = std::vector<int>;

// All moments of order <= 3 over the integer cell grid, unit cell mass.
struct MomentList {
  int k = 0;
  std::map<MultiIndex, double> m;

  double at(const MultiIndex& idx) const;
  double mass() const { return at(MultiIndex(k, 0)); }
};

// Exact sums of cell-coordinate monomials over the black cells at the given
// precision; solid blocks contribute closed-form power sums over their
// coordinate ranges instead of per-cell enumeration.
MomentList moments(const TreeStore& s, const SpaceSpec& sp, NodeRef t, int precision);

// Moments about the gravity center: order 1 vanishes, orders 2 and 3 follow
// the binomial re-centering expansion.
MomentList center_moments(const MomentList& m);

// Gravity center, inertia eigen-decomposition and oriented third moments.
// Columns of v are the unit eigenvectors, so inertia = V diag(lambda) V^T;
// eigenvalues come out descending and each axis points toward its strongest
// eccentricity (projected third moment >= 0 after the sign fix).
struct EigenFrame {
  std::vector<double> xg;
  std::vector<std::vector<double>> v; // v[row][column]
  std::vector<double> lambda;
  std::vector<double> third;
  // Set when near-equal eigenvalues or a vanishing third moment leave the
  // axis choice unstable.
  bool degenerate = false;
};

EigenFrame eigen_frame(const MomentList& m);

// Rebuilds the set in its eigen reference frame, centered in the unit cube.
// With normalize the coordinates are further divided by the principal second
// moment (as a plain sum, no root), trading frame fit for scale invariance.
NodeRef eigen_tree(TreeStore& s, const SpaceSpec& sp, NodeRef t, const EigenFrame& frame,
                   int precision_in, int precision_out, bool normalize = false);

// Mass of the exclusive-or against every base entry, most similar first;
// equal masses keep the base order.
std::vector<std::pair<std::string, std::uint64_t>> similarity_rank(
    TreeStore& s, const SpaceSpec& sp, const std::vector<std::pair<std::string, NodeRef>>& base,
    NodeRef probe, int precision);

// One line per multi-index: exponents then the value, comma separated.
void write_moments_csv(std::ostream& out, const MomentList& m);

} // namespace kdt
