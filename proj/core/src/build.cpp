#include "kdt/build.hpp"

#include <cmath>

namespace kdt {

std::uint32_t quantize(double v, int r) {
  if (!(v >= 0.0 && v <= 1.0)) fail(Errc::CoordOutOfRange, "coordinate outside [0,1]");
  std::uint32_t cells = std::uint32_t(1) << r;
  double scaled = std::floor(v * double(cells));
  auto c = std::uint32_t(scaled);
  if (c >= cells) c = cells - 1; // v == 1.0 lands in the last cell
  return c;
}

namespace {

NodeRef add_rec(TreeStore& s, const SpaceSpec& sp, NodeRef n, const Cell& cell, int level,
                bool valued, double value) {
  if (level == sp.depth()) {
    return valued ? s.black_val(value) : s.black();
  }
  if (s.tag(n) == Tag::Black && !valued) return n; // already covered
  int axis = sp.axis_at(level);
  int occ = level / sp.k;
  std::uint32_t bit = (cell[axis] >> (sp.r - 1 - occ)) & 1u;
  NodeRef l = s.left(n);
  NodeRef r = s.right(n);
  if (bit == 0)
    l = add_rec(s, sp, l, cell, level + 1, valued, value);
  else
    r = add_rec(s, sp, r, cell, level + 1, valued, value);
  return valued ? s.internal_val(l, r) : s.internal(l, r);
}

void check_cell(const SpaceSpec& sp, const Cell& cell) {
  if (int(cell.size()) != sp.k) fail(Errc::ArityMismatch, "cell arity differs from dimension");
  for (auto c : cell)
    if (c >= sp.cells_per_axis()) fail(Errc::CoordOutOfRange, "cell index out of range");
}

} // namespace

NodeRef add_cell(TreeStore& s, const SpaceSpec& sp, NodeRef root, const Cell& cell) {
  check_cell(sp, cell);
  return add_rec(s, sp, root, cell, 0, false, 0.0);
}

NodeRef add_cell(TreeStore& s, const SpaceSpec& sp, NodeRef root, const Cell& cell, double value) {
  check_cell(sp, cell);
  return add_rec(s, sp, root, cell, 0, true, value);
}

NodeRef add_vector(TreeStore& s, const SpaceSpec& sp, NodeRef root, const std::vector<double>& v) {
  if (int(v.size()) != sp.k) fail(Errc::ArityMismatch, "vector arity differs from dimension");
  Cell cell(sp.k);
  for (int i = 0; i < sp.k; ++i) cell[i] = quantize(v[i], sp.r);
  return add_cell(s, sp, root, cell);
}

NodeRef add_vector(TreeStore& s, const SpaceSpec& sp, NodeRef root, const std::vector<double>& v,
                   double value) {
  if (int(v.size()) != sp.k) fail(Errc::ArityMismatch, "vector arity differs from dimension");
  Cell cell(sp.k);
  for (int i = 0; i < sp.k; ++i) cell[i] = quantize(v[i], sp.r);
  return add_cell(s, sp, root, cell, value);
}

namespace {

NodeRef box_rec(TreeStore& s, const SpaceSpec& sp, const Cell& lo, const Cell& hi, Cell& bmin,
                Cell& bmax, int level) {
  bool empty = false, full = true;
  for (int a = 0; a < sp.k; ++a) {
    if (bmin[a] >= hi[a] || bmax[a] <= lo[a]) empty = true;
    if (bmin[a] < lo[a] || bmax[a] > hi[a]) full = false;
  }
  if (empty) return s.white();
  if (full || level == sp.depth()) return s.black();
  int axis = sp.axis_at(level);
  std::uint32_t mid = (bmin[axis] + bmax[axis]) / 2;
  std::uint32_t keep = bmax[axis];
  bmax[axis] = mid;
  NodeRef l = box_rec(s, sp, lo, hi, bmin, bmax, level + 1);
  bmax[axis] = keep;
  keep = bmin[axis];
  bmin[axis] = mid;
  NodeRef r = box_rec(s, sp, lo, hi, bmin, bmax, level + 1);
  bmin[axis] = keep;
  return s.internal(l, r);
}

} // namespace

NodeRef box_tree(TreeStore& s, const SpaceSpec& sp, const Cell& lo, const Cell& hi) {
  if (int(lo.size()) != sp.k || int(hi.size()) != sp.k)
    fail(Errc::ArityMismatch, "box arity differs from dimension");
  for (int a = 0; a < sp.k; ++a)
    if (hi[a] > sp.cells_per_axis()) fail(Errc::CoordOutOfRange, "box exceeds space");
  Cell bmin(sp.k, 0), bmax(sp.k, sp.cells_per_axis());
  return box_rec(s, sp, lo, hi, bmin, bmax, 0);
}

bool probe(const TreeStore& s, const SpaceSpec& sp, NodeRef root, const Cell& cell, int precision,
           double* value) {
  sp.check_precision(precision);
  if (int(cell.size()) != sp.k) fail(Errc::ArityMismatch, "cell arity differs from dimension");
  NodeRef n = root;
  int depth = sp.k * precision;
  for (int level = 0; level < depth && !s.is_terminal(n); ++level) {
    int axis = sp.axis_at(level);
    int occ = level / sp.k;
    std::uint32_t bit = (cell[axis] >> (precision - 1 - occ)) & 1u;
    n = bit ? s.right(n) : s.left(n);
  }
  bool black = !s.is_white(n); // internal at depth counts as black
  if (value) *value = s.value(n);
  return black;
}

} // namespace kdt
