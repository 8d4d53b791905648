#include "kdt/inductive.hpp"

#include <cmath>

#include "kdt/build.hpp"

namespace kdt {

using boost::multiprecision::cpp_int;

BinRat BinRat::from_double(double v) {
  if (!std::isfinite(v)) fail(Errc::CoordOutOfRange, "non-finite coordinate");
  if (v == 0.0) return BinRat{};
  int e = 0;
  double m = std::frexp(v, &e); // v = m * 2^e, |m| in [0.5, 1)
  auto mant = std::int64_t(std::ldexp(m, 53));
  return BinRat{cpp_int(mant), e - 53}.normalized();
}

BinRat BinRat::normalized() const {
  if (num == 0) return BinRat{};
  BinRat out = *this;
  while ((out.num & 1) == 0) {
    out.num >>= 1;
    ++out.exp;
  }
  return out;
}

double BinRat::to_double() const { return std::ldexp(num.convert_to<double>(), exp); }

BinRat BinRat::operator+(const BinRat& o) const {
  int e = std::min(exp, o.exp);
  cpp_int a = num << (exp - e);
  cpp_int b = o.num << (o.exp - e);
  return BinRat{a + b, e}.normalized();
}

BinRat BinRat::operator-(const BinRat& o) const { return *this + BinRat{-o.num, o.exp}; }

int BinRat::cmp(const BinRat& o) const {
  BinRat d = *this - o;
  if (d.num < 0) return -1;
  return d.num == 0 ? 0 : 1;
}

BinRat BinRat::floor_to(int e) const {
  if (exp >= e) return *this;
  cpp_int q = num >> (e - exp); // arithmetic shift floors negatives too
  return BinRat{q, e}.normalized();
}

BinRat BinRat::ceil_to(int e) const {
  if (exp >= e) return *this;
  cpp_int q = -((-num) >> (e - exp));
  return BinRat{q, e}.normalized();
}

int BinRat::ceil_log2() const {
  if (num <= 0) fail(Errc::EmptyFrame, "log of a non-positive extent");
  cpp_int n = num;
  int bits = 0;
  bool pow2 = true;
  while (n > 1) {
    if ((n & 1) != 0) pow2 = false;
    n >>= 1;
    ++bits;
  }
  return exp + bits + (pow2 ? 0 : 1);
}

cpp_int BinRat::floor_shifted(int shift) const {
  int e = exp + shift;
  if (e >= 0) return num << e;
  return num >> (-e);
}

bool ILimit::contains(const std::vector<BinRat>& v) const {
  for (std::size_t a = 0; a < v.size(); ++a)
    if (v[a] < minspc[a] || maxspc[a] < v[a]) return false;
  return true;
}

namespace {

std::vector<BinRat> to_binrat(const std::vector<double>& v) {
  std::vector<BinRat> out;
  out.reserve(v.size());
  for (double x : v) out.push_back(BinRat::from_double(x));
  return out;
}

// Edge length exponent of a frame (frames are hypercubes with 2^e edges).
int frame_exp(const std::vector<BinRat>& mn, const std::vector<BinRat>& mx) {
  return (mx[0] - mn[0]).ceil_log2();
}

// Builds a fresh square frame around a bounding box: pick the smallest
// power-of-two edge covering the widest extent, snap the low corner down to a
// multiple of the half-edge, and widen once more if snapping uncovered the top.
void fresh_frame(std::vector<BinRat>& mn, std::vector<BinRat>& mx) {
  int k = int(mn.size());
  BinRat widest;
  for (int a = 0; a < k; ++a) {
    BinRat ext = mx[a] - mn[a];
    if (widest < ext) widest = ext;
  }
  if (widest.num == 0) fail(Errc::EmptyFrame, "cannot frame a degenerate box");
  int e = widest.ceil_log2();
  for (;;) {
    bool covered = true;
    std::vector<BinRat> lo(k);
    for (int a = 0; a < k; ++a) {
      lo[a] = mn[a].floor_to(e - 1);
      if (lo[a] + BinRat::pow2(e) < mx[a]) covered = false;
    }
    if (covered) {
      for (int a = 0; a < k; ++a) {
        mn[a] = lo[a];
        mx[a] = lo[a] + BinRat::pow2(e);
      }
      return;
    }
    ++e;
  }
}

// Doubles a frame toward a bounding box until it covers it. The old frame
// stays a dyadic block of the result.
void grow_frame(std::vector<BinRat>& mn, std::vector<BinRat>& mx, const std::vector<BinRat>& tmin,
                const std::vector<BinRat>& tmax) {
  int k = int(mn.size());
  for (;;) {
    bool covered = true;
    for (int a = 0; a < k; ++a)
      if (tmin[a] < mn[a] || mx[a] < tmax[a]) covered = false;
    if (covered) return;
    BinRat edge = mx[0] - mn[0];
    for (int a = 0; a < k; ++a) {
      if (tmin[a] < mn[a])
        mn[a] = mn[a] - edge; // grow left
      else
        mx[a] = mx[a] + edge; // grow right
    }
  }
}

Cell frame_cell(const ILimit& il, const std::vector<BinRat>& v) {
  int e = frame_exp(il.minspc, il.maxspc);
  int k = il.space.k;
  Cell cell(k);
  std::uint32_t last = il.space.cells_per_axis() - 1;
  for (int a = 0; a < k; ++a) {
    cpp_int c = (v[a] - il.minspc[a]).floor_shifted(il.space.r - e);
    if (c < 0) fail(Errc::CoordOutOfRange, "vector below frame");
    auto idx = c.convert_to<std::uint64_t>();
    cell[a] = idx > last ? last : std::uint32_t(idx);
  }
  return cell;
}

} // namespace

ILimit il_create(TreeStore& s, int k, int r, const std::vector<double>& v) {
  if (int(v.size()) != k) fail(Errc::ArityMismatch, "vector arity differs from dimension");
  ILimit il;
  il.space = SpaceSpec(k, r);
  il.minspc = il.maxspc = to_binrat(v);
  il.root = s.black();
  return il;
}

NodeRef il_reframe(TreeStore& s, const ILimit& il, const SpaceSpec& nspace,
                   const std::vector<BinRat>& nmin, const std::vector<BinRat>& nmax) {
  if (il.minspc == nmin && il.maxspc == nmax && il.space.r == nspace.r) return il.root;
  int k = il.space.k;
  int eo = frame_exp(il.minspc, il.maxspc);
  int en = frame_exp(nmin, nmax);
  std::uint32_t ncells = nspace.cells_per_axis();
  NodeRef out = s.white();
  for_each_block(s, il.space, il.root, il.space.r, [&](const Cell& lo, int level, NodeRef leaf) {
    if (s.is_white(leaf)) return;
    Cell nlo(k), nhi(k);
    for (int a = 0; a < k; ++a) {
      std::uint32_t ext = block_extent(il.space, level, a);
      // world = old_min + cell * 2^(eo - r); new cell = (world - new_min) * 2^(rn - en)
      BinRat wlo = il.minspc[a] + BinRat{cpp_int(lo[a]), eo - il.space.r};
      BinRat whi = il.minspc[a] + BinRat{cpp_int(lo[a] + ext), eo - il.space.r};
      cpp_int clo = (wlo - nmin[a]).floor_shifted(nspace.r - en);
      cpp_int chi = -((nmin[a] - whi).floor_shifted(nspace.r - en)); // ceil
      if (clo < 0) clo = 0;
      if (chi > ncells) chi = ncells;
      if (chi <= clo) return;
      nlo[a] = clo.convert_to<std::uint32_t>();
      nhi[a] = chi.convert_to<std::uint32_t>();
    }
    out = set_union(s, nspace, out, box_tree(s, nspace, nlo, nhi), nspace.r);
  });
  return out;
}

void il_add(TreeStore& s, ILimit& il, const std::vector<double>& v) {
  if (int(v.size()) != il.space.k) fail(Errc::ArityMismatch, "vector arity differs from dimension");
  std::vector<BinRat> p = to_binrat(v);
  if (il.degenerate()) {
    if (p == il.minspc) return; // the single point again
    std::vector<BinRat> mn = il.minspc, mx = il.maxspc;
    for (int a = 0; a < il.space.k; ++a) {
      if (p[a] < mn[a]) mn[a] = p[a];
      if (mx[a] < p[a]) mx[a] = p[a];
    }
    fresh_frame(mn, mx);
    std::vector<BinRat> old_pt = il.minspc;
    il.minspc = mn;
    il.maxspc = mx;
    il.root = s.white();
    il.root = add_cell(s, il.space, il.root, frame_cell(il, old_pt));
    il.root = add_cell(s, il.space, il.root, frame_cell(il, p));
    return;
  }
  if (!il.contains(p)) {
    std::vector<BinRat> mn = il.minspc, mx = il.maxspc;
    grow_frame(mn, mx, p, p);
    il.root = il_reframe(s, il, il.space, mn, mx);
    il.minspc = mn;
    il.maxspc = mx;
  }
  il.root = add_cell(s, il.space, il.root, frame_cell(il, p));
}

ILimit il_boolean(TreeStore& s, const ILimit& a, const ILimit& b, IlOp op, int precision) {
  if (a.space.k != b.space.k) fail(Errc::ArityMismatch, "dimension mismatch");
  if (a.degenerate() || b.degenerate())
    fail(Errc::EmptyFrame, "boolean needs non-degenerate frames");
  std::vector<BinRat> mn = a.minspc, mx = a.maxspc;
  grow_frame(mn, mx, b.minspc, b.maxspc); // common frame, exact for a
  ILimit out;
  out.space = SpaceSpec(a.space.k, std::max(a.space.r, b.space.r));
  out.minspc = mn;
  out.maxspc = mx;
  NodeRef ra = il_reframe(s, a, out.space, mn, mx);
  NodeRef rb = il_reframe(s, b, out.space, mn, mx);
  switch (op) {
    case IlOp::Union: out.root = set_union(s, out.space, ra, rb, precision); break;
    case IlOp::Intersect: out.root = set_intersect(s, out.space, ra, rb, precision); break;
    case IlOp::Diff: out.root = set_diff(s, out.space, ra, rb, precision); break;
    case IlOp::Exclude: out.root = set_exclude(s, out.space, ra, rb, precision); break;
  }
  return out;
}

} // namespace kdt
