#include "kdt/integral.hpp"

#include <cmath>
#include <unordered_map>
#include <vector>

#include "kdt/build.hpp"
#include "kdt/raster.hpp"

namespace kdt {

namespace {

struct ShadowCtx {
  TreeStore& s;
  const SpaceSpec& sp;
  int gen;   // generation axis
  int depth; // k * precision
  bool down; // true: hypograph (shade the lower half), false: epigraph
};

// Blackens every line of `a` whose matching line in `b` holds any black cell.
// `a` and `b` are same-shape blocks of the same cross-section; every cell of
// one is past every cell of the other along the generation axis.
NodeRef shade(ShadowCtx& c, NodeRef a, NodeRef b, int level) {
  if (c.s.is_white(b)) return a;
  if (c.s.tag(a) == Tag::Black) return a;
  if (level == c.depth) return c.s.black(); // one cell per line here
  if (c.s.is_terminal(b) && c.s.is_black_leaf(b) && c.s.is_white(a)) {
    // b fills the block: every line gets shadowed
    return c.s.black();
  }
  NodeRef al, ar;
  if (c.sp.axis_at(level) == c.gen) {
    // both halves of b shadow both halves of a (lines are shared)
    al = shade(c, shade(c, c.s.left(a), c.s.left(b), level + 1), c.s.right(b), level + 1);
    ar = shade(c, shade(c, c.s.right(a), c.s.left(b), level + 1), c.s.right(b), level + 1);
  } else {
    al = shade(c, c.s.left(a), c.s.left(b), level + 1);
    ar = shade(c, c.s.right(a), c.s.right(b), level + 1);
  }
  return c.s.internal(al, ar);
}

NodeRef shadow_rec(ShadowCtx& c, NodeRef n, int level) {
  if (c.s.is_white(n)) return n;
  if (c.s.is_terminal(n)) return c.s.black(); // full column is its own shadow
  if (level == c.depth) return c.s.black();
  NodeRef l = shadow_rec(c, c.s.left(n), level + 1);
  NodeRef r = shadow_rec(c, c.s.right(n), level + 1);
  if (c.sp.axis_at(level) == c.gen) {
    if (c.down)
      l = shade(c, l, r, level + 1);
    else
      r = shade(c, r, l, level + 1);
  }
  return c.s.internal(l, r);
}

NodeRef shadow(TreeStore& s, const SpaceSpec& sp, NodeRef t, int axis, int precision, bool down) {
  sp.check_precision(precision);
  if (axis < 0 || axis >= sp.k) fail(Errc::AxisOutOfRange, "axis out of range");
  ShadowCtx c{s, sp, axis, sp.k * precision, down};
  return shadow_rec(c, assert_at(s, sp, t, precision), 0);
}

} // namespace

NodeRef hypograph(TreeStore& s, const SpaceSpec& sp, NodeRef t, int axis, int precision) {
  return shadow(s, sp, t, axis, precision, true);
}

NodeRef epigraph(TreeStore& s, const SpaceSpec& sp, NodeRef t, int axis, int precision) {
  return shadow(s, sp, t, axis, precision, false);
}

NodeRef fill(TreeStore& s, const SpaceSpec& sp, NodeRef t, int precision) {
  NodeRef out = s.black();
  for (int a = 0; a < sp.k; ++a) {
    out = set_intersect(s, sp, out, hypograph(s, sp, t, a, precision), precision);
    out = set_intersect(s, sp, out, epigraph(s, sp, t, a, precision), precision);
  }
  return out;
}

namespace {

// ---- convex hull ----------------------------------------------------------

using Pt = std::vector<double>;

// Black cell centers at the working precision, in p-cell coordinates.
std::vector<Pt> cell_centers(TreeStore& s, const SpaceSpec& sp, NodeRef t, int p) {
  std::vector<Pt> out;
  SpaceSpec wp(sp.k, p);
  for_each_block(s, wp, t, p, [&](const Cell& lo, int level, NodeRef leaf) {
    if (s.is_white(leaf)) return;
    Cell ext(sp.k);
    for (int a = 0; a < sp.k; ++a) ext[a] = block_extent(wp, level, a);
    Cell it = lo;
    for (;;) {
      Pt c(sp.k);
      for (int a = 0; a < sp.k; ++a) c[a] = it[a] + 0.5;
      out.push_back(std::move(c));
      int a = 0;
      for (; a < sp.k; ++a) {
        if (++it[a] < lo[a] + ext[a]) break;
        it[a] = lo[a];
      }
      if (a == sp.k) break;
    }
  });
  return out;
}

double cross2(const Pt& o, const Pt& a, const Pt& b) {
  return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
}

// Monotone-chain merge of extreme points; counterclockwise polygon.
std::vector<Pt> hull_polygon(std::vector<Pt> pts) {
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) return pts;
  std::vector<Pt> h;
  for (auto& p : pts) {
    while (h.size() >= 2 && cross2(h[h.size() - 2], h.back(), p) <= 0) h.pop_back();
    h.push_back(p);
  }
  std::size_t lower = h.size() + 1;
  for (auto it = pts.rbegin(); it != pts.rend(); ++it) {
    while (h.size() >= lower && cross2(h[h.size() - 2], h.back(), *it) <= 0) h.pop_back();
    h.push_back(*it);
  }
  h.pop_back();
  return h;
}

bool in_polygon(const std::vector<Pt>& h, double x, double y) {
  Pt q{x, y};
  if (h.size() >= 3) {
    for (std::size_t j = 0; j < h.size(); ++j)
      if (cross2(h[j], h[(j + 1) % h.size()], q) < -1e-9) return false;
    return true;
  }
  if (h.size() == 2) {
    const Pt &a = h[0], &b = h[1];
    double cr = cross2(a, b, q);
    double dot = (x - a[0]) * (b[0] - a[0]) + (y - a[1]) * (b[1] - a[1]);
    double len2 = (b[0] - a[0]) * (b[0] - a[0]) + (b[1] - a[1]) * (b[1] - a[1]);
    return std::abs(cr) < 1e-9 && dot >= -1e-9 && dot <= len2 + 1e-9;
  }
  return std::abs(x - h[0][0]) < 1e-9 && std::abs(y - h[0][1]) < 1e-9;
}

// Plane hull: merge the extreme points, then keep exactly the cells whose
// center falls inside the merged polygon. Reapplying changes nothing, since
// the included centers span the same polygon again.
NodeRef hull_2d(TreeStore& s, const SpaceSpec& sp, NodeRef t, int p) {
  std::vector<Pt> pts = cell_centers(s, sp, t, p);
  if (pts.empty()) return s.white();
  std::vector<Pt> h = hull_polygon(std::move(pts));
  SpaceSpec wp(2, p);
  Grid g;
  g.space = wp;
  g.precision = p;
  std::uint32_t side = std::uint32_t(1) << p;
  g.bits.assign(std::size_t(side) * side, 0);
  for (std::uint32_t y = 0; y < side; ++y)
    for (std::uint32_t x = 0; x < side; ++x)
      if (in_polygon(h, x + 0.5, y + 0.5)) g.bits[x + (std::size_t(y) << p)] = 1;
  NodeRef out = build_from_grid(s, g);
  return set_union(s, sp, out, assert_at(s, sp, t, p), p); // superset by force
}

// ---- chord web for k >= 3 --------------------------------------------------

struct Seg {
  Pt a, b;
};

bool seg_meets_block(const Seg& g, const Pt& bmin, const Pt& bmax) {
  double t0 = 0.0, t1 = 1.0;
  for (std::size_t a = 0; a < g.a.size(); ++a) {
    double d = g.b[a] - g.a[a];
    if (d == 0.0) {
      if (g.a[a] < bmin[a] || g.a[a] > bmax[a]) return false;
      continue;
    }
    double ta = (bmin[a] - g.a[a]) / d, tb = (bmax[a] - g.a[a]) / d;
    if (ta > tb) std::swap(ta, tb);
    t0 = std::max(t0, ta);
    t1 = std::min(t1, tb);
    if (t0 > t1) return false;
  }
  return true;
}

// Blackens every cell whose closed block the segment touches.
NodeRef digitize_seg(TreeStore& s, const SpaceSpec& sp, NodeRef n, const Seg& g, Pt& bmin,
                     Pt& bmax, int level, int depth) {
  if (s.tag(n) == Tag::Black) return n;
  if (!seg_meets_block(g, bmin, bmax)) return n;
  if (level == depth) return s.black();
  int axis = sp.axis_at(level);
  double mid = (bmin[axis] + bmax[axis]) / 2.0;
  double keep = bmax[axis];
  bmax[axis] = mid;
  NodeRef l = digitize_seg(s, sp, s.left(n), g, bmin, bmax, level + 1, depth);
  bmax[axis] = keep;
  keep = bmin[axis];
  bmin[axis] = mid;
  NodeRef r = digitize_seg(s, sp, s.right(n), g, bmin, bmax, level + 1, depth);
  bmin[axis] = keep;
  return s.internal(l, r);
}

// Conservative hull for k >= 3: web of chords between every pair of original
// cells, closed by the per-axis fill. One-cell-thick chords make the web a
// superset of the hull boundary; fill closes the interior.
NodeRef hull_web(TreeStore& s, const SpaceSpec& sp, NodeRef t, int p) {
  std::vector<Pt> pts = cell_centers(s, sp, t, p);
  if (pts.empty()) return s.white();
  NodeRef web = assert_at(s, sp, t, p);
  int depth = sp.k * p;
  Pt bmin(sp.k, 0.0), bmax(sp.k, double(std::uint32_t(1) << p));
  for (std::size_t i = 0; i < pts.size(); ++i)
    for (std::size_t j = i + 1; j < pts.size(); ++j) {
      Seg g{pts[i], pts[j]};
      Pt m0 = bmin, m1 = bmax;
      web = digitize_seg(s, sp, web, g, m0, m1, 0, depth);
    }
  return fill(s, sp, web, p);
}

} // namespace

NodeRef convex_hull(TreeStore& s, const SpaceSpec& sp, NodeRef t, int precision) {
  sp.check_precision(precision);
  if (sp.k == 1) {
    // the hull of a 1-d set is the span between its extremes
    return fill(s, sp, t, precision);
  }
  if (sp.k == 2) return hull_2d(s, sp, t, precision);
  return hull_web(s, sp, t, precision);
}

} // namespace kdt
