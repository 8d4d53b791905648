#include "kdt/geom.hpp"

#include <algorithm>
#include <cmath>

#include "kdt/integral.hpp"

namespace kdt {

namespace {

constexpr double kEps = 1e-12;

} // namespace

// ---- matrices --------------------------------------------------------------

HomMatrix HomMatrix::identity(int k) {
  HomMatrix out;
  out.k = k;
  out.m.assign(std::size_t(k + 1) * (k + 1), 0.0);
  for (int i = 0; i <= k; ++i) out.at(i, i) = 1.0;
  return out;
}

HomMatrix mat_homothety(const std::vector<double>& rates, bool contrary) {
  HomMatrix out = HomMatrix::identity(int(rates.size()));
  for (int a = 0; a < out.k; ++a) {
    if (rates[a] == 0.0) fail(Errc::SingularElementary, "zero homothety rate");
    out.at(a, a) = contrary ? 1.0 / rates[a] : rates[a];
  }
  return out;
}

HomMatrix mat_translation(const std::vector<double>& moves, bool contrary) {
  HomMatrix out = HomMatrix::identity(int(moves.size()));
  for (int a = 0; a < out.k; ++a) out.at(out.k, a) = contrary ? -moves[a] : moves[a];
  return out;
}

HomMatrix mat_rotation(int k, int axis_i, int axis_j, double angle, bool contrary) {
  if (axis_i < 0 || axis_i >= k || axis_j < 0 || axis_j >= k || axis_i == axis_j)
    fail(Errc::AxisOutOfRange, "bad rotation plane");
  if (contrary) angle = -angle;
  HomMatrix out = HomMatrix::identity(k);
  double c = std::cos(angle), sn = std::sin(angle);
  out.at(axis_i, axis_i) = c;
  out.at(axis_i, axis_j) = sn;
  out.at(axis_j, axis_i) = -sn;
  out.at(axis_j, axis_j) = c;
  return out;
}

HomMatrix mat_perspective(const std::vector<double>& coeffs, bool contrary) {
  HomMatrix out = HomMatrix::identity(int(coeffs.size()));
  for (int a = 0; a < out.k; ++a) out.at(a, out.k) = contrary ? -coeffs[a] : coeffs[a];
  return out;
}

HomMatrix mat_concat(const HomMatrix& a, const HomMatrix& b) {
  if (a.k != b.k) fail(Errc::ArityMismatch, "matrix dimension mismatch");
  HomMatrix out = HomMatrix::identity(a.k);
  int n = a.k + 1;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double acc = 0.0;
      for (int t = 0; t < n; ++t) acc += a.at(i, t) * b.at(t, j);
      out.at(i, j) = acc;
    }
  return out;
}

HomMatrix mat_transpose(const HomMatrix& a) {
  HomMatrix out = a;
  for (int i = 0; i <= a.k; ++i)
    for (int j = 0; j <= a.k; ++j) out.at(i, j) = a.at(j, i);
  return out;
}

HomMatrix mat_inverse(const HomMatrix& a) {
  int n = a.k + 1;
  HomMatrix w = a, out = HomMatrix::identity(a.k);
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int i = col + 1; i < n; ++i)
      if (std::abs(w.at(i, col)) > std::abs(w.at(piv, col))) piv = i;
    if (std::abs(w.at(piv, col)) < kEps) fail(Errc::SingularMatrix, "singular matrix");
    if (piv != col)
      for (int j = 0; j < n; ++j) {
        std::swap(w.m[std::size_t(piv) * n + j], w.m[std::size_t(col) * n + j]);
        std::swap(out.m[std::size_t(piv) * n + j], out.m[std::size_t(col) * n + j]);
      }
    double d = w.at(col, col);
    for (int j = 0; j < n; ++j) {
      w.at(col, j) /= d;
      out.at(col, j) /= d;
    }
    for (int i = 0; i < n; ++i) {
      if (i == col) continue;
      double f = w.at(i, col);
      if (f == 0.0) continue;
      for (int j = 0; j < n; ++j) {
        w.at(i, j) -= f * w.at(col, j);
        out.at(i, j) -= f * out.at(col, j);
      }
    }
  }
  return out;
}

std::vector<double> apply_point(const HomMatrix& m, const std::vector<double>& p) {
  int n = m.k + 1;
  std::vector<double> h(n, 0.0);
  for (int j = 0; j < n; ++j) {
    double pj = j < m.k ? p[j] : 1.0;
    for (int i = 0; i < n; ++i) h[i] += pj * m.at(j, i);
  }
  if (std::abs(h[m.k]) < kEps) fail(Errc::HomogeneousDivideByZero, "point at infinity");
  std::vector<double> out(m.k);
  for (int a = 0; a < m.k; ++a) out[a] = h[a] / h[m.k];
  return out;
}

// ---- polytopes ---------------------------------------------------------

Polytope unit_cube(int k) {
  Polytope p;
  p.k = k;
  p.vertices.resize(std::size_t(1) << k);
  for (std::size_t i = 0; i < p.vertices.size(); ++i) {
    auto& v = p.vertices[i];
    v.assign(k + 1, 0.0);
    for (int a = 0; a < k; ++a) v[a] = (i >> a) & 1 ? 1.0 : 0.0;
    v[k] = 1.0;
  }
  for (int a = 0; a < k; ++a) {
    std::vector<double> lo(k + 1, 0.0), hi(k + 1, 0.0);
    lo[a] = 1.0;           // x_a >= 0
    hi[a] = 1.0;
    hi[k] = -1.0;          // x_a - 1 <= 0
    p.lower_faces.push_back(lo);
    p.upper_faces.push_back(hi);
  }
  return p;
}

Polytope polytope_transform(const Polytope& p, const HomMatrix& direct, const HomMatrix& inverse) {
  int n = p.k + 1;
  Polytope out;
  out.k = p.k;
  for (const auto& v : p.vertices) {
    std::vector<double> h(n, 0.0);
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) h[i] += v[j] * direct.at(j, i);
    out.vertices.push_back(std::move(h));
  }
  auto map_face = [&](const std::vector<double>& f) {
    std::vector<double> g(n, 0.0);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) g[i] += inverse.at(i, j) * f[j];
    return g;
  };
  for (const auto& f : p.lower_faces) out.lower_faces.push_back(map_face(f));
  for (const auto& f : p.upper_faces) out.upper_faces.push_back(map_face(f));
  return out;
}

namespace {

using Vec = std::vector<double>;

double face_dot(const Vec& f, const Vec& p) {
  double acc = f.back();
  for (std::size_t a = 0; a + 1 < f.size(); ++a) acc += f[a] * p[a];
  return acc;
}

// Calls fn on every corner of the box; stops early once fn says so.
template <class Fn>
bool all_corners(int k, const Vec& bmin, const Vec& bmax, Fn&& fn) {
  Vec c(k);
  for (std::uint32_t i = 0; i < (std::uint32_t(1) << k); ++i) {
    for (int a = 0; a < k; ++a) c[a] = (i >> a) & 1 ? bmax[a] : bmin[a];
    if (!fn(static_cast<const Vec&>(c))) return false;
  }
  return true;
}

// The block lies on the outer closed side of some polytope face.
bool block_outside_face(const Polytope& p, const Vec& bmin, const Vec& bmax) {
  for (const auto& f : p.lower_faces)
    if (all_corners(p.k, bmin, bmax, [&](const Vec& c) { return face_dot(f, c) <= kEps; }))
      return true;
  for (const auto& f : p.upper_faces)
    if (all_corners(p.k, bmin, bmax, [&](const Vec& c) { return face_dot(f, c) >= -kEps; }))
      return true;
  return false;
}

bool block_inside(const Polytope& p, const Vec& bmin, const Vec& bmax) {
  return all_corners(p.k, bmin, bmax, [&](const Vec& c) {
    for (const auto& f : p.lower_faces)
      if (face_dot(f, c) < -kEps) return false;
    for (const auto& f : p.upper_faces)
      if (face_dot(f, c) > kEps) return false;
    return true;
  });
}

// Every polytope vertex on the outer closed side of one block face. Skipped
// when a vertex sits too close to the plane at infinity.
bool poly_outside_block(const Polytope& p, const Vec& bmin, const Vec& bmax) {
  std::vector<Vec> pts;
  for (const auto& v : p.vertices) {
    double w = v[p.k];
    if (std::abs(w) < kEps) return false;
    Vec x(p.k);
    for (int a = 0; a < p.k; ++a) x[a] = v[a] / w;
    pts.push_back(std::move(x));
  }
  for (int a = 0; a < p.k; ++a) {
    bool lo = true, hi = true;
    for (const auto& x : pts) {
      lo = lo && x[a] <= bmin[a] + kEps;
      hi = hi && x[a] >= bmax[a] - kEps;
    }
    if (lo || hi) return true;
  }
  return false;
}

bool poly_in_frame(const Polytope& p) {
  for (const auto& v : p.vertices) {
    double w = v[p.k];
    if (std::abs(w) < kEps) return false;
    for (int a = 0; a < p.k; ++a) {
      double x = v[a] / w;
      if (x < -kEps || x > 1.0 + kEps) return false;
    }
  }
  return true;
}

struct PtreeCtx {
  TreeStore& s;
  const SpaceSpec& sp;
  const Polytope& p;
  int depth;
};

NodeRef ptree_rec(PtreeCtx& c, Vec& bmin, Vec& bmax, int level) {
  if (block_outside_face(c.p, bmin, bmax) || poly_outside_block(c.p, bmin, bmax))
    return c.s.white();
  if (block_inside(c.p, bmin, bmax)) return c.s.black();
  if (level == c.depth) return c.s.black();
  int axis = c.sp.axis_at(level);
  double mid = (bmin[axis] + bmax[axis]) / 2.0;
  double keep = bmax[axis];
  bmax[axis] = mid;
  NodeRef l = ptree_rec(c, bmin, bmax, level + 1);
  bmax[axis] = keep;
  keep = bmin[axis];
  bmin[axis] = mid;
  NodeRef r = ptree_rec(c, bmin, bmax, level + 1);
  bmin[axis] = keep;
  return c.s.internal(l, r);
}

} // namespace

NodeRef polytope_tree(TreeStore& s, const SpaceSpec& sp, const Polytope& p, int precision) {
  sp.check_precision(precision);
  if (p.k != sp.k) fail(Errc::ArityMismatch, "polytope dimension mismatch");
  PtreeCtx c{s, sp, p, sp.k * precision};
  Vec bmin(sp.k, 0.0), bmax(sp.k, 1.0);
  return ptree_rec(c, bmin, bmax, 0);
}

// ---- segments and shapes ----------------------------------------------

namespace {

bool seg_meets(const Vec& a, const Vec& b, const Vec& bmin, const Vec& bmax) {
  double t0 = 0.0, t1 = 1.0;
  for (std::size_t x = 0; x < a.size(); ++x) {
    double d = b[x] - a[x];
    if (d == 0.0) {
      if (a[x] < bmin[x] || a[x] > bmax[x]) return false;
      continue;
    }
    double ta = (bmin[x] - a[x]) / d, tb = (bmax[x] - a[x]) / d;
    if (ta > tb) std::swap(ta, tb);
    t0 = std::max(t0, ta);
    t1 = std::min(t1, tb);
    if (t0 > t1) return false;
  }
  return true;
}

template <class Hit>
bool seg_search(const TreeStore& s, const SpaceSpec& sp, NodeRef n, const Segment& g, Vec& bmin,
                Vec& bmax, int level, int depth, Hit&& hit) {
  if (s.is_white(n)) return false;
  if (!seg_meets(g.origin, g.end, bmin, bmax)) return false;
  if (s.is_terminal(n) || level == depth) return hit(bmin, bmax);
  int axis = sp.axis_at(level);
  double mid = (bmin[axis] + bmax[axis]) / 2.0;
  double keep = bmax[axis];
  bmax[axis] = mid;
  bool found = seg_search(s, sp, s.left(n), g, bmin, bmax, level + 1, depth, hit);
  bmax[axis] = keep;
  if (found) return true;
  keep = bmin[axis];
  bmin[axis] = mid;
  found = seg_search(s, sp, s.right(n), g, bmin, bmax, level + 1, depth, hit);
  bmin[axis] = keep;
  return found;
}

NodeRef seg_digitize(TreeStore& s, const SpaceSpec& sp, NodeRef n, const Segment& g, Vec& bmin,
                     Vec& bmax, int level, int depth) {
  if (s.tag(n) == Tag::Black) return n;
  if (!seg_meets(g.origin, g.end, bmin, bmax)) return n;
  if (level == depth) return s.black();
  int axis = sp.axis_at(level);
  double mid = (bmin[axis] + bmax[axis]) / 2.0;
  double keep = bmax[axis];
  bmax[axis] = mid;
  NodeRef l = seg_digitize(s, sp, s.left(n), g, bmin, bmax, level + 1, depth);
  bmax[axis] = keep;
  keep = bmin[axis];
  bmin[axis] = mid;
  NodeRef r = seg_digitize(s, sp, s.right(n), g, bmin, bmax, level + 1, depth);
  bmin[axis] = keep;
  return s.internal(l, r);
}

} // namespace

bool segment_intersects(const TreeStore& s, const SpaceSpec& sp, NodeRef t, const Segment& seg,
                        int precision) {
  sp.check_precision(precision);
  Vec bmin(sp.k, 0.0), bmax(sp.k, 1.0);
  return seg_search(s, sp, t, seg, bmin, bmax, 0, sp.k * precision,
                    [](const Vec&, const Vec&) { return true; });
}

NodeRef shape_segment(TreeStore& s, const SpaceSpec& sp, const Segment& seg, int precision) {
  sp.check_precision(precision);
  Vec bmin(sp.k, 0.0), bmax(sp.k, 1.0);
  return seg_digitize(s, sp, s.white(), seg, bmin, bmax, 0, sp.k * precision);
}

NodeRef shape_broken_line(TreeStore& s, const SpaceSpec& sp,
                          const std::vector<std::vector<double>>& points, int precision) {
  if (points.empty()) fail(Errc::DegenerateShape, "empty broken line");
  sp.check_precision(precision);
  int depth = sp.k * precision;
  Vec bmin(sp.k, 0.0), bmax(sp.k, 1.0);
  NodeRef out = s.white();
  if (points.size() == 1) {
    Segment g{points[0], points[0]};
    return seg_digitize(s, sp, out, g, bmin, bmax, 0, depth);
  }
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    Segment g{points[i], points[i + 1]};
    out = seg_digitize(s, sp, out, g, bmin, bmax, 0, depth);
  }
  return out;
}

NodeRef shape_polygon(TreeStore& s, const SpaceSpec& sp,
                      const std::vector<std::vector<double>>& points, int precision) {
  if (points.size() < 3) fail(Errc::DegenerateShape, "polygon needs three points");
  auto closed = points;
  closed.push_back(points.front());
  return shape_broken_line(s, sp, closed, precision);
}

namespace {

// Squared distance bounds from a box to a point.
void box_dist2(const Vec& c, const Vec& bmin, const Vec& bmax, double& dmin2, double& dmax2) {
  dmin2 = dmax2 = 0.0;
  for (std::size_t a = 0; a < c.size(); ++a) {
    double lo = bmin[a] - c[a], hi = bmax[a] - c[a];
    double near = std::max({lo, -hi, 0.0});
    double far = std::max(std::abs(lo), std::abs(hi));
    dmin2 += near * near;
    dmax2 += far * far;
  }
}

NodeRef sphere_rec(TreeStore& s, const SpaceSpec& sp, const Vec& center, double radius, Vec& bmin,
                   Vec& bmax, int level, int depth) {
  double dmin2, dmax2;
  box_dist2(center, bmin, bmax, dmin2, dmax2);
  if (dmin2 > radius * radius) return s.white();
  if (dmax2 <= radius * radius) return s.black();
  if (level == depth) return s.black();
  int axis = sp.axis_at(level);
  double mid = (bmin[axis] + bmax[axis]) / 2.0;
  double keep = bmax[axis];
  bmax[axis] = mid;
  NodeRef l = sphere_rec(s, sp, center, radius, bmin, bmax, level + 1, depth);
  bmax[axis] = keep;
  keep = bmin[axis];
  bmin[axis] = mid;
  NodeRef r = sphere_rec(s, sp, center, radius, bmin, bmax, level + 1, depth);
  bmin[axis] = keep;
  return s.internal(l, r);
}

struct ConeCtx {
  const SpaceSpec& sp;
  Vec apex, axis; // axis unit length
  double cosang, range;
  int depth;
};

NodeRef cone_rec(TreeStore& s, ConeCtx& c, Vec& bmin, Vec& bmax, int level) {
  double dmin2, dmax2;
  box_dist2(c.apex, bmin, bmax, dmin2, dmax2);
  if (dmin2 > c.range * c.range) return s.white();
  double dmin = std::sqrt(dmin2), dmax = std::sqrt(dmax2);
  // dot(axis, p - apex) is linear, so its block extremes sit on corners
  double lodot = 1e30, hidot = -1e30;
  Vec corner(c.sp.k);
  for (std::uint32_t i = 0; i < (std::uint32_t(1) << c.sp.k); ++i) {
    double d = 0.0;
    for (int a = 0; a < c.sp.k; ++a)
      d += c.axis[a] * (((i >> a) & 1 ? bmax[a] : bmin[a]) - c.apex[a]);
    lodot = std::min(lodot, d);
    hidot = std::max(hidot, d);
  }
  // interval bounds of dot - cos*|p - apex| over the block
  double tlo = c.cosang >= 0 ? -c.cosang * dmax : -c.cosang * dmin;
  double thi = c.cosang >= 0 ? -c.cosang * dmin : -c.cosang * dmax;
  if (hidot + thi < 0.0) return s.white();
  if (lodot + tlo >= 0.0 && dmax2 <= c.range * c.range) return s.black();
  if (level == c.depth) return s.black();
  int axis = c.sp.axis_at(level);
  double mid = (bmin[axis] + bmax[axis]) / 2.0;
  double keep = bmax[axis];
  bmax[axis] = mid;
  NodeRef l = cone_rec(s, c, bmin, bmax, level + 1);
  bmax[axis] = keep;
  keep = bmin[axis];
  bmin[axis] = mid;
  NodeRef r = cone_rec(s, c, bmin, bmax, level + 1);
  bmin[axis] = keep;
  return s.internal(l, r);
}

} // namespace

NodeRef shape_sphere(TreeStore& s, const SpaceSpec& sp, const std::vector<double>& center,
                     double radius, int precision) {
  if (radius <= 0.0) fail(Errc::DegenerateShape, "sphere radius must be positive");
  sp.check_precision(precision);
  Vec bmin(sp.k, 0.0), bmax(sp.k, 1.0);
  return sphere_rec(s, sp, center, radius, bmin, bmax, 0, sp.k * precision);
}

NodeRef shape_cone(TreeStore& s, const SpaceSpec& sp, const std::vector<double>& apex,
                   const std::vector<double>& axis, double angle, double range, int precision) {
  if (range <= 0.0) fail(Errc::DegenerateShape, "cone range must be positive");
  double len2 = 0.0;
  for (double x : axis) len2 += x * x;
  if (len2 < kEps) fail(Errc::DegenerateShape, "zero cone axis");
  sp.check_precision(precision);
  ConeCtx c{sp, apex, axis, std::cos(angle), range, sp.k * precision};
  double len = std::sqrt(len2);
  for (double& x : c.axis) x /= len;
  Vec bmin(sp.k, 0.0), bmax(sp.k, 1.0);
  return cone_rec(s, c, bmin, bmax, 0);
}

// ---- homographic transformation -----------------------------------------

namespace {

struct Cls {
  bool black = false, white = false;
};

void classify_rec(const TreeStore& s, const SpaceSpec& sp, NodeRef n, const Polytope& p, Vec& bmin,
                  Vec& bmax, int level, int depth, Cls& c) {
  if (c.black && c.white) return;
  if (block_outside_face(p, bmin, bmax) || poly_outside_block(p, bmin, bmax)) return;
  if (s.is_white(n)) {
    c.white = true;
    return;
  }
  if (s.is_terminal(n) || level == depth) {
    c.black = true; // internal at the depth limit counts black
    return;
  }
  int axis = sp.axis_at(level);
  double mid = (bmin[axis] + bmax[axis]) / 2.0;
  double keep = bmax[axis];
  bmax[axis] = mid;
  classify_rec(s, sp, s.left(n), p, bmin, bmax, level + 1, depth, c);
  bmax[axis] = keep;
  keep = bmin[axis];
  bmin[axis] = mid;
  classify_rec(s, sp, s.right(n), p, bmin, bmax, level + 1, depth, c);
  bmin[axis] = keep;
}

Vec face_mid(const Vec& a, const Vec& b) {
  Vec m(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) m[i] = (a[i] + b[i]) / 2.0;
  return m;
}

// Halves the polytope along the source hypercube axis. Homogeneous vertex
// averages are the exact images of the source edge midpoints, and the face
// average is the exact image of the source midplane.
void split_poly(const Polytope& p, int axis, Polytope& left, Polytope& right) {
  left = right = p;
  Vec mid_face = face_mid(p.lower_faces[axis], p.upper_faces[axis]);
  left.upper_faces[axis] = mid_face;
  right.lower_faces[axis] = std::move(mid_face);
  std::uint32_t bit = std::uint32_t(1) << axis;
  for (std::uint32_t i = 0; i < p.vertices.size(); ++i) {
    Vec mid = face_mid(p.vertices[i & ~bit], p.vertices[i | bit]);
    if (i & bit)
      left.vertices[i] = std::move(mid);
    else
      right.vertices[i] = std::move(mid);
  }
}

struct HomoCtx {
  TreeStore& s;
  const SpaceSpec& sp;
  NodeRef in;
  int depth_in, depth_out;
};

NodeRef homo_rec(HomoCtx& c, const Polytope& p, int level) {
  Cls cls;
  cls.white = !poly_in_frame(p);
  Vec bmin(c.sp.k, 0.0), bmax(c.sp.k, 1.0);
  classify_rec(c.s, c.sp, c.in, p, bmin, bmax, 0, c.depth_in, cls);
  if (!cls.black) return c.s.white();
  if (!cls.white) return c.s.black();
  if (level == c.depth_out) return c.s.black();
  Polytope left, right;
  split_poly(p, c.sp.axis_at(level), left, right);
  NodeRef l = homo_rec(c, left, level + 1);
  NodeRef r = homo_rec(c, right, level + 1);
  return c.s.internal(l, r);
}

} // namespace

NodeRef tree_homographic(TreeStore& s, const SpaceSpec& sp, NodeRef t,
                         const Polytope& inverse_images, int precision_in, int precision_out) {
  sp.check_precision(precision_in);
  sp.check_precision(precision_out);
  if (inverse_images.k != sp.k) fail(Errc::ArityMismatch, "polytope dimension mismatch");
  HomoCtx c{s, sp, t, sp.k * precision_in, sp.k * precision_out};
  return homo_rec(c, inverse_images, 0);
}

NodeRef tree_transform(TreeStore& s, const SpaceSpec& sp, NodeRef t, const HomMatrix& direct,
                       int precision_in, int precision_out) {
  HomMatrix inv = mat_inverse(direct);
  Polytope img = polytope_transform(unit_cube(sp.k), inv, direct);
  return tree_homographic(s, sp, t, img, precision_in, precision_out);
}

// ---- simplified transforms ----------------------------------------------

namespace {

NodeRef sym_rec(TreeStore& s, const SpaceSpec& sp, NodeRef n, int axis, int level) {
  if (s.is_terminal(n)) return n;
  NodeRef l = sym_rec(s, sp, s.left(n), axis, level + 1);
  NodeRef r = sym_rec(s, sp, s.right(n), axis, level + 1);
  if (sp.axis_at(level) == axis) std::swap(l, r);
  return s.is_valued(n) ? s.internal_val(l, r) : s.internal(l, r);
}

} // namespace

NodeRef tree_symmetry(TreeStore& s, const SpaceSpec& sp, NodeRef t, int axis) {
  if (axis < 0 || axis >= sp.k) fail(Errc::AxisOutOfRange, "axis out of range");
  return sym_rec(s, sp, t, axis, 0);
}

NodeRef tree_translate(TreeStore& s, const SpaceSpec& sp, NodeRef t,
                       const std::vector<double>& vec, int precision_in, int precision_out) {
  sp.check_precision(precision_in);
  sp.check_precision(precision_out);
  std::uint32_t side = sp.cells_per_axis();
  std::vector<long long> d(sp.k);
  for (int a = 0; a < sp.k; ++a) d[a] = llround(vec[a] * side);
  NodeRef in = assert_at(s, sp, t, precision_in);
  NodeRef out = s.white();
  for_each_block(s, sp, in, sp.r, [&](const Cell& lo, int level, NodeRef leaf) {
    if (s.is_white(leaf)) return;
    Cell nlo(sp.k), nhi(sp.k);
    for (int a = 0; a < sp.k; ++a) {
      long long l0 = (long long)lo[a] + d[a];
      long long h0 = (long long)(lo[a] + block_extent(sp, level, a)) + d[a];
      l0 = std::clamp(l0, 0ll, (long long)side);
      h0 = std::clamp(h0, 0ll, (long long)side);
      if (l0 >= h0) return; // shifted off the frame
      nlo[a] = std::uint32_t(l0);
      nhi[a] = std::uint32_t(h0);
    }
    out = set_union(s, sp, out, box_tree(s, sp, nlo, nhi), sp.r);
  });
  return assert_at(s, sp, out, precision_out);
}

NodeRef hidden_part_removal(TreeStore& s, const SpaceSpec& sp, NodeRef t, int axis, Sense sense) {
  if (axis < 0 || axis >= sp.k) fail(Errc::AxisOutOfRange, "axis out of range");
  double step = 1.0 / sp.cells_per_axis();
  std::vector<double> vec(sp.k, 0.0);
  vec[axis] = sense == Sense::Increasing ? step : -step;
  NodeRef shifted = tree_translate(s, sp, t, vec, sp.r, sp.r);
  NodeRef shadow = sense == Sense::Increasing ? epigraph(s, sp, shifted, axis, sp.r)
                                              : hypograph(s, sp, shifted, axis, sp.r);
  return set_diff(s, sp, t, shadow, sp.r);
}

NodeRef project(TreeStore& s, const SpaceSpec& sp, NodeRef t, int axis) {
  if (sp.k < 2) fail(Errc::AxisOutOfRange, "projection needs two axes");
  if (axis < 0 || axis >= sp.k) fail(Errc::AxisOutOfRange, "axis out of range");
  SpaceSpec sub(sp.k - 1, sp.r);
  NodeRef out = s.white();
  for (std::uint32_t c = 0; c < sp.cells_per_axis(); ++c) {
    NodeRef slice = slice_extract(s, sp, t, {{axis, c}}, sp.r);
    out = set_union(s, sub, out, slice, sp.r);
  }
  return out;
}

// ---- visibility -----------------------------------------------------------

namespace {

// Block of the precision-p cell containing the point, in r-cells.
void point_block(const SpaceSpec& sp, const std::vector<double>& pt, int p, Cell& lo, Cell& hi) {
  std::uint32_t step = sp.cells_per_axis() >> p;
  lo.resize(sp.k);
  hi.resize(sp.k);
  for (int a = 0; a < sp.k; ++a) {
    lo[a] = quantize(pt[a], p) * step;
    hi[a] = lo[a] + step;
  }
}

} // namespace

bool visible(TreeStore& s, const SpaceSpec& sp, NodeRef obstacles, const std::vector<double>& from,
             const std::vector<double>& to, int precision) {
  sp.check_precision(precision);
  if (from == to) return true;
  Cell lo, hi;
  point_block(sp, from, precision, lo, hi);
  NodeRef cleared = set_diff(s, sp, obstacles, box_tree(s, sp, lo, hi), precision);
  point_block(sp, to, precision, lo, hi);
  cleared = set_diff(s, sp, cleared, box_tree(s, sp, lo, hi), precision);
  return !segment_intersects(s, sp, cleared, Segment{from, to}, precision);
}

NodeRef propagation_area(TreeStore& s, const SpaceSpec& sp, NodeRef terrain,
                         const std::vector<double>& emitter, double range, int precision) {
  sp.check_precision(precision);
  Cell lo, hi;
  if (range <= 0.0) {
    point_block(sp, emitter, precision, lo, hi);
    return box_tree(s, sp, lo, hi);
  }
  NodeRef support = shape_sphere(s, sp, emitter, range, precision);
  std::uint32_t step = sp.cells_per_axis() >> precision;
  double scale = 1.0 / sp.cells_per_axis();
  NodeRef out = s.white();
  for_each_block(s, sp, support, precision, [&](const Cell& blo, int level, NodeRef leaf) {
    if (s.is_white(leaf)) return;
    Cell it = blo;
    for (;;) {
      std::vector<double> center(sp.k);
      for (int a = 0; a < sp.k; ++a) center[a] = (it[a] + step * 0.5) * scale;
      if (visible(s, sp, terrain, emitter, center, precision)) {
        Cell chi(sp.k);
        for (int a = 0; a < sp.k; ++a) chi[a] = it[a] + step;
        out = set_union(s, sp, out, box_tree(s, sp, it, chi), precision);
      }
      int a = 0;
      for (; a < sp.k; ++a) {
        it[a] += step;
        if (it[a] < blo[a] + block_extent(sp, level, a)) break;
        it[a] = blo[a];
      }
      if (a == sp.k) break;
    }
  });
  return out;
}

} // namespace kdt
