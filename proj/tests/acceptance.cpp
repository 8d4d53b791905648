// Acceptance gate: one self-checking scenario per headline capability, each
// validated against a dense-grid or closed-form reference computed here.
// Prints one PASS/FAIL line per criterion and exits nonzero on any failure.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <deque>
#include <filesystem>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <vector>

#include "kdt/attributes.hpp"
#include "kdt/build.hpp"
#include "kdt/codec.hpp"
#include "kdt/image.hpp"
#include "kdt/integral.hpp"
#include "kdt/interp.hpp"
#include "kdt/parsim.hpp"
#include "kdt/pyramid.hpp"
#include "kdt/raster.hpp"
#include "kdt/setops.hpp"
#include "kdt/topo.hpp"
#include "oracle.hpp"

using namespace kdt;
using oracle::Bits;
using oracle::GridSpace;

namespace {

int failures = 0;

void report(int num, const char* title, bool ok, double seconds) {
  std::printf("%s %2d %s (%.2f s)\n", ok ? "PASS" : "FAIL", num, title, seconds);
  if (!ok) ++failures;
}

template <class Fn>
void criterion(int num, const char* title, Fn&& fn) {
  auto t0 = std::chrono::steady_clock::now();
  bool ok = false;
  try {
    ok = fn();
  } catch (const std::exception& e) {
    std::printf("     %2d threw: %s\n", num, e.what());
  }
  double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  report(num, title, ok, dt);
}

// independent neighborhood offsets: D1 varies one axis, Dinf any combination
std::vector<std::vector<int>> offsets(int k, Metric m) {
  std::vector<std::vector<int>> out;
  if (m == Metric::D1) {
    for (int a = 0; a < k; ++a)
      for (int d : {-1, 1}) {
        std::vector<int> off(k, 0);
        off[a] = d;
        out.push_back(off);
      }
    return out;
  }
  std::vector<int> off(k, -1);
  while (true) {
    bool all_zero = true;
    for (int v : off) all_zero &= v == 0;
    if (!all_zero) out.push_back(off);
    int a = 0;
    while (a < k && off[a] == 1) off[a++] = -1;
    if (a == k) break;
    ++off[a];
  }
  return out;
}

bool step(const GridSpace& g, std::size_t i, const std::vector<int>& off, std::size_t& out) {
  auto c = g.coords(i);
  for (int a = 0; a < g.k; ++a) {
    long long v = (long long)c[a] + off[a];
    if (v < 0 || v >= (long long)g.side()) return false;
    c[a] = std::uint32_t(v);
  }
  out = g.index(c);
  return true;
}

Bits grid_boundary(const GridSpace& g, const Bits& in, Metric m) {
  Bits out(in.size(), 0);
  auto offs = offsets(g.k, m);
  for (std::size_t i = 0; i < in.size(); ++i) {
    if (!in[i]) continue;
    for (const auto& off : offs) {
      std::size_t j;
      if (step(g, i, off, j) && !in[j]) {
        out[i] = 1;
        break;
      }
    }
  }
  return out;
}

Bits grid_dilate(const GridSpace& g, const Bits& in, Metric m) {
  Bits out = in;
  auto offs = offsets(g.k, m);
  for (std::size_t i = 0; i < in.size(); ++i) {
    if (!in[i]) continue;
    for (const auto& off : offs) {
      std::size_t j;
      if (step(g, i, off, j)) out[j] = 1;
    }
  }
  return out;
}

Bits grid_erode(const GridSpace& g, const Bits& in, Metric m) {
  auto b = grid_boundary(g, in, m);
  Bits out = in;
  for (std::size_t i = 0; i < in.size(); ++i)
    if (b[i]) out[i] = 0;
  return out;
}

Bits grid_median(const GridSpace& g, const Bits& in, Metric m) {
  Bits out = in;
  auto offs = offsets(g.k, m);
  for (std::size_t i = 0; i < in.size(); ++i) {
    int count = 0;
    for (const auto& off : offs) {
      std::size_t j;
      if (!step(g, i, off, j)) continue;
      count += in[j] ? 1 : -1;
    }
    if (count > 0) out[i] = 1;
    if (count < 0) out[i] = 0;
  }
  return out;
}

std::vector<int> flood_labels(const GridSpace& g, const Bits& in, Metric m) {
  std::vector<int> label(in.size(), 0);
  auto offs = offsets(g.k, m);
  int next = 0;
  for (std::size_t seed = 0; seed < in.size(); ++seed) {
    if (!in[seed] || label[seed]) continue;
    label[seed] = ++next;
    std::vector<std::size_t> stack{seed};
    while (!stack.empty()) {
      std::size_t i = stack.back();
      stack.pop_back();
      for (const auto& off : offs) {
        std::size_t j;
        if (step(g, i, off, j) && in[j] && !label[j]) {
          label[j] = label[i];
          stack.push_back(j);
        }
      }
    }
  }
  return label;
}

std::vector<int> canon(const std::vector<int>& labels) {
  std::map<int, int> seen;
  std::vector<int> out(labels.size(), 0);
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (!labels[i]) continue;
    auto it = seen.emplace(labels[i], int(seen.size()) + 1).first;
    out[i] = it->second;
  }
  return out;
}

bool same_bits(TreeStore& s, const SpaceSpec& sp, NodeRef t, const GridSpace& g,
               const Bits& want, int p) {
  return oracle::bits_of_tree(s, sp, t, p) == want;
}

bool subset(TreeStore& s, const SpaceSpec& sp, NodeRef a, NodeRef b, int p) {
  return set_diff(s, sp, a, b, p) == s.white();
}

// planar digital hull reference: cells whose center lies in the convex
// polygon of the set's cell centers (inclusive boundary)
long long cross(long long ox, long long oy, long long ax, long long ay, long long bx,
                long long by) {
  return (ax - ox) * (by - oy) - (ay - oy) * (bx - ox);
}

std::vector<std::pair<long long, long long>> hull_chain(
    std::vector<std::pair<long long, long long>> pts) {
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) return pts;
  std::vector<std::pair<long long, long long>> h(2 * pts.size());
  std::size_t n = 0;
  for (const auto& p : pts) {
    while (n >= 2 &&
           cross(h[n - 2].first, h[n - 2].second, h[n - 1].first, h[n - 1].second, p.first,
                 p.second) <= 0)
      --n;
    h[n++] = p;
  }
  std::size_t lower = n + 1;
  for (auto it = pts.rbegin(); it != pts.rend(); ++it) {
    while (n >= lower &&
           cross(h[n - 2].first, h[n - 2].second, h[n - 1].first, h[n - 1].second, it->first,
                 it->second) <= 0)
      --n;
    h[n++] = *it;
  }
  h.resize(n - 1);
  return h;
}

bool in_hull(const std::vector<std::pair<long long, long long>>& h, long long x, long long y) {
  if (h.empty()) return false;
  if (h.size() == 1) return x == h[0].first && y == h[0].second;
  if (h.size() == 2) {
    if (cross(h[0].first, h[0].second, h[1].first, h[1].second, x, y) != 0) return false;
    return std::min(h[0].first, h[1].first) <= x && x <= std::max(h[0].first, h[1].first) &&
           std::min(h[0].second, h[1].second) <= y && y <= std::max(h[0].second, h[1].second);
  }
  for (std::size_t i = 0; i < h.size(); ++i) {
    const auto& a = h[i];
    const auto& b = h[(i + 1) % h.size()];
    if (cross(a.first, a.second, b.first, b.second, x, y) < 0) return false;
  }
  return true;
}

// directed Hausdorff in the Chebyshev metric over two planar cell sets
int hausdorff(const GridSpace& g, const Bits& a, const Bits& b) {
  std::vector<std::pair<int, int>> pa, pb;
  for (std::size_t i = 0; i < a.size(); ++i) {
    auto c = g.coords(i);
    if (a[i]) pa.emplace_back(int(c[0]), int(c[1]));
    if (b[i]) pb.emplace_back(int(c[0]), int(c[1]));
  }
  if (pa.empty()) return 0;
  if (pb.empty()) return int(g.side());
  int worst = 0;
  for (auto [x, y] : pa) {
    int best = int(g.side());
    for (auto [u, v] : pb)
      best = std::min(best, std::max(std::abs(x - u), std::abs(y - v)));
    worst = std::max(worst, best);
  }
  return worst;
}

double probe_val(const TreeStore& s, const SpaceSpec& sp, NodeRef t, const Cell& c, int p) {
  double v = 0;
  probe(s, sp, t, c, p, &v);
  return v;
}

std::string trace_text(const std::vector<TraceEvent>& trace) {
  std::ostringstream out;
  write_trace_csv(out, trace);
  return out.str();
}

} // namespace

int main() {
  criterion(1, "capacity arithmetic", [] {
    bool ok = true;
    const std::uint64_t want[] = {256ull, 65536ull, 16777216ull, 4294967296ull};
    for (int k = 1; k <= 4; ++k) ok &= SpaceSpec(k, 8).capacity() == want[k - 1];
    SpaceSpec s2(2, 9);
    ok &= s2.cells_per_axis() == 512 && s2.capacity() == 512ull * 512ull;
    return ok;
  });

  criterion(2, "interior neighbor counts", [] {
    TreeStore s;
    bool ok = true;
    auto count_at = [&](int k, int r, const Cell& cell, Metric m) {
      SpaceSpec sp(k, r);
      int n = 0;
      for (const auto& rec : adjacencies(s, sp, s.black(), m, r))
        n += (rec.a == cell) + (rec.b == cell);
      return n;
    };
    ok &= count_at(2, 3, {3, 3}, Metric::D1) == 4;
    ok &= count_at(2, 3, {3, 3}, Metric::Dinf) == 8;
    ok &= count_at(3, 2, {1, 1, 1}, Metric::D1) == 6;
    ok &= count_at(3, 2, {1, 1, 1}, Metric::Dinf) == 26;
    return ok;
  });

  criterion(3, "boolean algebra vs dense grid", [] {
    TreeStore s;
    std::mt19937 rng(101);
    for (int trial = 0; trial < 200; ++trial) {
      int k = 1 + int(rng() % 3), r = 1 + int(rng() % 4);
      SpaceSpec sp(k, r);
      GridSpace g{k, r};
      Bits ba = oracle::random_bits(g, rng, 0.4);
      Bits bb = oracle::random_bits(g, rng, 0.4);
      NodeRef a = oracle::tree_of_bits(s, sp, g, ba);
      NodeRef b = oracle::tree_of_bits(s, sp, g, bb);
      if (!same_bits(s, sp, set_union(s, sp, a, b, r), g, oracle::bits_union(ba, bb), r))
        return false;
      if (!same_bits(s, sp, set_intersect(s, sp, a, b, r), g, oracle::bits_intersect(ba, bb), r))
        return false;
      if (!same_bits(s, sp, set_diff(s, sp, a, b, r), g, oracle::bits_diff(ba, bb), r))
        return false;
      if (!same_bits(s, sp, set_exclude(s, sp, a, b, r), g, oracle::bits_exclude(ba, bb), r))
        return false;
      if (!same_bits(s, sp, complement(s, sp, a, r), g, oracle::bits_not(ba), r)) return false;
      if (assert_at(s, sp, a, r) != a) return false;
      // De Morgan and involution
      NodeRef lhs = complement(s, sp, set_union(s, sp, a, b, r), r);
      NodeRef rhs = set_intersect(s, sp, complement(s, sp, a, r), complement(s, sp, b, r), r);
      if (lhs != rhs) return false;
      if (complement(s, sp, complement(s, sp, a, r), r) != a) return false;
    }
    return true;
  });

  criterion(4, "morphology vs structuring elements", [] {
    TreeStore s;
    std::mt19937 rng(202);
    for (int trial = 0; trial < 200; ++trial) {
      int k = 2 + int(rng() % 2), r = 1 + int(rng() % (k == 3 ? 3 : 4));
      SpaceSpec sp(k, r);
      GridSpace g{k, r};
      Metric m = rng() % 2 ? Metric::D1 : Metric::Dinf;
      Bits bits = oracle::random_bits(g, rng, 0.5);
      NodeRef t = oracle::tree_of_bits(s, sp, g, bits);
      NodeRef er = morphology(s, sp, t, m, MorphOp::Erode, r);
      NodeRef di = morphology(s, sp, t, m, MorphOp::Dilate, r);
      NodeRef op = morphology(s, sp, t, m, MorphOp::Open, r);
      NodeRef cl = morphology(s, sp, t, m, MorphOp::Close, r);
      if (!same_bits(s, sp, boundary(s, sp, t, m, r), g, grid_boundary(g, bits, m), r))
        return false;
      if (!same_bits(s, sp, er, g, grid_erode(g, bits, m), r)) return false;
      if (!same_bits(s, sp, di, g, grid_dilate(g, bits, m), r)) return false;
      if (!same_bits(s, sp, op, g, grid_dilate(g, grid_erode(g, bits, m), m), r)) return false;
      if (!same_bits(s, sp, cl, g, grid_erode(g, grid_dilate(g, bits, m), m), r)) return false;
      if (!same_bits(s, sp, median_filter(s, sp, t, m, r), g, grid_median(g, bits, m), r))
        return false;
      // eroded <= opened <= set <= closed <= dilated
      if (!subset(s, sp, er, op, r) || !subset(s, sp, op, t, r) || !subset(s, sp, t, cl, r) ||
          !subset(s, sp, cl, di, r))
        return false;
    }
    return true;
  });

  criterion(5, "connected components vs flood fill", [] {
    TreeStore s;
    std::mt19937 rng(303);
    for (int trial = 0; trial < 100; ++trial) {
      int k = 1 + int(rng() % 3), r = 1 + int(rng() % 4);
      SpaceSpec sp(k, r);
      GridSpace g{k, r};
      Bits bits = oracle::random_bits(g, rng, 0.45);
      NodeRef t = oracle::tree_of_bits(s, sp, g, bits);
      for (Metric m : {Metric::D1, Metric::Dinf}) {
        auto want = canon(flood_labels(g, bits, m));
        int want_count = *std::max_element(want.begin(), want.end());
        for (LabelMethod method : {LabelMethod::Bucket, LabelMethod::Growing}) {
          Components comps = components(s, sp, t, m, r, method);
          if (comps.count != want_count) return false;
          std::vector<int> got(g.size(), 0);
          for (const auto& c : cells_of_tree(s, sp, comps.labeled, r))
            got[g.index(c)] = int(probe_val(s, sp, comps.labeled, c, r));
          if (canon(got) != want) return false;
        }
      }
    }
    return true;
  });

  criterion(6, "planar convex hull", [] {
    TreeStore s;
    std::mt19937 rng(404);
    for (int trial = 0; trial < 50; ++trial) {
      int r = 3 + int(rng() % 3);
      SpaceSpec sp(2, r);
      GridSpace g{2, r};
      Bits bits = oracle::random_bits(g, rng, 0.08);
      NodeRef t = oracle::tree_of_bits(s, sp, g, bits);
      NodeRef h = convex_hull(s, sp, t, r);
      if (!subset(s, sp, t, h, r)) return false;
      if (convex_hull(s, sp, h, r) != h) return false;
      std::vector<std::pair<long long, long long>> pts;
      for (std::size_t i = 0; i < bits.size(); ++i)
        if (bits[i]) {
          auto c = g.coords(i);
          pts.emplace_back(c[0], c[1]);
        }
      auto chain = hull_chain(pts);
      Bits want(g.size(), 0);
      for (std::size_t i = 0; i < want.size(); ++i) {
        auto c = g.coords(i);
        want[i] = in_hull(chain, c[0], c[1]) ? 1 : 0;
      }
      Bits got = oracle::bits_of_tree(s, sp, h, r);
      if (hausdorff(g, got, want) > 1 || hausdorff(g, want, got) > 1) return false;
    }
    return true;
  });

  criterion(7, "shadows and interior filling", [] {
    TreeStore s;
    std::mt19937 rng(505);
    for (int trial = 0; trial < 60; ++trial) {
      int k = 1 + int(rng() % 3), r = 1 + int(rng() % 4);
      SpaceSpec sp(k, r);
      GridSpace g{k, r};
      Bits bits = oracle::random_bits(g, rng, 0.3);
      NodeRef t = oracle::tree_of_bits(s, sp, g, bits);
      Bits filled(bits.size(), 1);
      for (int axis = 0; axis < k; ++axis) {
        Bits hypo(bits.size(), 0), epi(bits.size(), 0);
        for (std::size_t i = 0; i < bits.size(); ++i) {
          if (!bits[i]) continue;
          auto c = g.coords(i);
          for (std::uint32_t v = 0; v < g.side(); ++v) {
            auto d = c;
            d[axis] = v;
            if (v <= c[axis]) hypo[g.index(d)] = 1;
            if (v >= c[axis]) epi[g.index(d)] = 1;
          }
        }
        if (!same_bits(s, sp, hypograph(s, sp, t, axis, r), g, hypo, r)) return false;
        if (!same_bits(s, sp, epigraph(s, sp, t, axis, r), g, epi, r)) return false;
        for (std::size_t i = 0; i < bits.size(); ++i) filled[i] &= hypo[i] & epi[i];
      }
      if (!same_bits(s, sp, fill(s, sp, t, r), g, filled, r)) return false;
    }
    // filling the boundary of a solid recovers at least the solid
    for (int k : {2, 3}) {
      SpaceSpec sp(k, 4);
      Cell lo(k, 2), hi(k, 13);
      NodeRef solid = box_tree(s, sp, lo, hi);
      NodeRef shell = boundary(s, sp, solid, Metric::D1, 4);
      if (!subset(s, sp, solid, fill(s, sp, shell, 4), 4)) return false;
    }
    return true;
  });

  criterion(8, "moments, inertia frame and eigen trees", [] {
    TreeStore s;
    std::mt19937 rng(606);
    for (int trial = 0; trial < 40; ++trial) {
      int k = 1 + int(rng() % 3), r = 1 + int(rng() % 4);
      SpaceSpec sp(k, r);
      GridSpace g{k, r};
      Bits bits = oracle::random_bits(g, rng, 0.35);
      NodeRef t = oracle::tree_of_bits(s, sp, g, bits);
      MomentList m = moments(s, sp, t, r);
      for (const auto& [idx, val] : m.m) {
        double want = 0;
        for (std::size_t i = 0; i < bits.size(); ++i) {
          if (!bits[i]) continue;
          auto c = g.coords(i);
          double term = 1;
          for (int a = 0; a < k; ++a)
            for (int e = 0; e < idx[a]; ++e) term *= double(c[a]);
          want += term;
        }
        if (val != want) return false;
      }
      if (m.mass() == 0) continue;
      MomentList cm = center_moments(m);
      EigenFrame f = eigen_frame(m);
      for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) {
          MultiIndex idx(k, 0);
          ++idx[i];
          ++idx[j];
          double want = cm.at(idx);
          double recon = 0;
          for (int l = 0; l < k; ++l) recon += f.lambda[l] * f.v[i][l] * f.v[j][l];
          if (std::abs(recon - want) > 1e-9 * std::max(1.0, std::abs(want))) return false;
        }
    }
    // a shape and its quarter-turn copy meet in the same eigen frame
    SpaceSpec sp(2, 6);
    GridSpace g{2, 6};
    Bits shape(g.size(), 0);
    auto set_px = [&](int x, int y) { shape[g.index({std::uint32_t(x), std::uint32_t(y)})] = 1; };
    for (int x = 0; x < 64; ++x)
      for (int y = 0; y < 64; ++y) {
        bool disk = (x - 22) * (x - 22) + (y - 30) * (y - 30) <= 12 * 12;
        bool bar = x >= 30 && x < 52 && y >= 34 && y < 44;
        if (disk || bar) set_px(x, y);
      }
    Bits turned(g.size(), 0);
    for (int x = 0; x < 64; ++x)
      for (int y = 0; y < 64; ++y)
        if (shape[g.index({std::uint32_t(x), std::uint32_t(y)})])
          turned[g.index({std::uint32_t(y), std::uint32_t(63 - x)})] = 1;
    NodeRef a = oracle::tree_of_bits(s, sp, g, shape);
    NodeRef b = oracle::tree_of_bits(s, sp, g, turned);
    NodeRef ea = eigen_tree(s, sp, a, eigen_frame(moments(s, sp, a, 6)), 6, 6, false);
    NodeRef eb = eigen_tree(s, sp, b, eigen_frame(moments(s, sp, b, 6)), 6, 6, false);
    std::uint64_t mass = cell_count(s, sp, a, 6);
    std::uint64_t xmass = cell_count(s, sp, set_exclude(s, sp, ea, eb, 6), 6);
    return xmass <= mass / 20;
  });

  criterion(9, "pyramid round trips and statistics", [] {
    TreeStore s;
    std::mt19937 rng(707);
    for (int trial = 0; trial < 40; ++trial) {
      int k = 1 + int(rng() % 2), r = 1 + int(rng() % 3);
      SpaceSpec sp(k, r);
      GridSpace g{k, r};
      Bits bits = oracle::random_bits(g, rng, 0.4);
      NodeRef p = s.white();
      std::vector<std::pair<Cell, double>> cells;
      for (std::size_t i = 0; i < bits.size(); ++i)
        if (bits[i]) {
          double v = double(rng() % 1000) / 1000.0;
          cells.emplace_back(g.coords(i), v);
          p = add_cell(s, sp, p, cells.back().first, v);
        }
      SpaceSpec osp;
      NodeRef t = pyramid_to_tree(s, sp, p, &osp);
      NodeRef back = tree_to_pyramid(s, osp, t, 0);
      if (support(s, sp, back) != support(s, sp, p)) return false;
      double q = std::ldexp(1.0, -r);
      for (const auto& [c, v] : cells)
        if (std::abs(probe_val(s, sp, back, c, r) - v) > q) return false;
    }
    {
      SpaceSpec sp(1, 1);
      auto st = stats(s, sp, s.internal_val(s.black_val(1.0), s.black_val(3.0)));
      if (st.center != 2.0 || st.dispersion != 1.0) return false;
    }
    for (int trial = 0; trial < 10; ++trial) {
      SpaceSpec sp(2, 3);
      Cell seed{std::uint32_t(rng() % 8), std::uint32_t(rng() % 8)};
      NodeRef p = add_cell(s, sp, s.white(), seed, 0.5);
      NodeRef e = pyramid_extend(s, sp, p, Metric::D1);
      if (support(s, sp, e) != s.black()) return false;
    }
    return true;
  });

  criterion(10, "serialization round trips", [] {
    TreeStore s;
    std::mt19937 rng(808);
    if (encode(s, s.black()).code != "1") return false;
    if (encode(s, s.white()).code != "0") return false;
    if (encode(s, s.internal(s.black(), s.white())).code != "210") return false;
    if (decode(s, TreeCode{"210", {}}) != s.internal(s.black(), s.white())) return false;
    for (int trial = 0; trial < 1000; ++trial) {
      int k = 1 + int(rng() % 3), r = 1 + int(rng() % 3);
      SpaceSpec sp(k, r);
      GridSpace g{k, r};
      NodeRef t = oracle::tree_of_bits(s, sp, g, oracle::random_bits(g, rng, 0.4));
      if (trial % 2) t = colorize(s, sp, t, double(rng() % 1000) / 1000.0);
      if (decode(s, encode(s, t)) != t) return false;
    }
    return true;
  });

  criterion(11, "parallel execution models", [] {
    TreeStore s;
    std::mt19937 rng(909);
    const Kernel kernels[] = {Kernel::Union, Kernel::Intersect, Kernel::Diff, Kernel::Exclude};
    for (int trial = 0; trial < 100; ++trial) {
      int k = 1 + int(rng() % 2), r = 1 + int(rng() % 3);
      SpaceSpec sp(k, r);
      GridSpace g{k, r};
      Bits ba = oracle::random_bits(g, rng, 0.4);
      Bits bb = oracle::random_bits(g, rng, 0.4);
      NodeRef a = oracle::tree_of_bits(s, sp, g, ba);
      NodeRef b = oracle::tree_of_bits(s, sp, g, bb);
      Kernel op = kernels[rng() % 4];
      NodeRef want = op == Kernel::Union       ? set_union(s, sp, a, b, r)
                     : op == Kernel::Intersect ? set_intersect(s, sp, a, b, r)
                     : op == Kernel::Diff      ? set_diff(s, sp, a, b, r)
                                               : set_exclude(s, sp, a, b, r);
      SimResult sync1 = sync_execute(s, sp, a, b, op, r, sp.depth());
      SimResult async1 = async_execute(s, sp, a, b, op, r, 3);
      if (sync1.result != want || async1.result != want) return false;
      SimResult sync2 = sync_execute(s, sp, a, b, op, r, sp.depth());
      SimResult async2 = async_execute(s, sp, a, b, op, r, 3);
      if (trace_text(sync1.trace) != trace_text(sync2.trace)) return false;
      if (trace_text(async1.trace) != trace_text(async2.trace)) return false;
    }
    for (int p = 1; p <= 6; ++p)
      for (int from = 0; from < (1 << p); ++from)
        for (int to = 0; to < (1 << p); ++to) {
          auto route = omega_route(from, to, p);
          if (int(route.size()) != p || route.back() != to) return false;
        }
    return true;
  });

  criterion(12, "command file reproduction", [] {
    namespace fs = std::filesystem;
    fs::path out = fs::temp_directory_path() / "kdt_acceptance_demo";
    fs::remove_all(out);
    Interp interp(out.string());
    ExecReport report = interp.run_file(std::string(KDT_DATA_DIR) + "/demo.cmd");
    if (report.errors != 0 || !report.stopped) return false;
    int images = 0;
    for (const auto& e : fs::directory_iterator(out))
      images += e.path().extension() == ".pbm" || e.path().extension() == ".pgm";
    if (images < 10) return false;

    // flood fill the source bitmap independently of the tree machinery
    BitImage img = read_pbm(std::string(KDT_DATA_DIR) + "/shu256.pbm");
    std::vector<int> label(img.bits.size(), 0);
    int count = 0;
    for (int y = 0; y < img.height; ++y)
      for (int x = 0; x < img.width; ++x) {
        if (!img.at(x, y) || label[std::size_t(y) * img.width + x]) continue;
        ++count;
        std::deque<std::pair<int, int>> queue{{x, y}};
        label[std::size_t(y) * img.width + x] = count;
        while (!queue.empty()) {
          auto [cx, cy] = queue.front();
          queue.pop_front();
          const int dx[] = {1, -1, 0, 0}, dy[] = {0, 0, 1, -1};
          for (int d = 0; d < 4; ++d) {
            int nx = cx + dx[d], ny = cy + dy[d];
            if (nx < 0 || ny < 0 || nx >= img.width || ny >= img.height) continue;
            std::size_t idx = std::size_t(ny) * img.width + nx;
            if (!img.bits[idx] || label[idx]) continue;
            label[idx] = count;
            queue.emplace_back(nx, ny);
          }
        }
      }
    Interp counter(out.string());
    ExecReport rc = counter.run(parse_command_stream("KDRDBT(shu256) = a; KDCCLB(a) = n; KDEND;"),
                                std::string(KDT_DATA_DIR));
    if (rc.errors != 0) return false;
    return std::get<long long>(counter.vars().at("n")) == count;
  });

  if (failures) std::printf("%d criteria failed\n", failures);
  return failures ? 1 : 0;
}
