#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "kdt/build.hpp"
#include "kdt/integral.hpp"
#include "kdt/raster.hpp"
#include "kdt/setops.hpp"
#include "oracle.hpp"

using namespace kdt;

namespace {

// Column-scan references: walk each line along `axis` and spread the marks.
oracle::Bits scan_shadow(const oracle::GridSpace& g, const oracle::Bits& in, int axis, bool down) {
  oracle::Bits out(in.size(), 0);
  for (std::size_t i = 0; i < in.size(); ++i) {
    if (!in[i]) continue;
    auto c = g.coords(i);
    std::uint32_t from = down ? 0 : c[axis];
    std::uint32_t to = down ? c[axis] : g.side() - 1;
    for (std::uint32_t v = from; v <= to; ++v) {
      auto cc = c;
      cc[axis] = v;
      out[g.index(cc)] = 1;
    }
  }
  return out;
}

oracle::Bits scan_fill(const oracle::GridSpace& g, const oracle::Bits& in) {
  oracle::Bits out(in.size(), 1);
  for (int a = 0; a < g.k; ++a) {
    auto hy = scan_shadow(g, in, a, true);
    auto ep = scan_shadow(g, in, a, false);
    for (std::size_t i = 0; i < in.size(); ++i) out[i] = out[i] & hy[i] & ep[i];
  }
  return out;
}

// Cells whose center lies in the continuous hull of the black cell centers.
oracle::Bits brute_hull_2d(const oracle::GridSpace& g, const oracle::Bits& in) {
  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = 0; i < in.size(); ++i)
    if (in[i]) {
      auto c = g.coords(i);
      pts.push_back({c[0] + 0.5, c[1] + 0.5});
    }
  oracle::Bits out(in.size(), 0);
  if (pts.empty()) return out;
  // Andrew monotone chain on pts
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  auto cross = [](auto o, auto a, auto b) {
    return (a.first - o.first) * (b.second - o.second) -
           (a.second - o.second) * (b.first - o.first);
  };
  std::vector<std::pair<double, double>> h;
  if (pts.size() >= 3) {
    for (auto& p : pts) {
      while (h.size() >= 2 && cross(h[h.size() - 2], h.back(), p) <= 0) h.pop_back();
      h.push_back(p);
    }
    std::size_t lower = h.size() + 1;
    for (auto it = pts.rbegin(); it != pts.rend(); ++it) {
      while (h.size() >= lower && cross(h[h.size() - 2], h.back(), *it) <= 0) h.pop_back();
      h.push_back(*it);
    }
    h.pop_back();
  } else {
    h = pts;
  }
  for (std::size_t i = 0; i < in.size(); ++i) {
    auto c = g.coords(i);
    double x = c[0] + 0.5, y = c[1] + 0.5;
    bool ok = true;
    if (h.size() >= 3) {
      for (std::size_t j = 0; j < h.size() && ok; ++j) {
        auto a = h[j], b = h[(j + 1) % h.size()];
        if (cross(a, b, std::pair<double, double>{x, y}) < -1e-9) ok = false;
      }
    } else if (h.size() == 2) {
      // on the segment?
      auto a = h[0], b = h[1];
      double cr = cross(a, b, std::pair<double, double>{x, y});
      double dot = (x - a.first) * (b.first - a.first) + (y - a.second) * (b.second - a.second);
      double len2 = (b.first - a.first) * (b.first - a.first) +
                    (b.second - a.second) * (b.second - a.second);
      ok = std::abs(cr) < 1e-9 && dot >= -1e-9 && dot <= len2 + 1e-9;
    } else {
      ok = std::abs(x - h[0].first) < 1e-9 && std::abs(y - h[0].second) < 1e-9;
    }
    if (ok) out[i] = 1;
  }
  return out;
}

int hausdorff_cells_2d(const oracle::GridSpace& g, const oracle::Bits& a, const oracle::Bits& b) {
  // max over cells of one set of the Chebyshev distance to the other set
  auto dist = [&](const oracle::Bits& from, const oracle::Bits& to) {
    int worst = 0;
    for (std::size_t i = 0; i < from.size(); ++i) {
      if (!from[i]) continue;
      auto c = g.coords(i);
      int best = 1 << 20;
      for (std::size_t j = 0; j < to.size(); ++j) {
        if (!to[j]) continue;
        auto d = g.coords(j);
        int dx = std::abs(int(c[0]) - int(d[0]));
        int dy = std::abs(int(c[1]) - int(d[1]));
        best = std::min(best, std::max(dx, dy));
      }
      worst = std::max(worst, best);
    }
    return worst;
  };
  return std::max(dist(a, b), dist(b, a));
}

} // namespace

TEST_CASE("hypograph/epigraph/fill against column scans") {
  TreeStore s;
  std::mt19937 rng(21);
  for (int trial = 0; trial < 60; ++trial) {
    int k = 1 + int(rng() % 3);
    int p = 1 + int(rng() % (k == 3 ? 3 : 4));
    SpaceSpec sp(k, p);
    oracle::GridSpace g{k, p};
    auto bits = oracle::random_bits(g, rng, 0.2);
    NodeRef t = oracle::tree_of_bits(s, sp, g, bits);
    for (int a = 0; a < k; ++a) {
      CHECK(oracle::bits_of_tree(s, sp, hypograph(s, sp, t, a, p), p) ==
            scan_shadow(g, bits, a, true));
      CHECK(oracle::bits_of_tree(s, sp, epigraph(s, sp, t, a, p), p) ==
            scan_shadow(g, bits, a, false));
    }
    CHECK(oracle::bits_of_tree(s, sp, fill(s, sp, t, p), p) == scan_fill(g, bits));
  }
}

TEST_CASE("fill closes a hollow ring") {
  TreeStore s;
  SpaceSpec sp(2, 3);
  NodeRef ring = set_diff(s, sp, box_tree(s, sp, {1, 1}, {7, 7}), box_tree(s, sp, {2, 2}, {6, 6}),
                          3);
  NodeRef filled = fill(s, sp, ring, 3);
  CHECK(filled == box_tree(s, sp, {1, 1}, {7, 7}));
}

TEST_CASE("convex hull: superset, idempotent, near brute force") {
  TreeStore s;
  std::mt19937 rng(31);
  SpaceSpec sp(2, 4);
  oracle::GridSpace g{2, 4};
  for (int trial = 0; trial < 25; ++trial) {
    oracle::Bits bits(g.size(), 0);
    int npts = 2 + int(rng() % 10);
    for (int i = 0; i < npts; ++i) bits[rng() % bits.size()] = 1;
    NodeRef t = oracle::tree_of_bits(s, sp, g, bits);
    NodeRef h = convex_hull(s, sp, t, 4);

    // superset of the input
    CHECK(set_diff(s, sp, t, h, 4) == s.white());
    // idempotent
    CHECK(convex_hull(s, sp, h, 4) == h);
    // within one cell of the continuous hull of cell centers
    auto hb = oracle::bits_of_tree(s, sp, h, 4);
    auto ob = brute_hull_2d(g, bits);
    CHECK(hausdorff_cells_2d(g, hb, ob) <= 1);
  }
}

TEST_CASE("convex hull of a diagonal pair spans the chord") {
  TreeStore s;
  SpaceSpec sp(2, 3);
  NodeRef t = add_cell(s, sp, s.white(), {0, 0});
  t = add_cell(s, sp, t, {7, 7});
  NodeRef h = convex_hull(s, sp, t, 3);
  // every diagonal cell is covered
  for (std::uint32_t i = 0; i < 8; ++i) CHECK(probe(s, sp, h, {i, i}, 3));
}
