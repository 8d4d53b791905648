#include "kdt/pyramid.hpp"

#include <cmath>
#include <optional>
#include <unordered_map>
#include <unordered_set>

#include "kdt/build.hpp"
#include "kdt/setops.hpp"

namespace kdt {

namespace {

std::uint64_t lkey(const Cell& c, int r) {
  std::uint64_t key = 0;
  for (auto v : c) key = (key << r) | v;
  return key;
}

// First value reaching the maximal occurrence count, scanning in list order.
double vote(const std::vector<double>& vals) {
  double best = vals.front();
  int nbmaj = 0;
  for (std::size_t i = 0; i < vals.size(); ++i) {
    int n = 1;
    for (std::size_t j = i + 1; j < vals.size(); ++j)
      if (vals[j] == vals[i]) ++n;
    if (n > nbmaj) {
      best = vals[i];
      nbmaj = n;
    }
  }
  return best;
}

} // namespace

std::vector<std::pair<Cell, double>> labeled_cells(const TreeStore& s, const SpaceSpec& sp,
                                                   NodeRef p, int precision) {
  std::vector<std::pair<Cell, double>> out;
  SpaceSpec wp(sp.k, precision);
  for_each_block(s, wp, p, precision, [&](const Cell& lo, int level, NodeRef leaf) {
    if (s.is_white(leaf)) return;
    double v = s.is_valued(leaf) ? s.value(leaf) : 1.0;
    Cell ext(sp.k);
    for (int a = 0; a < sp.k; ++a) ext[a] = block_extent(wp, level, a);
    Cell it = lo;
    for (;;) {
      out.emplace_back(it, v);
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

NodeRef tree_to_pyramid(TreeStore& s, const SpaceSpec& sp, NodeRef t, int functional_axis,
                        SpaceSpec* support_space) {
  if (functional_axis < 0 || functional_axis >= sp.k)
    fail(Errc::AxisOutOfRange, "functional axis out of range");
  if (sp.k < 2) fail(Errc::AxisOutOfRange, "no support axes left");
  SpaceSpec sup(sp.k - 1, sp.r);
  if (support_space) *support_space = sup;
  int depth = sp.depth();

  auto rec = [&](auto&& self, NodeRef n, int level, double fmin, double fmax) -> NodeRef {
    if (s.is_white(n)) return s.white();
    if (level == depth) return s.black_val((fmin + fmax) / 2.0);
    if (s.is_terminal(n)) {
      // A solid block is constant over its support; the max-union along the
      // value axis keeps climbing the upper halves, landing on the midpoint
      // of the topmost value cell of the remaining interval.
      int q = 0;
      for (int l = level; l < depth; ++l)
        if (l % sp.k == functional_axis) ++q;
      return s.black_val(fmax - (fmax - fmin) / double(std::uint64_t(1) << (q + 1)));
    }
    if (level % sp.k == functional_axis) {
      NodeRef l = self(self, s.left(n), level + 1, fmin, (fmin + fmax) / 2.0);
      NodeRef r = self(self, s.right(n), level + 1, (fmin + fmax) / 2.0, fmax);
      return set_union(s, sup, l, r, sup.r);
    }
    NodeRef l = self(self, s.left(n), level + 1, fmin, fmax);
    NodeRef r = self(self, s.right(n), level + 1, fmin, fmax);
    return s.internal_val(l, r);
  };
  return rec(rec, t, 0, 0.0, 1.0);
}

NodeRef pyramid_to_tree(TreeStore& s, const SpaceSpec& sp, NodeRef p, SpaceSpec* out_space) {
  SpaceSpec osp(sp.k + 1, sp.r);
  if (out_space) *out_space = osp;
  NodeRef out = s.white();
  Cell c(sp.k + 1);
  for (const auto& [cell, v] : labeled_cells(s, sp, p, sp.r)) {
    if (v < 0.0 || v > 1.0) fail(Errc::ValueOutOfRange, "pyramid value outside [0, 1]");
    c[0] = quantize(v, sp.r);
    for (int a = 0; a < sp.k; ++a) c[a + 1] = cell[a];
    out = add_cell(s, osp, out, c);
  }
  return out;
}

NodeRef support(TreeStore& s, const SpaceSpec&, NodeRef p) {
  std::unordered_map<NodeRef, NodeRef> memo;
  auto rec = [&](auto&& self, NodeRef n) -> NodeRef {
    if (s.is_terminal(n)) return s.is_white(n) ? s.white() : s.black();
    auto it = memo.find(n);
    if (it != memo.end()) return it->second;
    NodeRef out = s.internal(self(self, s.left(n)), self(self, s.right(n)));
    memo.emplace(n, out);
    return out;
  };
  return rec(rec, p);
}

NodeRef colorize(TreeStore& s, const SpaceSpec&, NodeRef t, double value) {
  std::unordered_map<NodeRef, NodeRef> memo;
  auto rec = [&](auto&& self, NodeRef n) -> NodeRef {
    if (s.is_terminal(n)) return s.is_white(n) ? s.white() : s.black_val(value);
    auto it = memo.find(n);
    if (it != memo.end()) return it->second;
    NodeRef out = s.internal_val(self(self, s.left(n)), self(self, s.right(n)));
    memo.emplace(n, out);
    return out;
  };
  return rec(rec, t);
}

FunctionalStats stats(TreeStore& s, const SpaceSpec& sp, NodeRef p) {
  struct Acc {
    double fmin, fmax, avg, dsp;
  };
  int depth = sp.depth();
  auto rec = [&](auto&& self, NodeRef n, int level) -> std::optional<Acc> {
    if (s.is_white(n)) return std::nullopt;
    if (s.is_terminal(n) || level == depth) {
      double v = s.is_valued(n) ? s.value(n) : 1.0;
      return Acc{v, v, v, 0.0};
    }
    auto l = self(self, s.left(n), level + 1);
    auto r = self(self, s.right(n), level + 1);
    if (!l) return r;
    if (!r) return l;
    Acc out;
    out.fmin = std::min(l->fmin, r->fmin);
    out.fmax = std::max(l->fmax, r->fmax);
    out.avg = (l->avg + r->avg) / 2.0;
    out.dsp = (l->dsp + r->dsp) / 2.0 + (l->avg - r->avg) * (l->avg - r->avg) / 4.0;
    return out;
  };
  auto acc = rec(rec, p, 0);
  if (!acc) return {};
  FunctionalStats st;
  st.fmin = acc->fmin;
  st.fmax = acc->fmax;
  st.center = acc->avg;
  st.dispersion = acc->dsp > 0.0 ? std::sqrt(acc->dsp) : 0.0;
  return st;
}

NodeRef scale(TreeStore& s, const SpaceSpec&, NodeRef p, double center, double dispersion) {
  if (dispersion == 0.0) fail(Errc::ZeroDispersion, "scaling by zero dispersion");
  std::unordered_map<NodeRef, NodeRef> memo;
  auto rec = [&](auto&& self, NodeRef n) -> NodeRef {
    if (s.is_terminal(n)) {
      if (s.is_white(n)) return s.white();
      double v = s.is_valued(n) ? s.value(n) : 1.0;
      return s.black_val((v - center) / dispersion);
    }
    auto it = memo.find(n);
    if (it != memo.end()) return it->second;
    NodeRef out = s.internal_val(self(self, s.left(n)), self(self, s.right(n)));
    memo.emplace(n, out);
    return out;
  };
  return rec(rec, p);
}

NodeRef pyramid_extend(TreeStore& s, const SpaceSpec& sp, NodeRef p, Metric metric) {
  auto cells = labeled_cells(s, sp, p, sp.r);
  if (cells.empty()) fail(Errc::EmptyPyramid, "extension of an empty pyramid");
  std::unordered_map<std::uint64_t, double> label;
  for (const auto& [c, v] : cells) label[lkey(c, sp.r)] = v;

  auto offs = metric_offsets(sp.k, metric);
  std::uint32_t side = sp.cells_per_axis();
  std::vector<Cell> frontier;
  for (const auto& [c, v] : cells) frontier.push_back(c);

  Cell n;
  while (!frontier.empty()) {
    // Candidates touching the labeled set, each voted from the old labels.
    std::vector<std::pair<Cell, double>> added;
    std::unordered_set<std::uint64_t> seen;
    for (const auto& c : frontier)
      for (const auto& off : offs) {
        if (!shifted_cell(c, off, side, n)) continue;
        std::uint64_t key = lkey(n, sp.r);
        if (label.count(key) || !seen.insert(key).second) continue;
        std::vector<double> vals;
        Cell m;
        for (const auto& noff : offs) {
          if (!shifted_cell(n, noff, side, m)) continue;
          auto it = label.find(lkey(m, sp.r));
          if (it != label.end()) vals.push_back(it->second);
        }
        added.emplace_back(n, vote(vals));
      }
    frontier.clear();
    for (auto& [c, v] : added) {
      label.emplace(lkey(c, sp.r), v);
      frontier.push_back(c);
    }
  }

  std::vector<std::pair<Cell, double>> all;
  all.reserve(label.size());
  Cell it(sp.k, 0);
  for (;;) {
    all.emplace_back(it, label.at(lkey(it, sp.r)));
    int a = 0;
    for (; a < sp.k; ++a) {
      if (++it[a] < side) break;
      it[a] = 0;
    }
    if (a == sp.k) break;
  }
  return tree_of_labeled_cells(s, sp, all, sp.r);
}

NodeRef pyramid_median_filter(TreeStore& s, const SpaceSpec& sp, NodeRef p, Metric metric) {
  auto cells = labeled_cells(s, sp, p, sp.r);
  if (cells.empty()) return s.white();
  std::unordered_map<std::uint64_t, double> label;
  for (const auto& [c, v] : cells) label[lkey(c, sp.r)] = v;

  auto offs = metric_offsets(sp.k, metric);
  std::uint32_t side = sp.cells_per_axis();
  std::vector<std::pair<Cell, double>> out;
  out.reserve(cells.size());
  Cell n;
  for (const auto& [c, v] : cells) {
    std::vector<double> vals{v}; // own label heads the list and wins ties
    for (const auto& off : offs) {
      if (!shifted_cell(c, off, side, n)) continue;
      auto it = label.find(lkey(n, sp.r));
      if (it != label.end()) vals.push_back(it->second);
    }
    out.emplace_back(c, vote(vals));
  }
  return tree_of_labeled_cells(s, sp, out, sp.r);
}

double interpolate(double x, double xg, double xd, double fg, double fd) {
  if (xg == xd) fail(Errc::CoincidentCenters, "interpolation centers coincide");
  return (x - xg) / (xd - xg) * fg + (xd - x) / (xd - xg) * fd;
}

double barycentric_interpolate(const std::vector<double>& m, const std::vector<double>& cg,
                               const std::vector<double>& cd, double fg, double fd) {
  if (m.size() != cg.size() || m.size() != cd.size())
    fail(Errc::ArityMismatch, "point dimensions differ");
  double n2 = 0, dg = 0, dd = 0;
  for (std::size_t i = 0; i < m.size(); ++i) {
    double chord = cd[i] - cg[i];
    n2 += chord * chord;
    dg += (m[i] - cg[i]) * chord;
    dd += (cd[i] - m[i]) * chord;
  }
  if (n2 == 0.0) fail(Errc::CoincidentCenters, "interpolation centers coincide");
  return std::abs(dg) / n2 * fg + std::abs(dd) / n2 * fd;
}

} // namespace kdt
