#include "kdt/topo.hpp"

#include <algorithm>
#include <numeric>
#include <unordered_map>
#include <unordered_set>

#include "kdt/setops.hpp"

namespace kdt {

namespace {

// Interleaved cell key in tree traversal order (axis 0 first, MSB first).
std::uint64_t cell_key(const Cell& c, int k, int p) {
  std::uint64_t key = 0;
  for (int bit = p - 1; bit >= 0; --bit)
    for (int a = 0; a < k; ++a) key = (key << 1) | ((c[a] >> bit) & 1);
  return key;
}

// Linear key for hashing, axis 0 fastest.
std::uint64_t linear_key(const Cell& c, int p) {
  std::uint64_t key = 0;
  for (std::size_t a = c.size(); a-- > 0;) key = (key << p) | c[a];
  return key;
}

NodeRef build_sorted(TreeStore& s, const std::uint64_t* keys, std::size_t n, int level,
                     int depth) {
  if (n == 0) return s.white();
  if (level == depth) return s.black();
  std::uint64_t bit = std::uint64_t(1) << (depth - 1 - level);
  std::size_t split = std::lower_bound(keys, keys + n, std::uint64_t(0), [&](std::uint64_t a,
                                                                             std::uint64_t) {
                        return !(a & bit);
                      }) -
                      keys;
  NodeRef l = build_sorted(s, keys, split, level + 1, depth);
  NodeRef r = build_sorted(s, keys + split, n - split, level + 1, depth);
  return s.internal(l, r);
}

using Labeled = std::pair<std::uint64_t, double>;

NodeRef build_sorted_val(TreeStore& s, const Labeled* kv, std::size_t n, int level, int depth) {
  if (n == 0) return s.white();
  if (level == depth) return s.black_val(kv->second);
  std::uint64_t bit = std::uint64_t(1) << (depth - 1 - level);
  std::size_t split =
      std::lower_bound(kv, kv + n, std::uint64_t(0),
                       [&](const Labeled& a, std::uint64_t) { return !(a.first & bit); }) -
      kv;
  NodeRef l = build_sorted_val(s, kv, split, level + 1, depth);
  NodeRef r = build_sorted_val(s, kv + split, n - split, level + 1, depth);
  return s.internal_val(l, r);
}

// ---- adjacency search -------------------------------------------------

struct AdjCtx {
  TreeStore& s;
  SpaceSpec wp; // k at the working precision
  int depth;
  bool dinf;
  bool background; // record black-white contacts instead of black-black ones
  std::vector<AdjacencyRecord>* records = nullptr;
  std::unordered_map<std::uint64_t, std::uint32_t>* marks = nullptr;
  int mark_axis = 0;
  std::vector<std::int8_t> shift; // per axis: 0 aligned, +1 b above a, -1 below
  Cell ca, cb;
};

void pair_rec(AdjCtx& c, NodeRef a, NodeRef b, int level) {
  if (c.background) {
    if (c.s.is_white(a) && c.s.is_white(b)) return;
    if (c.s.is_terminal(a) && c.s.is_terminal(b) && c.s.is_black_leaf(a) && c.s.is_black_leaf(b))
      return;
  } else {
    if (c.s.is_white(a) || c.s.is_white(b)) return;
  }
  if (level == c.depth) {
    if (c.background) {
      // a sits on the lower side of the contact plane, b on the upper one
      if (!c.s.is_white(a) && c.s.is_white(b))
        (*c.marks)[linear_key(c.ca, c.wp.r)] |= 2u << (2 * c.mark_axis); // background right
      if (c.s.is_white(a) && !c.s.is_white(b))
        (*c.marks)[linear_key(c.cb, c.wp.r)] |= 1u << (2 * c.mark_axis); // background left
    } else {
      c.records->push_back({c.ca, c.cb});
    }
    return;
  }
  int q = c.wp.axis_at(level);
  std::uint32_t half = block_extent(c.wp, level, q) / 2;
  if (c.shift[q] > 0) {
    c.ca[q] += half;
    pair_rec(c, c.s.right(a), c.s.left(b), level + 1);
    c.ca[q] -= half;
    return;
  }
  if (c.shift[q] < 0) {
    c.cb[q] += half;
    pair_rec(c, c.s.left(a), c.s.right(b), level + 1);
    c.cb[q] -= half;
    return;
  }
  pair_rec(c, c.s.left(a), c.s.left(b), level + 1);
  c.ca[q] += half;
  c.cb[q] += half;
  pair_rec(c, c.s.right(a), c.s.right(b), level + 1);
  c.ca[q] -= half;
  c.cb[q] -= half;
  if (c.dinf) {
    // widen the neighborhood across this axis, in both senses: the sides
    // enter the halves hugging the new contact plane, and later levels of
    // this axis keep them pressed against it
    c.shift[q] = 1;
    c.cb[q] += half;
    pair_rec(c, c.s.left(a), c.s.right(b), level + 1);
    c.cb[q] -= half;
    c.shift[q] = -1;
    c.ca[q] += half;
    pair_rec(c, c.s.right(a), c.s.left(b), level + 1);
    c.ca[q] -= half;
    c.shift[q] = 0;
  }
}

void spawn_rec(AdjCtx& c, NodeRef n, int level, Cell& lo) {
  if (c.s.is_white(n)) return;
  // solid blocks hold no interior background contacts; their outer faces are
  // handled by the enclosing splits
  if (c.background && c.s.is_terminal(n) && c.s.is_black_leaf(n)) return;
  if (level == c.depth) return;
  int q = c.wp.axis_at(level);
  std::uint32_t half = block_extent(c.wp, level, q) / 2;
  std::fill(c.shift.begin(), c.shift.end(), 0);
  c.shift[q] = 1;
  c.ca = lo;
  c.cb = lo;
  c.cb[q] += half;
  c.mark_axis = q;
  pair_rec(c, c.s.left(n), c.s.right(n), level + 1);
  spawn_rec(c, c.s.left(n), level + 1, lo);
  lo[q] += half;
  spawn_rec(c, c.s.right(n), level + 1, lo);
  lo[q] -= half;
}

// Per-cell background-contact marks (d1, in-frame only): bit 2a for
// background on the left along axis a, bit 2a+1 for the right.
std::unordered_map<std::uint64_t, std::uint32_t> background_marks(TreeStore& s,
                                                                  const SpaceSpec& sp, NodeRef t,
                                                                  int precision) {
  std::unordered_map<std::uint64_t, std::uint32_t> marks;
  AdjCtx c{s, SpaceSpec(sp.k, precision), sp.k * precision, false, true};
  c.marks = &marks;
  c.shift.assign(sp.k, 0);
  Cell lo(sp.k, 0);
  spawn_rec(c, t, 0, lo);
  return marks;
}

std::vector<std::uint64_t> sorted_keys(const std::vector<Cell>& cells, int k, int p) {
  std::vector<std::uint64_t> keys;
  keys.reserve(cells.size());
  for (const auto& c : cells) keys.push_back(cell_key(c, k, p));
  std::sort(keys.begin(), keys.end());
  return keys;
}

} // namespace

std::vector<std::vector<int>> metric_offsets(int k, Metric metric) {
  std::vector<std::vector<int>> out;
  if (metric == Metric::D1) {
    for (int a = 0; a < k; ++a)
      for (int d : {-1, 1}) {
        std::vector<int> v(k, 0);
        v[a] = d;
        out.push_back(std::move(v));
      }
    return out;
  }
  std::vector<int> v(k, -1);
  for (;;) {
    if (std::any_of(v.begin(), v.end(), [](int x) { return x != 0; })) out.push_back(v);
    int a = 0;
    for (; a < k; ++a) {
      if (++v[a] <= 1) break;
      v[a] = -1;
    }
    if (a == k) break;
  }
  return out;
}

namespace {

struct CellSet {
  std::vector<Cell> cells;
  std::unordered_set<std::uint64_t> keys;
  int p;

  bool has(const Cell& c) const { return keys.count(linear_key(c, p)) != 0; }
};

CellSet make_set(const TreeStore& s, const SpaceSpec& sp, NodeRef t, int p) {
  CellSet out;
  out.p = p;
  out.cells = cells_of_tree(s, sp, t, p);
  for (const auto& c : out.cells) out.keys.insert(linear_key(c, p));
  return out;
}

} // namespace

bool shifted_cell(const Cell& c, const std::vector<int>& off, std::uint32_t side, Cell& out) {
  out = c;
  for (std::size_t a = 0; a < c.size(); ++a) {
    long long v = (long long)c[a] + off[a];
    if (v < 0 || v >= (long long)side) return false;
    out[a] = std::uint32_t(v);
  }
  return true;
}

namespace {

// Black cells with a white in-frame metric neighbor. Neighborhoods are
// clipped at the frame, matching the in-frame contact marks of the tree
// algorithms; this is what keeps open(S) inside S and close(S) around it.
std::vector<Cell> boundary_cells(const CellSet& set, const std::vector<std::vector<int>>& offs,
                                 std::uint32_t side) {
  std::vector<Cell> out;
  Cell n;
  for (const auto& c : set.cells) {
    bool full = true;
    for (const auto& off : offs) {
      if (shifted_cell(c, off, side, n) && !set.has(n)) {
        full = false;
        break;
      }
    }
    if (!full) out.push_back(c);
  }
  return out;
}

std::vector<Cell> exo_cells(const CellSet& set, const std::vector<std::vector<int>>& offs,
                            std::uint32_t side) {
  std::vector<Cell> out;
  std::unordered_set<std::uint64_t> seen;
  Cell n;
  for (const auto& c : set.cells)
    for (const auto& off : offs) {
      if (!shifted_cell(c, off, side, n) || set.has(n)) continue;
      if (seen.insert(linear_key(n, set.p)).second) out.push_back(n);
    }
  return out;
}

} // namespace

std::vector<Cell> cells_of_tree(const TreeStore& s, const SpaceSpec& sp, NodeRef t,
                                int precision) {
  std::vector<Cell> out;
  SpaceSpec wp(sp.k, precision);
  for_each_block(s, wp, t, precision, [&](const Cell& lo, int level, NodeRef leaf) {
    if (s.is_white(leaf)) return;
    Cell ext(sp.k);
    for (int a = 0; a < sp.k; ++a) ext[a] = block_extent(wp, level, a);
    Cell it = lo;
    for (;;) {
      out.push_back(it);
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

NodeRef tree_of_cells(TreeStore& s, const SpaceSpec& sp, const std::vector<Cell>& cells,
                      int precision) {
  auto keys = sorted_keys(cells, sp.k, precision);
  return build_sorted(s, keys.data(), keys.size(), 0, sp.k * precision);
}

NodeRef tree_of_labeled_cells(TreeStore& s, const SpaceSpec& sp,
                              const std::vector<std::pair<Cell, double>>& cells, int precision) {
  std::vector<Labeled> kv;
  kv.reserve(cells.size());
  for (const auto& [c, v] : cells) kv.push_back({cell_key(c, sp.k, precision), v});
  std::sort(kv.begin(), kv.end(),
            [](const Labeled& a, const Labeled& b) { return a.first < b.first; });
  return build_sorted_val(s, kv.data(), kv.size(), 0, sp.k * precision);
}

std::vector<AdjacencyRecord> adjacencies(TreeStore& s, const SpaceSpec& sp, NodeRef t,
                                         Metric metric, int precision) {
  sp.check_precision(precision);
  std::vector<AdjacencyRecord> records;
  AdjCtx c{s, SpaceSpec(sp.k, precision), sp.k * precision, metric == Metric::Dinf, false};
  c.records = &records;
  c.shift.assign(sp.k, 0);
  Cell lo(sp.k, 0);
  spawn_rec(c, t, 0, lo);
  return records;
}

NodeRef space_closure(TreeStore& s, const SpaceSpec& sp, NodeRef t, int precision) {
  sp.check_precision(precision);
  std::uint32_t side = std::uint32_t(1) << precision;
  if (side < 3) return s.white(); // every cell lies on an outer face
  SpaceSpec wp(sp.k, precision);
  Cell lo(sp.k, 1), hi(sp.k, side - 1);
  NodeRef interior = box_tree(s, wp, lo, hi);
  return set_intersect(s, sp, t, interior, precision);
}

NodeRef boundary(TreeStore& s, const SpaceSpec& sp, NodeRef t, Metric metric, int precision) {
  sp.check_precision(precision);
  CellSet set = make_set(s, sp, t, precision);
  auto offs = metric_offsets(sp.k, metric);
  return tree_of_cells(s, sp, boundary_cells(set, offs, std::uint32_t(1) << precision),
                       precision);
}

NodeRef exo_boundary(TreeStore& s, const SpaceSpec& sp, NodeRef t, Metric metric, int precision) {
  sp.check_precision(precision);
  CellSet set = make_set(s, sp, t, precision);
  auto offs = metric_offsets(sp.k, metric);
  return tree_of_cells(s, sp, exo_cells(set, offs, std::uint32_t(1) << precision), precision);
}

NodeRef morphology(TreeStore& s, const SpaceSpec& sp, NodeRef t, Metric metric, MorphOp op,
                   int precision) {
  switch (op) {
  case MorphOp::Erode:
    return set_diff(s, sp, assert_at(s, sp, t, precision), boundary(s, sp, t, metric, precision),
                    precision);
  case MorphOp::Dilate:
    return set_union(s, sp, assert_at(s, sp, t, precision),
                     exo_boundary(s, sp, t, metric, precision), precision);
  case MorphOp::Open: {
    NodeRef e = morphology(s, sp, t, metric, MorphOp::Erode, precision);
    return morphology(s, sp, e, metric, MorphOp::Dilate, precision);
  }
  case MorphOp::Close: {
    NodeRef d = morphology(s, sp, t, metric, MorphOp::Dilate, precision);
    return morphology(s, sp, d, metric, MorphOp::Erode, precision);
  }
  }
  fail(Errc::NotImplemented, "bad morphology op");
}

NodeRef median_filter(TreeStore& s, const SpaceSpec& sp, NodeRef t, Metric metric,
                      int precision) {
  sp.check_precision(precision);
  CellSet set = make_set(s, sp, t, precision);
  auto offs = metric_offsets(sp.k, metric);
  std::uint32_t side = std::uint32_t(1) << precision;
  std::vector<Cell> drop, add;
  auto vote = [&](const Cell& c) {
    int signed_count = 0;
    Cell n;
    for (const auto& off : offs) {
      if (!shifted_cell(c, off, side, n)) continue; // clipped at the frame
      signed_count += set.has(n) ? 1 : -1;
    }
    return signed_count;
  };
  for (const auto& c : boundary_cells(set, offs, side))
    if (vote(c) < 0) drop.push_back(c);
  for (const auto& c : exo_cells(set, offs, side))
    if (vote(c) > 0) add.push_back(c);
  std::unordered_set<std::uint64_t> dropped;
  for (const auto& c : drop) dropped.insert(linear_key(c, precision));
  std::vector<Cell> kept;
  for (const auto& c : set.cells)
    if (!dropped.count(linear_key(c, precision))) kept.push_back(c);
  for (auto& c : add) kept.push_back(std::move(c));
  return tree_of_cells(s, sp, kept, precision);
}

namespace {

// One directional removal pass over freshly computed background marks.
// side_bit selects the phase: 1 for left-fronting cells, 2 for right ones.
NodeRef removal_pass(TreeStore& s, const SpaceSpec& sp, NodeRef t, int cnxdeg, int precision,
                     std::uint32_t side_bit, int& removed) {
  auto marks = background_marks(s, sp, t, precision);
  auto cells = cells_of_tree(s, sp, t, precision);
  std::vector<Cell> kept;
  removed = 0;
  for (const auto& c : cells) {
    std::uint32_t m = 0;
    auto it = marks.find(linear_key(c, precision));
    if (it != marks.end()) m = it->second;
    bool front = false;
    int connex = 0;
    for (int a = 0; a < sp.k; ++a) {
      std::uint32_t digit = (m >> (2 * a)) & 3u;
      if (digit & side_bit) front = true;
      if (digit) ++connex;
    }
    if (front && connex < cnxdeg)
      ++removed;
    else
      kept.push_back(c);
  }
  return tree_of_cells(s, sp, kept, precision);
}

} // namespace

std::pair<NodeRef, int> thin_step(TreeStore& s, const SpaceSpec& sp, NodeRef t, int target_dim,
                                  int precision) {
  sp.check_precision(precision);
  if (target_dim < 0 || target_dim >= sp.k) fail(Errc::AxisOutOfRange, "bad target dimension");
  int cnxdeg = sp.k - target_dim;
  int nl = 0, nr = 0;
  NodeRef cur = assert_at(s, sp, t, precision);
  cur = removal_pass(s, sp, cur, cnxdeg, precision, 1, nl);
  cur = removal_pass(s, sp, cur, cnxdeg, precision, 2, nr);
  return {cur, nl + nr};
}

NodeRef median_set(TreeStore& s, const SpaceSpec& sp, NodeRef t, int target_dim, int precision) {
  NodeRef cur = assert_at(s, sp, t, precision);
  for (;;) {
    auto [next, removed] = thin_step(s, sp, cur, target_dim, precision);
    cur = next;
    if (removed == 0) return cur;
  }
}

int intrinsic_dimension(TreeStore& s, const SpaceSpec& sp, NodeRef t, int precision) {
  auto records = adjacencies(s, sp, t, Metric::D1, precision);
  std::unordered_map<std::uint64_t, std::uint32_t> axes;
  for (const auto& rec : records) {
    int axis = 0;
    for (int a = 0; a < sp.k; ++a)
      if (rec.a[a] != rec.b[a]) axis = a;
    axes[linear_key(rec.a, precision)] |= 1u << axis;
    axes[linear_key(rec.b, precision)] |= 1u << axis;
  }
  int best = 0;
  for (const auto& [key, mask] : axes) {
    int count = 0;
    for (int a = 0; a < sp.k; ++a)
      if (mask & (1u << a)) ++count;
    best = std::max(best, count);
  }
  return best;
}

namespace {

struct UnionFind {
  std::vector<std::uint32_t> parent;
  explicit UnionFind(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  std::uint32_t find(std::uint32_t x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void unite(std::uint32_t a, std::uint32_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  }
};

} // namespace

Components components(TreeStore& s, const SpaceSpec& sp, NodeRef t, Metric metric, int precision,
                      LabelMethod method) {
  sp.check_precision(precision);
  auto cells = cells_of_tree(s, sp, t, precision);
  if (cells.empty()) return {s.white(), 0};
  // traversal order gives deterministic renumbering
  std::sort(cells.begin(), cells.end(), [&](const Cell& a, const Cell& b) {
    return cell_key(a, sp.k, precision) < cell_key(b, sp.k, precision);
  });
  std::unordered_map<std::uint64_t, std::uint32_t> index;
  for (std::uint32_t i = 0; i < cells.size(); ++i)
    index[linear_key(cells[i], precision)] = i;
  auto records = adjacencies(s, sp, t, metric, precision);
  std::vector<std::uint32_t> label(cells.size());
  if (method == LabelMethod::Bucket) {
    UnionFind uf(cells.size());
    for (const auto& rec : records)
      uf.unite(index.at(linear_key(rec.a, precision)), index.at(linear_key(rec.b, precision)));
    for (std::uint32_t i = 0; i < label.size(); ++i) label[i] = uf.find(i);
  } else {
    // label growing: keep the minimum label across every adjacency until
    // nothing changes
    std::iota(label.begin(), label.end(), 0);
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
    edges.reserve(records.size());
    for (const auto& rec : records)
      edges.push_back({index.at(linear_key(rec.a, precision)),
                       index.at(linear_key(rec.b, precision))});
    bool changed = true;
    while (changed) {
      changed = false;
      for (const auto& [a, b] : edges) {
        std::uint32_t m = std::min(label[a], label[b]);
        if (label[a] != m || label[b] != m) {
          label[a] = label[b] = m;
          changed = true;
        }
      }
    }
  }
  std::unordered_map<std::uint32_t, std::uint32_t> renumber;
  std::vector<std::pair<Cell, double>> labeled;
  labeled.reserve(cells.size());
  for (std::uint32_t i = 0; i < cells.size(); ++i) {
    auto it = renumber.try_emplace(label[i], std::uint32_t(renumber.size() + 1)).first;
    labeled.push_back({cells[i], double(it->second)});
  }
  return {tree_of_labeled_cells(s, sp, labeled, precision), int(renumber.size())};
}

std::vector<NodeRef> segment_forest(TreeStore& s, const SpaceSpec& sp, NodeRef labeled,
                                    int precision) {
  SpaceSpec wp(sp.k, precision);
  std::unordered_map<int, std::vector<Cell>> groups;
  int max_label = 0;
  for_each_block(s, wp, labeled, precision, [&](const Cell& lo, int level, NodeRef leaf) {
    if (s.is_white(leaf)) return;
    int label = int(s.value(leaf));
    max_label = std::max(max_label, label);
    Cell ext(sp.k);
    for (int a = 0; a < sp.k; ++a) ext[a] = block_extent(wp, level, a);
    Cell it = lo;
    for (;;) {
      groups[label].push_back(it);
      int a = 0;
      for (; a < sp.k; ++a) {
        if (++it[a] < lo[a] + ext[a]) break;
        it[a] = lo[a];
      }
      if (a == sp.k) break;
    }
  });
  std::vector<NodeRef> forest;
  for (int label = 1; label <= max_label; ++label) {
    auto it = groups.find(label);
    forest.push_back(it == groups.end() ? s.white()
                                        : tree_of_cells(s, sp, it->second, precision));
  }
  return forest;
}

NodeRef extract_component(const std::vector<NodeRef>& forest, std::size_t index) {
  if (index >= forest.size()) fail(Errc::IndexOutOfRange, "no such component");
  return forest[index];
}

Components classify(TreeStore& s, const SpaceSpec& sp, const std::vector<NodeRef>& responses,
                    Metric metric, int precision, int response_precision) {
  if (responses.empty()) fail(Errc::ArityMismatch, "no response images");
  sp.check_precision(precision);
  auto support = cells_of_tree(s, sp, responses[0], precision);
  std::sort(support.begin(), support.end());
  for (std::size_t i = 1; i < responses.size(); ++i) {
    auto other = cells_of_tree(s, sp, responses[i], precision);
    std::sort(other.begin(), other.end());
    if (other != support) fail(Errc::SupportMismatch, "response supports differ");
  }
  int m = int(responses.size());
  SpaceSpec rsp(m, response_precision);
  // radiometric point cloud: one m-space cell per distinct response vector
  std::vector<Cell> radio;
  std::vector<Cell> vectors; // per support cell, its radiometric cell
  vectors.reserve(support.size());
  for (const auto& c : support) {
    Cell v(m);
    for (int i = 0; i < m; ++i) {
      double value = 0.0;
      probe(s, sp, responses[i], c, precision, &value);
      if (value == kNoValue) value = 1.0; // plain black support counts full
      v[i] = quantize(std::clamp(value, 0.0, 1.0), response_precision);
    }
    radio.push_back(v);
    vectors.push_back(std::move(v));
  }
  NodeRef radio_tree = tree_of_cells(s, rsp, radio, response_precision);
  Components themes = components(s, rsp, radio_tree, metric, response_precision,
                                 LabelMethod::Bucket);
  std::vector<std::pair<Cell, double>> labeled;
  labeled.reserve(support.size());
  for (std::size_t i = 0; i < support.size(); ++i) {
    double label = 0.0;
    probe(s, rsp, themes.labeled, vectors[i], response_precision, &label);
    labeled.push_back({support[i], label});
  }
  return {tree_of_labeled_cells(s, sp, labeled, precision), themes.count};
}

} // namespace kdt
