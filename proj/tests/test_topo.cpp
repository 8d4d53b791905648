#include <algorithm>
#include <map>
#include <set>

#include "doctest.h"
#include "kdt/setops.hpp"
#include "kdt/topo.hpp"
#include "oracle.hpp"

using namespace kdt;

namespace {

std::vector<std::vector<int>> offsets(int k, Metric m) {
  std::vector<std::vector<int>> out;
  if (m == Metric::D1) {
    for (int a = 0; a < k; ++a)
      for (int d : {-1, 1}) {
        std::vector<int> v(k, 0);
        v[a] = d;
        out.push_back(v);
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

bool step(const oracle::GridSpace& g, std::size_t i, const std::vector<int>& off,
          std::size_t& out) {
  auto c = g.coords(i);
  for (int a = 0; a < g.k; ++a) {
    long long v = (long long)c[a] + off[a];
    if (v < 0 || v >= (long long)g.side()) return false;
    c[a] = std::uint32_t(v);
  }
  out = g.index(c);
  return true;
}

oracle::Bits grid_boundary(const oracle::GridSpace& g, const oracle::Bits& in, Metric m) {
  oracle::Bits out(in.size(), 0);
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

oracle::Bits grid_dilate(const oracle::GridSpace& g, const oracle::Bits& in, Metric m) {
  oracle::Bits out = in;
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

oracle::Bits grid_erode(const oracle::GridSpace& g, const oracle::Bits& in, Metric m) {
  auto b = grid_boundary(g, in, m);
  oracle::Bits out = in;
  for (std::size_t i = 0; i < in.size(); ++i)
    if (b[i]) out[i] = 0;
  return out;
}

oracle::Bits grid_median(const oracle::GridSpace& g, const oracle::Bits& in, Metric m) {
  oracle::Bits out = in;
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

std::vector<int> flood_labels(const oracle::GridSpace& g, const oracle::Bits& in, Metric m) {
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

// canonical partition signature: relabel by first appearance in index order
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

std::vector<int> tree_labels(TreeStore& s, const SpaceSpec& sp, const oracle::GridSpace& g,
                             NodeRef labeled, int p) {
  std::vector<int> out(g.size(), 0);
  for (const auto& c : cells_of_tree(s, sp, labeled, p)) {
    double v = 0;
    probe(s, sp, labeled, c, p, &v);
    out[g.index(c)] = int(v);
  }
  return out;
}

std::set<std::pair<std::uint64_t, std::uint64_t>> record_set(const oracle::GridSpace& g,
                                                             const std::vector<AdjacencyRecord>&
                                                                 recs) {
  std::set<std::pair<std::uint64_t, std::uint64_t>> out;
  for (const auto& r : recs) {
    auto a = g.index(r.a), b = g.index(r.b);
    out.insert({std::min(a, b), std::max(a, b)});
  }
  return out;
}

} // namespace

TEST_CASE("adjacency counts of interior cells") {
  TreeStore s;
  {
    SpaceSpec sp(2, 3);
    oracle::GridSpace g{2, 3};
    auto d1 = adjacencies(s, sp, s.black(), Metric::D1, 3);
    auto di = adjacencies(s, sp, s.black(), Metric::Dinf, 3);
    Cell mid{3, 3};
    auto touches = [&](const std::vector<AdjacencyRecord>& recs) {
      int n = 0;
      for (const auto& r : recs)
        if (r.a == mid || r.b == mid) ++n;
      return n;
    };
    CHECK(touches(d1) == 4);
    CHECK(touches(di) == 8);
    // every unordered pair appears exactly once
    CHECK(record_set(g, d1).size() == d1.size());
    CHECK(d1.size() == 2u * 8 * 7); // horizontal plus vertical face pairs
  }
  {
    SpaceSpec sp(3, 2);
    auto d1 = adjacencies(s, sp, s.black(), Metric::D1, 2);
    auto di = adjacencies(s, sp, s.black(), Metric::Dinf, 2);
    Cell mid{1, 1, 1};
    auto touches = [&](const std::vector<AdjacencyRecord>& recs) {
      int n = 0;
      for (const auto& r : recs)
        if (r.a == mid || r.b == mid) ++n;
      return n;
    };
    CHECK(touches(d1) == 6);
    CHECK(touches(di) == 26);
  }
  {
    // diagonal pair: no face contact, one corner contact
    SpaceSpec sp(2, 2);
    NodeRef t = add_cell(s, sp, s.white(), {1, 1});
    t = add_cell(s, sp, t, {2, 2});
    CHECK(adjacencies(s, sp, t, Metric::D1, 2).empty());
    CHECK(adjacencies(s, sp, t, Metric::Dinf, 2).size() == 1);
  }
}

TEST_CASE("adjacencies equal the grid pair oracle") {
  TreeStore s;
  std::mt19937 rng(41);
  for (int trial = 0; trial < 60; ++trial) {
    int k = 2 + int(rng() % 2);
    int p = 2 + int(rng() % (k == 3 ? 2 : 3));
    SpaceSpec sp(k, p);
    oracle::GridSpace g{k, p};
    auto bits = oracle::random_bits(g, rng, 0.35);
    NodeRef t = oracle::tree_of_bits(s, sp, g, bits);
    for (Metric m : {Metric::D1, Metric::Dinf}) {
      std::set<std::pair<std::uint64_t, std::uint64_t>> expect;
      auto offs = offsets(k, m);
      for (std::size_t i = 0; i < bits.size(); ++i) {
        if (!bits[i]) continue;
        for (const auto& off : offs) {
          std::size_t j;
          if (step(g, i, off, j) && bits[j])
            expect.insert({std::min<std::uint64_t>(i, j), std::max<std::uint64_t>(i, j)});
        }
      }
      auto recs = adjacencies(s, sp, t, m, p);
      CHECK(recs.size() == expect.size()); // each pair once
      CHECK(record_set(g, recs) == expect);
    }
  }
}

TEST_CASE("space closure whitens the outer faces") {
  TreeStore s;
  SpaceSpec line(1, 2);
  CHECK(space_closure(s, line, s.white(), 2) == s.white());
  CHECK(space_closure(s, line, s.black(), 2) == box_tree(s, line, {1}, {3}));
  SpaceSpec sp(2, 2);
  CHECK(space_closure(s, sp, s.black(), 2) == box_tree(s, sp, {1, 1}, {3, 3}));
}

TEST_CASE("morphology equals the dense structuring-element oracle") {
  TreeStore s;
  std::mt19937 rng(43);
  for (int trial = 0; trial < 200; ++trial) {
    int k = 2 + int(rng() % 2);
    int p = 2 + int(rng() % (k == 3 ? 2 : 3));
    SpaceSpec sp(k, p);
    oracle::GridSpace g{k, p};
    auto bits = oracle::random_bits(g, rng, 0.4);
    NodeRef t = oracle::tree_of_bits(s, sp, g, bits);
    Metric m = rng() % 2 ? Metric::D1 : Metric::Dinf;

    auto check = [&](NodeRef got, const oracle::Bits& want) {
      CHECK(oracle::bits_of_tree(s, sp, got, p) == want);
    };
    check(boundary(s, sp, t, m, p), grid_boundary(g, bits, m));
    check(morphology(s, sp, t, m, MorphOp::Erode, p), grid_erode(g, bits, m));
    check(morphology(s, sp, t, m, MorphOp::Dilate, p), grid_dilate(g, bits, m));
    check(morphology(s, sp, t, m, MorphOp::Open, p),
          grid_dilate(g, grid_erode(g, bits, m), m));
    check(morphology(s, sp, t, m, MorphOp::Close, p),
          grid_erode(g, grid_dilate(g, bits, m), m));
    check(median_filter(s, sp, t, m, p), grid_median(g, bits, m));

    // ordering chain
    NodeRef er = morphology(s, sp, t, m, MorphOp::Erode, p);
    NodeRef op = morphology(s, sp, t, m, MorphOp::Open, p);
    NodeRef cl = morphology(s, sp, t, m, MorphOp::Close, p);
    NodeRef di = morphology(s, sp, t, m, MorphOp::Dilate, p);
    NodeRef md = median_filter(s, sp, t, m, p);
    CHECK(set_diff(s, sp, er, op, p) == s.white());
    CHECK(set_diff(s, sp, op, t, p) == s.white());
    CHECK(set_diff(s, sp, assert_at(s, sp, t, p), cl, p) == s.white());
    CHECK(set_diff(s, sp, cl, di, p) == s.white());
    CHECK(set_diff(s, sp, er, md, p) == s.white());
    CHECK(set_diff(s, sp, md, di, p) == s.white());
  }
  SpaceSpec sp(2, 3);
  CHECK(morphology(s, sp, add_cell(s, sp, s.white(), {3, 3}), Metric::D1, MorphOp::Erode, 3) ==
        s.white());
  CHECK(morphology(s, sp, box_tree(s, sp, {2, 2}, {5, 5}), Metric::Dinf, MorphOp::Erode, 3) ==
        box_tree(s, sp, {3, 3}, {4, 4}));
}

TEST_CASE("thinning golden trace of a 3x3 block") {
  TreeStore s;
  SpaceSpec sp(2, 2);
  NodeRef block = box_tree(s, sp, {1, 1}, {4, 4});

  auto [step1, removed1] = thin_step(s, sp, block, 0, 2);
  CHECK(removed1 == 4); // the left pass peels the two low faces
  NodeRef expect1 = tree_of_cells(s, sp, {{1, 1}, {2, 2}, {2, 3}, {3, 2}, {3, 3}}, 2);
  CHECK(step1 == expect1);

  auto [step2, removed2] = thin_step(s, sp, step1, 0, 2);
  CHECK(removed2 == 2);
  NodeRef diagonal = tree_of_cells(s, sp, {{1, 1}, {2, 2}, {3, 3}}, 2);
  CHECK(step2 == diagonal);

  CHECK(median_set(s, sp, block, 0, 2) == diagonal);
  CHECK(median_set(s, sp, s.white(), 0, 2) == s.white());

  // a unit-thick line is already its own median set
  SpaceSpec sp3(2, 3);
  NodeRef line = box_tree(s, sp3, {1, 4}, {7, 5});
  CHECK(median_set(s, sp3, line, 1, 3) == line);
}

TEST_CASE("intrinsic dimension") {
  TreeStore s;
  SpaceSpec sp(2, 3);
  CHECK(intrinsic_dimension(s, sp, s.white(), 3) == 0);
  CHECK(intrinsic_dimension(s, sp, add_cell(s, sp, s.white(), {3, 3}), 3) == 0);
  CHECK(intrinsic_dimension(s, sp, box_tree(s, sp, {1, 4}, {7, 5}), 3) == 1);
  CHECK(intrinsic_dimension(s, sp, box_tree(s, sp, {1, 1}, {4, 4}), 3) == 2);
  SpaceSpec sp3(3, 2);
  CHECK(intrinsic_dimension(s, sp3, s.black(), 2) == 3);
  std::mt19937 rng(47);
  oracle::GridSpace g{2, 3};
  for (int trial = 0; trial < 30; ++trial) {
    auto bits = oracle::random_bits(g, rng, 0.3);
    NodeRef t = oracle::tree_of_bits(s, sp, g, bits);
    int dim = intrinsic_dimension(s, sp, t, 3);
    CHECK(dim <= 2);
    // per-cell axis-contact oracle
    int want = 0;
    for (std::size_t i = 0; i < bits.size(); ++i) {
      if (!bits[i]) continue;
      auto c = g.coords(i);
      int axes = 0;
      for (int a = 0; a < 2; ++a) {
        bool contact = false;
        for (int d : {-1, 1}) {
          auto cc = c;
          long long v = (long long)cc[a] + d;
          if (v < 0 || v >= 8) continue;
          cc[a] = std::uint32_t(v);
          contact = contact || bits[g.index(cc)];
        }
        if (contact) ++axes;
      }
      want = std::max(want, axes);
    }
    CHECK(dim == want);
  }
}

TEST_CASE("components match the flood-fill oracle for both methods") {
  TreeStore s;
  std::mt19937 rng(53);
  SpaceSpec sp(2, 4);
  oracle::GridSpace g{2, 4};
  for (int trial = 0; trial < 100; ++trial) {
    auto bits = oracle::random_bits(g, rng, 0.35);
    NodeRef t = oracle::tree_of_bits(s, sp, g, bits);
    for (Metric m : {Metric::D1, Metric::Dinf}) {
      auto want = canon(flood_labels(g, bits, m));
      int want_count = *std::max_element(want.begin(), want.end());
      for (LabelMethod method : {LabelMethod::Bucket, LabelMethod::Growing}) {
        auto got = components(s, sp, t, m, 4, method);
        CHECK(got.count == want_count);
        CHECK(canon(tree_labels(s, sp, g, got.labeled, 4)) == want);
      }
    }
  }

  // diagonal pair: connected across the corner only
  NodeRef diag = tree_of_cells(s, sp, {{3, 3}, {4, 4}}, 4);
  CHECK(components(s, sp, diag, Metric::Dinf, 4, LabelMethod::Bucket).count == 1);
  CHECK(components(s, sp, diag, Metric::D1, 4, LabelMethod::Bucket).count == 2);
  NodeRef faraway = tree_of_cells(s, sp, {{0, 0}, {12, 9}}, 4);
  CHECK(components(s, sp, faraway, Metric::Dinf, 4, LabelMethod::Growing).count == 2);
}

TEST_CASE("segment forest partitions the support") {
  TreeStore s;
  SpaceSpec sp(2, 3);
  NodeRef t = set_union(s, sp, box_tree(s, sp, {0, 0}, {2, 2}), box_tree(s, sp, {5, 5}, {8, 8}),
                        3);
  t = add_cell(s, sp, t, {6, 1});
  auto comps = components(s, sp, t, Metric::D1, 3, LabelMethod::Bucket);
  CHECK(comps.count == 3);
  auto forest = segment_forest(s, sp, comps.labeled, 3);
  REQUIRE(forest.size() == 3);
  NodeRef all = s.white();
  std::uint64_t mass = 0;
  for (const auto& part : forest) {
    all = set_union(s, sp, all, part, 3);
    mass += cell_count(s, sp, part, 3);
  }
  CHECK(all == t);
  CHECK(mass == cell_count(s, sp, t, 3));
  CHECK(extract_component(forest, 0) == forest[0]);
  CHECK_THROWS_AS((void)extract_component(forest, 3), Error);
}

TEST_CASE("thematic classification") {
  TreeStore s;
  SpaceSpec sp(2, 3);

  // constant image: one theme over the whole support
  NodeRef flat = s.white();
  for (std::uint32_t y = 0; y < 8; ++y)
    for (std::uint32_t x = 0; x < 8; ++x) flat = add_cell(s, sp, flat, {x, y}, 0.5);
  auto t1 = classify(s, sp, {flat}, Metric::D1, 3, 4);
  CHECK(t1.count == 1);

  // interleaved far-apart responses: themes follow value equality
  NodeRef mix = s.white();
  for (std::uint32_t y = 0; y < 8; ++y)
    for (std::uint32_t x = 0; x < 8; ++x)
      mix = add_cell(s, sp, mix, {x, y}, (x + y) % 2 ? 0.9 : 0.1);
  auto t2 = classify(s, sp, {mix}, Metric::D1, 3, 4);
  CHECK(t2.count == 2);
  double la = 0, lb = 0, lc = 0;
  probe(s, sp, t2.labeled, {0, 0}, 3, &la);
  probe(s, sp, t2.labeled, {2, 4}, 3, &lb);
  probe(s, sp, t2.labeled, {1, 0}, 3, &lc);
  CHECK(la == lb);
  CHECK(la != lc);

  // mismatched supports are rejected
  NodeRef small = add_cell(s, sp, s.white(), {0, 0}, 0.5);
  CHECK_THROWS_AS((void)classify(s, sp, {flat, small}, Metric::D1, 3, 4), Error);
}
