#include <benchmark/benchmark.h>

#include <random>
#include <vector>

#include "kdt/build.hpp"
#include "kdt/codec.hpp"
#include "kdt/integral.hpp"
#include "kdt/setops.hpp"
#include "kdt/space.hpp"
#include "kdt/store.hpp"
#include "kdt/topo.hpp"

using namespace kdt;

namespace {

// A reproducible set of random boxes gives trees with realistic mixed
// granularity (large solid blocks plus fine fringes).
NodeRef random_boxes(TreeStore& s, const SpaceSpec& sp, std::mt19937& rng, int boxes) {
  NodeRef t = s.white();
  std::uint32_t side = sp.cells_per_axis();
  for (int i = 0; i < boxes; ++i) {
    Cell lo(sp.k), hi(sp.k);
    for (int a = 0; a < sp.k; ++a) {
      std::uint32_t x = rng() % side, y = rng() % side;
      lo[a] = std::min(x, y);
      hi[a] = std::max(x, y) + 1;
    }
    t = set_union(s, sp, t, box_tree(s, sp, lo, hi), sp.r);
  }
  return t;
}

void bench_set_union(benchmark::State& state) {
  TreeStore s;
  SpaceSpec sp(2, int(state.range(0)));
  std::mt19937 rng(1);
  NodeRef a = random_boxes(s, sp, rng, 32);
  NodeRef b = random_boxes(s, sp, rng, 32);
  for (auto _ : state) benchmark::DoNotOptimize(set_union(s, sp, a, b, sp.r));
  state.SetLabel("r=" + std::to_string(sp.r));
}
BENCHMARK(bench_set_union)->DenseRange(6, 12, 2);

void bench_set_intersect(benchmark::State& state) {
  TreeStore s;
  SpaceSpec sp(2, int(state.range(0)));
  std::mt19937 rng(2);
  NodeRef a = random_boxes(s, sp, rng, 32);
  NodeRef b = random_boxes(s, sp, rng, 32);
  for (auto _ : state) benchmark::DoNotOptimize(set_intersect(s, sp, a, b, sp.r));
}
BENCHMARK(bench_set_intersect)->DenseRange(6, 12, 2);

void bench_complement(benchmark::State& state) {
  TreeStore s;
  SpaceSpec sp(3, int(state.range(0)));
  std::mt19937 rng(3);
  NodeRef a = random_boxes(s, sp, rng, 24);
  for (auto _ : state) benchmark::DoNotOptimize(complement(s, sp, a, sp.r));
}
BENCHMARK(bench_complement)->DenseRange(4, 8, 2);

void bench_dilate(benchmark::State& state) {
  TreeStore s;
  SpaceSpec sp(2, int(state.range(0)));
  std::mt19937 rng(4);
  NodeRef a = random_boxes(s, sp, rng, 16);
  for (auto _ : state)
    benchmark::DoNotOptimize(morphology(s, sp, a, Metric::D1, MorphOp::Dilate, sp.r));
}
BENCHMARK(bench_dilate)->DenseRange(4, 8, 2);

void bench_components(benchmark::State& state) {
  TreeStore s;
  SpaceSpec sp(2, int(state.range(0)));
  std::mt19937 rng(5);
  NodeRef a = random_boxes(s, sp, rng, 16);
  for (auto _ : state)
    benchmark::DoNotOptimize(components(s, sp, a, Metric::D1, sp.r, LabelMethod::Growing).count);
}
BENCHMARK(bench_components)->DenseRange(4, 8, 2);

void bench_convex_hull(benchmark::State& state) {
  TreeStore s;
  SpaceSpec sp(2, int(state.range(0)));
  std::mt19937 rng(6);
  NodeRef a = s.white();
  for (int i = 0; i < 64; ++i) {
    Cell c(2);
    c[0] = rng() % sp.cells_per_axis();
    c[1] = rng() % sp.cells_per_axis();
    a = add_cell(s, sp, a, c);
  }
  for (auto _ : state) benchmark::DoNotOptimize(convex_hull(s, sp, a, sp.r));
}
BENCHMARK(bench_convex_hull)->DenseRange(4, 7, 1);

void bench_encode_decode(benchmark::State& state) {
  TreeStore s;
  SpaceSpec sp(2, int(state.range(0)));
  std::mt19937 rng(7);
  NodeRef a = random_boxes(s, sp, rng, 32);
  for (auto _ : state) {
    TreeCode tc = encode(s, a);
    benchmark::DoNotOptimize(decode(s, tc));
  }
}
BENCHMARK(bench_encode_decode)->DenseRange(6, 12, 2);

void bench_cell_count(benchmark::State& state) {
  TreeStore s;
  SpaceSpec sp(2, int(state.range(0)));
  std::mt19937 rng(8);
  NodeRef a = random_boxes(s, sp, rng, 32);
  for (auto _ : state) benchmark::DoNotOptimize(cell_count(s, sp, a, sp.r));
}
BENCHMARK(bench_cell_count)->DenseRange(6, 12, 2);

} // namespace

BENCHMARK_MAIN();
