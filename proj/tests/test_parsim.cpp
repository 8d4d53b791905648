#include <random>
#include <set>
#include <sstream>

#include "doctest.h"
#include "kdt/parsim.hpp"
#include "kdt/setops.hpp"
#include "oracle.hpp"

using namespace kdt;

namespace {

NodeRef sequential(TreeStore& s, const SpaceSpec& sp, NodeRef a, NodeRef b, Kernel op, int p) {
  switch (op) {
    case Kernel::Union: return set_union(s, sp, a, b, p);
    case Kernel::Intersect: return set_intersect(s, sp, a, b, p);
    case Kernel::Diff: return set_diff(s, sp, a, b, p);
    case Kernel::Exclude: return set_exclude(s, sp, a, b, p);
    case Kernel::Assert: return assert_at(s, sp, a, p);
  }
  return kWhite;
}

std::string csv(const std::vector<TraceEvent>& t) {
  std::ostringstream out;
  write_trace_csv(out, t);
  return out.str();
}

} // namespace

TEST_CASE("synchronous machine activates slot ranges level by level") {
  TreeStore s;
  SpaceSpec sp(2, 2);
  CHECK_THROWS_WITH_AS(sync_execute(s, sp, s.black(), s.white(), Kernel::Assert, 2, 3),
                       "tree deeper than the machine", Error);

  auto sim = sync_execute(s, sp, s.black(), s.white(), Kernel::Union, 2, 8);
  CHECK(sim.result == s.black());
  for (int level = 0; level < 4; ++level) {
    CHECK(sim.trace[level].event == "activate");
    CHECK(sim.trace[level].processor == 1 << level); // first slot of the level
    CHECK(sim.trace[level].payload == std::uint64_t(1) << level);
  }
  CHECK(sim.trace[4].event == "terminal");
  CHECK(sim.trace[4].payload == 16);
  CHECK(sim.trace.back().event == "ascend");
  CHECK(sim.trace.back().payload == 1);

  // a single-node run holds one active processor, slot 1
  auto tiny = sync_execute(s, sp, s.black(), s.white(), Kernel::Assert, 0, 8);
  CHECK(tiny.trace.size() == 1);
  CHECK(tiny.trace[0].event == "terminal");
  CHECK(tiny.trace[0].processor == 1);
  CHECK(tiny.trace[0].payload == 1);
}

TEST_CASE("both machines reproduce the sequential kernels") {
  TreeStore s;
  std::mt19937 rng(71);
  const Kernel kernels[] = {Kernel::Union, Kernel::Intersect, Kernel::Diff, Kernel::Exclude,
                            Kernel::Assert};
  for (int trial = 0; trial < 100; ++trial) {
    int k = 1 + int(rng() % 2);
    int r = 1 + int(rng() % 3);
    SpaceSpec sp(k, r);
    oracle::GridSpace g{k, r};
    NodeRef a = oracle::tree_of_bits(s, sp, g, oracle::random_bits(g, rng, 0.4));
    NodeRef b = oracle::tree_of_bits(s, sp, g, oracle::random_bits(g, rng, 0.4));
    Kernel op = kernels[trial % 5];
    NodeRef want = sequential(s, sp, a, b, op, r);
    CHECK(sync_execute(s, sp, a, b, op, r, 12).result == want);
    CHECK(async_execute(s, sp, a, b, op, r, int(rng() % 4)).result == want);
  }
}

TEST_CASE("asynchronous distribution and traces") {
  TreeStore s;
  {
    // one processor: nothing crosses the network
    SpaceSpec sp(2, 2);
    auto sim = async_execute(s, sp, s.black(), s.white(), Kernel::Union, 2, 0);
    CHECK(sim.result == s.black());
    CHECK(sim.trace.empty());
  }
  {
    // a tree kept internal to depth p spreads one branch per processor
    const int p = 3;
    SpaceSpec sp(1, p);
    NodeRef t = s.white();
    for (std::uint32_t c = 0; c < 8; c += 2) t = add_cell(s, sp, t, {c});
    auto sim = async_execute(s, sp, t, s.white(), Kernel::Assert, p, p);
    std::multiset<int> recv;
    for (const auto& e : sim.trace)
      if (e.event == "recv") recv.insert(e.processor);
    CHECK(recv.size() == 7); // everyone but processor 0 gets exactly one branch
    CHECK(std::set<int>(recv.begin(), recv.end()).size() == 7);
    CHECK(recv.count(0) == 0);
    // first dispatch goes halfway around the network
    CHECK(sim.trace[0].event == "send");
    CHECK(sim.trace[0].processor == 0);
    CHECK(sim.trace[0].payload == 4);
    // sends acknowledge in matching number
    int sends = 0, acks = 0;
    for (const auto& e : sim.trace) {
      sends += e.event == "send";
      acks += e.event == "ack";
    }
    CHECK(sends == 7);
    CHECK(acks == 7);
  }
  {
    // identical runs give byte-identical traces
    SpaceSpec sp(2, 2);
    std::mt19937 rng(72);
    oracle::GridSpace g{2, 2};
    NodeRef a = oracle::tree_of_bits(s, sp, g, oracle::random_bits(g, rng, 0.5));
    auto s1 = async_execute(s, sp, a, s.black(), Kernel::Exclude, 2, 2);
    auto s2 = async_execute(s, sp, a, s.black(), Kernel::Exclude, 2, 2);
    CHECK(csv(s1.trace) == csv(s2.trace));
    auto y1 = sync_execute(s, sp, a, s.black(), Kernel::Exclude, 2, 8);
    auto y2 = sync_execute(s, sp, a, s.black(), Kernel::Exclude, 2, 8);
    CHECK(csv(y1.trace) == csv(y2.trace));
  }
}

TEST_CASE("omega routing reaches any target in exactly p hops") {
  {
    auto hops = omega_route(2, 5, 3);
    REQUIRE(hops.size() == 3);
    CHECK(hops.back() == 5);
    // entered bits are the destination's, most significant first
    CHECK((hops[0] & 1) == 1);
    CHECK((hops[1] & 1) == 0);
    CHECK((hops[2] & 1) == 1);
  }
  for (int p = 1; p <= 6; ++p) {
    int n = 1 << p;
    for (int from = 0; from < n; ++from)
      for (int to = 0; to < n; ++to) {
        auto hops = omega_route(from, to, p);
        CHECK(int(hops.size()) == p); // reentrant: even to == from
        CHECK(hops.back() == to);
      }
  }
  CHECK(omega_route(0, 0, 0).empty());
}

TEST_CASE("omega store-and-forward schedule") {
  {
    auto sched = omega_simulate({{2, 5, 1}}, 3);
    CHECK(sched.makespan == 3);
    CHECK(sched.collisions == 0);
    CHECK(sched.delivered_at[0] == 3);
  }
  {
    // disjoint routes run in parallel
    auto sched = omega_simulate({{0, 0, 1}, {1, 3, 1}}, 2);
    CHECK(sched.makespan == 2);
    CHECK(sched.collisions == 0);
  }
  {
    // same first link: the second message waits a step
    auto sched = omega_simulate({{0, 0, 1}, {0, 1, 1}}, 2);
    CHECK(sched.collisions >= 1);
    CHECK(sched.delivered_at[1] > sched.delivered_at[0]);
    CHECK(sched.makespan == 3);
  }
  {
    // deterministic in input order
    std::vector<OmegaMessage> msgs{{0, 3, 2}, {1, 3, 1}, {2, 0, 1}};
    auto a = omega_simulate(msgs, 2);
    auto b = omega_simulate(msgs, 2);
    CHECK(csv(a.trace) == csv(b.trace));
    CHECK(a.makespan == b.makespan);
  }
}
