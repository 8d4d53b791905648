#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "kdt/space.hpp"
#include "kdt/store.hpp"

namespace kdt {

// Kernels simple enough to run under both execution models.
enum class Kernel { Union, Intersect, Diff, Exclude, Assert };

struct TraceEvent {
  int step = 0;
  int processor = 0;
  std::string event;
  std::uint64_t payload = 0;
};

struct SimResult {
  NodeRef result = kWhite;
  std::vector<TraceEvent> trace;
};

// Level-synchronous execution on the pyramidal layout: the tree is fully
// developed to the working depth, slot 1 holds the root and slot n's sons
// live in slots 2n and 2n+1, so the active set at level L is exactly the
// slot range [2^L, 2^(L+1)). The host drives one breadth-first step per
// level down and back up; the trace records each step's first active slot
// and active count. d is the deepest level the machine can hold.
SimResult sync_execute(TreeStore& s, const SpaceSpec& sp, NodeRef a, NodeRef b, Kernel op,
                       int precision, int d);

// Asynchronous execution over 2^p processors. The operand pair starts on
// processor 0; at level n a node's right branch is dispatched ahead of the
// left to the processor 2^(p-n) places further around the network, until the
// network is full, after which branches stay local. The sender processes its
// left branch, then blocks on the acknowledgement. The trace records sends,
// receptions and acknowledgements with the dispatched subtree size.
SimResult async_execute(TreeStore& s, const SpaceSpec& sp, NodeRef a, NodeRef b, Kernel op,
                        int precision, int p);

// Omega-network route: each of the p stages shuffles the current position
// one bit left and enters the next destination bit, most significant first,
// so every route takes exactly p hops wherever it starts. Returns the nodes
// reached after each hop; the last one is the destination.
std::vector<int> omega_route(int from, int to, int p);

struct OmegaMessage {
  int from = 0;
  int to = 0;
  int size = 1; // steps a link stays held per hop
};

struct OmegaSchedule {
  int makespan = 0;
  int collisions = 0;              // hops delayed waiting for a link
  std::vector<int> delivered_at;   // per message
  std::vector<TraceEvent> trace;   // one hop event per link traversal
};

// Store-and-forward delivery: a link carries one message at a time, later
// arrivals wait for it to free in input order, and every wait counts as a
// collision. Deterministic in the input order.
OmegaSchedule omega_simulate(const std::vector<OmegaMessage>& messages, int p);

// step,processor,event,payload lines.
void write_trace_csv(std::ostream& out, const std::vector<TraceEvent>& trace);

} // namespace kdt
