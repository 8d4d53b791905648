#include "kdt/parsim.hpp"

#include <map>

#include "kdt/error.hpp"
#include "kdt/setops.hpp"

namespace kdt {

namespace {

bool leaf_black(const TreeStore& s, NodeRef a, NodeRef b, Kernel op) {
  bool ab = !s.is_white(a), bb = !s.is_white(b);
  switch (op) {
    case Kernel::Union: return ab || bb;
    case Kernel::Intersect: return ab && bb;
    case Kernel::Diff: return ab && !bb;
    case Kernel::Exclude: return ab != bb;
    case Kernel::Assert: return ab;
  }
  return false;
}

std::uint64_t node_count(const TreeStore& s, NodeRef n) {
  if (s.is_terminal(n)) return 1;
  return 1 + node_count(s, s.left(n)) + node_count(s, s.right(n));
}

} // namespace

SimResult sync_execute(TreeStore& s, const SpaceSpec& sp, NodeRef a, NodeRef b, Kernel op,
                       int precision, int d) {
  sp.check_precision(precision);
  int depth = sp.k * precision;
  if (depth > d) fail(Errc::CapacityExceeded, "tree deeper than the machine");

  SimResult out;
  int step = 0;
  // host-driven descent: each level doubles the active slot range
  for (int level = 0; level < depth; ++level)
    out.trace.push_back({step++, 1 << level, "activate", std::uint64_t(1) << level});

  // terminal processing on the fully developed level: slot bits below the
  // leading 1 are the branch choices down from the root
  std::uint64_t leaves = std::uint64_t(1) << depth;
  out.trace.push_back({step++, int(leaves), "terminal", leaves});
  std::vector<NodeRef> slot(leaves);
  for (std::uint64_t n = 0; n < leaves; ++n) {
    NodeRef pa = a, pb = b;
    for (int bit = depth - 1; bit >= 0; --bit) {
      bool right = (n >> bit) & 1;
      pa = right ? s.right(pa) : s.left(pa);
      pb = right ? s.right(pb) : s.left(pb);
    }
    slot[n] = leaf_black(s, pa, pb, op) ? s.black() : s.white();
  }

  // ascending return: even slots activate their parent, pairs merge
  for (int level = depth - 1; level >= 0; --level) {
    std::uint64_t width = std::uint64_t(1) << level;
    for (std::uint64_t n = 0; n < width; ++n) slot[n] = s.internal(slot[2 * n], slot[2 * n + 1]);
    out.trace.push_back({step++, int(width), "ascend", width});
  }
  out.result = slot[0];
  return out;
}

SimResult async_execute(TreeStore& s, const SpaceSpec& sp, NodeRef a, NodeRef b, Kernel op,
                        int precision, int p) {
  sp.check_precision(precision);
  if (p < 0 || p > 20) fail(Errc::CapacityExceeded, "network log-size out of range");
  int depth = sp.k * precision;
  int net = 1 << p;

  SimResult out;
  int step = 0;
  auto leafize = [&](NodeRef n) { return s.is_terminal(n) ? n : s.black(); };

  auto process = [&](auto&& self, NodeRef na, NodeRef nb, int level, int proc) -> NodeRef {
    if (level == depth || (s.is_terminal(na) && s.is_terminal(nb)))
      return leaf_black(s, leafize(na), leafize(nb), op) ? s.black() : s.white();
    // dispatch the right branch ahead of the left while the network fills
    bool remote = level + 1 <= p;
    int target = remote ? (proc + (1 << (p - (level + 1)))) % net : proc;
    NodeRef right;
    if (remote) {
      std::uint64_t size = node_count(s, s.right(na)) + node_count(s, s.right(nb));
      out.trace.push_back({step++, proc, "send", std::uint64_t(target)});
      out.trace.push_back({step++, target, "recv", size});
      right = self(self, s.right(na), s.right(nb), level + 1, target);
    }
    NodeRef left = self(self, s.left(na), s.left(nb), level + 1, proc);
    if (remote)
      out.trace.push_back({step++, target, "ack", std::uint64_t(proc)});
    else
      right = self(self, s.right(na), s.right(nb), level + 1, proc);
    return s.internal(left, right);
  };

  out.result = process(process, a, b, 0, 0);
  return out;
}

std::vector<int> omega_route(int from, int to, int p) {
  int mask = (1 << p) - 1;
  std::vector<int> hops;
  hops.reserve(p);
  int c = from & mask;
  for (int s = p - 1; s >= 0; --s) {
    c = ((c << 1) & mask) | ((to >> s) & 1);
    hops.push_back(c);
  }
  return hops;
}

OmegaSchedule omega_simulate(const std::vector<OmegaMessage>& messages, int p) {
  OmegaSchedule sched;
  sched.delivered_at.assign(messages.size(), 0);
  // link key: stage and the node-output it leaves from
  std::map<std::pair<int, int>, int> link_free;
  int mi = 0;
  for (const auto& msg : messages) {
    auto route = omega_route(msg.from, msg.to, p);
    int node = msg.from, t = 0;
    for (int stage = 0; stage < p; ++stage) {
      int& free_at = link_free[{stage, node}];
      if (t < free_at) {
        ++sched.collisions; // waits, store-and-forward
        t = free_at;
      }
      free_at = t + msg.size;
      t += msg.size;
      node = route[stage];
      sched.trace.push_back({t, node, "hop", std::uint64_t(mi)});
    }
    sched.delivered_at[mi] = t;
    sched.makespan = std::max(sched.makespan, t);
    ++mi;
  }
  return sched;
}

void write_trace_csv(std::ostream& out, const std::vector<TraceEvent>& trace) {
  for (const auto& e : trace)
    out << e.step << "," << e.processor << "," << e.event << "," << e.payload << "\n";
}

} // namespace kdt
