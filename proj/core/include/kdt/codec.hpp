#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "kdt/space.hpp"
#include "kdt/store.hpp"

namespace kdt {

// Linear form of a tree: preorder walk over {0 white, 1 black, 2 internal}.
// Functional values, when present, follow in black-leaf visit order.
struct TreeCode {
  std::string code;
  std::vector<double> values;
};

TreeCode encode(const TreeStore& s, NodeRef root);
NodeRef decode(TreeStore& s, const TreeCode& tc);

// Archive format, bit-exact and line-oriented:
//   KDT1 k=<int> r=<int> valued=<0|1>
//   <code>
//   <values>          (only when valued=1)
void write_kdt(std::ostream& out, const TreeStore& s, const SpaceSpec& sp, NodeRef root);
NodeRef read_kdt(std::istream& in, TreeStore& s, SpaceSpec& sp);

void write_kdt_file(const std::string& path, const TreeStore& s, const SpaceSpec& sp,
                    NodeRef root);
NodeRef read_kdt_file(const std::string& path, TreeStore& s, SpaceSpec& sp);

} // namespace kdt
