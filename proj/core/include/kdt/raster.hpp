#pragma once

#include <cstdint>
#include <vector>

#include "kdt/build.hpp"
#include "kdt/space.hpp"
#include "kdt/store.hpp"

namespace kdt {

inline constexpr std::uint64_t kGridGuard = std::uint64_t(1) << 24;

// Dense cell grid in row-major order with axis 0 fastest:
// index = c0 + c1*2^p + c2*2^(2p) + ...
struct Grid {
  SpaceSpec space;
  int precision = 0;
  std::vector<std::uint8_t> bits;

  std::uint64_t index(const Cell& c) const {
    std::uint64_t idx = 0;
    for (int a = space.k - 1; a >= 0; --a) idx = (idx << precision) | c[a];
    return idx;
  }
};

struct ValueGrid {
  SpaceSpec space;
  int precision = 0;
  std::vector<std::uint8_t> bits;
  std::vector<double> values;
};

Grid rasterize(const TreeStore& s, const SpaceSpec& sp, NodeRef root, int precision);
ValueGrid rasterize_values(const TreeStore& s, const SpaceSpec& sp, NodeRef root, int precision);

NodeRef build_from_grid(TreeStore& s, const Grid& g);
NodeRef build_from_grid(TreeStore& s, const ValueGrid& g);

} // namespace kdt
