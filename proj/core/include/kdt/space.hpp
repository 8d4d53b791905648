#pragma once

#include <cstdint>

#include "kdt/error.hpp"

namespace kdt {

// A model space: k axes, each normalized to [0,1] and resolved into 2^r cells.
// The tree alternates split axes cyclically, one axis per level, so a full
// development has k*r levels and 2^(k*r) finest cells.
struct SpaceSpec {
  int k = 0;
  int r = 0;

  SpaceSpec() = default;
  SpaceSpec(int dims, int precision) : k(dims), r(precision) {
    if (k < 1 || k > 16) fail(Errc::AxisOutOfRange, "dimension out of range");
    if (r < 0 || r > 30) fail(Errc::PrecisionOutOfRange, "precision out of range");
  }

  int depth() const { return k * r; }
  std::uint32_t cells_per_axis() const { return std::uint32_t(1) << r; }
  std::uint64_t capacity() const { return std::uint64_t(1) << (std::uint64_t(k) * r); }

  // Axis split at a given level (levels count from 0 at the root).
  int axis_at(int level) const { return level % k; }

  void check_precision(int p) const {
    if (p < 0 || p > r) fail(Errc::PrecisionOutOfRange, "precision exceeds space resolution");
  }
};

} // namespace kdt
