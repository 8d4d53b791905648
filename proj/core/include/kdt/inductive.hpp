#pragma once

#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "kdt/setops.hpp"
#include "kdt/space.hpp"
#include "kdt/store.hpp"

namespace kdt {

// Exact binary rational num * 2^exp. Frame corners and diagonals stay in this
// form so frame extension never rounds.
struct BinRat {
  boost::multiprecision::cpp_int num = 0;
  int exp = 0;

  static BinRat from_double(double v);
  static BinRat pow2(int e) { return BinRat{1, e}; }

  BinRat normalized() const;
  double to_double() const;

  BinRat operator+(const BinRat& o) const;
  BinRat operator-(const BinRat& o) const;
  bool operator==(const BinRat& o) const { return cmp(o) == 0; }
  bool operator<(const BinRat& o) const { return cmp(o) < 0; }
  bool operator<=(const BinRat& o) const { return cmp(o) <= 0; }
  int cmp(const BinRat& o) const;

  // Round to a multiple of 2^e.
  BinRat floor_to(int e) const;
  BinRat ceil_to(int e) const;
  // Smallest e with 2^e >= *this (requires a positive value).
  int ceil_log2() const;
  // floor(*this * 2^shift) as an integer.
  boost::multiprecision::cpp_int floor_shifted(int shift) const;
};

// A tree together with the movable frame it is normalized in. The frame is a
// hypercube whose edge is a power of two; extensions double the frame toward
// the new point, so the old frame stays a dyadic block of the new one and the
// old tree re-roots without loss. Reframing into an unrelated frame falls
// back to block reinsertion, rounding outward where the grids disagree.
struct ILimit {
  SpaceSpec space;
  std::vector<BinRat> minspc;
  std::vector<BinRat> maxspc;
  NodeRef root = kWhite;

  bool degenerate() const { return minspc == maxspc; }
  bool contains(const std::vector<BinRat>& v) const;
};

ILimit il_create(TreeStore& s, int k, int r, const std::vector<double>& v);
void il_add(TreeStore& s, ILimit& il, const std::vector<double>& v);

enum class IlOp { Union, Intersect, Diff, Exclude };

// Boolean of two elements after moving both into their common frame.
ILimit il_boolean(TreeStore& s, const ILimit& a, const ILimit& b, IlOp op, int precision);

// Re-expresses an element's tree in an enclosing frame. Exact when the new
// frame's cell grid contains the old one; otherwise blocks round outward.
NodeRef il_reframe(TreeStore& s, const ILimit& il, const SpaceSpec& nspace,
                   const std::vector<BinRat>& nmin, const std::vector<BinRat>& nmax);

} // namespace kdt
