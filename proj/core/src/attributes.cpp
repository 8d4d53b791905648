#include "kdt/attributes.hpp"

#include <algorithm>
#include <cmath>

#include "kdt/build.hpp"
#include "kdt/error.hpp"
#include "kdt/geom.hpp"
#include "kdt/setops.hpp"

namespace kdt {

namespace {

constexpr double kTol = 1e-9;

std::vector<MultiIndex> indices_up_to_order3(int k) {
  std::vector<MultiIndex> out;
  MultiIndex idx(k, 0);
  auto rec = [&](auto&& self, int axis, int left) -> void {
    if (axis == k) {
      out.push_back(idx);
      return;
    }
    for (int n = 0; n <= left; ++n) {
      idx[axis] = n;
      self(self, axis + 1, left - n);
    }
    idx[axis] = 0;
  };
  rec(rec, 0, 3);
  return out;
}

// Sum of x^n for x in [a, b), exact in doubles for the grid sizes in play.
double power_sum(std::uint32_t a, std::uint32_t b, int n) {
  auto t1 = [](double m) { return m * (m + 1) / 2; };
  auto t2 = [](double m) { return m * (m + 1) * (2 * m + 1) / 6; };
  auto t3 = [&](double m) { return t1(m) * t1(m); };
  double hi = double(b) - 1, lo = double(a) - 1;
  switch (n) {
    case 0: return double(b) - double(a);
    case 1: return t1(hi) - t1(lo);
    case 2: return t2(hi) - t2(lo);
    default: return t3(hi) - t3(lo);
  }
}

double binom(int n, int p) {
  static const double table[4][4] = {{1, 0, 0, 0}, {1, 1, 0, 0}, {1, 2, 1, 0}, {1, 3, 3, 1}};
  return table[n][p];
}

// In-place cyclic Jacobi diagonalization of a symmetric matrix; v accumulates
// the rotations as eigenvector columns.
void jacobi(std::vector<std::vector<double>>& a, std::vector<std::vector<double>>& v) {
  int k = int(a.size());
  v.assign(k, std::vector<double>(k, 0.0));
  for (int i = 0; i < k; ++i) v[i][i] = 1.0;
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0;
    for (int i = 0; i < k; ++i)
      for (int j = i + 1; j < k; ++j) off += a[i][j] * a[i][j];
    if (off < 1e-24) return;
    for (int p = 0; p < k; ++p)
      for (int q = p + 1; q < k; ++q) {
        if (a[p][q] == 0.0) continue;
        double theta = (a[q][q] - a[p][p]) / (2 * a[p][q]);
        double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1));
        double c = 1 / std::sqrt(t * t + 1), sn = t * c;
        for (int i = 0; i < k; ++i) {
          double aip = a[i][p], aiq = a[i][q];
          a[i][p] = c * aip - sn * aiq;
          a[i][q] = sn * aip + c * aiq;
        }
        for (int i = 0; i < k; ++i) {
          double api = a[p][i], aqi = a[q][i];
          a[p][i] = c * api - sn * aqi;
          a[q][i] = sn * api + c * aqi;
        }
        for (int i = 0; i < k; ++i) {
          double vip = v[i][p], viq = v[i][q];
          v[i][p] = c * vip - sn * viq;
          v[i][q] = sn * vip + c * viq;
        }
      }
  }
}

MultiIndex index_of_triple(int k, int j, int m, int n) {
  MultiIndex idx(k, 0);
  ++idx[j];
  ++idx[m];
  ++idx[n];
  return idx;
}

} // namespace

double MomentList::at(const MultiIndex& idx) const {
  auto it = m.find(idx);
  if (it == m.end()) fail(Errc::IndexOutOfRange, "moment index not in list");
  return it->second;
}

MomentList moments(const TreeStore& s, const SpaceSpec& sp, NodeRef t, int precision) {
  sp.check_precision(precision);
  MomentList out;
  out.k = sp.k;
  auto idxs = indices_up_to_order3(sp.k);
  for (const auto& idx : idxs) out.m[idx] = 0.0;

  SpaceSpec wp(sp.k, precision);
  for_each_block(s, wp, t, precision, [&](const Cell& lo, int level, NodeRef leaf) {
    if (s.is_white(leaf)) return;
    // per-axis power sums over the block's coordinate range
    double sums[16][4];
    for (int a = 0; a < sp.k; ++a) {
      std::uint32_t e = block_extent(wp, level, a);
      for (int n = 0; n < 4; ++n) sums[a][n] = power_sum(lo[a], lo[a] + e, n);
    }
    for (const auto& idx : idxs) {
      double term = 1.0;
      for (int a = 0; a < sp.k; ++a) term *= sums[a][idx[a]];
      out.m[idx] += term;
    }
  });
  return out;
}

MomentList center_moments(const MomentList& m) {
  double mass = m.mass();
  if (mass == 0.0) fail(Errc::ZeroMass, "centering moments of an empty set");
  std::vector<double> xg(m.k);
  for (int a = 0; a < m.k; ++a) {
    MultiIndex idx(m.k, 0);
    idx[a] = 1;
    xg[a] = m.at(idx) / mass;
  }

  MomentList out;
  out.k = m.k;
  for (const auto& [alpha, unused] : m.m) {
    // binomial expansion about the gravity center
    MultiIndex beta(m.k, 0);
    double acc = 0.0;
    auto rec = [&](auto&& self, int axis, double coef) -> void {
      if (axis == m.k) {
        acc += coef * m.at(beta);
        return;
      }
      for (int b = 0; b <= alpha[axis]; ++b) {
        beta[axis] = b;
        self(self, axis + 1,
             coef * binom(alpha[axis], b) * std::pow(-xg[axis], alpha[axis] - b));
      }
      beta[axis] = 0;
    };
    rec(rec, 0, 1.0);
    out.m[alpha] = acc;
  }
  return out;
}

EigenFrame eigen_frame(const MomentList& m) {
  double mass = m.mass();
  if (mass == 0.0) fail(Errc::ZeroMass, "eigen frame of an empty set");
  MomentList c = center_moments(m);
  int k = m.k;

  EigenFrame f;
  f.xg.resize(k);
  for (int a = 0; a < k; ++a) {
    MultiIndex idx(k, 0);
    idx[a] = 1;
    f.xg[a] = m.at(idx) / mass;
  }

  auto second = [&](int i, int j) {
    MultiIndex idx(k, 0);
    ++idx[i];
    ++idx[j];
    return c.at(idx);
  };
  std::vector<std::vector<double>> in(k, std::vector<double>(k));
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) in[i][j] = second(i, j);
  double scale = 0;
  for (int i = 0; i < k; ++i) scale = std::max(scale, std::abs(in[i][i]));

  jacobi(in, f.v);
  f.lambda.resize(k);
  for (int i = 0; i < k; ++i) f.lambda[i] = in[i][i];

  // descending eigenvalues, columns permuted along
  std::vector<int> order(k);
  for (int i = 0; i < k; ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return f.lambda[a] > f.lambda[b]; });
  auto v = f.v;
  auto lam = f.lambda;
  for (int i = 0; i < k; ++i) {
    f.lambda[i] = lam[order[i]];
    for (int r = 0; r < k; ++r) f.v[r][i] = v[r][order[i]];
  }
  for (int i = 0; i + 1 < k; ++i)
    if (std::abs(f.lambda[i] - f.lambda[i + 1]) <= kTol * std::max(1.0, scale))
      f.degenerate = true;

  // orient each axis toward its strongest eccentricity
  f.third.resize(k);
  for (int i = 0; i < k; ++i) {
    double u3 = 0;
    for (int j = 0; j < k; ++j)
      for (int mm = 0; mm < k; ++mm)
        for (int n = 0; n < k; ++n)
          u3 += f.v[j][i] * f.v[mm][i] * f.v[n][i] * c.at(index_of_triple(k, j, mm, n));
    if (u3 < -kTol) {
      for (int r = 0; r < k; ++r) f.v[r][i] = -f.v[r][i];
      u3 = -u3;
    } else if (std::abs(u3) < kTol) {
      f.degenerate = true; // no sign to pick from
    }
    f.third[i] = u3;
  }
  return f;
}

NodeRef eigen_tree(TreeStore& s, const SpaceSpec& sp, NodeRef t, const EigenFrame& frame,
                   int precision_in, int precision_out, bool normalize) {
  int k = sp.k;
  double side = double(std::uint32_t(1) << precision_in);

  // gravity center in frame coordinates (cell centers sit at +0.5)
  std::vector<double> xg_norm(k);
  for (int a = 0; a < k; ++a) xg_norm[a] = (frame.xg[a] + 0.5) / side;

  HomMatrix rot = HomMatrix::identity(k);
  for (int i = 0; i < k; ++i)
    for (int j = 0; j < k; ++j) rot.at(i, j) = frame.v[i][j]; // row . V projects onto the axes

  HomMatrix direct = mat_concat(mat_translation(xg_norm, true), rot);
  if (normalize) {
    if (frame.lambda[0] == 0.0) fail(Errc::ZeroMass, "flat set cannot be normalized");
    direct = mat_concat(direct, mat_homothety(std::vector<double>(k, 1.0 / frame.lambda[0])));
  }
  direct = mat_concat(direct, mat_translation(std::vector<double>(k, 0.5)));
  return tree_transform(s, sp, t, direct, precision_in, precision_out);
}

std::vector<std::pair<std::string, std::uint64_t>> similarity_rank(
    TreeStore& s, const SpaceSpec& sp, const std::vector<std::pair<std::string, NodeRef>>& base,
    NodeRef probe, int precision) {
  if (base.empty()) fail(Errc::EmptyBase, "similarity ranking against an empty base");
  std::vector<std::pair<std::string, std::uint64_t>> out;
  out.reserve(base.size());
  for (const auto& [label, t] : base)
    out.emplace_back(label, cell_count(s, sp, set_exclude(s, sp, t, probe, precision), precision));
  std::stable_sort(out.begin(), out.end(),
                   [](const auto& a, const auto& b) { return a.second < b.second; });
  return out;
}

void write_moments_csv(std::ostream& out, const MomentList& m) {
  for (const auto& [idx, v] : m.m) {
    for (int n : idx) out << n << ",";
    out << v << "\n";
  }
}

} // namespace kdt
