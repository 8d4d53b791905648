#pragma once

#include <vector>

#include "kdt/build.hpp"
#include "kdt/setops.hpp"
#include "kdt/space.hpp"
#include "kdt/store.hpp"

namespace kdt {

// Homogeneous (k+1)x(k+1) transform matrix, row-vector convention:
// point' = [point, 1] . M. Face coefficient columns transform by the inverse.
struct HomMatrix {
  int k = 0;
  std::vector<double> m; // (k+1)^2, row major

  double& at(int i, int j) { return m[std::size_t(i) * (k + 1) + j]; }
  double at(int i, int j) const { return m[std::size_t(i) * (k + 1) + j]; }
  static HomMatrix identity(int k);
};

// Elementary matrices. With contrary=true the analytic inverse is built
// instead: inverse rates, opposite moves, opposite angle, opposite center.
HomMatrix mat_homothety(const std::vector<double>& rates, bool contrary = false);
HomMatrix mat_translation(const std::vector<double>& moves, bool contrary = false);
HomMatrix mat_rotation(int k, int axis_i, int axis_j, double angle, bool contrary = false);
HomMatrix mat_perspective(const std::vector<double>& coeffs, bool contrary = false);

HomMatrix mat_concat(const HomMatrix& a, const HomMatrix& b); // applies a first
HomMatrix mat_transpose(const HomMatrix& a);
HomMatrix mat_inverse(const HomMatrix& a); // Gauss-Jordan

// Applies the matrix to an affine point and renormalizes.
std::vector<double> apply_point(const HomMatrix& m, const std::vector<double>& p);

// Convex region described both ways: 2^k homogeneous vertices (vertex i has
// the coordinate bits of i in the source hypercube) and 2k hyper-face
// coefficient vectors of length k+1. A point lies inside when every lower
// face dots to >= 0 and every upper face to <= 0 against [point, 1].
// Vertices stay unnormalized so that homogeneous averages of edge pairs are
// the exact images of source edge midpoints.
struct Polytope {
  int k = 0;
  std::vector<std::vector<double>> vertices;
  std::vector<std::vector<double>> lower_faces, upper_faces; // indexed by axis
};

Polytope unit_cube(int k);
// Vertices through `direct`, face columns through `inverse` (the dual rule).
Polytope polytope_transform(const Polytope& p, const HomMatrix& direct, const HomMatrix& inverse);

// Tree of every cell meeting the polytope; blocks still ambiguous at the
// precision depth come out black (conservative superset).
NodeRef polytope_tree(TreeStore& s, const SpaceSpec& sp, const Polytope& p, int precision);

struct Segment {
  std::vector<double> origin, end; // frame coordinates in [0,1]
};

// True iff some non-white block at the given precision meets the segment.
bool segment_intersects(const TreeStore& s, const SpaceSpec& sp, NodeRef t, const Segment& seg,
                        int precision);

// Primitive shape digitizations. Segments, broken lines and polygon outlines
// blacken every cell their trace touches; spheres and cones classify blocks
// by distance, ambiguous blocks at the depth limit counting black.
NodeRef shape_segment(TreeStore& s, const SpaceSpec& sp, const Segment& seg, int precision);
NodeRef shape_broken_line(TreeStore& s, const SpaceSpec& sp,
                          const std::vector<std::vector<double>>& points, int precision);
NodeRef shape_polygon(TreeStore& s, const SpaceSpec& sp,
                      const std::vector<std::vector<double>>& points, int precision);
NodeRef shape_sphere(TreeStore& s, const SpaceSpec& sp, const std::vector<double>& center,
                     double radius, int precision);
NodeRef shape_cone(TreeStore& s, const SpaceSpec& sp, const std::vector<double>& apex,
                   const std::vector<double>& axis, double angle, double range, int precision);

// Homographic image of a tree, driven by the inverse image of the unit
// hypercube: output blocks whose inverse-image polytope lands entirely on
// white come out white, entirely on black come out black, anything still
// mixed at precision_out comes out black.
NodeRef tree_homographic(TreeStore& s, const SpaceSpec& sp, NodeRef t,
                         const Polytope& inverse_images, int precision_in, int precision_out);
// Convenience wrapper building the inverse image from the direct matrix.
NodeRef tree_transform(TreeStore& s, const SpaceSpec& sp, NodeRef t, const HomMatrix& direct,
                       int precision_in, int precision_out);

// Exact simplified transforms.
NodeRef tree_symmetry(TreeStore& s, const SpaceSpec& sp, NodeRef t, int axis);
NodeRef tree_translate(TreeStore& s, const SpaceSpec& sp, NodeRef t,
                       const std::vector<double>& vec, int precision_in, int precision_out);

// Keeps, in each line parallel to the axis, only the first black cell met in
// the viewing sense.
enum class Sense { Increasing, Decreasing };
NodeRef hidden_part_removal(TreeStore& s, const SpaceSpec& sp, NodeRef t, int axis, Sense sense);

// Shadow of the set on the axis' orthogonal subspace, as a (k-1)-space tree.
NodeRef project(TreeStore& s, const SpaceSpec& sp, NodeRef t, int axis);

// True iff the segment between the points meets no obstacle cell other than
// the endpoints' own cells.
bool visible(TreeStore& s, const SpaceSpec& sp, NodeRef obstacles, const std::vector<double>& from,
             const std::vector<double>& to, int precision);

// Cells within range of the emitter whose line of sight to it clears the
// terrain.
NodeRef propagation_area(TreeStore& s, const SpaceSpec& sp, NodeRef terrain,
                         const std::vector<double>& emitter, double range, int precision);

} // namespace kdt
