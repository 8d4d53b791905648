#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "kdt/build.hpp"
#include "kdt/space.hpp"
#include "kdt/store.hpp"

namespace kdt {

// d1 connects cells sharing a face; dinf also connects across edges and
// corners (the Chebyshev neighborhood).
enum class Metric { D1, Dinf };

// One unordered pair of metric-adjacent black cells at the working precision,
// stored once, in p-cell coordinates. Leaves coarser than the precision are
// spread over their cells; nodes still internal at the depth limit count
// black.
struct AdjacencyRecord {
  Cell a, b;
};

std::vector<AdjacencyRecord> adjacencies(TreeStore& s, const SpaceSpec& sp, NodeRef t,
                                         Metric metric, int precision);

// Whitens every cell lying on an outer face of the hypercube.
NodeRef space_closure(TreeStore& s, const SpaceSpec& sp, NodeRef t, int precision);

// Black cells with a white in-frame metric-neighbor; neighborhoods are
// clipped at the frame. exo_boundary marks the white in-frame cells touching
// the set.
NodeRef boundary(TreeStore& s, const SpaceSpec& sp, NodeRef t, Metric metric, int precision);
NodeRef exo_boundary(TreeStore& s, const SpaceSpec& sp, NodeRef t, Metric metric, int precision);

enum class MorphOp { Erode, Dilate, Open, Close };
NodeRef morphology(TreeStore& s, const SpaceSpec& sp, NodeRef t, Metric metric, MorphOp op,
                   int precision);

// Boundary and exo-boundary cells take the majority status of their metric
// neighborhood; exact ties keep the cell's own status.
NodeRef median_filter(TreeStore& s, const SpaceSpec& sp, NodeRef t, Metric metric, int precision);

// One thinning iteration: a left pass then a right pass, each removing the
// phase-side boundary cells in contact with the in-frame background on fewer
// than k - target_dim axes. Contact marks are recomputed before each pass.
// median_set iterates until a full iteration removes nothing.
std::pair<NodeRef, int> thin_step(TreeStore& s, const SpaceSpec& sp, NodeRef t, int target_dim,
                                  int precision);
NodeRef median_set(TreeStore& s, const SpaceSpec& sp, NodeRef t, int target_dim, int precision);

// Max over black cells of the number of axes carrying a same-set d1 contact.
int intrinsic_dimension(TreeStore& s, const SpaceSpec& sp, NodeRef t, int precision);

// Connected components. The labeled tree is a valued tree whose black cells
// carry their component number, renumbered 1..count by first appearance in
// traversal order.
enum class LabelMethod { Bucket, Growing };
struct Components {
  NodeRef labeled = kWhite;
  int count = 0;
};
Components components(TreeStore& s, const SpaceSpec& sp, NodeRef t, Metric metric, int precision,
                      LabelMethod method);

// One plain tree per component, indexed by label - 1.
std::vector<NodeRef> segment_forest(TreeStore& s, const SpaceSpec& sp, NodeRef labeled,
                                    int precision);
NodeRef extract_component(const std::vector<NodeRef>& forest, std::size_t index);

// Thematic classification: the response vectors of the support cells are
// gathered into a radiometric tree over the m-dimensional response space, its
// metric components become the themes, and each support cell is relabeled
// with its theme number.
Components classify(TreeStore& s, const SpaceSpec& sp, const std::vector<NodeRef>& responses,
                    Metric metric, int precision, int response_precision);

// Neighborhood offsets of a metric, in a fixed canonical order.
std::vector<std::vector<int>> metric_offsets(int k, Metric metric);

// Applies an offset to a cell; false when it leaves the frame.
bool shifted_cell(const Cell& c, const std::vector<int>& off, std::uint32_t side, Cell& out);

// Shared helpers for per-cell passes over a set.
std::vector<Cell> cells_of_tree(const TreeStore& s, const SpaceSpec& sp, NodeRef t, int precision);
NodeRef tree_of_cells(TreeStore& s, const SpaceSpec& sp, const std::vector<Cell>& cells,
                      int precision);
NodeRef tree_of_labeled_cells(TreeStore& s, const SpaceSpec& sp,
                              const std::vector<std::pair<Cell, double>>& cells, int precision);

} // namespace kdt
