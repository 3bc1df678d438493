#pragma once

#include <vector>

#include "treelab/discrete_tree.hpp"
#include "treelab/segment_tree.hpp"

namespace treelab {

// Dense symmetric matrix of pairwise distances between n marked points.
struct DistanceMatrix {
    int n = 0;
    std::vector<double> d;  // row-major n*n

    double at(int i, int j) const { return d[static_cast<std::size_t>(i) * n + j]; }
    double& at(int i, int j) { return d[static_cast<std::size_t>(i) * n + j]; }
};

DistanceMatrix make_distance_matrix(int n);

// Graph distances between the listed vertices (each edge has length 1),
// via root paths: d(u,v) = depth(u) + depth(v) - 2 depth(lca).
// Errors: UnknownVertex.
DistanceMatrix distance_matrix_tree(const RootedTree& t,
                                    const std::vector<int>& points);

// Pairwise segment-tree distances between the listed coordinates.
// Errors: OutOfRange.
DistanceMatrix distance_matrix_segments(const SegmentTree& t,
                                        const std::vector<double>& points);

// Checks symmetry, zero diagonal, non-negativity and the triangle
// inequality up to tol.  Errors: NotMetric with a description of the first
// violation.
void validate_metric(const DistanceMatrix& m, double tol);

}  // namespace treelab
