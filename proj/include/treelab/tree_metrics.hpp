#pragma once

#include <vector>

#include "treelab/discrete_tree.hpp"
#include "treelab/distance_matrix.hpp"

namespace treelab {

// Number of edges on the longest root-to-vertex path.
long long height(const RootedTree& t);

// One-sided Hausdorff gap: max over vertices of the graph distance to the
// nearest vertex of `stage` (multi-source breadth-first search).  The stage
// set must induce a connected subtree containing the root.
// Errors: UnknownVertex, DisconnectedStage.
long long hausdorff_stage(const RootedTree& t, const std::vector<int>& stage);

// Minimal number of closed balls of radius eps, centred at points of the
// space, needed to cover it.  For n <= exactLimit the exact minimum is found
// (subsets enumerated in increasing size); beyond that a farthest-point
// greedy sweep gives an upper bound and `exact` is false.
struct CoveringResult {
    int count;
    bool exact;
};
CoveringResult covering_number(const DistanceMatrix& m, double eps,
                               int exactLimit = 12);

// Gromov-Hausdorff distance between two finite metric spaces, computed from
// scratch: half the smallest worst-case additive distortion over all
// correspondences (pairs of maps f: A -> B, g: B -> A, with the distortion
// taken over graph(f) union graph(g)).  Depth-first search over both maps
// with branch-and-bound pruning.  Errors: TooLarge (either side > 7 points).
double gh_bruteforce(const DistanceMatrix& a, const DistanceMatrix& b);

// Whether some relabelling makes the two matrices equal within tol
// (permutation search; sizes must match).  Errors: TooLarge (> 8 points).
bool isometric_bruteforce(const DistanceMatrix& a, const DistanceMatrix& b,
                          double tol = 1e-12);

}  // namespace treelab
