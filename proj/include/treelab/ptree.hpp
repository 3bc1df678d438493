#pragma once

#include "treelab/degree_sequence.hpp"
#include "treelab/discrete_tree.hpp"
#include "treelab/rng.hpp"
#include "treelab/trace.hpp"

namespace treelab {

// i.i.d.-attachment tree: entries are drawn independently, entry i equal to
// vertex v with probability p_v and to a fresh never-repeated vertex with
// probability pInf.  A repeated entry glues (no new vertex); a fresh or
// first-time entry extends the tree.  Fresh draws get labels count()+1,
// count()+2, ... in draw order, so labels 1..count() always mean the weighted
// vertices.
//
// The walk runs for exactly `steps` entries (the tree then has at most
// steps+1 vertices).  The trace records first hits of the weighted vertices,
// glue events, and the mass measure sum_v p_v at the first hit of v
// (vertices not yet seen contribute atoms at infinity, which are omitted).
struct PTreeResult {
    RootedTree tree;
    StickTrace trace;
    long long glueCount = 0;
    long long freshCount = 0;  // entries that drew the never-repeated vertex
};

// Errors: OutOfRange (steps < 1).
PTreeResult sample_ptree(const PParams& p, long long steps, RandomStream& rng);

}  // namespace treelab
