#pragma once

#include <string>
#include <utility>
#include <vector>

#include "treelab/degree_sequence.hpp"
#include "treelab/rng.hpp"
#include "treelab/trace.hpp"

namespace treelab {

// A rooted tree on labels 1..maxLabel.  parent[v] = 0 marks the root,
// parent[v] = -1 marks labels not present (only i.i.d.-attachment trees
// leave gaps; degree-sequence trees use every label).  edgesInOrder lists
// the edges in construction order as (existing vertex, newly added vertex),
// so the stage-i tree is the root plus the first i-1 edges.
struct RootedTree {
    int root = 0;
    std::vector<int> parent;      // index 0 unused
    std::vector<int> childCount;  // index 0 unused
    std::vector<std::pair<int, int>> edgesInOrder;

    int max_label() const { return static_cast<int>(parent.size()) - 1; }
    bool present(int v) const {
        return v >= 1 && v <= max_label() && parent[v] >= 0;
    }
    int vertex_count() const;
    std::vector<int> vertices() const;  // present labels, ascending
};

// Canonical string key "root|p1,p2,...,pn" for exact tree comparison.
std::string tree_key(const RootedTree& t);

// The construction walk: entries are vertex labels, entry j is step j+1
// (vertex i must appear exactly childCounts[i-1] times over the s-1 entries).
struct DTuple {
    std::vector<int> entries;
};

// Validates that `entries` realises the child counts.  Errors: SumMismatch.
DTuple make_dtuple(const std::vector<int>& childCounts, std::vector<int> entries);

// Uniform walk: shuffle of the multiset holding each label i childCounts[i-1]
// times (Fisher-Yates).
DTuple sample_dtuple(const std::vector<int>& childCounts, RandomStream& rng);

// Law of the next walk entry given the first i-1 entries: vertex a has
// probability (childCounts[a-1] - times a appeared) / (s - i).  Exact
// rationals over the common denominator; returned as numerators plus the
// denominator.  Errors: InvalidHistory (history inconsistent or i out of
// range, i in 1..s-1).
struct StepLaw {
    std::vector<long long> numerator;  // per label 1..s
    long long denominator;
};
StepLaw conditional_step_law(const std::vector<int>& childCounts,
                             const std::vector<int>& history, int i);

struct BuildResult {
    RootedTree tree;
    DiscreteTrace trace;
};

// Grow the tree along the walk: step i attaches a new vertex to the previous
// entry; the new vertex is the current entry if unseen, otherwise (and at the
// final step, which has no entry of its own) the next unused reserve vertex.
// For the plain construction the reserve list is the zero-child labels in
// ascending order.  The walk may be given for any child-count order; the
// DegreeSequence overload is the sorted case.
BuildResult build_dtree(const std::vector<int>& childCounts, const DTuple& a);
BuildResult build_dtree(const DegreeSequence& d, const DTuple& a);

// Same construction but the reserve vertices are taken in the order of the
// permutation w of 1..s, skipping entries already in the tree.  When the
// leading entries of w are exactly the zero-child labels in order, this
// coincides with build_dtree.  Errors: NotPermutation.
RootedTree build_dtree_spanning(const std::vector<int>& childCounts,
                                const DTuple& a, const std::vector<int>& w);

// Re-rooted construction: vertex k is made the root by running the same
// growth on the walk (k, A_1, ..., A_{s-1}) whose entries hold vertex k one
// extra time; positions are counted from 0 (the prepended root).  One extra
// vertex s+1 closes the final step, so the result has s+1 vertices and child
// counts (d_1, ..., d_k + 1, ..., d_s, 0).  The trace keeps the original
// masses (d_i - 1).  Errors: IndexOutOfRange.
BuildResult build_pure_rooted(const DegreeSequence& d, int k, RandomStream& rng);
BuildResult build_pure_rooted_from(const std::vector<int>& childCounts, int k,
                                   const DTuple& a);

// All walks for d, built and keyed.  distinctTreeCount == tupleCount means
// the walk-to-tree map is injective.  Errors: TooLarge (more than maxTuples
// walks; default one million).
struct EnumerationResult {
    long long tupleCount = 0;
    long long distinctTreeCount = 0;
    std::vector<std::string> treeKeys;  // sorted, unique
};
EnumerationResult enumerate_dtrees(const DegreeSequence& d,
                                   long long maxTuples = 1000000);

// Number of walks, (s-1)! / prod_i d_i!, as an exact integer.
// Errors: TooLarge if it exceeds the long long range.
long long count_dtuples(const DegreeSequence& d);

// Relabel vertices: f maps old label -> new label, bijectively over the
// present labels.  Errors: NotBijection.
RootedTree relabel(const RootedTree& t, const std::vector<int>& f);

}  // namespace treelab
