#pragma once

#include <vector>

namespace treelab {

// R-tree assembled by stick breaking.  The half line [0, total] is cut at
// 0 < y_1 < ... < y_n <= total; segment 0 is [0, y_1], segment k >= 1 is
// (y_k, y_{k+1}] (the last one (y_n, total]) and hangs from the point with
// global coordinate z_k <= y_k.  Distances follow the gluing: walking from a
// point p in segment k to the segment's attachment point costs p - y_k.
struct SegmentTree {
    std::vector<double> starts;     // starts[k] = y_k (starts[0] = 0)
    std::vector<double> ends;       // ends[k] = y_{k+1} (ends back = total)
    std::vector<double> attachPos;  // attachPos[k] = z_k, attachPos[0] = 0
    std::vector<int> parentSeg;     // segment holding z_k; -1 for segment 0

    int segment_count() const { return static_cast<int>(starts.size()); }
    double total_length() const { return ends.empty() ? 0.0 : ends.back(); }
};

// Builds the tree from cut points and glue points (equal lengths) and the
// total stick length.  Errors: NotIncreasing (cuts not strictly increasing,
// nonpositive, or past totalLen), GluePastCut (z_k > y_k), OutOfRange
// (z_k < 0 or totalLen <= 0).
SegmentTree sb_construct(const std::vector<double>& cuts,
                         const std::vector<double>& glues, double totalLen);

// Index of the segment whose half-open interval holds p (p = 0 -> 0).
// Errors: OutOfRange (p outside [0, total]).
int find_segment(const SegmentTree& t, double p);

// Tree distance between the points at global coordinates a and b.  The
// iterative walk reproduces, addition by addition, the recursion
//   d(a, b) = |a - b|                       same segment,
//   d(a, b) = d(a, z_k) + (b - y_k)         b in the later segment k,
// so it agrees bit-for-bit with segment_distance_recursive.
// Errors: OutOfRange.
double segment_distance(const SegmentTree& t, double a, double b);
double segment_distance_recursive(const SegmentTree& t, double a, double b);

// max over points of the distance to the root (coordinate 0); the maximum is
// attained at some segment end.
double height_segments(const SegmentTree& t);

}  // namespace treelab
