#include "treelab/segment_tree.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "treelab/errors.hpp"

namespace treelab {

SegmentTree sb_construct(const std::vector<double>& cuts,
                         const std::vector<double>& glues, double totalLen) {
    require(glues.size() == cuts.size(), "OutOfRange",
            "cuts and glue points must pair up");
    require(totalLen > 0.0, "OutOfRange", "total length must be positive");
    SegmentTree t;
    t.starts.push_back(0.0);
    t.attachPos.push_back(0.0);
    t.parentSeg.push_back(-1);
    double prev = 0.0;
    for (std::size_t k = 0; k < cuts.size(); ++k) {
        require(cuts[k] > prev, "NotIncreasing",
                "cut points must be strictly increasing and positive");
        require(cuts[k] <= totalLen, "NotIncreasing",
                "cut point " + std::to_string(cuts[k]) +
                    " lies past the total length");
        require(glues[k] >= 0.0, "OutOfRange", "glue points must be >= 0");
        require(glues[k] <= cuts[k], "GluePastCut",
                "glue point " + std::to_string(glues[k]) +
                    " lies past its cut " + std::to_string(cuts[k]));
        t.ends.push_back(cuts[k]);
        t.starts.push_back(cuts[k]);
        t.attachPos.push_back(glues[k]);
        prev = cuts[k];
    }
    t.ends.push_back(totalLen);
    // z_k <= y_k puts every attachment point in an earlier segment.
    for (std::size_t k = 1; k < t.starts.size(); ++k)
        t.parentSeg.push_back(find_segment(t, t.attachPos[k]));
    return t;
}

int find_segment(const SegmentTree& t, double p) {
    require(p >= 0.0 && p <= t.total_length(), "OutOfRange",
            "position " + std::to_string(p) + " is outside the tree");
    const auto it = std::lower_bound(t.ends.begin(), t.ends.end(), p);
    return static_cast<int>(it - t.ends.begin());
}

double segment_distance(const SegmentTree& t, double a, double b) {
    int ka = find_segment(t, a);
    int kb = find_segment(t, b);
    // Walk the deeper point down to its attachment until the segments meet,
    // recording each hop's cost; fold the costs deepest-first afterwards so
    // the additions happen in the same order as in the recursion.
    std::vector<double> hops;
    while (ka != kb) {
        if (ka > kb) {
            hops.push_back(a - t.starts[ka]);
            a = t.attachPos[ka];
            ka = t.parentSeg[ka];
        } else {
            hops.push_back(b - t.starts[kb]);
            b = t.attachPos[kb];
            kb = t.parentSeg[kb];
        }
    }
    double dist = std::abs(a - b);
    for (auto it = hops.rbegin(); it != hops.rend(); ++it) dist += *it;
    return dist;
}

double segment_distance_recursive(const SegmentTree& t, double a, double b) {
    const int ka = find_segment(t, a);
    const int kb = find_segment(t, b);
    if (ka == kb) return std::abs(a - b);
    if (ka > kb)
        return segment_distance_recursive(t, t.attachPos[ka], b) +
               (a - t.starts[ka]);
    return segment_distance_recursive(t, a, t.attachPos[kb]) +
           (b - t.starts[kb]);
}

double height_segments(const SegmentTree& t) {
    // depthEntry[k] = distance from the root to the point segment k hangs at.
    std::vector<double> depthEntry(t.segment_count(), 0.0);
    double best = 0.0;
    for (int k = 0; k < t.segment_count(); ++k) {
        if (k > 0) {
            const int j = t.parentSeg[k];
            depthEntry[k] = depthEntry[j] + (t.attachPos[k] - t.starts[j]);
        }
        best = std::max(best, depthEntry[k] + (t.ends[k] - t.starts[k]));
    }
    return best;
}

}  // namespace treelab
