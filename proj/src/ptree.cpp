#include "treelab/ptree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "treelab/errors.hpp"

namespace treelab {

PTreeResult sample_ptree(const PParams& p, long long steps, RandomStream& rng) {
    require(steps >= 1, "OutOfRange", "the walk needs at least one entry");
    const int K = p.count();
    std::vector<double> cum(p.probs.size());
    double run = 0.0;
    for (int i = 0; i < K; ++i) {
        run += p.probs[i];
        cum[i] = run;
    }

    PTreeResult out;
    out.tree.parent.assign(K + 1, -1);
    out.tree.childCount.assign(K + 1, 0);
    out.trace.X.assign(K, std::numeric_limits<double>::infinity());

    auto draw_label = [&]() -> int {
        const double u = rng.uniform01();
        if (u < cum.back()) {
            const auto it = std::upper_bound(cum.begin(), cum.end(), u);
            return static_cast<int>(it - cum.begin()) + 1;
        }
        ++out.freshCount;
        out.tree.parent.push_back(-1);  // fresh label K + freshCount
        out.tree.childCount.push_back(0);
        return K + static_cast<int>(out.freshCount);
    };

    int prev = 0;
    for (long long i = 1; i <= steps; ++i) {
        const int label = draw_label();
        if (label <= K && std::isfinite(out.trace.X[label - 1])) {
            // repeated weighted vertex: a glue event, no new edge
            out.trace.Y.push_back(static_cast<double>(i));
            out.trace.Z.push_back(out.trace.X[label - 1]);
            out.trace.glueAtom.push_back(label);
            ++out.glueCount;
        } else {
            if (label <= K) out.trace.X[label - 1] = static_cast<double>(i);
            if (i == 1) {
                out.tree.root = label;
                out.tree.parent[label] = 0;
            } else {
                out.tree.parent[label] = prev;
                ++out.tree.childCount[prev];
                out.tree.edgesInOrder.emplace_back(prev, label);
            }
        }
        prev = label;
    }
    for (int v = 1; v <= K; ++v) {
        if (std::isfinite(out.trace.X[v - 1]))
            out.trace.mu.atoms.push_back(
                {out.trace.X[v - 1], p.probs[v - 1], v});
    }
    std::sort(out.trace.mu.atoms.begin(), out.trace.mu.atoms.end(),
              [](const MeasureAtom& a, const MeasureAtom& b) {
                  return a.pos < b.pos;
              });
    return out;
}

}  // namespace treelab
