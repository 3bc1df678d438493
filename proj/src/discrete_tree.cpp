#include "treelab/discrete_tree.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <set>
#include <string>

#include "treelab/errors.hpp"

namespace treelab {

int RootedTree::vertex_count() const {
    int n = 0;
    for (int v = 1; v <= max_label(); ++v)
        if (present(v)) ++n;
    return n;
}

std::vector<int> RootedTree::vertices() const {
    std::vector<int> out;
    for (int v = 1; v <= max_label(); ++v)
        if (present(v)) out.push_back(v);
    return out;
}

std::string tree_key(const RootedTree& t) {
    std::string key = std::to_string(t.root);
    key += '|';
    for (int v = 1; v <= t.max_label(); ++v) {
        if (v > 1) key += ',';
        key += std::to_string(t.parent[v]);
    }
    return key;
}

DTuple make_dtuple(const std::vector<int>& childCounts, std::vector<int> entries) {
    const int s = static_cast<int>(childCounts.size());
    require(static_cast<int>(entries.size()) == s - 1, "SumMismatch",
            "walk must have s-1 entries");
    std::vector<int> used(s + 1, 0);
    for (int label : entries) {
        require(label >= 1 && label <= s, "SumMismatch",
                "walk entry " + std::to_string(label) + " is not a label");
        ++used[label];
    }
    for (int v = 1; v <= s; ++v) {
        require(used[v] == childCounts[v - 1], "SumMismatch",
                "label " + std::to_string(v) + " appears " +
                    std::to_string(used[v]) + " times, expected " +
                    std::to_string(childCounts[v - 1]));
    }
    DTuple out;
    out.entries = std::move(entries);
    return out;
}

DTuple sample_dtuple(const std::vector<int>& childCounts, RandomStream& rng) {
    DTuple out;
    for (std::size_t i = 0; i < childCounts.size(); ++i)
        out.entries.insert(out.entries.end(), childCounts[i],
                           static_cast<int>(i) + 1);
    // Fisher-Yates, highest index down.
    for (std::size_t i = out.entries.size(); i > 1; --i) {
        const auto j = static_cast<std::size_t>(
            rng.uniform_int(static_cast<std::int64_t>(i)));
        std::swap(out.entries[i - 1], out.entries[j]);
    }
    return out;
}

StepLaw conditional_step_law(const std::vector<int>& childCounts,
                             const std::vector<int>& history, int i) {
    const int s = static_cast<int>(childCounts.size());
    require(i >= 1 && i <= s - 1, "InvalidHistory",
            "step index must lie in 1..s-1");
    require(static_cast<int>(history.size()) == i - 1, "InvalidHistory",
            "history must hold the first i-1 entries");
    std::vector<int> used(s + 1, 0);
    for (int label : history) {
        require(label >= 1 && label <= s, "InvalidHistory",
                "history entry " + std::to_string(label) + " is not a label");
        ++used[label];
        require(used[label] <= childCounts[label - 1], "InvalidHistory",
                "label " + std::to_string(label) +
                    " appears more often than its child count allows");
    }
    StepLaw law;
    law.denominator = s - i;
    law.numerator.resize(s);
    for (int v = 1; v <= s; ++v)
        law.numerator[v - 1] = childCounts[v - 1] - used[v];
    return law;
}

namespace {

// Shared growth loop.  walk[0] is the root; step t (1-based) joins walk[t-1]
// to either walk[t] (if present in the walk range and not yet in the tree) or
// the next reserve vertex not yet in the tree.  Walk positions are reported
// as posOffset + index.  Fills the full trace; callers that have no use for
// it (the permutation-reserve variant) just drop it.
struct GrowOut {
    RootedTree tree;
    std::vector<std::int64_t> firstHit;  // per label, kNever if never in walk
    std::vector<std::int64_t> Y, Z;
    std::vector<int> glueAtom;
};

GrowOut grow(int nLabels, const std::vector<int>& walk, std::int64_t posOffset,
             const std::vector<int>& reserve) {
    const auto L = static_cast<std::int64_t>(walk.size());
    GrowOut out;
    out.tree.parent.assign(nLabels + 1, -1);
    out.tree.childCount.assign(nLabels + 1, 0);
    out.tree.root = walk[0];
    out.tree.parent[walk[0]] = 0;
    out.firstHit.assign(nLabels + 1, kNever);
    out.firstHit[walk[0]] = posOffset;

    std::size_t reserveAt = 0;
    auto attach = [&out](int prev, int fresh) {
        out.tree.parent[fresh] = prev;
        ++out.tree.childCount[prev];
        out.tree.edgesInOrder.emplace_back(prev, fresh);
    };
    for (std::int64_t t = 1; t <= L; ++t) {
        const int prev = walk[t - 1];
        const int cand = (t <= L - 1) ? walk[t] : 0;
        if (cand != 0 && out.firstHit[cand] == kNever)
            out.firstHit[cand] = posOffset + t;
        if (cand != 0 && out.tree.parent[cand] < 0) {
            attach(prev, cand);
        } else {
            if (cand != 0) {
                out.Y.push_back(posOffset + t);
                out.Z.push_back(out.firstHit[cand]);
                out.glueAtom.push_back(cand);
            }
            while (reserveAt < reserve.size() &&
                   out.tree.parent[reserve[reserveAt]] >= 0)
                ++reserveAt;
            require(reserveAt < reserve.size(), "SumMismatch",
                    "ran out of reserve vertices at step " + std::to_string(t));
            attach(prev, reserve[reserveAt]);
        }
    }
    return out;
}

// Trace assembly: first hits and mass (childCounts[i]-1) per repeated vertex.
DiscreteTrace make_trace(const GrowOut& g, const std::vector<int>& childCounts) {
    DiscreteTrace tr;
    const int s = static_cast<int>(childCounts.size());
    tr.X.assign(g.firstHit.begin() + 1, g.firstHit.begin() + 1 + s);
    tr.Y = g.Y;
    tr.Z = g.Z;
    tr.glueAtom = g.glueAtom;
    for (int v = 1; v <= s; ++v) {
        if (childCounts[v - 1] >= 2 && tr.X[v - 1] != kNever)
            tr.muAtoms.push_back({tr.X[v - 1], childCounts[v - 1] - 1, v});
    }
    std::sort(tr.muAtoms.begin(), tr.muAtoms.end(),
              [](const DiscreteMeasureAtom& a, const DiscreteMeasureAtom& b) {
                  return a.pos < b.pos;
              });
    return tr;
}

std::vector<int> zero_child_labels(const std::vector<int>& childCounts) {
    std::vector<int> out;
    for (std::size_t i = 0; i < childCounts.size(); ++i)
        if (childCounts[i] == 0) out.push_back(static_cast<int>(i) + 1);
    return out;
}

}  // namespace

BuildResult build_dtree(const std::vector<int>& childCounts, const DTuple& a) {
    const int s = static_cast<int>(childCounts.size());
    require(s >= 1, "Empty", "child counts must be non-empty");
    require(static_cast<int>(a.entries.size()) == s - 1, "SumMismatch",
            "walk must have s-1 entries");
    if (s == 1) {  // single vertex, empty walk
        BuildResult out;
        out.tree.root = 1;
        out.tree.parent = {-1, 0};
        out.tree.childCount = {0, 0};
        out.trace.X = {kNever};
        return out;
    }
    GrowOut g = grow(s, a.entries, 1, zero_child_labels(childCounts));
    BuildResult out;
    out.trace = make_trace(g, childCounts);
    out.tree = std::move(g.tree);
    return out;
}

BuildResult build_dtree(const DegreeSequence& d, const DTuple& a) {
    return build_dtree(d.degrees, a);
}

RootedTree build_dtree_spanning(const std::vector<int>& childCounts,
                                const DTuple& a, const std::vector<int>& w) {
    const int s = static_cast<int>(childCounts.size());
    require(static_cast<int>(w.size()) == s, "NotPermutation",
            "reserve order must list all s labels");
    std::vector<char> seen(s + 1, 0);
    for (int label : w) {
        require(label >= 1 && label <= s && !seen[label], "NotPermutation",
                "reserve order is not a permutation of 1..s");
        seen[label] = 1;
    }
    GrowOut g = grow(s, a.entries, 1, w);
    return std::move(g.tree);
}

BuildResult build_pure_rooted_from(const std::vector<int>& childCounts, int k,
                                   const DTuple& a) {
    const int s = static_cast<int>(childCounts.size());
    require(k >= 1 && k <= s, "IndexOutOfRange",
            "root label must lie in 1..s");
    require(static_cast<int>(a.entries.size()) == s - 1, "SumMismatch",
            "walk must have s-1 entries");
    std::vector<int> walk;
    walk.reserve(s);
    walk.push_back(k);
    walk.insert(walk.end(), a.entries.begin(), a.entries.end());
    std::vector<int> reserve = zero_child_labels(childCounts);
    reserve.push_back(s + 1);  // the extra vertex closing the final step
    GrowOut g = grow(s + 1, walk, 0, reserve);
    BuildResult out;
    out.trace = make_trace(g, childCounts);  // original masses d_i - 1
    out.tree = std::move(g.tree);
    return out;
}

BuildResult build_pure_rooted(const DegreeSequence& d, int k, RandomStream& rng) {
    return build_pure_rooted_from(d.degrees, k, sample_dtuple(d.degrees, rng));
}

long long count_dtuples(const DegreeSequence& d) {
    // (s-1)! / prod d_i!  ==  prod over i of C(partial sum of d_1..d_i, d_i)
    long long result = 1;
    long long placed = 0;
    for (int deg : d.degrees) {
        for (int j = 1; j <= deg; ++j) {
            // result *= (placed + j) / j, kept integral by multiplying first.
            const __int128 wide = static_cast<__int128>(result) * (placed + j);
            require(wide / j <= std::numeric_limits<long long>::max(),
                    "TooLarge", "walk count exceeds the 64-bit range");
            result = static_cast<long long>(wide / j);
        }
        placed += deg;
    }
    return result;
}

EnumerationResult enumerate_dtrees(const DegreeSequence& d, long long maxTuples) {
    const long long total = count_dtuples(d);
    require(total <= maxTuples, "TooLarge",
            std::to_string(total) + " walks exceed the enumeration cap of " +
                std::to_string(maxTuples));
    std::vector<int> entries;
    for (std::size_t i = 0; i < d.degrees.size(); ++i)
        entries.insert(entries.end(), d.degrees[i], static_cast<int>(i) + 1);
    std::sort(entries.begin(), entries.end());
    EnumerationResult out;
    std::set<std::string> keys;
    do {
        DTuple a;
        a.entries = entries;
        keys.insert(tree_key(build_dtree(d.degrees, a).tree));
        ++out.tupleCount;
    } while (std::next_permutation(entries.begin(), entries.end()));
    require(out.tupleCount == total, "SumMismatch",
            "permutation enumeration disagrees with the counting formula");
    out.distinctTreeCount = static_cast<long long>(keys.size());
    out.treeKeys.assign(keys.begin(), keys.end());
    return out;
}

RootedTree relabel(const RootedTree& t, const std::vector<int>& f) {
    // f is indexed by old label (entry 0 unused); every present label needs a
    // positive image and no two present labels may share one.
    int maxNew = 0;
    for (int v = 1; v <= t.max_label(); ++v) {
        if (!t.present(v)) continue;
        require(v < static_cast<int>(f.size()) && f[v] >= 1, "NotBijection",
                "no image for label " + std::to_string(v));
        maxNew = std::max(maxNew, f[v]);
    }
    RootedTree out;
    out.parent.assign(maxNew + 1, -1);
    out.childCount.assign(maxNew + 1, 0);
    for (int v = 1; v <= t.max_label(); ++v) {
        if (!t.present(v)) continue;
        require(out.parent[f[v]] == -1, "NotBijection",
                "two labels map to " + std::to_string(f[v]));
        out.parent[f[v]] = (v == t.root) ? 0 : f[t.parent[v]];
        out.childCount[f[v]] = t.childCount[v];
    }
    out.root = f[t.root];
    out.edgesInOrder.reserve(t.edgesInOrder.size());
    for (const auto& [u, v] : t.edgesInOrder)
        out.edgesInOrder.emplace_back(f[u], f[v]);
    return out;
}

}  // namespace treelab
