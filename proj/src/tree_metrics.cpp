#include "treelab/tree_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <string>

#include "treelab/errors.hpp"

namespace treelab {

long long height(const RootedTree& t) {
    std::vector<long long> depth(t.parent.size(), -1);
    if (t.root >= 1) depth[t.root] = 0;
    long long best = 0;
    std::vector<int> chain;
    for (int v = 1; v <= t.max_label(); ++v) {
        if (!t.present(v)) continue;
        int walk = v;
        chain.clear();
        while (depth[walk] < 0) {
            chain.push_back(walk);
            walk = t.parent[walk];
        }
        for (auto it = chain.rbegin(); it != chain.rend(); ++it)
            depth[*it] = depth[t.parent[*it]] + 1;
        best = std::max(best, depth[v]);
    }
    return best;
}

long long hausdorff_stage(const RootedTree& t, const std::vector<int>& stage) {
    require(!stage.empty(), "DisconnectedStage", "the stage set is empty");
    std::vector<char> inStage(t.parent.size(), 0);
    for (int v : stage) {
        require(t.present(v), "UnknownVertex",
                "vertex " + std::to_string(v) + " is not in the tree");
        inStage[v] = 1;
    }
    require(inStage[t.root], "DisconnectedStage",
            "the stage set must contain the root");
    for (int v : stage) {
        if (v != t.root)
            require(inStage[t.parent[v]], "DisconnectedStage",
                    "vertex " + std::to_string(v) +
                        " is detached from the stage subtree");
    }

    // Undirected adjacency, then breadth-first search from all stage vertices.
    std::vector<std::vector<int>> adj(t.parent.size());
    for (int v = 1; v <= t.max_label(); ++v) {
        if (!t.present(v) || v == t.root) continue;
        adj[v].push_back(t.parent[v]);
        adj[t.parent[v]].push_back(v);
    }
    std::vector<long long> dist(t.parent.size(), -1);
    std::queue<int> q;
    for (int v : stage) {
        dist[v] = 0;
        q.push(v);
    }
    long long best = 0;
    while (!q.empty()) {
        const int v = q.front();
        q.pop();
        for (int u : adj[v]) {
            if (dist[u] < 0) {
                dist[u] = dist[v] + 1;
                best = std::max(best, dist[u]);
                q.push(u);
            }
        }
    }
    return best;
}

namespace {

bool subset_covers(const DistanceMatrix& m, double eps,
                   const std::vector<int>& centers) {
    for (int p = 0; p < m.n; ++p) {
        bool covered = false;
        for (int c : centers) {
            if (m.at(p, c) <= eps) {
                covered = true;
                break;
            }
        }
        if (!covered) return false;
    }
    return true;
}

bool try_centers(const DistanceMatrix& m, double eps, int k, int from,
                 std::vector<int>& centers) {
    if (static_cast<int>(centers.size()) == k)
        return subset_covers(m, eps, centers);
    for (int c = from; c < m.n; ++c) {
        centers.push_back(c);
        if (try_centers(m, eps, k, c + 1, centers)) return true;
        centers.pop_back();
    }
    return false;
}

}  // namespace

CoveringResult covering_number(const DistanceMatrix& m, double eps,
                               int exactLimit) {
    require(eps >= 0.0, "OutOfRange", "the radius must be non-negative");
    if (m.n == 0) return {0, true};
    if (m.n <= exactLimit) {
        for (int k = 1; k <= m.n; ++k) {
            std::vector<int> centers;
            if (try_centers(m, eps, k, 0, centers)) return {k, true};
        }
        return {m.n, true};  // unreachable: all points always cover
    }
    // Farthest-point sweep: each new centre is the point farthest from the
    // chosen ones (ties to the smallest index), until everything is covered.
    std::vector<double> nearest(m.n, std::numeric_limits<double>::infinity());
    int count = 0;
    int next = 0;
    while (true) {
        ++count;
        for (int p = 0; p < m.n; ++p)
            nearest[p] = std::min(nearest[p], m.at(next, p));
        next = -1;
        double worst = eps;
        for (int p = 0; p < m.n; ++p) {
            if (nearest[p] > worst) {
                worst = nearest[p];
                next = p;
            }
        }
        if (next < 0) return {count, false};
    }
}

namespace {

struct GhSearch {
    const DistanceMatrix& a;
    const DistanceMatrix& b;
    double best = std::numeric_limits<double>::infinity();

    // All (pointA, pointB) pairs fixed so far, in assignment order.
    std::vector<std::pair<int, int>> pairs;

    double pair_distortion(int pa, int pb) const {
        double worst = 0.0;
        for (const auto& [qa, qb] : pairs)
            worst = std::max(worst,
                             std::abs(a.at(pa, qa) - b.at(pb, qb)));
        return worst;
    }

    void grow(std::size_t slot, double current) {
        if (current >= best) return;
        // Slots alternate between the two sides so mixed pairs appear early
        // and prune hard.
        const auto na = static_cast<std::size_t>(a.n);
        const auto nb = static_cast<std::size_t>(b.n);
        if (slot >= na + nb) {
            best = current;
            return;
        }
        // First 2*min(na,nb) slots alternate A/B; leftover slots belong to
        // the larger side.
        bool onA;
        std::size_t idx;
        if (slot < 2 * std::min(na, nb)) {
            onA = slot % 2 == 0;
            idx = slot / 2;
        } else {
            onA = na > nb;
            idx = slot - std::min(na, nb);
        }
        if (onA) {
            for (int pb = 0; pb < b.n; ++pb) {
                const double d =
                    std::max(current, pair_distortion(static_cast<int>(idx), pb));
                if (d >= best) continue;
                pairs.emplace_back(static_cast<int>(idx), pb);
                grow(slot + 1, d);
                pairs.pop_back();
            }
        } else {
            for (int pa = 0; pa < a.n; ++pa) {
                const double d =
                    std::max(current, pair_distortion(pa, static_cast<int>(idx)));
                if (d >= best) continue;
                pairs.emplace_back(pa, static_cast<int>(idx));
                grow(slot + 1, d);
                pairs.pop_back();
            }
        }
    }
};

}  // namespace

double gh_bruteforce(const DistanceMatrix& a, const DistanceMatrix& b) {
    require(a.n <= 7 && b.n <= 7, "TooLarge",
            "exhaustive search is limited to 7 points per side");
    if (a.n == 0 || b.n == 0) {
        require(a.n == 0 && b.n == 0, "OutOfRange",
                "cannot compare an empty space with a non-empty one");
        return 0.0;
    }
    GhSearch s{a, b};
    s.grow(0, 0.0);
    return 0.5 * s.best;
}

bool isometric_bruteforce(const DistanceMatrix& a, const DistanceMatrix& b,
                          double tol) {
    if (a.n != b.n) return false;
    require(a.n <= 8, "TooLarge", "permutation search is limited to 8 points");
    std::vector<int> perm(a.n);
    std::iota(perm.begin(), perm.end(), 0);
    do {
        bool ok = true;
        for (int i = 0; i < a.n && ok; ++i)
            for (int j = i + 1; j < a.n && ok; ++j)
                ok = std::abs(a.at(i, j) - b.at(perm[i], perm[j])) <= tol;
        if (ok) return true;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return false;
}

}  // namespace treelab
