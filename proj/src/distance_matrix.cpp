#include "treelab/distance_matrix.hpp"

#include <cmath>
#include <string>

#include "treelab/errors.hpp"

namespace treelab {

DistanceMatrix make_distance_matrix(int n) {
    DistanceMatrix m;
    m.n = n;
    m.d.assign(static_cast<std::size_t>(n) * n, 0.0);
    return m;
}

DistanceMatrix distance_matrix_tree(const RootedTree& t,
                                    const std::vector<int>& points) {
    for (int v : points)
        require(t.present(v), "UnknownVertex",
                "vertex " + std::to_string(v) + " is not in the tree");
    // Depth of every vertex once, then lift the deeper endpoint to find the
    // lowest common ancestor pair by pair.
    std::vector<int> depth(t.parent.size(), -1);
    depth[t.root] = 0;
    auto depth_of = [&](int v) {
        int walk = v;
        std::vector<int> chain;
        while (depth[walk] < 0) {
            chain.push_back(walk);
            walk = t.parent[walk];
        }
        for (auto it = chain.rbegin(); it != chain.rend(); ++it)
            depth[*it] = depth[t.parent[*it]] + 1;
        return depth[v];
    };
    const int n = static_cast<int>(points.size());
    DistanceMatrix m = make_distance_matrix(n);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            int u = points[i], v = points[j];
            int du = depth_of(u), dv = depth_of(v);
            int dist = 0;
            while (du > dv) { u = t.parent[u]; --du; ++dist; }
            while (dv > du) { v = t.parent[v]; --dv; ++dist; }
            while (u != v) {
                u = t.parent[u];
                v = t.parent[v];
                dist += 2;
            }
            m.at(i, j) = m.at(j, i) = static_cast<double>(dist);
        }
    }
    return m;
}

DistanceMatrix distance_matrix_segments(const SegmentTree& t,
                                        const std::vector<double>& points) {
    const int n = static_cast<int>(points.size());
    DistanceMatrix m = make_distance_matrix(n);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            m.at(i, j) = m.at(j, i) = segment_distance(t, points[i], points[j]);
    return m;
}

void validate_metric(const DistanceMatrix& m, double tol) {
    for (int i = 0; i < m.n; ++i) {
        require(std::abs(m.at(i, i)) <= tol, "NotMetric",
                "nonzero diagonal at " + std::to_string(i));
        for (int j = 0; j < m.n; ++j) {
            require(m.at(i, j) >= -tol, "NotMetric", "negative entry");
            require(std::abs(m.at(i, j) - m.at(j, i)) <= tol, "NotMetric",
                    "asymmetry at (" + std::to_string(i) + "," +
                        std::to_string(j) + ")");
        }
    }
    for (int i = 0; i < m.n; ++i)
        for (int j = 0; j < m.n; ++j)
            for (int k = 0; k < m.n; ++k)
                require(m.at(i, j) <= m.at(i, k) + m.at(k, j) + tol,
                        "NotMetric",
                        "triangle violation at (" + std::to_string(i) + "," +
                            std::to_string(j) + "," + std::to_string(k) + ")");
}

}  // namespace treelab
