#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <set>
#include <vector>

#include "treelab/degree_sequence.hpp"
#include "treelab/discrete_tree.hpp"
#include "treelab/errors.hpp"
#include "treelab/ptree.hpp"
#include "treelab/rng.hpp"
#include "treelab/stats_tests.hpp"
#include "treelab/tree_metrics.hpp"

using namespace treelab;

namespace {

// The worked 11-vertex example: child counts per label and the walk that
// the whole regression below is frozen against.
const std::vector<int> kExampleCounts = {1, 2, 1, 3, 3, 0, 0, 0, 0, 0, 0};
const std::vector<int> kExampleWalk = {4, 5, 2, 5, 3, 4, 5, 4, 1, 2};

BuildResult build_example() {
    return build_dtree(kExampleCounts,
                       make_dtuple(kExampleCounts, kExampleWalk));
}

}  // namespace

TEST_CASE("walkthrough regression: root, cuts, glue points, edges") {
    const BuildResult b = build_example();

    CHECK(b.tree.root == 4);
    CHECK(b.trace.Y == std::vector<std::int64_t>{4, 6, 7, 8, 10});
    CHECK(b.trace.Z == std::vector<std::int64_t>{2, 1, 2, 1, 3});
    CHECK(b.trace.glueAtom == std::vector<int>{5, 4, 5, 4, 2});

    const std::vector<std::pair<int, int>> wantEdges = {
        {4, 5}, {5, 2}, {2, 6}, {5, 3}, {3, 7},
        {4, 8}, {5, 9}, {4, 1}, {1, 10}, {2, 11}};
    CHECK(b.tree.edgesInOrder == wantEdges);

    // First-hit positions: labels 1..5 at 9, 3, 5, 1, 2; leaves never.
    REQUIRE(b.trace.X.size() == 11);
    CHECK(b.trace.X[0] == 9);
    CHECK(b.trace.X[1] == 3);
    CHECK(b.trace.X[2] == 5);
    CHECK(b.trace.X[3] == 1);
    CHECK(b.trace.X[4] == 2);
    for (int i = 5; i < 11; ++i) CHECK(b.trace.X[i] == kNever);

    // Mass measure: one atom per vertex with >= 2 children, mass d_i - 1,
    // at its first hit, sorted by position.
    REQUIRE(b.trace.muAtoms.size() == 3);
    CHECK(b.trace.muAtoms[0].pos == 1);
    CHECK(b.trace.muAtoms[0].mass == 2);
    CHECK(b.trace.muAtoms[0].label == 4);
    CHECK(b.trace.muAtoms[1].pos == 2);
    CHECK(b.trace.muAtoms[1].mass == 2);
    CHECK(b.trace.muAtoms[1].label == 5);
    CHECK(b.trace.muAtoms[2].pos == 3);
    CHECK(b.trace.muAtoms[2].mass == 1);
    CHECK(b.trace.muAtoms[2].label == 2);
    CHECK(b.trace.mu_prefix(2) == 4);
    CHECK(b.trace.mu_prefix(10) == 5);

    CHECK(height(b.tree) == 3);

    // Stage tree at the first cut: root plus the first Y_1 - 1 = 3 edges
    // gives {V4, V5, V2, V6}; everything else is within distance 2 of it.
    CHECK(hausdorff_stage(b.tree, {4, 5, 2, 6}) == 2);
}

TEST_CASE("single-vertex and two-vertex constructions") {
    const DegreeSequence one = validate_degree_sequence({0});
    const BuildResult b1 = build_dtree(one, make_dtuple(one.degrees, {}));
    CHECK(b1.tree.root == 1);
    CHECK(b1.tree.vertex_count() == 1);
    CHECK(b1.trace.Y.empty());
    CHECK(b1.trace.muAtoms.empty());

    const DegreeSequence two = validate_degree_sequence({1, 0});
    const BuildResult b2 = build_dtree(two, make_dtuple(two.degrees, {1}));
    CHECK(b2.tree.root == 1);
    CHECK(b2.tree.parent[2] == 1);
    CHECK(b2.trace.Y.empty());  // no repetition: the final step is forced
}

TEST_CASE("walk validation") {
    CHECK_THROWS_WITH_AS(make_dtuple({2, 1, 0, 0}, {1, 1, 1}),
                         doctest::Contains("SumMismatch"), Error);
    CHECK_THROWS_WITH_AS(make_dtuple({2, 1, 0, 0}, {1, 2}),
                         doctest::Contains("SumMismatch"), Error);
    CHECK_NOTHROW(make_dtuple({2, 1, 0, 0}, {2, 1, 1}));
}

TEST_CASE("sequential law of the next walk entry") {
    // P(A_1 = a) = d_a / (s-1).
    const StepLaw l1 = conditional_step_law({2, 1, 0, 0}, {}, 1);
    CHECK(l1.numerator == std::vector<long long>{2, 1, 0, 0});
    CHECK(l1.denominator == 3);
    // After one V1 the multiset holds {V1, V2}.
    const StepLaw l2 = conditional_step_law({2, 1, 0, 0}, {1}, 2);
    CHECK(l2.numerator == std::vector<long long>{1, 1, 0, 0});
    CHECK(l2.denominator == 2);
    CHECK_THROWS_WITH_AS(conditional_step_law({2, 1, 0, 0}, {2, 2}, 3),
                         doctest::Contains("InvalidHistory"), Error);
    CHECK_THROWS_WITH_AS(conditional_step_law({2, 1, 0, 0}, {}, 4),
                         doctest::Contains("InvalidHistory"), Error);
}

TEST_CASE("enumeration counts and injectivity for frozen small cases") {
    const DegreeSequence a = validate_degree_sequence({1, 1, 0});
    const EnumerationResult ea = enumerate_dtrees(a);
    CHECK(ea.tupleCount == 2);
    CHECK(ea.distinctTreeCount == 2);
    CHECK(count_dtuples(a) == 2);

    const DegreeSequence b = validate_degree_sequence({2, 1, 0, 0});
    const EnumerationResult eb = enumerate_dtrees(b);
    CHECK(eb.tupleCount == 3);
    CHECK(eb.distinctTreeCount == 3);
    CHECK(count_dtuples(b) == 3);
    // Hand enumeration: "root|parent-of-1,parent-of-2,..." keys, sorted.
    CHECK(eb.treeKeys == std::vector<std::string>{"1|0,1,1,2", "1|0,1,2,1",
                                                  "2|2,0,1,1"});

    const DegreeSequence c = validate_degree_sequence({2, 2, 1, 0, 0, 0});
    const EnumerationResult ec = enumerate_dtrees(c);
    CHECK(ec.tupleCount == 30);  // 5! / (2! 2! 1!)
    CHECK(ec.distinctTreeCount == 30);
    CHECK(count_dtuples(c) == 30);
}

TEST_CASE("walk count formula is (s-1)!/prod d_i!") {
    // A directly computed value: s = 9, d = (3,2,2,1,0,...):
    // 8! / (3! 2! 2! 1!) = 40320 / 24 = 1680.
    const DegreeSequence d =
        validate_degree_sequence({3, 2, 2, 1, 0, 0, 0, 0, 0});
    CHECK(count_dtuples(d) == 1680);
    // Matches exhaustive enumeration.
    const EnumerationResult e = enumerate_dtrees(d);
    CHECK(e.tupleCount == 1680);
    CHECK(e.distinctTreeCount == 1680);
}

TEST_CASE("sampled walks realise the child counts and are deterministic") {
    const DegreeSequence d = validate_degree_sequence({3, 2, 2, 1, 0, 0, 0, 0, 0});
    RandomStream rng(5);
    const DTuple a = sample_dtuple(d.degrees, rng);
    REQUIRE(a.entries.size() == 8);
    for (int v = 1; v <= d.s(); ++v) {
        const long long want = d.degrees[static_cast<std::size_t>(v - 1)];
        CHECK(std::count(a.entries.begin(), a.entries.end(), v) == want);
    }
    RandomStream rng2(5);
    CHECK(sample_dtuple(d.degrees, rng2).entries == a.entries);
}

TEST_CASE("uniformity over the enumerated set (chi-square smoke)") {
    const DegreeSequence d = validate_degree_sequence({2, 1, 0, 0});
    const EnumerationResult e = enumerate_dtrees(d);
    RandomStream rng(11);
    std::vector<long long> observed(e.treeKeys.size(), 0);
    const int n = 30000;
    for (int i = 0; i < n; ++i) {
        const BuildResult b = build_dtree(d, sample_dtuple(d.degrees, rng));
        const auto it = std::lower_bound(e.treeKeys.begin(), e.treeKeys.end(),
                                         tree_key(b.tree));
        REQUIRE(it != e.treeKeys.end());
        ++observed[static_cast<std::size_t>(it - e.treeKeys.begin())];
    }
    const std::vector<double> expected(e.treeKeys.size(),
                                       double(n) / double(e.treeKeys.size()));
    CHECK(chi_square_gof(observed, expected).pvalue > 1e-4);
}

TEST_CASE("spanning reserve order: leading leaves reproduce the plain build") {
    const std::vector<int> counts = {2, 2, 1, 0, 0, 0};
    RandomStream rng(21);
    for (int rep = 0; rep < 50; ++rep) {
        const DTuple a = sample_dtuple(counts, rng);
        const BuildResult plain = build_dtree(counts, a);
        const RootedTree span =
            build_dtree_spanning(counts, a, {4, 5, 6, 1, 2, 3});
        CHECK(tree_key(span) == tree_key(plain.tree));
    }
}

TEST_CASE("spanning reserve order: general permutation still realises counts") {
    const std::vector<int> counts = {2, 2, 1, 0, 0, 0};
    RandomStream rng(22);
    const DTuple a = sample_dtuple(counts, rng);
    const RootedTree t = build_dtree_spanning(counts, a, {6, 3, 1, 4, 2, 5});
    CHECK(t.vertex_count() == 6);
    for (int v = 1; v <= 6; ++v)
        CHECK(t.childCount[v] == counts[static_cast<std::size_t>(v - 1)]);
    CHECK_THROWS_WITH_AS(build_dtree_spanning(counts, a, {1, 1, 2, 3, 4, 5}),
                         doctest::Contains("NotPermutation"), Error);
}

TEST_CASE("re-rooted construction: shape, counts, reserve order") {
    const DegreeSequence d = validate_degree_sequence({2, 2, 1, 0, 0, 0});
    RandomStream rng(31);

    for (int k : {1, 3, 6}) {
        const BuildResult b = build_pure_rooted(d, k, rng);
        CHECK(b.tree.root == k);
        CHECK(b.tree.vertex_count() == 7);
        // Child counts: d with the root's entry bumped, plus a final zero.
        for (int v = 1; v <= 6; ++v) {
            const int want =
                d.degrees[static_cast<std::size_t>(v - 1)] + (v == k ? 1 : 0);
            CHECK(b.tree.childCount[v] == want);
        }
        CHECK(b.tree.childCount[7] == 0);

        // Reserve vertices (the zero-child labels of the bumped sequence)
        // are consumed in ascending order.
        std::vector<int> wantReserve;
        for (int v = 1; v <= 6; ++v)
            if (d.degrees[static_cast<std::size_t>(v - 1)] == 0 && v != k)
                wantReserve.push_back(v);
        wantReserve.push_back(7);
        std::vector<int> gotReserve;
        for (const auto& e : b.tree.edgesInOrder) {
            const int added = e.second;
            if (added == 7 ||
                (added <= 6 &&
                 d.degrees[static_cast<std::size_t>(added - 1)] == 0 &&
                 added != k))
                gotReserve.push_back(added);
        }
        CHECK(gotReserve == wantReserve);

        // Cut count: one repetition per extra edge, plus one more when the
        // root vertex also appears inside the walk (it has d_k >= 1).
        const long long extra =
            d.degrees[static_cast<std::size_t>(k - 1)] >= 1 ? 1 : 0;
        CHECK(static_cast<long long>(b.trace.Y.size()) == 2 + extra);

        // Masses keep the original d_i - 1 (no rescaling).
        for (const auto& atom : b.trace.muAtoms) {
            CHECK(atom.mass ==
                  d.degrees[static_cast<std::size_t>(atom.label - 1)] - 1);
        }

        // Positions count from 0: the root is position 0, so every cut and
        // first hit lies in 1..6.
        for (double y : b.trace.Y) {
            CHECK(y >= 1.0);
            CHECK(y <= 6.0);
        }
    }
    CHECK_THROWS_WITH_AS(build_pure_rooted(d, 9, rng),
                         doctest::Contains("IndexOutOfRange"), Error);
}

TEST_CASE("re-rooting invariance, exact: first-3 reserve matrix multisets") {
    // Over all 30 equally likely walks, the multiset of distance matrices
    // between the first three glued reserve vertices must not depend on the
    // root.  This is the exact engine behind the statistical test.
    const DegreeSequence d = validate_degree_sequence({2, 2, 1, 0, 0, 0});
    const std::vector<int> walkBase = {1, 1, 2, 2, 3};

    auto matrices = [&](int k, const std::vector<int>& pts) {
        std::vector<int> w = walkBase;
        std::sort(w.begin(), w.end());
        std::multiset<std::vector<double>> out;
        do {
            const BuildResult b =
                build_pure_rooted_from(d.degrees, k, make_dtuple(d.degrees, w));
            const DistanceMatrix m = distance_matrix_tree(b.tree, pts);
            out.insert(m.d);
        } while (std::next_permutation(w.begin(), w.end()));
        return out;
    };

    // Root 1 glues (4,5,6,7); root 6 glues (4,5,7).
    const auto m1 = matrices(1, {4, 5, 6});
    const auto m6 = matrices(6, {4, 5, 7});
    CHECK(m1.size() == 30);
    CHECK(m1 == m6);
}

TEST_CASE("attachment-probability tree: invariants and bookkeeping") {
    const PParams p = validate_pparams({0.3, 0.2, 0.1});
    RandomStream rng(41);
    for (int rep = 0; rep < 200; ++rep) {
        const PTreeResult r = sample_ptree(p, 12, rng);
        // Every step either glues, draws a fresh vertex, or first-hits a
        // weighted vertex.
        long long firstHits = 0;
        for (double x : r.trace.X)
            if (x < 12.5) ++firstHits;
        CHECK(r.glueCount + r.freshCount + firstHits == 12);
        CHECK(static_cast<long long>(r.trace.Y.size()) == r.glueCount);

        // Mass atoms sit at first hits of weighted vertices with mass p_v.
        for (const auto& a : r.trace.mu.atoms) {
            REQUIRE(a.label >= 1);
            REQUIRE(a.label <= 3);
            CHECK(a.pos ==
                  r.trace.X[static_cast<std::size_t>(a.label - 1)]);
            CHECK(a.mass ==
                  p.probs[static_cast<std::size_t>(a.label - 1)]);
        }

        // Tree structure: one more vertex than edges, all glue positions
        // inside the walk, fresh labels start at 4.
        CHECK(r.tree.vertex_count() >= 1);
        for (double y : r.trace.Y) {
            CHECK(y >= 1.0);
            CHECK(y <= 12.0);
        }
    }
    CHECK_THROWS_WITH_AS(sample_ptree(p, 0, rng),
                         doctest::Contains("OutOfRange"), Error);
}

TEST_CASE("tree keys separate trees and repeat deterministically") {
    const DegreeSequence d = validate_degree_sequence({2, 2, 1, 0, 0, 0});
    RandomStream rng(51);
    const DTuple a = sample_dtuple(d.degrees, rng);
    const BuildResult b1 = build_dtree(d, a);
    const BuildResult b2 = build_dtree(d, a);
    CHECK(tree_key(b1.tree) == tree_key(b2.tree));
    CHECK(b1.tree.edgesInOrder == b2.tree.edgesInOrder);
}
