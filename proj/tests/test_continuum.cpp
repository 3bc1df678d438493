#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "treelab/continuum.hpp"
#include "treelab/degree_sequence.hpp"
#include "treelab/discrete_tree.hpp"
#include "treelab/errors.hpp"
#include "treelab/expected_measure.hpp"
#include "treelab/rng.hpp"
#include "treelab/segment_tree.hpp"
#include "treelab/stats_tests.hpp"
#include "treelab/trace.hpp"

using namespace treelab;

namespace {

const std::vector<int> kExampleCounts = {1, 2, 1, 3, 3, 0, 0, 0, 0, 0, 0};
const std::vector<int> kExampleWalk = {4, 5, 2, 5, 3, 4, 5, 4, 1, 2};

bool is_inf(double x) { return std::isinf(x) && x > 0; }

}  // namespace

TEST_CASE("random position map: shape and frozen mean of f(3)") {
    // d = (2,2,1,0,0,0): sigma = 2, s = 6, so the first three gaps have
    // means 2/5, 2/4, 2/3 and E[f(3)] = 47/30.
    const DegreeSequence d = validate_degree_sequence({2, 2, 1, 0, 0, 0});
    RandomStream rng(71);
    const int n = 100000;
    double sum = 0.0, sumSq = 0.0;
    for (int i = 0; i < n; ++i) {
        const std::vector<double> f = sample_time_change(d, rng);
        REQUIRE(f.size() == 6);
        REQUIRE(f[0] == 0.0);
        for (std::size_t k = 1; k < f.size(); ++k) REQUIRE(f[k] > f[k - 1]);
        sum += f[3];
        sumSq += f[3] * f[3];
    }
    const double mean = sum / n;
    const double var = (sumSq - n * mean * mean) / (n - 1);
    const double want = 47.0 / 30.0;
    CHECK(std::abs(mean - want) <= 3.0 * std::sqrt(var / n));
}

TEST_CASE("time change embeds integer positions exactly") {
    const BuildResult b =
        build_dtree(kExampleCounts, make_dtuple(kExampleCounts, kExampleWalk));
    const double sigma = std::sqrt(14.0);

    // A hand-made strictly increasing map for the 11 positions 0..10.
    std::vector<double> f(11);
    for (int i = 0; i < 11; ++i) f[static_cast<std::size_t>(i)] = 0.125 * i * i + 0.25 * i;

    const StickTrace tc = apply_time_change(b.trace, f, 1.0 / sigma);

    REQUIRE(tc.Y.size() == 5);
    const std::vector<std::int64_t> wantY = {4, 6, 7, 8, 10};
    const std::vector<std::int64_t> wantZ = {2, 1, 2, 1, 3};
    for (std::size_t j = 0; j < 5; ++j) {
        CHECK(tc.Y[j] == f[static_cast<std::size_t>(wantY[j])]);
        CHECK(tc.Z[j] == f[static_cast<std::size_t>(wantZ[j])]);
    }
    CHECK(tc.glueAtom == std::vector<int>{5, 4, 5, 4, 2});

    REQUIRE(tc.X.size() == 11);
    CHECK(tc.X[0] == f[9]);
    CHECK(tc.X[1] == f[3]);
    CHECK(tc.X[2] == f[5]);
    CHECK(tc.X[3] == f[1]);
    CHECK(tc.X[4] == f[2]);
    for (int i = 5; i < 11; ++i) CHECK(is_inf(tc.X[static_cast<std::size_t>(i)]));

    REQUIRE(tc.mu.atoms.size() == 3);
    CHECK(tc.mu.atoms[0].pos == f[1]);
    CHECK(tc.mu.atoms[0].mass == 2.0 / sigma);
    CHECK(tc.mu.atoms[0].label == 4);
    CHECK(tc.mu.atoms[1].pos == f[2]);
    CHECK(tc.mu.atoms[2].pos == f[3]);
    CHECK(tc.mu.atoms[2].mass == 1.0 / sigma);
    CHECK(tc.mu.lebesgueCoeff == 0.0);

    // Errors: map too short, nonpositive mass scale, non-integer positions.
    const std::vector<double> shortF = {0.0, 1.0, 2.0, 3.0, 4.0};
    CHECK_THROWS_WITH_AS(apply_time_change(b.trace, shortF, 1.0),
                         doctest::Contains("OutOfRange"), Error);
    CHECK_THROWS_WITH_AS(apply_time_change(b.trace, f, 0.0),
                         doctest::Contains("NonPositiveScale"), Error);
    StickTrace crooked = to_stick(b.trace);
    crooked.Y[0] += 0.5;
    CHECK_THROWS_WITH_AS(apply_time_change(crooked, f, 1.0),
                         doctest::Contains("NonIntegerPositions"), Error);
}

TEST_CASE("linear rescaling of a discrete trace") {
    const BuildResult b =
        build_dtree(kExampleCounts, make_dtuple(kExampleCounts, kExampleWalk));
    const StickTrace r = rescale_trace(b.trace, 0.5, 0.25);
    CHECK(r.Y[0] == 2.0);       // 4 * 0.5
    CHECK(r.X[3] == 0.5);       // first hit of vertex 4 at position 1
    CHECK(r.mu.atoms[0].mass == 0.5);  // mass 2 * 0.25
    // Measure of [0, b] = l2 * old measure of [0, b / l1].
    CHECK(r.mu.prefix(1.0) == 0.25 * static_cast<double>(b.trace.mu_prefix(2)));
    CHECK_THROWS_WITH_AS(rescale_trace(b.trace, -1.0, 1.0),
                         doctest::Contains("NonPositiveScale"), Error);
}

TEST_CASE("continuum walk for a degree sequence: slots, masses, glue points") {
    const DegreeSequence d = validate_degree_sequence({2, 2, 1, 0, 0, 0});
    RandomStream rng(72);
    for (int rep = 0; rep < 200; ++rep) {
        const ContinuumDTreeResult r = sample_continuum_dtree(d, rng);

        // Exactly bigN = 2 cut/glue pairs, sorted by cut position.
        REQUIRE(r.trace.Y.size() == 2);
        CHECK(r.trace.Y[0] < r.trace.Y[1]);

        // One atom per vertex with >= 2 children, mass (d_i - 1) / sigma.
        REQUIRE(r.trace.mu.atoms.size() == 2);
        CHECK(r.trace.mu.lebesgueCoeff == 0.0);
        std::vector<int> atomLabels;
        for (const auto& a : r.trace.mu.atoms) {
            CHECK(a.mass == 0.5);
            atomLabels.push_back(a.label);
            CHECK(a.pos == r.trace.X[static_cast<std::size_t>(a.label - 1)]);
        }
        std::sort(atomLabels.begin(), atomLabels.end());
        CHECK(atomLabels == std::vector<int>{1, 2});

        // Vertices with d_i >= 1 have finite clocks, leaves never appear.
        REQUIRE(r.trace.X.size() == 6);
        for (int i = 0; i < 3; ++i) CHECK(std::isfinite(r.trace.X[static_cast<std::size_t>(i)]));
        for (int i = 3; i < 6; ++i) CHECK(is_inf(r.trace.X[static_cast<std::size_t>(i)]));

        // Each glue lands on the first hit of the vertex owning the slot,
        // one slot per extra child: labels {1, 2} exactly once each.
        std::vector<int> slotLabels = r.trace.glueAtom;
        REQUIRE(slotLabels.size() == 2);
        for (std::size_t j = 0; j < 2; ++j) {
            const int lab = r.trace.glueAtom[j];
            REQUIRE(lab >= 1);
            REQUIRE(lab <= 2);
            CHECK(r.trace.Z[j] == r.trace.X[static_cast<std::size_t>(lab - 1)]);
            CHECK(r.trace.Y[j] > r.trace.Z[j]);
        }
        std::sort(slotLabels.begin(), slotLabels.end());
        CHECK(slotLabels == std::vector<int>{1, 2});

        // The stick spans [0, last point].
        double maxPoint = 0.0;
        for (double x : r.trace.X)
            if (std::isfinite(x)) maxPoint = std::max(maxPoint, x);
        for (double y : r.trace.Y) maxPoint = std::max(maxPoint, y);
        CHECK(r.tree.total_length() == doctest::Approx(maxPoint).epsilon(1e-12));
    }

    // A hub vertex owning both slots: both glues land on its clock.
    const DegreeSequence hub = validate_degree_sequence({3, 1, 0, 0, 0});
    for (int rep = 0; rep < 50; ++rep) {
        const ContinuumDTreeResult r = sample_continuum_dtree(hub, rng);
        REQUIRE(r.trace.Y.size() == 2);
        CHECK(r.trace.glueAtom == std::vector<int>{1, 1});
        CHECK(r.trace.Z[0] == r.trace.X[0]);
        CHECK(r.trace.Z[1] == r.trace.X[0]);
    }

    const DegreeSequence flat = validate_degree_sequence({1, 1, 0});
    CHECK_THROWS_WITH_AS(sample_continuum_dtree(flat, rng),
                         doctest::Contains("SigmaZero"), Error);
}

TEST_CASE("continuum random tree: Brownian, single-atom, truncation") {
    RandomStream rng(73);

    // Pure Brownian: unit Lebesgue mass, no atoms, glues from the length part.
    const ThetaParams brown = validate_theta({});
    for (int rep = 0; rep < 50; ++rep) {
        const IcrtResult r = sample_icrt(brown, 3.0, rng);
        CHECK(r.trace.mu.lebesgueCoeff == 1.0);
        CHECK(r.trace.mu.atoms.empty());
        CHECK(r.droppedMass == 0.0);
        CHECK(r.tailMass == 0.0);
        CHECK(r.cutCount == static_cast<long long>(r.trace.Y.size()));
        CHECK(r.tree.total_length() == 3.0);
        for (std::size_t j = 0; j < r.trace.Y.size(); ++j) {
            if (j > 0) CHECK(r.trace.Y[j] > r.trace.Y[j - 1]);
            CHECK(r.trace.Y[j] <= 3.0);
            CHECK(r.trace.Z[j] <= r.trace.Y[j]);
            CHECK(r.trace.Z[j] >= 0.0);
            CHECK(r.trace.glueAtom[j] == -1);
        }
    }

    // One atom of full weight: every glue lands on it.
    const ThetaParams hub = validate_theta({1.0});
    for (int rep = 0; rep < 50; ++rep) {
        const IcrtResult r = sample_icrt(hub, 5.0, rng);
        CHECK(r.trace.mu.lebesgueCoeff == 0.0);
        if (r.trace.X[0] > 5.0) {
            CHECK(r.tailMass == 1.0);
            CHECK(r.trace.Y.empty());
            continue;
        }
        CHECK(r.tailMass == 0.0);
        REQUIRE(r.trace.mu.atoms.size() == 1);
        CHECK(r.trace.mu.atoms[0].mass == 1.0);
        CHECK(r.trace.mu.atoms[0].pos == r.trace.X[0]);
        for (std::size_t j = 0; j < r.trace.Y.size(); ++j) {
            CHECK(r.trace.Y[j] > r.trace.X[0]);
            CHECK(r.trace.Z[j] == r.trace.X[0]);
            CHECK(r.trace.glueAtom[j] == 1);
        }
    }

    // Atoms below the resolution are dropped and accounted for.
    const ThetaParams tiny = validate_theta({0.5, 1e-10});
    const IcrtResult rd = sample_icrt(tiny, 2.0, rng);
    CHECK(rd.droppedMass == 1e-10);
    CHECK(is_inf(rd.trace.X[1]));

    // An atom past the horizon carries its weight to tailMass.
    const ThetaParams half = validate_theta({0.5});
    for (int rep = 0; rep < 50; ++rep) {
        const IcrtResult r = sample_icrt(half, 0.01, rng);
        if (r.trace.X[0] > 0.01)
            CHECK(r.tailMass == 0.5);
        else
            CHECK(r.tailMass == 0.0);
    }

    CHECK_THROWS_WITH_AS(sample_icrt(brown, 0.0, rng),
                         doctest::Contains("LNonPositive"), Error);
    CHECK_THROWS_WITH_AS(sample_icrt(brown, 1.0, rng, -1.0),
                         doctest::Contains("OutOfRange"), Error);
}

TEST_CASE("drawing from a measure restricted to a prefix") {
    RandomStream rng(74);

    AtomicMeasure oneAtom;
    oneAtom.atoms.push_back({1.0, 2.0, 7});
    for (int i = 0; i < 20; ++i) {
        const PrefixDraw d = draw_from_prefix(oneAtom, 2.0, rng);
        CHECK(d.pos == 1.0);
        CHECK(d.atomLabel == 7);
    }
    CHECK_THROWS_WITH_AS(draw_from_prefix(oneAtom, 0.5, rng),
                         doctest::Contains("ZeroMass"), Error);
    CHECK_THROWS_WITH_AS(draw_from_prefix(oneAtom, -1.0, rng),
                         doctest::Contains("OutOfRange"), Error);

    AtomicMeasure lebesgue;
    lebesgue.lebesgueCoeff = 2.0;
    double sum = 0.0;
    const int n = 2000;
    for (int i = 0; i < n; ++i) {
        const PrefixDraw d = draw_from_prefix(lebesgue, 1.0, rng);
        CHECK(d.atomLabel == -1);
        REQUIRE(d.pos >= 0.0);
        REQUIRE(d.pos <= 1.0);
        sum += d.pos;
    }
    CHECK(sum / n == doctest::Approx(0.5).epsilon(0.05));
}

TEST_CASE("stick-breaking construction: structure and errors") {
    const SegmentTree t = sb_construct({1.0, 2.0}, {0.3, 1.5}, 2.5);
    REQUIRE(t.segment_count() == 3);
    CHECK(t.starts == std::vector<double>{0.0, 1.0, 2.0});
    CHECK(t.ends == std::vector<double>{1.0, 2.0, 2.5});
    CHECK(t.attachPos == std::vector<double>{0.0, 0.3, 1.5});
    CHECK(t.parentSeg == std::vector<int>{-1, 0, 1});
    CHECK(t.total_length() == 2.5);
    CHECK(find_segment(t, 0.0) == 0);
    CHECK(find_segment(t, 1.0) == 0);
    CHECK(find_segment(t, 1.0000001) == 1);
    CHECK(find_segment(t, 2.3) == 2);
    CHECK(height_segments(t) == doctest::Approx(1.3).epsilon(1e-12));

    CHECK_THROWS_WITH_AS(sb_construct({2.0, 1.0}, {0.1, 0.1}, 3.0),
                         doctest::Contains("NotIncreasing"), Error);
    CHECK_THROWS_WITH_AS(sb_construct({0.0, 1.0}, {0.0, 0.1}, 3.0),
                         doctest::Contains("NotIncreasing"), Error);
    CHECK_THROWS_WITH_AS(sb_construct({1.0, 4.0}, {0.1, 0.2}, 3.0),
                         doctest::Contains("NotIncreasing"), Error);
    CHECK_THROWS_WITH_AS(sb_construct({1.0}, {1.5}, 3.0),
                         doctest::Contains("GluePastCut"), Error);
    CHECK_THROWS_WITH_AS(sb_construct({1.0}, {-0.1}, 3.0),
                         doctest::Contains("OutOfRange"), Error);
    CHECK_THROWS_WITH_AS(sb_construct({}, {}, 0.0),
                         doctest::Contains("OutOfRange"), Error);
    CHECK_THROWS_WITH_AS(find_segment(t, 2.6),
                         doctest::Contains("OutOfRange"), Error);
}

TEST_CASE("coupling: time-changed discrete walk matches the continuum law") {
    const DegreeSequence d = validate_degree_sequence({2, 2, 1, 0, 0, 0});
    const double sigma = 2.0;
    const int n = 3000;

    RandomStream rngD = RandomStream::split(81, 0);
    RandomStream rngC = RandomStream::split(81, 1);

    std::vector<double> dY1, dX1, cY1, cX1;
    for (int i = 0; i < n; ++i) {
        const BuildResult b = build_dtree(d, sample_dtuple(d.degrees, rngD));
        const std::vector<double> f = sample_time_change(d, rngD);
        const StickTrace tc = apply_time_change(b.trace, f, 1.0 / sigma);
        dY1.push_back(tc.Y[0]);
        dX1.push_back(tc.X[0]);

        const ContinuumDTreeResult c = sample_continuum_dtree(d, rngC);
        cY1.push_back(c.trace.Y[0]);
        cX1.push_back(c.trace.X[0]);
    }

    const double statY = ks_two_sample_stat(dY1, cY1);
    CHECK(ks_asymptotic_pvalue(statY, dY1.size(), cY1.size()) > 1e-3);
    const double statX = ks_two_sample_stat(dX1, cX1);
    CHECK(ks_asymptotic_pvalue(statX, dX1.size(), cX1.size()) > 1e-3);
}

TEST_CASE("mean prefix mass of the continuum walk matches the closed form") {
    const DegreeSequence d = validate_degree_sequence({2, 2, 1, 0, 0, 0});
    RandomStream rng(82);
    const int n = 20000;
    for (double x : {0.5, 1.5}) {
        double sum = 0.0, sumSq = 0.0;
        RandomStream local = RandomStream::split(82, static_cast<std::uint64_t>(x * 10));
        for (int i = 0; i < n; ++i) {
            const ContinuumDTreeResult r = sample_continuum_dtree(d, local);
            const double m = r.trace.mu.prefix(x);
            sum += m;
            sumSq += m * m;
        }
        const double mean = sum / n;
        const double var = (sumSq - n * mean * mean) / (n - 1);
        const double want = expected_mu_tilde(d, x);
        CHECK(std::abs(mean - want) <= 3.0 * std::sqrt(var / n) + 1e-12);
    }
    (void)rng;
}
