#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "treelab/degree_sequence.hpp"
#include "treelab/serialize.hpp"

namespace treelab {

// One checked quantity inside an experiment report.  `comparator` is one of
// ">", ">=", "<=", "<" (value compared against threshold) or "info"
// (reported, never gating).  `sigmaHat` is the Monte Carlo standard error of `value`
// where one applies (0 for exact quantities); comparisons that need slack
// already fold it into `threshold`.
struct StatLine {
    std::string name;
    double value = 0.0;
    double sigmaHat = 0.0;
    double threshold = 0.0;
    std::string comparator = "info";
    bool pass = true;
};

struct ExperimentReport {
    std::string name;
    std::uint64_t seed = 0;
    json config;             // resolved configuration the run used
    std::string configHash;  // hash of `config`
    std::vector<StatLine> stats;
    bool pass = true;  // conjunction of all non-info lines
};

json report_to_json(const ExperimentReport& r);
std::string report_to_csv(const ExperimentReport& r);

// Builds a line and evaluates its comparator ("info" lines always pass).
StatLine make_stat_line(std::string name, double value, double sigmaHat,
                        double threshold, std::string comparator);
StatLine make_info_line(std::string name, double value, double sigmaHat = 0.0);

// Sets `pass` (conjunction of the non-info lines) and stamps `configHash`.
void finalize_report(ExperimentReport& r);

// Deterministic fan-out: runs fn(0..n-1) across `workers` threads in static
// contiguous chunks.  Results must go to per-index slots; any exception is
// rethrown on the calling thread.  Output is identical for any worker count.
void parallel_for(long long n, int workers,
                  const std::function<void(long long)>& fn);

// Child-count families over a size grid (already sorted descending):
//   binary(n): n vertices with 2 children, n+1 leaves        (s = 2n+1)
//   hub(n):    one vertex with n children, n leaves          (s = n+1)
//   unary(n):  2,2, then n single-child vertices, 3 leaves   (s = n+5)
// Errors: UnknownFamily, OutOfRange (size too small for the family).
std::vector<long long> family_degrees(const std::string& family, long long n);

// ---------------------------------------------------------------------------
// Convergence of the rescaled construction walk toward the continuum tree.
//
// For each size, compares rescaled walk statistics (first hit of vertex 1,
// first two cuts, first glue point, measure mass on [0,c]) against the same
// statistics of the continuum sampler via two-sample KS tests, and the
// distribution of which atom the first glue lands on via frequency
// differences.  With selfTest the continuum side is replaced by a second
// independent discrete batch, which must match by exchangeability.
struct SbConfig {
    std::string family = "binary";
    std::vector<long long> degrees;  // explicit sequence; overrides family
    std::vector<long long> sizes = {1000, 10000};
    std::vector<double> theta;  // continuum atom weights (empty: none)
    long long replicates = 2000;
    std::uint64_t seed = 1;
    int workers = 1;
    double alpha = 1e-3;       // p-value floor for every KS line
    double regimeTol = 0.05;   // max allowed |d_i/sigma - theta_i| and d_1/s
    std::vector<double> massGrid = {0.5, 1.0};
    bool selfTest = false;
};
ExperimentReport exp_sb_convergence(const SbConfig& cfg);

// ---------------------------------------------------------------------------
// Convergence of leaf distance matrices toward continuum cut-point distance
// matrices (energy test on upper triangles), plus the spanning-construction
// relabelling coupling: with W a fixed reserve permutation and f_k the swap
// of W_1..W_k with the first k leaves, the probability that the relabelled
// spanning stage tree at the k-th repetition differs from the plain stage
// tree is at most P(Y_k > l) + l (d_{W_1}+...+d_{W_k})/(s-1).
struct GpConfig {
    std::string family = "binary";
    std::vector<long long> degrees;
    std::vector<long long> sizes = {1000, 10000};
    std::vector<double> theta;
    int k = 4;  // matrix points (first k leaves / first k cuts)
    long long replicates = 1000;
    int permutations = 999;
    std::uint64_t seed = 1;
    int workers = 1;
    double alpha = 1e-3;
    double regimeTol = 0.05;
    bool randomVertices = true;  // also test k i.i.d. uniform vertices
    int couplingK = 2;
    std::vector<double> couplingL = {0.5, 1.0};  // rescaled l grid
    bool selfTest = false;
};
ExperimentReport exp_gp_convergence(const GpConfig& cfg);

// ---------------------------------------------------------------------------
// Height experiment: tail quantiles of the rescaled height against the
// structural bound terms (reported, constants being non-numeric), the
// explicit lower bound P(Y_1 >= x) >= exp(-x E[mass[0,x]]) - 3 sigma, tail
// monotonicity, and cross-size stability of the mean rescaled height.
// With theta set, additionally checks containment (truncated continuum tree
// height >= first cut) exactly.
struct HeightConfig {
    std::string family = "binary";
    std::vector<long long> degrees;
    std::vector<long long> sizes = {1000, 10000};
    long long replicates = 1000;
    std::uint64_t seed = 1;
    int workers = 1;
    std::vector<double> xGrid = {0.2, 0.4, 0.6, 0.8, 1.0,
                                 1.2, 1.4, 1.6, 1.8, 2.0};
    double stabilityTol = 0.15;  // relative drift of the mean across sizes
    std::vector<double> theta;   // non-empty: run the continuum checks too
    double icrtHorizon = 3.0;
};
ExperimentReport exp_height(const HeightConfig& cfg);

// ---------------------------------------------------------------------------
// Concentration of the exponential-clock measure: empirical
// P(mass[0,l] <= E/2) <= exp(-l E / 4) + 3 sigma on a grid of l, where
// E is the closed-form expected mass.
struct ConcentrationConfig {
    std::vector<long long> degrees = {2, 2, 1, 0, 0, 0};
    std::vector<double> lGrid = {0.25, 0.5, 0.75, 1.0, 1.25,
                                 1.5,  1.75, 2.0, 2.25, 2.5};
    long long replicates = 100000;
    std::uint64_t seed = 1;
    int workers = 1;
};
ExperimentReport exp_concentration(const ConcentrationConfig& cfg);

// ---------------------------------------------------------------------------
// Re-rooting invariance: the law of the distance matrix between the first m
// glued reserve vertices of the pure rooted tree does not depend on the
// root.  Tested with an energy test between two independently sampled
// batches rooted at rootA and rootB (never paired samples).
struct RerootConfig {
    std::vector<long long> degrees = {2, 2, 1, 0, 0, 0};
    int rootA = 1;
    int rootB = 6;
    int points = 3;  // matrix points (first m glued vertices)
    long long replicates = 10000;
    int permutations = 999;
    std::uint64_t seed = 1;
    int workers = 1;
    double alpha = 1e-3;
};
ExperimentReport exp_reroot(const RerootConfig& cfg);

// ---------------------------------------------------------------------------
// Numeric evaluation of the tightness conditions on a size grid: the tail
// integral of 1/(l E[rescaled mass[0,l]]) from y to the rescaled half-mass
// threshold, ln(s_{>=2}) sigma / N, and the degree-one path ratio
// (sigma/s) ln N / ln(s/s_1).  The two ratio terms must vanish along the
// size ladder (gated on a negative log-log slope; a flat or growing term
// flags the regime violation); the tail integral must instead decay in its
// lower cut-off y uniformly in the size, so it is gated on geometric decay
// over y, 2y, 4y, 8y at the largest size.  Optional analogues: sigmaP ln(sP)
// for the uniform probability family (slope-gated), and the continuum tail
// integral over a doubling cut-off for fixed theta (decay-gated).
struct AssumptionsConfig {
    std::string family = "binary";
    std::vector<long long> sizes = {100, 1000, 10000};
    double y = 1.0;  // lower end of the tail integrals
    std::string pFamily;        // "" or "uniform"
    std::vector<double> theta;  // non-empty: continuum tail integral lines
    std::uint64_t seed = 1;     // recorded; evaluation is deterministic
};
ExperimentReport eval_assumptions(const AssumptionsConfig& cfg);

// ---------------------------------------------------------------------------
// Harness calibration: `runs` independent same-model KS comparisons (first
// cut position, two independent batches each time); the fraction rejected
// at level alpha must lie within maxRejectFraction.  The KS p-value is
// conservative on tied integer data, so the fraction sits at or below the
// nominal level.
struct SelfTestConfig {
    std::vector<long long> degrees = {2, 2, 1, 0, 0, 0};
    int runs = 100;
    long long replicates = 200;
    double alpha = 0.01;
    double maxRejectFraction = 0.05;
    std::uint64_t seed = 1;
    int workers = 1;
};
ExperimentReport exp_selftest(const SelfTestConfig& cfg);

}  // namespace treelab
