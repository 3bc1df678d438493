#pragma once

#include <cstdint>
#include <vector>

namespace treelab {

// A child-count sequence d_1 >= d_2 >= ... >= d_s >= 0 with sum d_i = s - 1.
// Vertices are labelled 1..s; vertex i has d_i children in the plane-rooted
// trees the samplers produce.  The constructor-free struct is only built via
// validate_degree_sequence / canonicalize_degree_sequence, which enforce the
// invariant, so every function taking a DegreeSequence may assume it.
struct DegreeSequence {
    std::vector<int> degrees;

    int s() const { return static_cast<int>(degrees.size()); }
};

// Errors: Empty, NegativeEntry, SumMismatch, NotSorted.
DegreeSequence validate_degree_sequence(const std::vector<long long>& raw);

struct CanonicalizeResult {
    DegreeSequence d;
    // originalIndex[k] = position (1-based) of sorted entry k+1 in the input,
    // using a stable sort, so ties keep their input order.
    std::vector<int> originalIndex;
};

// Sorts a valid-but-unsorted sequence into canonical non-increasing order and
// records where each entry came from.  Errors: Empty, NegativeEntry,
// SumMismatch.
CanonicalizeResult canonicalize_degree_sequence(const std::vector<long long>& raw);

struct EnsembleStats {
    double sigma;        // sqrt(sum d_i (d_i - 1))
    long long bigN;      // number of extra edges sum (d_i - 1)^+ = leafCount - 1
    long long s1;        // #{i : d_i == 1}
    long long sGe2;      // #{i : d_i >= 2}
    long long leafCount; // #{i : d_i == 0}
};

EnsembleStats ensemble_stats(const DegreeSequence& d);

// i.i.d. attachment weights p_1 >= p_2 >= ... > 0 with sum <= 1; the deficit
// p_inf = 1 - sum p_i is the probability of drawing a fresh never-repeated
// vertex.  sigmaP = sqrt(sum p_i^2).
struct PParams {
    std::vector<double> probs;
    double pInf = 0.0;
    double sigmaP = 0.0;

    int count() const { return static_cast<int>(probs.size()); }
};

// Errors: Empty, NotSorted, NotProbability (nonpositive entry or sum > 1
// beyond rounding slack 1e-12).
PParams validate_pparams(const std::vector<double>& probs);

// Atom weights theta_1 >= theta_2 >= ... >= 0 with sum theta_i^2 <= 1; the
// Brownian coefficient is theta0 = sqrt(1 - sum theta_i^2).  An empty list
// means theta0 = 1.  Trailing zeros are kept (they contribute nothing).
struct ThetaParams {
    std::vector<double> theta;
    double theta0sq = 1.0;
    double theta0 = 1.0;

    int count() const { return static_cast<int>(theta.size()); }
};

// Errors: NotSorted, InvalidTheta (negative entry or sum of squares > 1
// beyond rounding slack 1e-12).
ThetaParams validate_theta(const std::vector<double>& theta);

// A point of the common parameter space (m, N, theta): m is the Lebesgue
// weight of the length measure, N the number of glue events (nFinite=false
// means infinitely many), theta the atom weights of the mass measure.
//   degree sequence: m = sigma/s, N = bigN,  theta_i = d_i / sigma
//   p-parameters:    m = sigmaP,  N = inf,   theta_i = p_i / sigmaP
//   theta-params:    m = 0,       N = inf,   theta_i as given
struct OmegaPoint {
    double m = 0.0;
    bool nFinite = false;
    long long bigN = 0;
    std::vector<double> theta;
};

OmegaPoint omega_embed(const DegreeSequence& d);  // Errors: SigmaZero
OmegaPoint omega_embed(const PParams& p);
OmegaPoint omega_embed(const ThetaParams& t);

}  // namespace treelab
