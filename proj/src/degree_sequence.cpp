#include "treelab/degree_sequence.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "treelab/errors.hpp"

namespace treelab {

namespace {

void check_entries_and_sum(const std::vector<long long>& raw) {
    require(!raw.empty(), "Empty", "degree sequence must be non-empty");
    const long long s = static_cast<long long>(raw.size());
    long long sum = 0;
    for (long long v : raw) {
        require(v >= 0, "NegativeEntry", "degree entries must be non-negative");
        require(v < s, "SumMismatch",
                "a single degree " + std::to_string(v) + " exceeds s-1");
        sum += v;
    }
    require(sum == s - 1, "SumMismatch",
            "degrees sum to " + std::to_string(sum) + ", expected s-1 = " +
                std::to_string(s - 1));
}

}  // namespace

DegreeSequence validate_degree_sequence(const std::vector<long long>& raw) {
    check_entries_and_sum(raw);
    for (std::size_t i = 1; i < raw.size(); ++i) {
        require(raw[i - 1] >= raw[i], "NotSorted",
                "degrees must be non-increasing (violated at position " +
                    std::to_string(i + 1) + ")");
    }
    DegreeSequence d;
    d.degrees.assign(raw.begin(), raw.end());
    return d;
}

CanonicalizeResult canonicalize_degree_sequence(const std::vector<long long>& raw) {
    check_entries_and_sum(raw);
    std::vector<int> order(raw.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&raw](int a, int b) { return raw[a] > raw[b]; });
    CanonicalizeResult result;
    result.d.degrees.reserve(raw.size());
    result.originalIndex.reserve(raw.size());
    for (int idx : order) {
        result.d.degrees.push_back(static_cast<int>(raw[idx]));
        result.originalIndex.push_back(idx + 1);
    }
    return result;
}

EnsembleStats ensemble_stats(const DegreeSequence& d) {
    EnsembleStats st{0.0, 0, 0, 0, 0};
    long long sigmaSq = 0;
    for (int deg : d.degrees) {
        sigmaSq += static_cast<long long>(deg) * (deg - 1);
        if (deg >= 2) {
            st.bigN += deg - 1;
            ++st.sGe2;
        } else if (deg == 1) {
            ++st.s1;
        } else {
            ++st.leafCount;
        }
    }
    st.sigma = std::sqrt(static_cast<double>(sigmaSq));
    return st;
}

PParams validate_pparams(const std::vector<double>& probs) {
    require(!probs.empty(), "Empty", "p-parameters must be non-empty");
    double sum = 0.0, sumSq = 0.0;
    for (std::size_t i = 0; i < probs.size(); ++i) {
        const double p = probs[i];
        require(std::isfinite(p) && p > 0.0, "NotProbability",
                "p-parameters must be finite and positive");
        if (i > 0) {
            require(probs[i - 1] >= p, "NotSorted",
                    "p-parameters must be non-increasing");
        }
        sum += p;
        sumSq += p * p;
    }
    require(sum <= 1.0 + 1e-12, "NotProbability",
            "p-parameters sum to " + std::to_string(sum) + " > 1");
    PParams out;
    out.probs = probs;
    out.pInf = std::max(0.0, 1.0 - sum);
    out.sigmaP = std::sqrt(sumSq);
    return out;
}

ThetaParams validate_theta(const std::vector<double>& theta) {
    double sumSq = 0.0;
    for (std::size_t i = 0; i < theta.size(); ++i) {
        const double t = theta[i];
        require(std::isfinite(t) && t >= 0.0, "InvalidTheta",
                "theta entries must be finite and non-negative");
        if (i > 0) {
            require(theta[i - 1] >= t, "NotSorted",
                    "theta entries must be non-increasing");
        }
        sumSq += t * t;
    }
    require(sumSq <= 1.0 + 1e-12, "InvalidTheta",
            "sum of squared theta entries is " + std::to_string(sumSq) + " > 1");
    ThetaParams out;
    out.theta = theta;
    out.theta0sq = std::max(0.0, 1.0 - sumSq);
    out.theta0 = std::sqrt(out.theta0sq);
    return out;
}

OmegaPoint omega_embed(const DegreeSequence& d) {
    const EnsembleStats st = ensemble_stats(d);
    require(st.sigma > 0.0, "SigmaZero",
            "the embedding needs sigma > 0 (some degree >= 2)");
    OmegaPoint w;
    w.m = st.sigma / d.s();
    w.nFinite = true;
    w.bigN = st.bigN;
    w.theta.reserve(d.degrees.size());
    for (int deg : d.degrees) w.theta.push_back(deg / st.sigma);
    return w;
}

OmegaPoint omega_embed(const PParams& p) {
    OmegaPoint w;
    w.m = p.sigmaP;
    w.nFinite = false;
    w.bigN = std::numeric_limits<long long>::max();
    w.theta.reserve(p.probs.size());
    for (double q : p.probs) w.theta.push_back(q / p.sigmaP);
    return w;
}

OmegaPoint omega_embed(const ThetaParams& t) {
    OmegaPoint w;
    w.m = 0.0;
    w.nFinite = false;
    w.bigN = std::numeric_limits<long long>::max();
    w.theta = t.theta;
    return w;
}

}  // namespace treelab
