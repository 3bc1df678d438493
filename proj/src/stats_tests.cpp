#include "treelab/stats_tests.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "treelab/empirical.hpp"
#include "treelab/errors.hpp"

namespace treelab {

namespace {

double gamma_p_series(double a, double x) {
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int n = 0; n < 1000; ++n) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::abs(del) < std::abs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double gamma_q_continued_fraction(double a, double x) {
    double b = x + 1.0 - a;
    double c = 1e300;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 1000; ++i) {
        const double an = -static_cast<double>(i) * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < 1e-300) d = 1e-300;
        c = b + an / c;
        if (std::abs(c) < 1e-300) c = 1e-300;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-16) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

double gamma_p(double a, double x) {
    require(a > 0.0 && x >= 0.0, "OutOfRange",
            "gamma_p needs a > 0 and x >= 0");
    if (x == 0.0) return 0.0;
    if (x < a + 1.0) return gamma_p_series(a, x);
    return 1.0 - gamma_q_continued_fraction(a, x);
}

double gamma_q(double a, double x) {
    require(a > 0.0 && x >= 0.0, "OutOfRange",
            "gamma_q needs a > 0 and x >= 0");
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
    return gamma_q_continued_fraction(a, x);
}

double chi_square_sf(double x, int df) {
    require(df >= 1, "OutOfRange", "degrees of freedom must be >= 1");
    return gamma_q(df / 2.0, x / 2.0);
}

ChiSquareResult chi_square_gof(const std::vector<long long>& observed,
                               const std::vector<double>& expected) {
    require(observed.size() == expected.size() && observed.size() >= 2,
            "OutOfRange", "need matching count vectors with >= 2 cells");
    ChiSquareResult r;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        require(expected[i] > 0.0, "OutOfRange",
                "expected counts must be positive");
        const double diff = observed[i] - expected[i];
        r.stat += diff * diff / expected[i];
    }
    r.df = static_cast<int>(observed.size()) - 1;
    r.pvalue = chi_square_sf(r.stat, r.df);
    return r;
}

double ks_two_sample_stat(std::vector<double> a, std::vector<double> b) {
    return ks_distance(make_empirical(std::move(a)),
                       make_empirical(std::move(b)));
}

double ks_asymptotic_pvalue(double d, std::size_t n, std::size_t m) {
    const double en = std::sqrt(static_cast<double>(n) * m / (n + m));
    const double lambda = (en + 0.12 + 0.11 / en) * d;
    if (lambda < 1e-8) return 1.0;
    double p = 0.0;
    for (int j = 1; j <= 100; ++j) {
        const double term =
            2.0 * std::pow(-1.0, j - 1) * std::exp(-2.0 * j * j * lambda * lambda);
        p += term;
        if (std::abs(term) < 1e-12) break;
    }
    return std::clamp(p, 0.0, 1.0);
}

EnergyResult energy_permutation_test(const std::vector<std::vector<double>>& a,
                                     const std::vector<std::vector<double>>& b,
                                     int permutations, RandomStream& rng) {
    require(!a.empty() && !b.empty(), "Empty", "both samples must be non-empty");
    require(permutations >= 1, "OutOfRange", "need at least one permutation");
    const std::size_t dims = a[0].size();
    require(dims >= 1, "OutOfRange", "vectors must have at least one entry");
    for (const auto& row : a)
        require(row.size() == dims, "OutOfRange", "ragged first sample");
    for (const auto& row : b)
        require(row.size() == dims, "OutOfRange", "ragged second sample");

    const std::size_t nA = a.size(), nB = b.size(), N = nA + nB;
    // Pooled values and, per coordinate, the pooled order: the l1 kernel
    // splits per coordinate, and on sorted values all pair sums reduce to
    // prefix counts and prefix sums.
    std::vector<std::vector<double>> value(dims, std::vector<double>(N));
    for (std::size_t k = 0; k < N; ++k)
        for (std::size_t c = 0; c < dims; ++c)
            value[c][k] = k < nA ? a[k][c] : b[k - nA][c];
    std::vector<std::vector<int>> order(dims, std::vector<int>(N));
    for (std::size_t c = 0; c < dims; ++c) {
        std::iota(order[c].begin(), order[c].end(), 0);
        std::sort(order[c].begin(), order[c].end(),
                  [&](int x, int y) { return value[c][x] < value[c][y]; });
    }

    std::vector<char> isA(N);
    auto statistic = [&]() {
        double SAA = 0.0, SAB = 0.0, SBB = 0.0;
        for (std::size_t c = 0; c < dims; ++c) {
            double sumA = 0.0, sumB = 0.0;
            std::size_t cntA = 0, cntB = 0;
            for (int idx : order[c]) {
                const double v = value[c][idx];
                if (isA[idx]) {
                    SAA += cntA * v - sumA;
                    SAB += cntB * v - sumB;
                    ++cntA;
                    sumA += v;
                } else {
                    SBB += cntB * v - sumB;
                    SAB += cntA * v - sumA;
                    ++cntB;
                    sumB += v;
                }
            }
        }
        const double dA = static_cast<double>(nA), dB = static_cast<double>(nB);
        return 2.0 * SAB / (dA * dB) - 2.0 * SAA / (dA * dA) -
               2.0 * SBB / (dB * dB);
    };

    std::fill(isA.begin(), isA.begin() + nA, 1);
    std::fill(isA.begin() + nA, isA.end(), 0);
    EnergyResult result;
    result.stat = statistic();
    result.permutations = permutations;

    std::vector<int> pool(N);
    std::iota(pool.begin(), pool.end(), 0);
    int atLeast = 0;
    for (int p = 0; p < permutations; ++p) {
        for (std::size_t i = N; i > 1; --i) {
            const auto j = static_cast<std::size_t>(
                rng.uniform_int(static_cast<std::int64_t>(i)));
            std::swap(pool[i - 1], pool[j]);
        }
        std::fill(isA.begin(), isA.end(), 0);
        for (std::size_t i = 0; i < nA; ++i) isA[pool[i]] = 1;
        if (statistic() >= result.stat - 1e-12) ++atLeast;
    }
    result.pvalue = (1.0 + atLeast) / (permutations + 1.0);
    return result;
}

double normal_sf(double z) { return 0.5 * std::erfc(z / std::sqrt(2.0)); }

}  // namespace treelab
