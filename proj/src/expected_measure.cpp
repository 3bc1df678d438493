#include "treelab/expected_measure.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "treelab/errors.hpp"

namespace treelab {

namespace {

// Absolute slack added before taking floors of scaled positions, so that a
// position meant to land exactly on a step boundary (but computed with
// rounding error, e.g. s*(1/3)/sigma) is assigned to the step it targets.
constexpr double kFloorSlack = 1e-9;

long long floor_with_slack(double x) {
    return static_cast<long long>(std::floor(x + kFloorSlack));
}

double require_sigma(const DegreeSequence& d) {
    const EnsembleStats st = ensemble_stats(d);
    require(st.sigma > 0.0, "SigmaZero",
            "this quantity needs sigma > 0 (some degree >= 2)");
    return st.sigma;
}

// Degrees grouped by value: value -> (count of vertices, summed mass d-1).
// Only values >= 2 carry mass; value 1 still matters for nothing here, so it
// is dropped along with the leaves.
struct MassGroups {
    std::vector<int> degree;
    std::vector<double> mass;  // count * (degree - 1)
};

MassGroups mass_groups(const DegreeSequence& d) {
    std::map<int, long long> counts;
    for (int deg : d.degrees)
        if (deg >= 2) ++counts[deg];
    MassGroups g;
    for (const auto& [deg, cnt] : counts) {
        g.degree.push_back(deg);
        g.mass.push_back(static_cast<double>(cnt) * (deg - 1));
    }
    return g;
}

}  // namespace

double expected_mu_tilde(const DegreeSequence& d, double x) {
    const double sigma = require_sigma(d);
    require(x >= 0.0, "OutOfRange", "position must be non-negative");
    double total = 0.0;
    for (int deg : d.degrees) {
        if (deg >= 2)
            total += (deg - 1) / sigma * -std::expm1(-deg * x / sigma);
    }
    return total;
}

double expected_mu_discrete(const DegreeSequence& d, long long l) {
    require(l >= 0, "OutOfRange", "step count must be non-negative");
    const long long s = d.s();
    const MassGroups g = mass_groups(d);
    const long long steps = std::min(l, s - 1);
    double total = 0.0;
    for (std::size_t i = 0; i < g.degree.size(); ++i) {
        double unseen = 1.0;
        for (long long j = 1; j <= steps && unseen > 0.0; ++j) {
            unseen *= std::max(0.0, 1.0 - static_cast<double>(g.degree[i]) / (s - j));
        }
        total += g.mass[i] * (1.0 - unseen);
    }
    return total;
}

namespace {

double mu_bar_impl(const DegreeSequence& d, double l, bool clamp) {
    const double sigma = require_sigma(d);
    require(l >= 0.0, "OutOfRange", "position must be non-negative");
    long long k = floor_with_slack(d.s() * l / sigma);
    if (k > d.s() - 1) {
        require(clamp, "OutOfRange",
                "position " + std::to_string(l) + " maps past the last step " +
                    std::to_string(d.s() - 1));
        k = d.s() - 1;
    }
    return expected_mu_discrete(d, k) / sigma;
}

}  // namespace

double expected_mu_bar(const DegreeSequence& d, double l) {
    return mu_bar_impl(d, l, /*clamp=*/false);
}

double expected_mu_bar_clamped(const DegreeSequence& d, double l) {
    return mu_bar_impl(d, l, /*clamp=*/true);
}

long long threshold_t(const DegreeSequence& d) {
    const EnsembleStats st = ensemble_stats(d);
    require(st.bigN > 0, "NZero",
            "the threshold needs at least one repeated vertex (bigN >= 1)");
    const double target = static_cast<double>(st.bigN) / 2.0;
    // The full walk reveals every non-leaf vertex, so the target is reached by
    // l = s-1 at the latest.  Double until past it, then bisect.
    long long hi = 1;
    while (expected_mu_discrete(d, hi) < target) hi *= 2;
    long long lo = hi / 2;  // expected mass at lo (or at 0) is below target
    while (hi - lo > 1) {
        const long long mid = lo + (hi - lo) / 2;
        if (expected_mu_discrete(d, mid) >= target)
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

double inverse_expected_measure(const DegreeSequence& d, double m) {
    const double sigma = require_sigma(d);
    const EnsembleStats st = ensemble_stats(d);
    const double totalMass = static_cast<double>(st.bigN) / sigma;
    require(m >= 0.0, "OutOfRange", "mass must be non-negative");
    require(m < totalMass, "OutOfRange",
            "mass " + std::to_string(m) + " is not below the total " +
                std::to_string(totalMass));
    if (m == 0.0) return 0.0;
    double hi = 1.0;
    while (expected_mu_tilde(d, hi) < m) hi *= 2.0;
    double lo = 0.0;
    for (int it = 0; it < 200 && hi - lo > 1e-10 * std::max(1.0, hi); ++it) {
        const double mid = 0.5 * (lo + hi);
        if (expected_mu_tilde(d, mid) >= m)
            hi = mid;
        else
            lo = mid;
    }
    // The curve has slope <= 1 everywhere, so the interval width bounds the
    // value error as well.
    return 0.5 * (lo + hi);
}

double tail_integral(const DegreeSequence& d, double a, double b) {
    const double sigma = require_sigma(d);
    require(a > 0.0, "OutOfRange", "lower limit must be positive");
    require(b >= a, "OutOfRange", "upper limit must not be below the lower");
    if (b == a) return 0.0;

    const long long s = d.s();
    const double h = sigma / s;  // one walk step after rescaling
    // Between consecutive multiples of h the expected-mass factor is constant,
    // so each piece contributes (1/c_k) * log(hi/lo) exactly.
    const MassGroups g = mass_groups(d);
    std::vector<double> unseen(g.degree.size(), 1.0);
    long long k = 0;         // current piece [k*h, (k+1)*h)
    double c = 0.0;          // expected rescaled mass on the current piece
    double massSeen = 0.0;
    auto advance = [&]() {   // move to piece k+1
        ++k;
        if (k <= s - 1) {
            massSeen = 0.0;
            for (std::size_t i = 0; i < g.degree.size(); ++i) {
                unseen[i] *= std::max(
                    0.0, 1.0 - static_cast<double>(g.degree[i]) / (s - k));
                massSeen += g.mass[i] * (1.0 - unseen[i]);
            }
            c = massSeen / sigma;
        }
        // Past the last step the walk has revealed everything; c stays put.
    };

    const long long kStart = floor_with_slack(a / h);
    for (long long i = 0; i < kStart; ++i) advance();

    double total = 0.0;
    double lo = a;
    while (lo < b) {
        const double pieceEnd = (k >= s - 1) ? b : std::min(b, (k + 1) * h);
        if (pieceEnd > lo) {
            require(c > 0.0, "DivergentIntegrand",
                    "expected mass vanishes on [" + std::to_string(lo) + ", " +
                        std::to_string(pieceEnd) + ")");
            total += std::log(pieceEnd / lo) / c;
            lo = pieceEnd;
        }
        if (lo < b) advance();
    }
    return total;
}

double expected_mu_p(const PParams& p, double l) {
    require(l >= 0.0, "OutOfRange", "position must be non-negative");
    const long long k = floor_with_slack(l);
    double total = 0.0;
    for (double q : p.probs)
        total += q * -std::expm1(static_cast<double>(k) * std::log1p(-q));
    return total;
}

double expected_mu_bar_p(const PParams& p, double l) {
    require(l >= 0.0, "OutOfRange", "position must be non-negative");
    return expected_mu_p(p, l / p.sigmaP) / p.sigmaP;
}

long long threshold_t_p(const PParams& p) {
    const double limit = 1.0 - p.pInf;  // expected mass as l -> infinity
    require(limit >= 0.5, "OutOfRange",
            "expected mass tops out at " + std::to_string(limit) +
                " < 1/2, so no threshold exists");
    long long hi = 1;
    while (expected_mu_p(p, static_cast<double>(hi)) < 0.5) hi *= 2;
    long long lo = hi / 2;
    while (hi - lo > 1) {
        const long long mid = lo + (hi - lo) / 2;
        if (expected_mu_p(p, static_cast<double>(mid)) >= 0.5)
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

double tail_integral_p(const PParams& p, double a, double b) {
    require(a > 0.0, "OutOfRange", "lower limit must be positive");
    require(b >= a, "OutOfRange", "upper limit must not be below the lower");
    if (b == a) return 0.0;
    const double h = p.sigmaP;
    // Piecewise constant between multiples of sigmaP, same exact treatment as
    // the degree-sequence integral.
    std::vector<double> unseen(p.probs.size(), 1.0);
    long long k = 0;
    double c = 0.0;
    auto advance = [&]() {
        ++k;
        double mass = 0.0;
        for (std::size_t i = 0; i < p.probs.size(); ++i) {
            unseen[i] *= 1.0 - p.probs[i];
            mass += p.probs[i] * (1.0 - unseen[i]);
        }
        c = mass / p.sigmaP;
    };
    const long long kStart = floor_with_slack(a / h);
    for (long long i = 0; i < kStart; ++i) advance();

    double total = 0.0;
    double lo = a;
    while (lo < b) {
        const double pieceEnd = std::min(b, (k + 1) * h);
        if (pieceEnd > lo) {
            require(c > 0.0, "DivergentIntegrand",
                    "expected mass vanishes on [" + std::to_string(lo) + ", " +
                        std::to_string(pieceEnd) + ")");
            total += std::log(pieceEnd / lo) / c;
            lo = pieceEnd;
        }
        if (lo < b) advance();
    }
    return total;
}

double expected_mu_theta(const ThetaParams& t, double x) {
    require(x >= 0.0, "OutOfRange", "position must be non-negative");
    double total = t.theta0sq * x;
    for (double th : t.theta)
        if (th > 0.0) total += th * -std::expm1(-x * th);
    return total;
}

namespace {

double adaptive_simpson(const std::function<double(double)>& f, double a,
                        double b, double fa, double fm, double fb, double whole,
                        double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double split = left + right;
    if (depth <= 0 || std::abs(split - whole) <= 15.0 * tol)
        return split + (split - whole) / 15.0;
    return adaptive_simpson(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
           adaptive_simpson(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

double integrate_log_grid(const std::function<double(double)>& f, double a,
                          double b, double relTol) {
    // Split [a, b] at powers of two times a, then run adaptive Simpson on
    // each segment with a proportional share of the absolute budget.
    std::vector<double> knots{a};
    for (double x = 2.0 * a; x < b; x *= 2.0) knots.push_back(x);
    knots.push_back(b);
    // First pass: rough value to convert the relative target into an
    // absolute budget.
    double rough = 0.0;
    for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
        const double lo = knots[i], hi = knots[i + 1], mid = 0.5 * (lo + hi);
        rough += (hi - lo) / 6.0 * (f(lo) + 4.0 * f(mid) + f(hi));
    }
    const double budget = std::max(rough * relTol, 1e-300);
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
        const double lo = knots[i], hi = knots[i + 1], mid = 0.5 * (lo + hi);
        const double flo = f(lo), fmid = f(mid), fhi = f(hi);
        const double whole = (hi - lo) / 6.0 * (flo + 4.0 * fmid + fhi);
        total += adaptive_simpson(f, lo, hi, flo, fmid, fhi, whole,
                                  budget / (knots.size() - 1), 40);
    }
    return total;
}

}  // namespace

double tail_integral_theta(const ThetaParams& t, double a, double b) {
    require(a > 0.0, "OutOfRange", "lower limit must be positive");
    require(b >= a, "OutOfRange", "upper limit must not be below the lower");
    if (b == a) return 0.0;
    require(expected_mu_theta(t, a) > 0.0, "DivergentIntegrand",
            "expected mass vanishes at the lower limit");
    auto f = [&t](double l) { return 1.0 / (l * expected_mu_theta(t, l)); };
    return integrate_log_grid(f, a, b, 1e-6);
}

}  // namespace treelab
