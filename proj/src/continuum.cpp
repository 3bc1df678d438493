#include "treelab/continuum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "treelab/errors.hpp"

namespace treelab {

PrefixDraw draw_from_prefix(const AtomicMeasure& mu, double y,
                            RandomStream& rng) {
    require(y >= 0.0, "OutOfRange", "prefix end must be non-negative");
    const double lebMass = mu.lebesgueCoeff * y;
    double total = lebMass;
    for (const auto& a : mu.atoms)
        if (a.pos <= y) total += a.mass;
    require(total > 0.0, "ZeroMass", "the measure has no mass on [0, y]");
    const double u = rng.uniform01() * total;
    if (u < lebMass) return {u / mu.lebesgueCoeff, -1};
    double acc = lebMass;
    const MeasureAtom* last = nullptr;
    for (const auto& a : mu.atoms) {
        if (a.pos > y) continue;
        acc += a.mass;
        last = &a;
        if (u < acc) break;
    }
    // Rounding can push u a hair past the final accumulator; land on the
    // last atom in that case.
    return {last->pos, last->label};
}

IcrtResult sample_icrt(const ThetaParams& t, double L, RandomStream& rng,
                       double atomEps) {
    require(L > 0.0, "LNonPositive", "the horizon L must be positive");
    require(atomEps >= 0.0, "OutOfRange", "atomEps must be non-negative");

    IcrtResult out;
    const int K = t.count();
    out.trace.X.assign(K, std::numeric_limits<double>::infinity());
    for (int i = 0; i < K; ++i) {
        const double th = t.theta[i];
        if (th < atomEps || th == 0.0) {
            out.droppedMass += th;
            continue;
        }
        out.trace.X[i] = rng.exponential_rate(th);
        if (out.trace.X[i] > L) {
            out.tailMass += th;
        } else {
            out.trace.mu.atoms.push_back({out.trace.X[i], th, i + 1});
        }
    }
    out.trace.mu.lebesgueCoeff = t.theta0sq;
    std::sort(out.trace.mu.atoms.begin(), out.trace.mu.atoms.end(),
              [](const MeasureAtom& a, const MeasureAtom& b) {
                  return a.pos < b.pos;
              });

    // Cumulative cut intensity Lambda(y) = theta0^2 y^2/2 + sum masses times
    // (y - pos)^+ is piecewise quadratic between atom positions.  Walk the
    // pieces while inverting Lambda at unit-exponential arrival times.
    const auto& atoms = out.trace.mu.atoms;
    double target = 0.0;          // cumulative Exp(1) arrivals
    std::size_t piece = 0;        // atoms consumed
    double pieceStart = 0.0;
    double lambdaAtStart = 0.0;   // Lambda(pieceStart)
    double rate = 0.0;            // Lambda'(pieceStart+) = mass on [0, start]
    const double q = t.theta0sq;

    auto advance_piece = [&]() {
        const double nextPos =
            piece < atoms.size() ? atoms[piece].pos : L;
        const double w = nextPos - pieceStart;
        lambdaAtStart += rate * w + 0.5 * q * w * w;
        rate += q * w;
        if (piece < atoms.size()) rate += atoms[piece].mass;
        pieceStart = nextPos;
        ++piece;
    };

    while (true) {
        target += rng.exponential_mean(1.0);
        double y = -1.0;
        while (true) {
            const double pieceEnd = piece < atoms.size() ? atoms[piece].pos : L;
            const double delta = target - lambdaAtStart;
            double step = std::numeric_limits<double>::infinity();
            if (q > 0.0) {
                step = 2.0 * delta /
                       (rate + std::sqrt(rate * rate + 2.0 * q * delta));
            } else if (rate > 0.0) {
                step = delta / rate;
            }
            if (pieceStart + step <= pieceEnd) {
                y = pieceStart + step;
                break;
            }
            if (piece >= atoms.size()) break;  // Lambda(L) < target: done
            advance_piece();
        }
        if (y < 0.0 || y > L) break;  // first cut past the horizon: stop
        out.trace.Y.push_back(y);
        const PrefixDraw z = draw_from_prefix(out.trace.mu, y, rng);
        out.trace.Z.push_back(z.pos);
        out.trace.glueAtom.push_back(z.atomLabel);
        ++out.cutCount;
    }
    out.tree = sb_construct(out.trace.Y, out.trace.Z, L);
    return out;
}

ContinuumDTreeResult sample_continuum_dtree(const DegreeSequence& d,
                                            RandomStream& rng) {
    const EnsembleStats st = ensemble_stats(d);
    require(st.sigma > 0.0, "SigmaZero",
            "the continuum counterpart needs sigma > 0");
    const double sigma = st.sigma;
    const int s = d.s();

    ContinuumDTreeResult out;
    out.trace.X.assign(s, std::numeric_limits<double>::infinity());
    for (int i = 0; i < s; ++i) {
        if (d.degrees[i] >= 1)
            out.trace.X[i] = rng.exponential_rate(d.degrees[i] / sigma);
    }
    for (int i = 0; i < s; ++i) {
        if (d.degrees[i] >= 2)
            out.trace.mu.atoms.push_back(
                {out.trace.X[i], (d.degrees[i] - 1) / sigma, i + 1});
    }
    std::sort(out.trace.mu.atoms.begin(), out.trace.mu.atoms.end(),
              [](const MeasureAtom& a, const MeasureAtom& b) {
                  return a.pos < b.pos;
              });

    // Each vertex with d_i >= 2 owns d_i - 1 glue slots, and the slot-thinned
    // Poisson process keeps, for each slot, its first arrival: an independent
    // point at X_i + Exp(mean sigma).
    struct Glue {
        double y, z;
        int label;
    };
    std::vector<Glue> glues;
    glues.reserve(st.bigN);
    for (int i = 0; i < s; ++i) {
        for (int c = 1; c < d.degrees[i]; ++c)
            glues.push_back({out.trace.X[i] + rng.exponential_mean(sigma),
                             out.trace.X[i], i + 1});
    }
    std::sort(glues.begin(), glues.end(),
              [](const Glue& a, const Glue& b) { return a.y < b.y; });

    double totalLen = 0.0;
    for (double x : out.trace.X)
        if (std::isfinite(x)) totalLen = std::max(totalLen, x);
    for (const auto& g : glues) {
        totalLen = std::max(totalLen, g.y);
        out.trace.Y.push_back(g.y);
        out.trace.Z.push_back(g.z);
        out.trace.glueAtom.push_back(g.label);
    }
    out.tree = sb_construct(out.trace.Y, out.trace.Z, totalLen);
    return out;
}

std::vector<double> sample_time_change(const DegreeSequence& d,
                                       RandomStream& rng) {
    const EnsembleStats st = ensemble_stats(d);
    require(st.sigma > 0.0, "SigmaZero", "the time change needs sigma > 0");
    const int s = d.s();
    std::vector<double> f(s, 0.0);
    for (int i = 1; i <= s - 1; ++i)
        f[i] = f[i - 1] + rng.exponential_mean(st.sigma / (s - i));
    return f;
}

namespace {

double map_position(double p, const std::vector<double>& f) {
    if (std::isinf(p)) return p;
    const double r = std::round(p);
    require(std::abs(p - r) <= 1e-9, "NonIntegerPositions",
            "position " + std::to_string(p) + " is not an integer");
    const auto k = static_cast<long long>(r);
    require(k >= 0 && k < static_cast<long long>(f.size()), "OutOfRange",
            "position " + std::to_string(k) + " has no image");
    return f[k];
}

}  // namespace

StickTrace apply_time_change(const StickTrace& t, const std::vector<double>& f,
                             double massScale) {
    require(massScale > 0.0, "NonPositiveScale",
            "mass scale must be positive");
    require(t.mu.lebesgueCoeff == 0.0, "MismatchedRegime",
            "a time change applies to purely atomic traces");
    StickTrace out;
    out.X.reserve(t.X.size());
    for (double p : t.X) out.X.push_back(map_position(p, f));
    out.Y.reserve(t.Y.size());
    for (double p : t.Y) out.Y.push_back(map_position(p, f));
    out.Z.reserve(t.Z.size());
    for (double p : t.Z) out.Z.push_back(map_position(p, f));
    out.glueAtom = t.glueAtom;
    out.mu.atoms.reserve(t.mu.atoms.size());
    for (const auto& a : t.mu.atoms)
        out.mu.atoms.push_back({map_position(a.pos, f), a.mass * massScale,
                                a.label});
    return out;
}

StickTrace apply_time_change(const DiscreteTrace& t,
                             const std::vector<double>& f, double massScale) {
    return apply_time_change(to_stick(t), f, massScale);
}

}  // namespace treelab
