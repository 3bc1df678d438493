#include "treelab/empirical.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include "treelab/errors.hpp"

namespace treelab {

double EmpiricalDistribution::cdf(double x) const {
    return static_cast<double>(std::upper_bound(samples.begin(), samples.end(),
                                                x) -
                               samples.begin()) /
           static_cast<double>(samples.size());
}

double EmpiricalDistribution::cdf_left(double x) const {
    return static_cast<double>(std::lower_bound(samples.begin(), samples.end(),
                                                x) -
                               samples.begin()) /
           static_cast<double>(samples.size());
}

EmpiricalDistribution make_empirical(std::vector<double> xs) {
    require(!xs.empty(), "Empty", "an empirical distribution needs samples");
    std::sort(xs.begin(), xs.end());
    EmpiricalDistribution e;
    e.samples = std::move(xs);
    return e;
}

double ks_distance(const EmpiricalDistribution& f,
                   const EmpiricalDistribution& g) {
    const auto& a = f.samples;
    const auto& b = g.samples;
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double best = 0.0;
    while (i < a.size() || j < b.size()) {
        const double va =
            i < a.size() ? a[i] : std::numeric_limits<double>::infinity();
        const double vb =
            j < b.size() ? b[j] : std::numeric_limits<double>::infinity();
        const double v = std::min(va, vb);
        while (i < a.size() && a[i] <= v) ++i;
        while (j < b.size() && b[j] <= v) ++j;
        best = std::max(best, std::abs(i / na - j / nb));
    }
    return best;
}

double ks_distance_to_cdf(const EmpiricalDistribution& f,
                          const std::function<double(double)>& cdf) {
    const double n = static_cast<double>(f.samples.size());
    double best = 0.0;
    for (std::size_t k = 0; k < f.samples.size(); ++k) {
        const double F = cdf(f.samples[k]);
        best = std::max(best, std::abs((k + 1) / n - F));
        best = std::max(best, std::abs(k / n - F));
    }
    return best;
}

namespace {

// One side of the Levy feasibility test: G(x) <= F(x + eps) + eps for all x.
// All position comparisons are done in difference space (a - b vs eps), so
// that an eps taken from the set of pairwise differences behaves exactly.
bool levy_one_sided(const EmpiricalDistribution& f,
                    const EmpiricalDistribution& g, double eps) {
    const double n = static_cast<double>(f.samples.size());
    const double m = static_cast<double>(g.samples.size());
    constexpr double kLevelTol = 1e-12;
    // At each jump of G: G(b) <= F(b + eps) + eps.
    for (std::size_t j = 0; j < g.samples.size(); ++j) {
        if (j + 1 < g.samples.size() && g.samples[j + 1] == g.samples[j])
            continue;  // only the last of a tie block carries the full level
        const double b = g.samples[j];
        const auto it = std::partition_point(
            f.samples.begin(), f.samples.end(),
            [&](double a) { return a - b <= eps; });
        const double F = static_cast<double>(it - f.samples.begin()) / n;
        if ((j + 1) / m > F + eps + kLevelTol) return false;
    }
    // Just below each jump of F shifted by -eps: G((a-eps)-) <= F(a-) + eps.
    for (std::size_t i = 0; i < f.samples.size(); ++i) {
        if (i > 0 && f.samples[i - 1] == f.samples[i]) continue;
        const double a = f.samples[i];
        const auto it = std::partition_point(
            g.samples.begin(), g.samples.end(),
            [&](double b) { return a - b > eps; });
        const double G = static_cast<double>(it - g.samples.begin()) / m;
        if (G > i / n + eps + kLevelTol) return false;
    }
    return true;
}

}  // namespace

double levy_distance(const EmpiricalDistribution& f,
                     const EmpiricalDistribution& g) {
    // The optimum is attained where feasibility flips: either at a difference
    // of jump positions or at a difference of CDF levels.  Collect both
    // candidate families and binary-search the smallest feasible one.
    std::vector<double> cand{0.0};
    for (double a : f.samples)
        for (double b : g.samples) cand.push_back(std::abs(a - b));
    const auto n = f.samples.size();
    const auto m = g.samples.size();
    for (std::size_t i = 0; i <= n; ++i)
        for (std::size_t j = 0; j <= m; ++j)
            cand.push_back(std::abs(static_cast<double>(i) / n -
                                    static_cast<double>(j) / m));
    std::sort(cand.begin(), cand.end());
    cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
    auto feasible = [&](double eps) {
        return levy_one_sided(f, g, eps) && levy_one_sided(g, f, eps);
    };
    std::size_t lo = 0, hi = cand.size() - 1;  // the largest is feasible
    while (lo < hi) {
        const std::size_t mid = lo + (hi - lo) / 2;
        if (feasible(cand[mid]))
            hi = mid;
        else
            lo = mid + 1;
    }
    return cand[lo];
}

double WeightedPointSet::total_mass() const {
    double t = 0.0;
    for (const auto& [pos, mass] : atoms) t += mass;
    return t;
}

namespace {

// Dinic max-flow specialised to the bipartite transport graph.
class TransportFlow {
public:
    TransportFlow(int nLeft, int nRight)
        : nL_(nLeft), nR_(nRight), source_(nLeft + nRight),
          sink_(nLeft + nRight + 1), head_(nLeft + nRight + 2, -1) {}

    void add(int from, int to, double cap) {
        edges_.push_back({to, head_[from], cap});
        head_[from] = static_cast<int>(edges_.size()) - 1;
        edges_.push_back({from, head_[to], 0.0});
        head_[to] = static_cast<int>(edges_.size()) - 1;
    }
    int left(int i) const { return i; }
    int right(int j) const { return nL_ + j; }
    int source() const { return source_; }
    int sink() const { return sink_; }

    double max_flow() {
        double total = 0.0;
        while (bfs()) {
            iter_ = head_;
            double f;
            while ((f = dfs(source_, std::numeric_limits<double>::infinity())) >
                   kEps)
                total += f;
        }
        return total;
    }

private:
    static constexpr double kEps = 1e-13;
    struct Edge {
        int to, next;
        double cap;
    };
    bool bfs() {
        level_.assign(head_.size(), -1);
        std::queue<int> q;
        q.push(source_);
        level_[source_] = 0;
        while (!q.empty()) {
            const int v = q.front();
            q.pop();
            for (int e = head_[v]; e >= 0; e = edges_[e].next) {
                if (edges_[e].cap > kEps && level_[edges_[e].to] < 0) {
                    level_[edges_[e].to] = level_[v] + 1;
                    q.push(edges_[e].to);
                }
            }
        }
        return level_[sink_] >= 0;
    }
    double dfs(int v, double limit) {
        if (v == sink_) return limit;
        for (int& e = iter_[v]; e >= 0; e = edges_[e].next) {
            Edge& ed = edges_[e];
            if (ed.cap > kEps && level_[ed.to] == level_[v] + 1) {
                const double got = dfs(ed.to, std::min(limit, ed.cap));
                if (got > kEps) {
                    ed.cap -= got;
                    edges_[e ^ 1].cap += got;
                    return got;
                }
            }
        }
        return 0.0;
    }

    int nL_, nR_, source_, sink_;
    std::vector<int> head_;
    std::vector<Edge> edges_;
    std::vector<int> level_;
    std::vector<int> iter_;
};

// Largest mass transportable between the two atom sets when arcs are allowed
// only between atoms at distance <= eps.
double transportable_mass(const WeightedPointSet& mu, const WeightedPointSet& nu,
                          double eps) {
    TransportFlow net(static_cast<int>(mu.atoms.size()),
                      static_cast<int>(nu.atoms.size()));
    for (std::size_t i = 0; i < mu.atoms.size(); ++i)
        net.add(net.source(), net.left(static_cast<int>(i)), mu.atoms[i].second);
    for (std::size_t j = 0; j < nu.atoms.size(); ++j)
        net.add(net.right(static_cast<int>(j)), net.sink(), nu.atoms[j].second);
    for (std::size_t i = 0; i < mu.atoms.size(); ++i)
        for (std::size_t j = 0; j < nu.atoms.size(); ++j)
            if (std::abs(mu.atoms[i].first - nu.atoms[j].first) <= eps)
                net.add(net.left(static_cast<int>(i)),
                        net.right(static_cast<int>(j)),
                        std::numeric_limits<double>::infinity());
    return net.max_flow();
}

void check_probability(const WeightedPointSet& w) {
    require(std::abs(w.total_mass() - 1.0) <= 1e-9, "NotProbability",
            "expected a probability measure (total mass 1)");
    for (const auto& [pos, mass] : w.atoms)
        require(mass >= 0.0, "NotProbability", "atom masses must be >= 0");
}

}  // namespace

ProkhorovResult prokhorov_blowup(const WeightedPointSet& mu,
                                 const WeightedPointSet& nu,
                                 bool requireProbability) {
    if (requireProbability) {
        check_probability(mu);
        check_probability(nu);
    }
    const double mMu = mu.total_mass();
    const double mNu = nu.total_mass();
    if (std::abs(mMu - mNu) > 1e-9) {
        // No eps can ever satisfy mu(all) <= nu(all^eps): saturated.
        return {std::numeric_limits<double>::infinity(), false};
    }
    if (mu.atoms.empty() || nu.atoms.empty()) return {0.0, true};
    // Feasibility can only change at a pairwise distance.
    std::vector<double> cand{0.0};
    for (const auto& [x, mx] : mu.atoms)
        for (const auto& [y, my] : nu.atoms) cand.push_back(std::abs(x - y));
    std::sort(cand.begin(), cand.end());
    cand.erase(std::unique(cand.begin(), cand.end()), cand.end());
    auto feasible = [&](double eps) {
        return transportable_mass(mu, nu, eps) >= mMu - 1e-9;
    };
    std::size_t lo = 0, hi = cand.size() - 1;  // max distance is feasible
    while (lo < hi) {
        const std::size_t mid = lo + (hi - lo) / 2;
        if (feasible(cand[mid]))
            hi = mid;
        else
            lo = mid + 1;
    }
    return {cand[lo], true};
}

double prokhorov_classical(const WeightedPointSet& mu,
                           const WeightedPointSet& nu) {
    check_probability(mu);
    check_probability(nu);
    if (mu.atoms.empty() || nu.atoms.empty()) return 0.0;
    // eps works iff some transport plan moves all but eps of the mass at
    // distance <= eps, so test transportable mass >= 1 - eps and bisect.
    auto feasible = [&](double eps) {
        return transportable_mass(mu, nu, eps) >= 1.0 - eps - 1e-12;
    };
    double lo = 0.0, hi = 0.0;
    for (const auto& [x, mx] : mu.atoms)
        for (const auto& [y, my] : nu.atoms)
            hi = std::max(hi, std::abs(x - y));
    if (feasible(0.0)) return 0.0;
    for (int it = 0; it < 80 && hi - lo > 1e-12 * std::max(1.0, hi); ++it) {
        const double mid = 0.5 * (lo + hi);
        if (feasible(mid))
            hi = mid;
        else
            lo = mid;
    }
    return hi;
}

}  // namespace treelab
