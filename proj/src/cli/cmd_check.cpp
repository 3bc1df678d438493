#include <algorithm>
#include <functional>
#include <memory>

#include "cli_common.hpp"
#include "treelab/continuum.hpp"
#include "treelab/discrete_tree.hpp"
#include "treelab/errors.hpp"
#include "treelab/experiments.hpp"
#include "treelab/expected_measure.hpp"
#include "treelab/stats_tests.hpp"

namespace treelab {
namespace cmd {

namespace {

RandomStream role_stream(std::uint64_t seed, std::uint64_t role,
                         long long rep) {
    return RandomStream::split(
        seed, (role << 32) + static_cast<std::uint64_t>(rep));
}

// All child-count sequences of length s (nonincreasing, summing to s-1).
void all_sequences(int s, std::vector<std::vector<int>>& out) {
    std::vector<int> cur;
    // Nonincreasing entries bounded by the previous one; remaining slots
    // must be able to absorb the remaining sum.
    std::function<void(int, int, int)> rec = [&](int left, int maxVal,
                                                 int slots) {
        if (slots == 0) {
            if (left == 0) out.push_back(cur);
            return;
        }
        const int top = std::min(left, maxVal);
        for (int v = top; v >= 0; --v) {
            if (static_cast<long long>(v) * slots < left) break;
            cur.push_back(v);
            rec(left - v, v, slots - 1);
            cur.pop_back();
        }
    };
    rec(s - 1, s - 1, s);
}

ExperimentReport run_bijection(const GlobalOpts& g, int maxS) {
    require(maxS >= 1 && maxS <= 9, "OutOfRange",
            "--max-s must lie in 1..9");
    ExperimentReport rep;
    rep.name = "check_bijection";
    rep.seed = g.seed;
    rep.config = {{"command", "check"},
                  {"check", "bijection"},
                  {"maxS", maxS},
                  {"seed", g.seed}};
    long long total = 0;
    for (int s = 1; s <= maxS; ++s) {
        std::vector<std::vector<int>> seqs;
        all_sequences(s, seqs);
        long long failures = 0;
        for (const auto& seq : seqs) {
            std::vector<long long> raw(seq.begin(), seq.end());
            const DegreeSequence d = validate_degree_sequence(raw);
            const EnumerationResult e = enumerate_dtrees(d);
            const long long formula = count_dtuples(d);
            if (e.distinctTreeCount != e.tupleCount ||
                e.tupleCount != formula)
                ++failures;
        }
        total += static_cast<long long>(seqs.size());
        rep.stats.push_back(make_info_line(
            "s" + std::to_string(s) + "/sequences",
            static_cast<double>(seqs.size())));
        rep.stats.push_back(
            make_stat_line("s" + std::to_string(s) + "/failures",
                           static_cast<double>(failures), 0.0, 0.0, "<="));
    }
    rep.stats.push_back(
        make_info_line("total_sequences", static_cast<double>(total)));
    finalize_report(rep);
    return rep;
}

ExperimentReport run_uniform(const GlobalOpts& g, const std::string& degreesText,
                             long long n, double alpha) {
    require(!degreesText.empty(), "Missing", "--degrees is required");
    require(n >= 1, "OutOfRange", "--n must be at least 1");
    require(alpha > 0.0 && alpha < 1.0, "OutOfRange",
            "--alpha must lie in (0,1)");
    const std::vector<long long> raw = parse_int_list(degreesText);
    const DegreeSequence d = canonicalize_degree_sequence(raw).d;

    ExperimentReport rep;
    rep.name = "check_uniform";
    rep.seed = g.seed;
    rep.config = {{"command", "check"}, {"check", "uniform"},
                  {"degrees", raw},     {"n", n},
                  {"alpha", alpha},     {"seed", g.seed}};

    const EnumerationResult e = enumerate_dtrees(d);
    rep.stats.push_back(make_stat_line(
        "distinct_trees", static_cast<double>(e.distinctTreeCount),
        0.0, static_cast<double>(e.tupleCount), ">="));

    std::vector<int> drawn(n);
    parallel_for(n, g.workers, [&](long long i) {
        RandomStream rng = role_stream(g.seed, 0, i);
        BuildResult b = build_dtree(d, sample_dtuple(d.degrees, rng));
        const std::string key = tree_key(b.tree);
        const auto it =
            std::lower_bound(e.treeKeys.begin(), e.treeKeys.end(), key);
        require(it != e.treeKeys.end() && *it == key, "Internal",
                "sampled a tree outside the enumerated set");
        drawn[i] = static_cast<int>(it - e.treeKeys.begin());
    });
    std::vector<long long> observed(e.treeKeys.size(), 0);
    for (long long i = 0; i < n; ++i) ++observed[drawn[i]];
    const std::vector<double> expected(
        e.treeKeys.size(),
        static_cast<double>(n) / static_cast<double>(e.treeKeys.size()));
    const ChiSquareResult chi = chi_square_gof(observed, expected);
    rep.stats.push_back(make_info_line("chi2_stat", chi.stat));
    rep.stats.push_back(make_info_line("df", chi.df));
    rep.stats.push_back(
        make_stat_line("chi2_p", chi.pvalue, 0.0, alpha, ">"));
    finalize_report(rep);
    return rep;
}

ExperimentReport run_coupling(const GlobalOpts& g,
                              const std::string& degreesText,
                              long long replicates, double alpha,
                              double cutoff) {
    require(!degreesText.empty(), "Missing", "--degrees is required");
    require(replicates >= 100, "OutOfRange", "need at least 100 replicates");
    require(alpha > 0.0 && alpha < 1.0, "OutOfRange",
            "--alpha must lie in (0,1)");
    require(cutoff > 0.0, "OutOfRange", "--cutoff must be positive");
    const std::vector<long long> raw = parse_int_list(degreesText);
    const DegreeSequence d = canonicalize_degree_sequence(raw).d;
    const EnsembleStats st = ensemble_stats(d);
    require(st.sigma > 0, "SigmaZero", "the coupling needs sigma > 0");
    require(st.bigN >= 1, "OutOfRange", "the walk needs a repetition");

    ExperimentReport rep;
    rep.name = "check_coupling";
    rep.seed = g.seed;
    rep.config = {{"command", "check"},       {"check", "coupling"},
                  {"degrees", raw},           {"replicates", replicates},
                  {"alpha", alpha},           {"cutoff", cutoff},
                  {"seed", g.seed}};

    const long long R = replicates;
    std::vector<double> fx(R), fy(R), fz(R), fm(R);
    parallel_for(R, g.workers, [&](long long r) {
        RandomStream rng = role_stream(g.seed, 0, r);
        BuildResult b = build_dtree(d, sample_dtuple(d.degrees, rng));
        const std::vector<double> f = sample_time_change(d, rng);
        const StickTrace tc = apply_time_change(b.trace, f, 1.0 / st.sigma);
        fx[r] = tc.X[0];
        fy[r] = tc.Y[0];
        fz[r] = tc.Z[0];
        fm[r] = tc.mu.prefix(cutoff);
    });
    std::vector<double> cx(R), cy(R), cz(R), cm(R);
    parallel_for(R, g.workers, [&](long long r) {
        RandomStream rng = role_stream(g.seed, 1, r);
        ContinuumDTreeResult c = sample_continuum_dtree(d, rng);
        cx[r] = c.trace.X[0];
        cy[r] = c.trace.Y[0];
        cz[r] = c.trace.Z[0];
        cm[r] = c.trace.mu.prefix(cutoff);
    });

    const char* names[4] = {"time_changed_x1", "time_changed_y1",
                            "time_changed_z1", "mass_at_cutoff"};
    std::vector<double>* pairs[4][2] = {
        {&fx, &cx}, {&fy, &cy}, {&fz, &cz}, {&fm, &cm}};
    for (int i = 0; i < 4; ++i) {
        const double dist = ks_two_sample_stat(*pairs[i][0], *pairs[i][1]);
        const double p = ks_asymptotic_pvalue(
            dist, static_cast<std::size_t>(R), static_cast<std::size_t>(R));
        rep.stats.push_back(
            make_stat_line(std::string("ks_p/") + names[i], p, 0.0, alpha,
                           ">"));
        rep.stats.push_back(
            make_info_line(std::string("ks_d/") + names[i], dist));
    }
    finalize_report(rep);
    return rep;
}

struct CheckArgs {
    int maxS = 7;
    std::string degreesText;
    long long n = 100000;
    long long replicates = 10000;
    double alpha = 1e-3;
    double cutoff = 1.0;
    std::string lGridText;
};

}  // namespace

void register_check(CLI::App& app, GlobalOpts& g, int& rc) {
    auto* check = app.add_subcommand(
        "check", "exact and statistical verification commands");
    check->require_subcommand(1);
    check->fallthrough();
    auto args = std::make_shared<CheckArgs>();

    auto* bijection = check->add_subcommand(
        "bijection",
        "walks map one-to-one onto trees and the count formula holds");
    bijection->fallthrough();
    bijection->add_option("--max-s", args->maxS,
                          "check every sequence up to this length");
    bijection->callback([&g, &rc, args] {
        write_report(g, run_bijection(g, args->maxS), rc);
    });

    auto* uniform = check->add_subcommand(
        "uniform", "sampled trees are uniform over the enumerated set");
    uniform->fallthrough();
    uniform->add_option("--degrees", args->degreesText,
                        "child counts, JSON array or comma list");
    uniform->add_option("--n", args->n, "number of samples");
    uniform->add_option("--alpha", args->alpha, "p-value floor");
    uniform->callback([&g, &rc, args] {
        write_report(g,
                     run_uniform(g, args->degreesText, args->n, args->alpha),
                     rc);
    });

    auto* coupling = check->add_subcommand(
        "coupling",
        "time-changed walk trace matches the continuum counterpart in law");
    coupling->fallthrough();
    coupling->add_option("--degrees", args->degreesText,
                         "child counts, JSON array or comma list");
    coupling->add_option("--replicates", args->replicates,
                         "samples per side");
    coupling->add_option("--alpha", args->alpha, "p-value floor");
    coupling->add_option("--cutoff", args->cutoff,
                         "mass functional: measure of [0, cutoff]");
    coupling->callback([&g, &rc, args] {
        write_report(g,
                     run_coupling(g, args->degreesText, args->replicates,
                                  args->alpha, args->cutoff),
                     rc);
    });

    auto* concentration = check->add_subcommand(
        "concentration",
        "left tail of the exponential-clock mass obeys the exponential bound");
    concentration->fallthrough();
    concentration->add_option("--degrees", args->degreesText,
                              "child counts, JSON array or comma list");
    concentration->add_option("--replicates", args->replicates,
                              "Monte Carlo replicates");
    concentration->add_option("--l-grid", args->lGridText,
                              "grid of interval ends, JSON array or comma list");
    concentration->callback([&g, &rc, args] {
        ConcentrationConfig cfg;
        if (!args->degreesText.empty())
            cfg.degrees = parse_int_list(args->degreesText);
        if (!args->lGridText.empty())
            cfg.lGrid = parse_double_list(args->lGridText);
        cfg.replicates = args->replicates;
        cfg.seed = g.seed;
        cfg.workers = g.workers;
        write_report(g, exp_concentration(cfg), rc);
    });
}

}  // namespace cmd
}  // namespace treelab
