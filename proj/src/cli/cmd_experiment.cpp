#include <memory>

#include "cli_common.hpp"
#include "treelab/errors.hpp"
#include "treelab/experiments.hpp"

namespace treelab {
namespace cmd {

namespace {

// Text holders for list-valued flags; parsed in the callbacks so that a
// malformed list surfaces as a usage error (exit 2) with a ParseList code.
struct SbArgs {
    SbConfig cfg;
    std::string degrees, sizes, theta, massGrid;
};
struct GpArgs {
    GpConfig cfg;
    std::string degrees, sizes, theta, couplingL;
};
struct HeightArgs {
    HeightConfig cfg;
    std::string degrees, sizes, theta, xGrid;
};
struct ConcArgs {
    ConcentrationConfig cfg;
    std::string degrees, lGrid;
};
struct RerootArgs {
    RerootConfig cfg;
    std::string degrees, roots;
};
struct AssumpArgs {
    AssumptionsConfig cfg;
    std::string sizes, theta;
};
struct SelfArgs {
    SelfTestConfig cfg;
    std::string degrees;
};

}  // namespace

void register_experiment(CLI::App& app, GlobalOpts& g, int& rc) {
    auto* exp = app.add_subcommand("experiment",
                                   "statistical convergence experiments");
    exp->require_subcommand(1);
    exp->fallthrough();

    {
        auto a = std::make_shared<SbArgs>();
        auto* sb = exp->add_subcommand(
            "sb", "rescaled construction walk vs continuum counterpart");
        sb->fallthrough();
        sb->add_option("--family", a->cfg.family,
                       "degree family: binary, hub or unary");
        sb->add_option("--degrees", a->degrees,
                       "explicit child counts (overrides --family)");
        sb->add_option("--sizes", a->sizes, "size grid, comma list");
        sb->add_option("--theta", a->theta, "continuum atom weights");
        sb->add_option("--replicates", a->cfg.replicates,
                       "samples per side and size");
        sb->add_option("--alpha", a->cfg.alpha, "p-value floor");
        sb->add_option("--regime-tol", a->cfg.regimeTol,
                       "max |d_i/sigma - theta_i| and d_1/s");
        sb->add_option("--mass-grid", a->massGrid,
                       "cutoffs for the measure-mass statistic");
        sb->add_flag("--self-test", a->cfg.selfTest,
                     "compare two discrete batches instead of the continuum");
        sb->callback([&g, &rc, a] {
            SbConfig cfg = a->cfg;
            if (!a->degrees.empty()) cfg.degrees = parse_int_list(a->degrees);
            if (!a->sizes.empty()) cfg.sizes = parse_int_list(a->sizes);
            if (!a->theta.empty()) cfg.theta = parse_double_list(a->theta);
            if (!a->massGrid.empty())
                cfg.massGrid = parse_double_list(a->massGrid);
            cfg.seed = g.seed;
            cfg.workers = g.workers;
            write_report(g, exp_sb_convergence(cfg), rc);
        });
    }

    {
        auto a = std::make_shared<GpArgs>();
        auto* gp = exp->add_subcommand(
            "gp", "leaf distance matrices vs continuum cut-point matrices, "
                  "plus the spanning relabelling coupling");
        gp->fallthrough();
        gp->add_option("--family", a->cfg.family,
                       "degree family: binary, hub or unary");
        gp->add_option("--degrees", a->degrees,
                       "explicit child counts (overrides --family)");
        gp->add_option("--sizes", a->sizes, "size grid, comma list");
        gp->add_option("--theta", a->theta, "continuum atom weights");
        gp->add_option("--k", a->cfg.k, "matrix points");
        gp->add_option("--replicates", a->cfg.replicates,
                       "samples per side and size");
        gp->add_option("--permutations", a->cfg.permutations,
                       "relabellings for the energy test p-value");
        gp->add_option("--alpha", a->cfg.alpha, "p-value floor");
        gp->add_option("--regime-tol", a->cfg.regimeTol,
                       "max |d_i/sigma - theta_i| and d_1/s");
        gp->add_flag("--random-vertices,!--no-random-vertices",
                     a->cfg.randomVertices,
                     "also test matrices of uniform random vertices");
        gp->add_option("--coupling-k", a->cfg.couplingK,
                       "repetition index for the relabelling coupling");
        gp->add_option("--coupling-l", a->couplingL,
                       "rescaled walk-length grid for the coupling bound");
        gp->add_flag("--self-test", a->cfg.selfTest,
                     "compare two discrete batches instead of the continuum");
        gp->callback([&g, &rc, a] {
            GpConfig cfg = a->cfg;
            if (!a->degrees.empty()) cfg.degrees = parse_int_list(a->degrees);
            if (!a->sizes.empty()) cfg.sizes = parse_int_list(a->sizes);
            if (!a->theta.empty()) cfg.theta = parse_double_list(a->theta);
            if (!a->couplingL.empty())
                cfg.couplingL = parse_double_list(a->couplingL);
            cfg.seed = g.seed;
            cfg.workers = g.workers;
            write_report(g, exp_gp_convergence(cfg), rc);
        });
    }

    {
        auto a = std::make_shared<HeightArgs>();
        auto* height = exp->add_subcommand(
            "height", "rescaled height tails, explicit lower bound, "
                      "cross-size stability");
        height->fallthrough();
        height->add_option("--family", a->cfg.family,
                           "degree family: binary, hub or unary");
        height->add_option("--degrees", a->degrees,
                           "explicit child counts (overrides --family)");
        height->add_option("--sizes", a->sizes, "size grid, comma list");
        height->add_option("--replicates", a->cfg.replicates,
                           "samples per size");
        height->add_option("--x-grid", a->xGrid,
                           "rescaled heights for the lower-bound lines");
        height->add_option("--stability-tol", a->cfg.stabilityTol,
                           "allowed relative drift of the mean across sizes");
        height->add_option("--theta", a->theta,
                           "atom weights: also run the continuum checks");
        height->add_option("--icrt-horizon", a->cfg.icrtHorizon,
                           "truncation horizon for the continuum checks");
        height->callback([&g, &rc, a] {
            HeightConfig cfg = a->cfg;
            if (!a->degrees.empty()) cfg.degrees = parse_int_list(a->degrees);
            if (!a->sizes.empty()) cfg.sizes = parse_int_list(a->sizes);
            if (!a->theta.empty()) cfg.theta = parse_double_list(a->theta);
            if (!a->xGrid.empty()) cfg.xGrid = parse_double_list(a->xGrid);
            cfg.seed = g.seed;
            cfg.workers = g.workers;
            write_report(g, exp_height(cfg), rc);
        });
    }

    {
        auto a = std::make_shared<ConcArgs>();
        auto* conc = exp->add_subcommand(
            "concentration",
            "left tail of the exponential-clock mass vs the exponential bound");
        conc->fallthrough();
        conc->add_option("--degrees", a->degrees,
                         "child counts, JSON array or comma list");
        conc->add_option("--l-grid", a->lGrid,
                         "grid of interval ends, comma list");
        conc->add_option("--replicates", a->cfg.replicates,
                         "Monte Carlo replicates");
        conc->callback([&g, &rc, a] {
            ConcentrationConfig cfg = a->cfg;
            if (!a->degrees.empty()) cfg.degrees = parse_int_list(a->degrees);
            if (!a->lGrid.empty()) cfg.lGrid = parse_double_list(a->lGrid);
            cfg.seed = g.seed;
            cfg.workers = g.workers;
            write_report(g, exp_concentration(cfg), rc);
        });
    }

    {
        auto a = std::make_shared<RerootArgs>();
        auto* reroot = exp->add_subcommand(
            "reroot", "root independence of glued-vertex distance matrices");
        reroot->fallthrough();
        reroot->add_option("--degrees", a->degrees,
                           "child counts, JSON array or comma list");
        reroot->add_option("--roots", a->roots,
                           "two roots to compare, e.g. 1,6 (canonical labels)");
        reroot->add_option("--points", a->cfg.points, "matrix points");
        reroot->add_option("--replicates", a->cfg.replicates,
                           "samples per root");
        reroot->add_option("--permutations", a->cfg.permutations,
                           "relabellings for the energy test p-value");
        reroot->add_option("--alpha", a->cfg.alpha, "p-value floor");
        reroot->callback([&g, &rc, a] {
            RerootConfig cfg = a->cfg;
            if (!a->degrees.empty()) cfg.degrees = parse_int_list(a->degrees);
            if (!a->roots.empty()) {
                const std::vector<long long> r = parse_int_list(a->roots);
                require(r.size() == 2, "ParseList",
                        "--roots needs exactly two labels");
                cfg.rootA = static_cast<int>(r[0]);
                cfg.rootB = static_cast<int>(r[1]);
            }
            cfg.seed = g.seed;
            cfg.workers = g.workers;
            write_report(g, exp_reroot(cfg), rc);
        });
    }

    {
        auto a = std::make_shared<AssumpArgs>();
        auto* assum = exp->add_subcommand(
            "assumptions",
            "numeric evaluation of the tightness conditions on a size grid");
        assum->fallthrough();
        assum->add_option("--family", a->cfg.family,
                          "degree family: binary, hub or unary");
        assum->add_option("--sizes", a->sizes, "size grid, comma list");
        assum->add_option("--y", a->cfg.y,
                          "lower end of the tail integrals");
        assum->add_option("--p-family", a->cfg.pFamily,
                          "probability family analogue (uniform)");
        assum->add_option("--theta", a->theta,
                          "atom weights: also evaluate the continuum tail");
        assum->callback([&g, &rc, a] {
            AssumptionsConfig cfg = a->cfg;
            if (!a->sizes.empty()) cfg.sizes = parse_int_list(a->sizes);
            if (!a->theta.empty()) cfg.theta = parse_double_list(a->theta);
            cfg.seed = g.seed;
            write_report(g, eval_assumptions(cfg), rc);
        });
    }

    {
        auto a = std::make_shared<SelfArgs>();
        auto* self = exp->add_subcommand(
            "selftest", "calibration: same-model KS rejection rate at alpha");
        self->fallthrough();
        self->add_option("--degrees", a->degrees,
                         "child counts, JSON array or comma list");
        self->add_option("--runs", a->cfg.runs, "independent comparisons");
        self->add_option("--replicates", a->cfg.replicates,
                         "samples per batch");
        self->add_option("--alpha", a->cfg.alpha, "rejection level");
        self->add_option("--max-reject-fraction", a->cfg.maxRejectFraction,
                         "allowed rejected fraction");
        self->callback([&g, &rc, a] {
            SelfTestConfig cfg = a->cfg;
            if (!a->degrees.empty()) cfg.degrees = parse_int_list(a->degrees);
            cfg.seed = g.seed;
            cfg.workers = g.workers;
            write_report(g, exp_selftest(cfg), rc);
        });
    }
}

}  // namespace cmd
}  // namespace treelab
