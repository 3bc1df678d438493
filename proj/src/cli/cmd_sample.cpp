#include <memory>

#include "cli_common.hpp"
#include "treelab/continuum.hpp"
#include "treelab/discrete_tree.hpp"
#include "treelab/errors.hpp"
#include "treelab/experiments.hpp"
#include "treelab/ptree.hpp"

namespace treelab {
namespace cmd {

namespace {

RandomStream replicate_stream(std::uint64_t seed, long long index) {
    return RandomStream::split(seed, static_cast<std::uint64_t>(index));
}

struct SampleArgs {
    std::string degreesText;
    std::string probsText;
    std::string thetaText;
    long long count = 1;
    long long steps = 0;
    double truncate = 5.0;
    double atomEps = 1e-8;
};

void check_count(long long count) {
    require(count >= 1, "OutOfRange", "count must be at least 1");
}

// Emits the run header and then one record per sample, in index order.
// Records are built into per-index slots so the bytes cannot depend on the
// worker count.
void emit_samples(const GlobalOpts& g, const json& config,
                  const std::vector<json>& records,
                  const std::vector<std::string>& csvRows,
                  const std::string& csvHeader) {
    Sink sink(g.outPath);
    if (g.format == "csv") {
        *sink.os << "# " << run_header(g.seed, config).dump() << '\n'
                 << csvHeader << '\n';
        for (const auto& row : csvRows) *sink.os << row << '\n';
        return;
    }
    emit(*sink.os, run_header(g.seed, config));
    for (const auto& r : records) emit(*sink.os, r);
}

std::vector<int> parent_list(const RootedTree& t) {
    std::vector<int> out;
    for (int v = 1; v <= t.max_label(); ++v) out.push_back(t.parent[v]);
    return out;
}

void run_dtree(const GlobalOpts& g, const SampleArgs& a) {
    check_count(a.count);
    require(!a.degreesText.empty(), "Missing", "--degrees is required");
    const std::vector<long long> raw = parse_int_list(a.degreesText);
    const DegreeSequence d = canonicalize_degree_sequence(raw).d;
    json config{{"command", "sample"},
                {"kind", "dtree"},
                {"degrees", raw},
                {"count", a.count},
                {"seed", g.seed}};

    std::vector<json> records(a.count);
    std::vector<std::string> rows(a.count);
    parallel_for(a.count, g.workers, [&](long long i) {
        RandomStream rng = replicate_stream(g.seed, i);
        BuildResult b = build_dtree(d, sample_dtuple(d.degrees, rng));
        json rec;
        rec["record"] = "sample";
        rec["kind"] = "dtree";
        rec["index"] = i;
        rec["tree"] = tree_to_json(b.tree);
        rec["trace"] = trace_to_json(b.trace);
        records[i] = std::move(rec);
        rows[i] = "dtree," + std::to_string(i) + "," +
                  std::to_string(b.tree.root) + "," +
                  join_ints(parent_list(b.tree));
    });
    emit_samples(g, config, records, rows, "kind,index,root,parents");
}

void run_ptree(const GlobalOpts& g, const SampleArgs& a) {
    check_count(a.count);
    require(!a.probsText.empty(), "Missing", "--p is required");
    const std::vector<double> probs = parse_double_list(a.probsText);
    const PParams p = validate_pparams(probs);
    require(a.steps >= 1, "OutOfRange", "--steps must be at least 1");
    json config{{"command", "sample"}, {"kind", "ptree"},  {"p", probs},
                {"steps", a.steps},    {"count", a.count}, {"seed", g.seed}};

    std::vector<json> records(a.count);
    std::vector<std::string> rows(a.count);
    parallel_for(a.count, g.workers, [&](long long i) {
        RandomStream rng = replicate_stream(g.seed, i);
        PTreeResult r = sample_ptree(p, a.steps, rng);
        json rec;
        rec["record"] = "sample";
        rec["kind"] = "ptree";
        rec["index"] = i;
        rec["tree"] = tree_to_json(r.tree);
        rec["trace"] = trace_to_json(r.trace);
        rec["glueCount"] = r.glueCount;
        rec["freshCount"] = r.freshCount;
        records[i] = std::move(rec);
        rows[i] = "ptree," + std::to_string(i) + "," +
                  std::to_string(r.tree.root) + "," +
                  join_ints(parent_list(r.tree)) + "," +
                  std::to_string(r.glueCount) + "," +
                  std::to_string(r.freshCount);
    });
    emit_samples(g, config, records, rows,
                 "kind,index,root,parents,glueCount,freshCount");
}

std::string segments_row(const std::string& kind, long long i,
                         const SegmentTree& t) {
    return kind + "," + std::to_string(i) + "," +
           std::to_string(t.segment_count()) + "," + join_doubles(t.starts) +
           "," + join_doubles(t.ends) + "," + join_doubles(t.attachPos);
}

void run_icrt(const GlobalOpts& g, const SampleArgs& a) {
    check_count(a.count);
    require(!a.thetaText.empty(), "Missing", "--theta is required");
    const std::vector<double> thetaRaw = parse_double_list(a.thetaText);
    const ThetaParams t = validate_theta(thetaRaw);
    json config{{"command", "sample"},     {"kind", "icrt"},
                {"theta", thetaRaw},       {"truncate", a.truncate},
                {"atomEps", a.atomEps},    {"count", a.count},
                {"seed", g.seed}};

    std::vector<json> records(a.count);
    std::vector<std::string> rows(a.count);
    parallel_for(a.count, g.workers, [&](long long i) {
        RandomStream rng = replicate_stream(g.seed, i);
        IcrtResult r = sample_icrt(t, a.truncate, rng, a.atomEps);
        json rec;
        rec["record"] = "sample";
        rec["kind"] = "icrt";
        rec["index"] = i;
        rec["trace"] = trace_to_json(r.trace);
        rec["tree"] = segment_tree_to_json(r.tree);
        rec["cutCount"] = r.cutCount;
        rec["droppedMass"] = r.droppedMass;
        rec["tailMass"] = r.tailMass;
        records[i] = std::move(rec);
        rows[i] = segments_row("icrt", i, r.tree);
    });
    emit_samples(g, config, records, rows,
                 "kind,index,segments,starts,ends,attachPos");
}

void run_cdtree(const GlobalOpts& g, const SampleArgs& a) {
    check_count(a.count);
    require(!a.degreesText.empty(), "Missing", "--degrees is required");
    const std::vector<long long> raw = parse_int_list(a.degreesText);
    const DegreeSequence d = canonicalize_degree_sequence(raw).d;
    json config{{"command", "sample"},
                {"kind", "cdtree"},
                {"degrees", raw},
                {"count", a.count},
                {"seed", g.seed}};

    std::vector<json> records(a.count);
    std::vector<std::string> rows(a.count);
    parallel_for(a.count, g.workers, [&](long long i) {
        RandomStream rng = replicate_stream(g.seed, i);
        ContinuumDTreeResult r = sample_continuum_dtree(d, rng);
        json rec;
        rec["record"] = "sample";
        rec["kind"] = "cdtree";
        rec["index"] = i;
        rec["trace"] = trace_to_json(r.trace);
        rec["tree"] = segment_tree_to_json(r.tree);
        records[i] = std::move(rec);
        rows[i] = segments_row("cdtree", i, r.tree);
    });
    emit_samples(g, config, records, rows,
                 "kind,index,segments,starts,ends,attachPos");
}

}  // namespace

void register_sample(CLI::App& app, GlobalOpts& g, int& rc) {
    auto* sample =
        app.add_subcommand("sample", "draw trees, traces and continuum trees");
    sample->require_subcommand(1);
    sample->fallthrough();
    auto args = std::make_shared<SampleArgs>();

    auto* dtree = sample->add_subcommand(
        "dtree", "uniform tree with a fixed child-count sequence");
    dtree->fallthrough();
    dtree->add_option("--degrees", args->degreesText,
                      "child counts, JSON array or comma list");
    dtree->add_option("--count", args->count, "number of samples");
    dtree->callback([&g, &rc, args] {
        run_dtree(g, *args);
        rc = 0;
    });

    auto* ptree = sample->add_subcommand(
        "ptree", "i.i.d.-attachment tree from vertex probabilities");
    ptree->fallthrough();
    ptree->add_option("--p", args->probsText,
                      "attachment probabilities, JSON array or comma list");
    ptree->add_option("--steps", args->steps, "walk length");
    ptree->add_option("--count", args->count, "number of samples");
    ptree->callback([&g, &rc, args] {
        run_ptree(g, *args);
        rc = 0;
    });

    auto* icrt = sample->add_subcommand(
        "icrt", "continuum tree driven by atom weights theta");
    icrt->fallthrough();
    icrt->add_option("--theta", args->thetaText,
                     "atom weights, JSON array or comma list");
    icrt->add_option("--truncate", args->truncate,
                     "horizon: keep cuts up to this position");
    icrt->add_option("--atom-eps", args->atomEps,
                     "drop atoms lighter than this");
    icrt->add_option("--count", args->count, "number of samples");
    icrt->callback([&g, &rc, args] {
        run_icrt(g, *args);
        rc = 0;
    });

    auto* cdtree = sample->add_subcommand(
        "cdtree", "continuum counterpart of the child-count walk");
    cdtree->fallthrough();
    cdtree->add_option("--degrees", args->degreesText,
                       "child counts, JSON array or comma list");
    cdtree->add_option("--count", args->count, "number of samples");
    cdtree->callback([&g, &rc, args] {
        run_cdtree(g, *args);
        rc = 0;
    });
}

}  // namespace cmd
}  // namespace treelab
