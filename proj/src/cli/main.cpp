#include <cerrno>
#include <cstdlib>
#include <cstring>

#include "cli_common.hpp"
#include "treelab/errors.hpp"

namespace treelab {
namespace cmd {

Sink::Sink(const std::string& outPath) {
    if (outPath.empty()) {
        os = &std::cout;
        return;
    }
    file.open(outPath, std::ios::binary | std::ios::trunc);
    require(file.is_open(), "CannotOpen", "cannot open '" + outPath + "'");
    os = &file;
}

json run_header(std::uint64_t seed, const json& config) {
    json h;
    h["record"] = "run";
    const json prov = provenance_block(seed, config);
    for (const auto& [key, value] : prov.items()) h[key] = value;
    h["config"] = config;
    return h;
}

void emit(std::ostream& os, const json& record) {
    os << record.dump() << '\n';
}

namespace {

bool parse_json_or_csv_numbers(const std::string& text, std::vector<double>& out) {
    std::string trimmed = text;
    while (!trimmed.empty() && trimmed.front() == ' ') trimmed.erase(0, 1);
    try {
        if (!trimmed.empty() && trimmed.front() == '[') {
            json arr = json::parse(trimmed);
            if (!arr.is_array()) return false;
            for (const auto& v : arr) {
                if (!v.is_number()) return false;
                out.push_back(v.get<double>());
            }
            return true;
        }
        std::size_t pos = 0;
        while (pos <= trimmed.size()) {
            std::size_t comma = trimmed.find(',', pos);
            const std::string piece =
                trimmed.substr(pos, comma == std::string::npos
                                        ? std::string::npos
                                        : comma - pos);
            std::size_t used = 0;
            out.push_back(std::stod(piece, &used));
            while (used < piece.size() && piece[used] == ' ') ++used;
            if (used != piece.size()) return false;
            if (comma == std::string::npos) break;
            pos = comma + 1;
        }
        return true;
    } catch (const std::exception&) {
        return false;
    }
}

}  // namespace

std::vector<double> parse_double_list(const std::string& text) {
    std::vector<double> out;
    require(parse_json_or_csv_numbers(text, out), "ParseList",
            "cannot parse '" + text + "' as a number list");
    return out;
}

std::vector<long long> parse_int_list(const std::string& text) {
    std::vector<long long> out;
    for (double v : parse_double_list(text)) {
        const auto i = static_cast<long long>(v);
        require(static_cast<double>(i) == v, "ParseList",
                "'" + text + "' holds a non-integer entry");
        out.push_back(i);
    }
    return out;
}

std::string join_ints(const std::vector<int>& xs) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) out += ';';
        out += std::to_string(xs[i]);
    }
    return out;
}

std::string join_doubles(const std::vector<double>& xs) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) out += ';';
        out += json(xs[i]).dump();
    }
    return out;
}

void write_report(const GlobalOpts& g, const ExperimentReport& rep, int& rc) {
    Sink sink(g.outPath);
    if (g.format == "csv") {
        *sink.os << "# " << run_header(rep.seed, rep.config).dump() << '\n'
                 << report_to_csv(rep);
    } else {
        emit(*sink.os, run_header(rep.seed, rep.config));
        emit(*sink.os, report_to_json(rep));
    }
    rc = rep.pass ? 0 : 1;
}

}  // namespace cmd
}  // namespace treelab

namespace {

std::uint64_t env_u64(const char* name, const char* text) {
    errno = 0;
    char* end = nullptr;
    const unsigned long long v = std::strtoull(text, &end, 10);
    treelab::require(errno == 0 && end != text && *end == '\0' &&
                         std::strchr(text, '-') == nullptr,
                     "InvalidEnv",
                     std::string(name) + " is not an unsigned integer: '" +
                         text + "'");
    return static_cast<std::uint64_t>(v);
}

}  // namespace

int main(int argc, char** argv) {
    using treelab::cmd::GlobalOpts;
    using treelab::json;

    GlobalOpts g;
    int rc = 0;

    CLI::App app{"simulation and statistical-verification laboratory for "
                 "random trees with a fixed child-count sequence and their "
                 "continuum limits"};
    app.name("treelab");
    app.require_subcommand(1);
    app.fallthrough();
    app.set_version_flag("--version", std::string(treelab::kToolVersion));
    app.add_option("--seed", g.seed,
                   "master seed (env TREELAB_SEED; flag wins)");
    app.add_option("--workers", g.workers,
                   "worker threads (env TREELAB_WORKERS; flag wins)")
        ->check(CLI::Range(1, 1024));
    app.add_option("--out", g.outPath, "write records to this file");
    app.add_option("--format", g.format, "output format")
        ->check(CLI::IsMember({"json", "csv"}));

    try {
        if (const char* e = std::getenv("TREELAB_SEED"))
            g.seed = env_u64("TREELAB_SEED", e);
        if (const char* e = std::getenv("TREELAB_WORKERS")) {
            const std::uint64_t w = env_u64("TREELAB_WORKERS", e);
            treelab::require(w >= 1 && w <= 1024, "InvalidEnv",
                             "TREELAB_WORKERS out of range 1..1024");
            g.workers = static_cast<int>(w);
        }

        treelab::cmd::register_sample(app, g, rc);
        treelab::cmd::register_check(app, g, rc);
        treelab::cmd::register_experiment(app, g, rc);

        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        json record;
        record["record"] = "error";
        record["code"] = "Usage";
        record["message"] = e.what();
        std::cout << record.dump() << '\n';
        return 2;
    } catch (const treelab::Error& e) {
        json record;
        record["record"] = "error";
        record["code"] = e.code();
        record["message"] = e.what();
        std::cout << record.dump() << '\n';
        return 2;
    } catch (const std::exception& e) {
        json record;
        record["record"] = "error";
        record["code"] = "Internal";
        record["message"] = e.what();
        std::cout << record.dump() << '\n';
        return 2;
    }
    return rc;
}
