#pragma once

#include <cstdint>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "treelab/experiments.hpp"
#include "treelab/serialize.hpp"

namespace treelab {
namespace cmd {

// Options shared by every leaf command.  Seed and workers are resolved
// before parsing from the TREELAB_SEED / TREELAB_WORKERS environment
// variables, and a flag overrides the environment (flag > env > default).
// The worker count is deliberately not echoed in any output: results are
// identical for every worker count, and keeping it out of the records keeps
// re-runs byte-comparable.
struct GlobalOpts {
    std::uint64_t seed = 1;
    int workers = 1;
    std::string outPath;         // empty: stdout
    std::string format = "json"; // json | csv
};

// Output sink: the file at outPath, or stdout when the path is empty.
struct Sink {
    std::ofstream file;
    std::ostream* os = nullptr;

    explicit Sink(const std::string& outPath);
};

// First record of every run: provenance plus the full resolved config.
json run_header(std::uint64_t seed, const json& config);

void emit(std::ostream& os, const json& record);

// "[1,2,3]" (JSON) or "1,2,3" (comma list).  Errors: ParseList.
std::vector<long long> parse_int_list(const std::string& text);
std::vector<double> parse_double_list(const std::string& text);

// Joins values with ';' (fixed shortest round-trip formatting) for the flat
// CSV record shapes.
std::string join_ints(const std::vector<int>& xs);
std::string join_doubles(const std::vector<double>& xs);

// Emits the run header plus the report (JSON) or the stat table (CSV) and
// maps the report's pass flag to the exit code (0 pass, 1 fail).
void write_report(const GlobalOpts& g, const ExperimentReport& rep, int& rc);

void register_sample(CLI::App& app, GlobalOpts& g, int& rc);
void register_check(CLI::App& app, GlobalOpts& g, int& rc);
void register_experiment(CLI::App& app, GlobalOpts& g, int& rc);

}  // namespace cmd
}  // namespace treelab
