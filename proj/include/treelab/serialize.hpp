#pragma once

#include <string>

#include <json.hpp>

#include "treelab/continuum.hpp"
#include "treelab/discrete_tree.hpp"
#include "treelab/distance_matrix.hpp"
#include "treelab/segment_tree.hpp"
#include "treelab/trace.hpp"

namespace treelab {

using json = nlohmann::ordered_json;

// Trees serialise as {"root": r, "parent": {"child": parent, ...}} with
// string keys (JSON object keys are strings); absent labels are skipped.
json tree_to_json(const RootedTree& t);
RootedTree tree_from_json(const json& j);

// Traces serialise with arrays X, Y, Z, glueAtom and the measure; positions
// that are "never" / infinite become null.
json trace_to_json(const DiscreteTrace& t);
json trace_to_json(const StickTrace& t);
json measure_to_json(const AtomicMeasure& m);

json segment_tree_to_json(const SegmentTree& t);

// Row-major CSV with a single header line "n" holding the matrix size.
std::string matrix_to_csv(const DistanceMatrix& m);
DistanceMatrix matrix_from_csv(const std::string& text);

// One value per line, with a header naming the quantity.
std::string column_csv(const std::string& header, const std::vector<double>& xs);

// 64-bit FNV-1a of the canonical (sorted-key, fixed-format) dump of a JSON
// value, hex-encoded; used to stamp reports with the configuration they ran
// under.
std::string config_hash(const json& config);

// Provenance block attached to every CLI artifact.
json provenance_block(std::uint64_t seed, const json& resolvedConfig);

extern const char* kToolName;
extern const char* kToolVersion;

}  // namespace treelab
