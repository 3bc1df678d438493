#include "treelab/serialize.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "treelab/errors.hpp"

namespace treelab {

const char* kToolName = "treelab";
const char* kToolVersion = "1.0.0";

json tree_to_json(const RootedTree& t) {
    json parent = json::object();
    for (int v = 1; v <= t.max_label(); ++v) {
        if (!t.present(v) || v == t.root) continue;
        parent[std::to_string(v)] = t.parent[v];
    }
    return json{{"root", t.root}, {"parent", std::move(parent)}};
}

RootedTree tree_from_json(const json& j) {
    RootedTree t;
    t.root = j.at("root").get<int>();
    int maxLabel = t.root;
    for (const auto& [child, parent] : j.at("parent").items()) {
        maxLabel = std::max(maxLabel, std::stoi(child));
        maxLabel = std::max(maxLabel, parent.get<int>());
    }
    t.parent.assign(maxLabel + 1, -1);
    t.childCount.assign(maxLabel + 1, 0);
    t.parent[t.root] = 0;
    for (const auto& [child, parent] : j.at("parent").items()) {
        const int c = std::stoi(child);
        const int p = parent.get<int>();
        require(c >= 1 && p >= 1 && c != t.root, "OutOfRange",
                "malformed tree record");
        t.parent[c] = p;
        ++t.childCount[p];
    }
    return t;
}

namespace {

json position_or_null(double p) {
    if (std::isinf(p)) return nullptr;
    return p;
}

json position_or_null(std::int64_t p) {
    if (p == kNever) return nullptr;
    return p;
}

template <typename T>
json positions_array(const std::vector<T>& xs) {
    json arr = json::array();
    for (T x : xs) arr.push_back(position_or_null(x));
    return arr;
}

}  // namespace

json measure_to_json(const AtomicMeasure& m) {
    json atoms = json::array();
    for (const auto& a : m.atoms)
        atoms.push_back(json{{"pos", a.pos}, {"mass", a.mass}, {"label", a.label}});
    return json{{"lebesgue", m.lebesgueCoeff}, {"atoms", std::move(atoms)}};
}

json trace_to_json(const DiscreteTrace& t) {
    json atoms = json::array();
    for (const auto& a : t.muAtoms)
        atoms.push_back(json{{"pos", a.pos}, {"mass", a.mass}, {"label", a.label}});
    return json{{"X", positions_array(t.X)},
                {"Y", positions_array(t.Y)},
                {"Z", positions_array(t.Z)},
                {"glueAtom", t.glueAtom},
                {"mu", json{{"lebesgue", 0.0}, {"atoms", std::move(atoms)}}}};
}

json trace_to_json(const StickTrace& t) {
    return json{{"X", positions_array(t.X)},
                {"Y", positions_array(t.Y)},
                {"Z", positions_array(t.Z)},
                {"glueAtom", t.glueAtom},
                {"mu", measure_to_json(t.mu)}};
}

json segment_tree_to_json(const SegmentTree& t) {
    return json{{"starts", t.starts},
                {"ends", t.ends},
                {"attachPos", t.attachPos},
                {"parentSeg", t.parentSeg}};
}

std::string matrix_to_csv(const DistanceMatrix& m) {
    std::ostringstream out;
    out << m.n << "\n";
    for (int i = 0; i < m.n; ++i) {
        for (int j = 0; j < m.n; ++j) {
            if (j) out << ',';
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.17g", m.at(i, j));
            out << buf;
        }
        out << "\n";
    }
    return out.str();
}

DistanceMatrix matrix_from_csv(const std::string& text) {
    std::istringstream in(text);
    int n = 0;
    in >> n;
    require(n >= 0, "OutOfRange", "bad matrix header");
    DistanceMatrix m = make_distance_matrix(n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            char sep;
            if (j) in >> sep;
            in >> m.at(i, j);
        }
    }
    require(static_cast<bool>(in), "OutOfRange", "truncated matrix payload");
    return m;
}

std::string column_csv(const std::string& header,
                       const std::vector<double>& xs) {
    std::ostringstream out;
    out << header << "\n";
    for (double x : xs) {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.17g", x);
        out << buf << "\n";
    }
    return out.str();
}

std::string config_hash(const json& config) {
    // Canonical form: sorted keys, no spacing -- nlohmann::json (non-ordered)
    // sorts object keys on its own.
    const std::string canon = nlohmann::json(config).dump();
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char ch : canon) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx",
                  static_cast<unsigned long long>(h));
    return buf;
}

json provenance_block(std::uint64_t seed, const json& resolvedConfig) {
    return json{{"tool", kToolName},
                {"version", kToolVersion},
                {"seed", seed},
                {"configHash", config_hash(resolvedConfig)}};
}

}  // namespace treelab
