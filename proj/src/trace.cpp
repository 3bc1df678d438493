#include "treelab/trace.hpp"

#include <cmath>

#include "treelab/errors.hpp"

namespace treelab {

namespace {

double pos_or_inf(std::int64_t p) {
    return p == kNever ? std::numeric_limits<double>::infinity()
                       : static_cast<double>(p);
}

}  // namespace

StickTrace to_stick(const DiscreteTrace& t) {
    StickTrace out;
    out.X.reserve(t.X.size());
    for (std::int64_t p : t.X) out.X.push_back(pos_or_inf(p));
    out.Y.assign(t.Y.begin(), t.Y.end());
    out.Z.assign(t.Z.begin(), t.Z.end());
    out.glueAtom = t.glueAtom;
    out.mu.atoms.reserve(t.muAtoms.size());
    for (const auto& a : t.muAtoms)
        out.mu.atoms.push_back({static_cast<double>(a.pos),
                                static_cast<double>(a.mass), a.label});
    return out;
}

StickTrace rescale_trace(const StickTrace& t, double l1, double l2) {
    require(l1 > 0.0 && l2 > 0.0, "NonPositiveScale",
            "rescaling factors must be positive");
    StickTrace out;
    out.X.reserve(t.X.size());
    for (double p : t.X) out.X.push_back(p * l1);
    out.Y.reserve(t.Y.size());
    for (double p : t.Y) out.Y.push_back(p * l1);
    out.Z.reserve(t.Z.size());
    for (double p : t.Z) out.Z.push_back(p * l1);
    out.glueAtom = t.glueAtom;
    out.mu.atoms.reserve(t.mu.atoms.size());
    for (const auto& a : t.mu.atoms)
        out.mu.atoms.push_back({a.pos * l1, a.mass * l2, a.label});
    // New measure of [0,b] must equal l2 * old measure of [0,b/l1]; for the
    // Lebesgue part l2 * c * (b/l1) = (l2*c/l1) * b.
    out.mu.lebesgueCoeff = t.mu.lebesgueCoeff * l2 / l1;
    return out;
}

StickTrace rescale_trace(const DiscreteTrace& t, double l1, double l2) {
    return rescale_trace(to_stick(t), l1, l2);
}

}  // namespace treelab
