#pragma once

#include <cstdint>
#include <limits>
#include <vector>

namespace treelab {

// Sentinel for "this vertex never appears in the walk" (printed as null in
// JSON).  Using the maximum keeps first-hit comparisons natural.
constexpr std::int64_t kNever = std::numeric_limits<std::int64_t>::max();

// Trace of a discrete construction walk.  Positions are step indices along
// the walk (1-based for the plain walk; the re-rooted walk starts at 0).
//
//   X[i-1]      first position where vertex i+offset appears (kNever if none)
//   Y[j]        position of the j-th repeated entry (a glue event)
//   Z[j]        position of the first, earlier occurrence of that entry
//   glueAtom[j] label of the repeated vertex, so Z[j] == X[glueAtom[j]-1]
//   muAtoms     the mass measure: one atom per vertex with >= 2 children,
//               at its first-hit position, with mass (children - 1);
//               sorted by position.
struct DiscreteMeasureAtom {
    std::int64_t pos;
    long long mass;
    int label;
};

struct DiscreteTrace {
    std::vector<std::int64_t> X;
    std::vector<std::int64_t> Y;
    std::vector<std::int64_t> Z;
    std::vector<int> glueAtom;
    std::vector<DiscreteMeasureAtom> muAtoms;

    // Mass on [0, b].
    long long mu_prefix(std::int64_t b) const {
        long long total = 0;
        for (const auto& a : muAtoms)
            if (a.pos <= b) total += a.mass;
        return total;
    }
};

// Continuous counterpart: positions on the half line, real masses, plus an
// optional Lebesgue component lebesgueCoeff * dx.
struct MeasureAtom {
    double pos;
    double mass;
    int label;
};

struct AtomicMeasure {
    std::vector<MeasureAtom> atoms;  // sorted by position, masses > 0
    double lebesgueCoeff = 0.0;

    double prefix(double b) const {
        double total = lebesgueCoeff * b;
        for (const auto& a : atoms)
            if (a.pos <= b) total += a.mass;
        return total;
    }
    double atom_total() const {
        double total = 0.0;
        for (const auto& a : atoms) total += a.mass;
        return total;
    }
};

// Trace with real positions: either a rescaled discrete trace or the output
// of a continuum construction.  X may hold +infinity for absent vertices.
// glueAtom[j] is the label of the atom Z[j] landed on, or -1 when Z[j] was
// drawn from the Lebesgue part of the measure.
struct StickTrace {
    std::vector<double> X;
    std::vector<double> Y;
    std::vector<double> Z;
    std::vector<int> glueAtom;
    AtomicMeasure mu;
};

// Exact embedding of a discrete trace (integer positions as doubles).
StickTrace to_stick(const DiscreteTrace& t);

// Rescaling (l1, l2): positions multiply by l1, masses by l2, so the new
// measure of [0, b] equals l2 * (old measure of [0, b/l1]).
// Errors: NonPositiveScale.
StickTrace rescale_trace(const DiscreteTrace& t, double l1, double l2);
StickTrace rescale_trace(const StickTrace& t, double l1, double l2);

}  // namespace treelab
