#pragma once

#include "treelab/degree_sequence.hpp"
#include "treelab/rng.hpp"
#include "treelab/segment_tree.hpp"
#include "treelab/trace.hpp"

namespace treelab {

// Draw a point from the measure restricted to [0, y], normalised.  Returns
// the position and the label of the atom it landed on (-1 for the Lebesgue
// part).  Errors: ZeroMass (the restriction has no mass), OutOfRange.
struct PrefixDraw {
    double pos;
    int atomLabel;
};
PrefixDraw draw_from_prefix(const AtomicMeasure& mu, double y, RandomStream& rng);

// Continuum random tree driven by atom weights theta.
//
// Atom positions X_i ~ Exp(rate theta_i); the mass measure is
// theta0^2 dx + sum_i theta_i at X_i.  Cut points arrive as a Poisson
// process whose cumulative intensity is Lambda(y) = integral of the mass on
// [0, u] du = theta0^2 y^2/2 + sum_i theta_i (y - X_i)^+, inverted piece by
// piece (each piece is a quadratic); each cut Y glues back at an independent
// draw Z from the mass on [0, Y].  The walk stops at the first cut past the
// horizon L; the returned tree covers [0, L].
//
// Atoms with theta_i < atomEps are skipped entirely; their weight is
// reported in droppedMass.  Atoms whose position lands past L are drawn but
// carry no mass inside the window; their weight is reported in tailMass.
struct IcrtResult {
    StickTrace trace;   // X per atom (may exceed L or be +inf if dropped)
    SegmentTree tree;
    double droppedMass = 0.0;  // sum of theta_i below atomEps
    double tailMass = 0.0;     // sum of theta_i with X_i > L
    long long cutCount = 0;
};

// Errors: LNonPositive (L <= 0), OutOfRange (atomEps < 0).
IcrtResult sample_icrt(const ThetaParams& t, double L, RandomStream& rng,
                       double atomEps = 1e-8);

// Continuum counterpart of the degree-sequence walk.
//
// Atom positions X_i ~ Exp(rate d_i/sigma) (for d_i >= 1), mass measure
// sum_i (d_i-1)/sigma at X_i.  Every vertex with d_i >= 2 owns d_i - 1 glue
// slots; the slot-thinned Poisson process on {y >= z} keeps, per slot, one
// point at Y = X_i + Exp(mean sigma), so the trace has exactly
// bigN = sum (d_i - 1)^+ cut/glue pairs, sorted by Y.  The tree spans
// [0, max(X_i, Y_j)].
struct ContinuumDTreeResult {
    StickTrace trace;
    SegmentTree tree;
};

// Errors: SigmaZero.
ContinuumDTreeResult sample_continuum_dtree(const DegreeSequence& d,
                                            RandomStream& rng);

// Random time change matching the discrete walk to its continuum
// counterpart: gaps E_k ~ Exp(mean sigma/(s-k)) for k = 1..s-1, and
// f(i) = E_1 + ... + E_i (f(0) = 0).  Applying (f, 1/sigma) to a discrete
// trace reproduces the continuum law.
std::vector<double> sample_time_change(const DegreeSequence& d,
                                       RandomStream& rng);

// Push a trace through a position map f given at integer positions
// (position p goes to f[p]) and scale the masses by massScale.  Finite
// positions must be integers within range.  Errors: NonIntegerPositions,
// OutOfRange (position outside 0..f.size()-1), NonPositiveScale.
StickTrace apply_time_change(const StickTrace& t, const std::vector<double>& f,
                             double massScale);
StickTrace apply_time_change(const DiscreteTrace& t,
                             const std::vector<double>& f, double massScale);

}  // namespace treelab
