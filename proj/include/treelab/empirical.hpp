#pragma once

#include <functional>
#include <vector>

namespace treelab {

// Empirical distribution of a real sample; construction sorts.
// Errors: Empty.
struct EmpiricalDistribution {
    std::vector<double> samples;  // sorted ascending

    double cdf(double x) const;       // P(X <= x)
    double cdf_left(double x) const;  // P(X < x)
};
EmpiricalDistribution make_empirical(std::vector<double> xs);

// sup_x |F(x) - G(x)|, exact for the two step functions.
double ks_distance(const EmpiricalDistribution& f, const EmpiricalDistribution& g);

// sup over the sample points of |F_hat - F| against a continuous reference
// CDF (both one-sided gaps at each jump).
double ks_distance_to_cdf(const EmpiricalDistribution& f,
                          const std::function<double(double)>& cdf);

// Smallest eps with F(x-eps) - eps <= G(x) <= F(x+eps) + eps for all x,
// exact on step CDFs: the optimum is attained either at a difference of
// jump positions or at a difference of CDF levels, so all candidates are
// enumerated and the smallest feasible one returned.
double levy_distance(const EmpiricalDistribution& f, const EmpiricalDistribution& g);

// A finite measure on the line given by atoms (position, mass).
struct WeightedPointSet {
    std::vector<std::pair<double, double>> atoms;

    double total_mass() const;
};

// The symmetric-blowup reading of the Prokhorov distance used by the
// convergence statements: the smallest eps such that for every set A,
//   mu(A) <= nu(A^eps)   and   nu(A) <= mu(A^eps)
// with NO additive +eps term.  For probability measures this equals the
// smallest eps admitting a transport plan that moves no mass farther than
// eps, so it is computed exactly: feasibility (a max-flow on the bipartite
// graph of atom pairs within eps) is monotone in eps and can only change at
// a pairwise distance, hence a binary search over the sorted pairwise
// distances.  It is finite for any two probability measures (eps = max
// pairwise distance always works); `comparable` is false only for inputs
// with mismatched total mass, where no eps works and `value` is +inf.
// Errors: NotProbability (total mass differs from 1 by more than 1e-9)
// unless requireProbability is false.
struct ProkhorovResult {
    double value;
    bool comparable;
};
ProkhorovResult prokhorov_blowup(const WeightedPointSet& mu,
                                 const WeightedPointSet& nu,
                                 bool requireProbability = true);

// The classical Prokhorov distance, smallest eps with
// mu(A) <= nu(A^eps) + eps for all A (and symmetrically); computed by
// bisection on eps with the same transport-feasibility check extended by an
// eps leak.  Errors: NotProbability.
double prokhorov_classical(const WeightedPointSet& mu, const WeightedPointSet& nu);

}  // namespace treelab
