#pragma once

#include "treelab/degree_sequence.hpp"

namespace treelab {

// Closed forms for the expected mass the three trace constructions place on
// an initial interval, and utilities built on them (threshold, inverse,
// tail integrals).  Positions are measured along the half line the traces
// live on; the discrete walk occupies integer positions 1..s-1 and its
// rescaled version positions that are multiples of sigma/s.

// Exponential-clock trace: atoms sit at X~Exp(d_i/sigma) with mass
// (d_i-1)/sigma, so E[mass on [0,x]] = sum_i ((d_i-1)/sigma)(1 - e^{-d_i x / sigma})
// (terms with d_i <= 1 vanish).  Errors: SigmaZero, OutOfRange (x < 0).
double expected_mu_tilde(const DegreeSequence& d, double x);

// Discrete walk, unscaled positions: the chance vertex i is unseen after the
// first l steps is prod_{j=1..l} (1 - d_i/(s-j)) (clamped at zero once a
// factor turns negative), so
//   E[mass on [0,l]] = sum_i (d_i - 1)^+ (1 - prod_{j=1..min(l,s-1)} (1 - d_i/(s-j))).
// l counts whole steps; non-integer l is floored.
double expected_mu_discrete(const DegreeSequence& d, long long l);

// Same quantity after the (sigma/s, 1/sigma) rescaling: positions multiply by
// sigma/s and masses divide by sigma, so with k = floor(s*l/sigma),
//   E[rescaled mass on [0,l]] = expected_mu_discrete(d, k) / sigma.
// The strict variant requires k <= s-1 (the walk has only s-1 steps) and
// raises OutOfRange beyond; the clamped variant saturates at k = s-1.
// Errors: SigmaZero, OutOfRange (l < 0 or k > s-1).
double expected_mu_bar(const DegreeSequence& d, double l);
double expected_mu_bar_clamped(const DegreeSequence& d, double l);

// Smallest integer l >= 1 with expected_mu_discrete(d, l) >= bigN / 2.
// Always <= s-1 when bigN >= 1.  Found by doubling then bisection.
// Errors: NZero (bigN == 0: the sequence has no repeated vertex).
long long threshold_t(const DegreeSequence& d);

// Smallest x >= 0 with expected_mu_tilde(d, x) = m, by bisection to relative
// width 1e-10; the result satisfies |E[..](x) - m| <= 1e-9 * max(1, m).
// Errors: SigmaZero, OutOfRange (m < 0 or m >= bigN/sigma, the total mass).
double inverse_expected_measure(const DegreeSequence& d, double m);

// Integral of 1 / (l * expected_mu_bar_clamped(d, l)) over [a, b].  The
// integrand is constant-over-l times 1/l between consecutive multiples of
// sigma/s, so the integral is evaluated exactly as a sum of logarithms;
// accuracy is limited only by rounding, well inside the 1e-6 relative target.
// Errors: SigmaZero, OutOfRange (a <= 0 or b < a), DivergentIntegrand (the
// expected mass vanishes on a piece of positive length inside [a, b]).
double tail_integral(const DegreeSequence& d, double a, double b);

// --- p-parameter analogues ---------------------------------------------
// E[mass on [0,l]] = sum_i p_i (1 - (1-p_i)^{floor(l)}).
double expected_mu_p(const PParams& p, double l);
// After the (sigmaP, 1/sigmaP) rescaling.
double expected_mu_bar_p(const PParams& p, double l);
// Smallest integer l >= 1 with expected_mu_p(p, l) >= 1/2; doubling+bisection.
long long threshold_t_p(const PParams& p);
// Integral of 1 / (l * expected_mu_bar_p(p, l)) over [a, b], exact piecewise.
// Errors: OutOfRange, DivergentIntegrand.
double tail_integral_p(const PParams& p, double a, double b);

// --- theta analogues ----------------------------------------------------
// E[mass on [0,x]] = theta0^2 x + sum_i theta_i (1 - e^{-x theta_i}).
double expected_mu_theta(const ThetaParams& t, double x);
// Integral of 1 / (l * expected_mu_theta(t, l)) over [a, b] by adaptive
// Simpson on a logarithmic grid, relative target 1e-6.
// Errors: OutOfRange, DivergentIntegrand (all weights zero).
double tail_integral_theta(const ThetaParams& t, double a, double b);

}  // namespace treelab
