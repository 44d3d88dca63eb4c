#ifndef STARBDI_SPECFUN_HPP
#define STARBDI_SPECFUN_HPP

#include <vector>

#include "starbdi/polynomial.hpp"
#include "starbdi/series.hpp"

namespace starbdi::specfun {

// Rising factorial (d)_n = d(d+1)...(d+n-1), with (d)_0 = 1.
double pochhammer(double d, unsigned n);

// Gauss hypergeometric function 2F1(a,b;c;z).
//
// When a or b is a nonpositive integer -m the series terminates and the
// exact finite sum of m+1 terms is returned; otherwise the power series
// is summed for |z| < 1 under the truncation policy in `ctl`.
// Throws DomainError for nonterminating |z| >= 1 or when c hits a
// nonpositive integer before termination; NonConvergence when max_terms
// is reached first.
double hyp2f1(double a, double b, double c, double z,
              const SeriesControl& ctl = {});

// Polylogarithm Li_k(z) = sum_{j>=1} z^j / j^k for integer k >= 1 and
// |z| < 1.  k = 1 uses the closed form -log(1-z); the raw series is
// exposed in detail:: as a test oracle.
double polylog(int k, double z, const SeriesControl& ctl = {});

// Eulerian polynomial A_n(t) with exact integer coefficients,
// A_0 = 1, A_1 = 1, A_2 = 1 + t, A_3 = 1 + 4t + t^2, ...; A_n(1) = n!.
Polynomial eulerian_polynomial(unsigned n);

// Generalized exponential integral E(nu, z) = int_1^inf e^{-z t} t^{-nu} dt,
// z > 0.  Computed after the substitution u = 1/t, which maps the
// integral onto (0,1] where adaptive Gauss-Kronrod refinement applies.
double gen_exp_integral(double nu, double z);

namespace detail {

// Direct series for Li_k; oracle for the closed k = 1 form.
double polylog_series(int k, double z, const SeriesControl& ctl);

// A_n(x)/n! for n = 0..n_max, computed against a factorially scaled
// Eulerian triangle.  All quantities are positive, so the recurrence is
// forward-stable; used where the exact-rational route becomes
// infeasible (large n).
std::vector<long double> eulerian_scaled_values(unsigned n_max, long double x);

// Exact A_n(p/q)/n! converted to long double, for moderate n.
long double eulerian_value_scaled_exact(unsigned n, const BigRat& x);

// Ratio of two big integers as long double, usable far beyond the
// double exponent range of either operand.
long double big_ratio(const BigInt& num, const BigInt& den);

}  // namespace detail

}  // namespace starbdi::specfun

#endif
