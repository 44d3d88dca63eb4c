#ifndef STARBDI_TRANSIENT_HPP
#define STARBDI_TRANSIENT_HPP

#include <utility>
#include <vector>

#include "starbdi/combinatorics.hpp"
#include "starbdi/model.hpp"
#include "starbdi/series.hpp"

namespace starbdi::transient {

enum class Method { SeriesEqualRates, SeriesAlphaEqLambda, Theorem25, Volterra, MonteCarlo };

// Truncation diagnostics a series evaluation can report.
struct SeriesDiag {
  int order = 0;       // last index actually summed
  double tail = 0.0;   // magnitude of the first neglected/last term
};

// Evaluated transient law on a time grid.
struct TransientLaw {
  ModelParams params;
  Method method = Method::Volterra;
  std::vector<double> t_grid;
  std::vector<double> p0;
  std::vector<std::vector<double>> Pk;  // optional; Pk[k-1][i] for level k
  std::vector<SeriesDiag> diag;         // optional, per grid point

  double t_max() const { return t_grid.empty() ? 0.0 : t_grid.back(); }
  // Linear interpolation of p(0, t) on the grid.
  double p0_at(double t) const;
};

// Generating-function kernel h(t, z; lambda, mu) of the closed solution
// F(z,t) = H(t) + (d-1) int_0^t H'(t-y) p(0,y) dy, and its t-derivative.
// Both branches (lambda != mu, lambda = mu) are evaluated in
// exponentially-scaled form, stable for every regime and large t.
double kernel_h(const ModelParams& params, double z, double t);
double kernel_h_dt(const ModelParams& params, double z, double t);

// G(t) = 1 - h(t, 0) and its closed-form derivative.
std::pair<double, double> kernel_G(const ModelParams& params, double t);

// Second-kind Volterra solution of
//   p(0,t) = 1 - G(t) - (d-1) int_0^t G'(t-y) p(0,y) dy
// by the product trapezoidal rule with an implicit diagonal solve;
// global error O(dt^2).
TransientLaw solve_volterra_p0(const ModelParams& params, double t_max, int n_steps);

// Tabulated cycle-time distributions for the renewal representation of
// p(0,t): density f_Y, then F_Y^(j) for j = 1..j_max by iterated
// density-distribution convolution on a uniform grid.
struct CycleDistribution {
  ModelParams params;
  double dt = 0.0;
  std::vector<double> grid;              // 0, dt, ..., t_max
  std::vector<double> f1;                // density values on the grid
  std::vector<std::vector<double>> Fj;   // Fj[j-1][i]

  unsigned j_max() const { return static_cast<unsigned>(Fj.size()); }
  double F_at(unsigned j, double t) const;  // linear interpolation
};

double cycle_density_f1(const ModelParams& params, double t);
CycleDistribution build_cycle_distribution(const ModelParams& params, double t_max,
                                           int n_grid = 2048, int j_max = 64);

// Cycle-series representation of p(0,t) (the renewal alternating sum
// over F_Y^(j); lambda >= mu and lambda < mu branches).
double p0_theorem25(const ModelParams& params, const CycleDistribution& cycles,
                    double t, const SeriesControl& ctl = {}, SeriesDiag* diag = nullptr);

// Precomputed coefficients sum_k t_{n,k} d^k / n! of the equal-rates
// series, exact until the final conversion to double.
struct EqualRatesCoeffs {
  int d = 1;
  unsigned n_max = 0;
  std::vector<double> s_over_fact;  // [n]
};
EqualRatesCoeffs equal_rates_coeffs(const combinatorics::PermutationComponentTable& table, int d);

// p(0,t) = 1 + sum_{n>=1} ((-lambda t)^n/n!) sum_j t_{n,j} d^j,
// valid for the equal-rates regime and 0 < t < 1/lambda.
double series_p0_equal_rates(const ModelParams& params, double t,
                             const combinatorics::PermutationComponentTable& table,
                             const SeriesControl& ctl = {}, SeriesDiag* diag = nullptr);
double series_p0_equal_rates(const ModelParams& params, double t,
                             const EqualRatesCoeffs& coeffs,
                             const SeriesControl& ctl = {}, SeriesDiag* diag = nullptr);

// Convergence radius log(mu/lambda)/(mu-lambda) of the alpha = lambda
// series; positive for either ordering of lambda and mu.
double alpha_eq_lambda_radius(const ModelParams& params);

// p(0,t) for alpha = lambda, mu != lambda, t inside the radius.
double series_p0_alpha_eq_lambda(const ModelParams& params, double t,
                                 const combinatorics::ThetaCoefficients& theta,
                                 const SeriesControl& ctl = {}, SeriesDiag* diag = nullptr);

// P(k,t) in the equal-rates regime (k >= 1).
double Pk_equal_rates(const ModelParams& params, int k, double t,
                      const combinatorics::PermutationComponentTable& table,
                      const SeriesControl& ctl = {}, SeriesDiag* diag = nullptr);
double Pk_equal_rates(const ModelParams& params, int k, double t,
                      const EqualRatesCoeffs& coeffs,
                      const SeriesControl& ctl = {}, SeriesDiag* diag = nullptr);

// P(k,t) for alpha = lambda, mu != lambda (k >= 0; k = 0 returns
// p(0,t), the z^0 coefficient of F).
double Pk_alpha_eq_lambda(const ModelParams& params, int k, double t,
                          const combinatorics::ThetaCoefficients& theta,
                          const SeriesControl& ctl = {}, SeriesDiag* diag = nullptr);

// g_k(z) blocks of the alpha = lambda generating function (printed
// polylogarithm form for small k, exponential-integral form beyond --
// the two are algebraically identical, the latter is well conditioned
// for large k).
double g_k_eval(const ModelParams& params, int k, double z, double t,
                const SeriesControl& ctl = {});

// Generating function F(z,t): closed equal-rates route, closed
// alpha = lambda route, and the quadrature of the Prop-2.2 solution
// against a Volterra p(0,.) history (the regime-free fallback/oracle).
double eval_F_equal_rates(const ModelParams& params, double z, double t,
                          const combinatorics::PermutationComponentTable& table,
                          const SeriesControl& ctl = {});
double eval_F_alpha_eq_lambda(const ModelParams& params, double z, double t,
                              const combinatorics::ThetaCoefficients& theta,
                              const SeriesControl& ctl = {});
double eval_F_quadrature(const ModelParams& params, double z, double t,
                         const TransientLaw& volterra_p0, int n_quad = 4096);

// Dispatcher over the three routes above.
struct FContext {
  const combinatorics::PermutationComponentTable* table = nullptr;
  const combinatorics::ThetaCoefficients* theta = nullptr;
  const TransientLaw* volterra = nullptr;
};
double eval_F(const ModelParams& params, double z, double t, const FContext& ctx,
              const SeriesControl& ctl = {});

// Residual |Li_{k+1}(x) - x sum_{s>=1} (1/s) 2F1(1-s, k+1; 1; 1-x)|.
double polylog_identity_check(int k, double x, const SeriesControl& ctl = {});

namespace detail {

// J_k(a,t)/t^{k+1} with J_k(a,t) = int_0^t y^k e^{-a(t-y)} dy, a > 0.
// Positive-term series; bounded by 1/(k+1).
long double j_hat(int k, double a, double t);

// 2F1(-l, -k; 1; u) = sum_i C(l,i) C(k,i) u^i  (terminating, k+1 terms).
double terminating_2f1_nn(long l, int k, double u);

// 2F1(-l, k+1; 1; 1-x) evaluated through the Pfaff transformation
// x^l 2F1(-l, -k; 1; 1 - 1/x); stable for large l where the direct
// alternating sum cancels catastrophically.
double hyp2f1_neg_l(long l, int k, double x);

// Coefficient [z^k] of c(z)^j / (mu - lambda z) for the two alpha =
// lambda branches (c is the geometric ratio of the kernel expansion).
double coeff_A(const ModelParams& params, int k, int j);  // mu > lambda
double coeff_B(const ModelParams& params, int k, int j);  // mu < lambda

// Stable g_k via the exponential-integral series (value identical to
// the printed polylog form); g_hat is the t^{k+1}-scaled version.
long double g_hat(const ModelParams& params, int k, double z, double t);
double g_stable(const ModelParams& params, int k, double z, double t);

}  // namespace detail

}  // namespace starbdi::transient

#endif
