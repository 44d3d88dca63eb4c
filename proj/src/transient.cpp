#include "starbdi/transient.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "starbdi/specfun.hpp"

namespace starbdi::transient {

namespace {

void require_regime(const ModelParams& p, Regime r, const char* what) {
  if (p.regime() != r) throw DomainError(std::string(what) + ": parameter regime mismatch");
}

}  // namespace

double TransientLaw::p0_at(double t) const {
  if (t_grid.size() < 2) throw DomainError("TransientLaw: no grid");
  if (t <= t_grid.front()) return p0.front();
  if (t >= t_grid.back()) return p0.back();
  double dt = t_grid[1] - t_grid[0];
  auto i = static_cast<std::size_t>((t - t_grid.front()) / dt);
  if (i + 1 >= t_grid.size()) i = t_grid.size() - 2;
  double w = (t - t_grid[i]) / dt;
  return (1.0 - w) * p0[i] + w * p0[i + 1];
}

double kernel_h(const ModelParams& params, double z, double t) {
  params.validate();
  if (t < 0.0) throw DomainError("kernel_h: t >= 0 required");
  double w = 1.0 - z;
  double al = params.alpha / params.lambda;
  if (params.lambda == params.mu)
    return std::pow(1.0 + params.lambda * t * w, -al);
  double delta = params.lambda - params.mu;
  double r;
  if (delta > 0.0) {
    double E = std::exp(-delta * t);
    r = delta * E / (params.lambda * w - (params.mu - params.lambda * z) * E);
  } else {
    double E = std::exp(delta * t);
    r = -delta / ((params.mu - params.lambda * z) - params.lambda * w * E);
  }
  return std::pow(r, al);
}

double kernel_h_dt(const ModelParams& params, double z, double t) {
  params.validate();
  if (t < 0.0) throw DomainError("kernel_h_dt: t >= 0 required");
  double w = 1.0 - z;
  double al = params.alpha / params.lambda;
  if (params.lambda == params.mu) {
    double u = 1.0 + params.lambda * t * w;
    return -params.alpha * w * std::pow(u, -al - 1.0);
  }
  double delta = params.lambda - params.mu;
  double E, D, r;
  if (delta > 0.0) {
    // h' = -alpha w delta^2 E r^{al-1} / D^2 with D = lambda w - (mu - lambda z) E
    E = std::exp(-delta * t);
    D = params.lambda * w - (params.mu - params.lambda * z) * E;
    r = delta * E / D;
  } else {
    // exponentially rescaled form of the same expression
    E = std::exp(delta * t);
    D = (params.mu - params.lambda * z) - params.lambda * w * E;
    r = -delta / D;
  }
  return -params.alpha * w * delta * delta * E * std::pow(r, al - 1.0) / (D * D);
}

std::pair<double, double> kernel_G(const ModelParams& params, double t) {
  double h = kernel_h(params, 0.0, t);
  double hp = kernel_h_dt(params, 0.0, t);
  return {1.0 - h, -hp};
}

TransientLaw solve_volterra_p0(const ModelParams& params, double t_max, int n_steps) {
  params.validate();
  if (!(t_max > 0.0)) throw DomainError("solve_volterra_p0: t_max > 0 required");
  if (n_steps < 2) throw DomainError("solve_volterra_p0: n_steps >= 2 required");

  const int n = n_steps;
  const double dt = t_max / n;
  std::vector<double> Gp(n + 1), Gv(n + 1);
  for (int i = 0; i <= n; ++i) {
    auto [g, gp] = kernel_G(params, i * dt);
    if (!std::isfinite(g) || !std::isfinite(gp))
      throw SingularKernel("solve_volterra_p0: non-finite kernel at t = " + std::to_string(i * dt));
    Gv[i] = g;
    Gp[i] = gp;
  }

  TransientLaw law;
  law.params = params;
  law.method = Method::Volterra;
  law.t_grid.resize(n + 1);
  law.p0.resize(n + 1);
  for (int i = 0; i <= n; ++i) law.t_grid[i] = i * dt;
  law.p0[0] = 1.0;

  const double dm1 = static_cast<double>(params.d - 1);
  const double diag = 1.0 + dm1 * Gp[0] * dt / 2.0;
  for (int i = 1; i <= n; ++i) {
    double conv = 0.5 * Gp[i] * law.p0[0];
    for (int j = 1; j < i; ++j) conv += Gp[i - j] * law.p0[j];
    law.p0[i] = (1.0 - Gv[i] - dm1 * dt * conv) / diag;
  }
  return law;
}

double cycle_density_f1(const ModelParams& params, double t) {
  auto [G, Gp] = kernel_G(params, t);
  (void)G;
  if (params.lambda < params.mu) {
    double w = 1.0 - std::pow(1.0 - params.lambda / params.mu, params.alpha / params.lambda);
    return Gp / w;
  }
  return Gp;
}

double CycleDistribution::F_at(unsigned j, double t) const {
  if (j < 1 || j > j_max()) throw DomainError("CycleDistribution: j out of range");
  if (t < 0.0 || t > grid.back() + 1e-12 * grid.back())
    throw DomainError("CycleDistribution: t outside grid extent");
  const auto& F = Fj[j - 1];
  if (t >= grid.back()) return F.back();
  auto i = static_cast<std::size_t>(t / dt);
  if (i + 1 >= grid.size()) i = grid.size() - 2;
  double w = (t - grid[i]) / dt;
  return (1.0 - w) * F[i] + w * F[i + 1];
}

CycleDistribution build_cycle_distribution(const ModelParams& params, double t_max,
                                           int n_grid, int j_max) {
  params.validate();
  if (!(t_max > 0.0)) throw DomainError("build_cycle_distribution: t_max > 0 required");
  if (n_grid < 16) throw DomainError("build_cycle_distribution: n_grid >= 16 required");
  if (j_max < 1) throw DomainError("build_cycle_distribution: j_max >= 1 required");

  CycleDistribution cd;
  cd.params = params;
  cd.dt = t_max / n_grid;
  cd.grid.resize(n_grid + 1);
  cd.f1.resize(n_grid + 1);
  for (int i = 0; i <= n_grid; ++i) {
    cd.grid[i] = i * cd.dt;
    cd.f1[i] = cycle_density_f1(params, cd.grid[i]);
  }

  // F^(1) by cumulative trapezoid of the density.
  std::vector<double> F1(n_grid + 1, 0.0);
  for (int i = 1; i <= n_grid; ++i)
    F1[i] = F1[i - 1] + 0.5 * cd.dt * (cd.f1[i - 1] + cd.f1[i]);
  cd.Fj.push_back(std::move(F1));

  // F^(j+1)(t_i) = int_0^{t_i} f(y) F^(j)(t_i - y) dy, product trapezoid.
  // The distribution (not the density) is convolved forward, so nothing
  // tabulated is ever differentiated.
  for (int j = 1; j < j_max; ++j) {
    const auto& Fprev = cd.Fj.back();
    std::vector<double> Fnext(n_grid + 1, 0.0);
    for (int i = 1; i <= n_grid; ++i) {
      double s = 0.5 * cd.f1[0] * Fprev[i];  // m = i endpoint vanishes: Fprev[0] = 0
      for (int m = 1; m < i; ++m) s += cd.f1[m] * Fprev[i - m];
      Fnext[i] = cd.dt * s;
    }
    cd.Fj.push_back(std::move(Fnext));
  }
  return cd;
}

double p0_theorem25(const ModelParams& params, const CycleDistribution& cycles,
                    double t, const SeriesControl& ctl, SeriesDiag* diag) {
  params.validate();
  ctl.validate();
  if (t < 0.0) throw DomainError("p0_theorem25: t >= 0 required");
  if (t == 0.0) return 1.0;

  double w = 1.0;
  if (params.lambda < params.mu)
    w = 1.0 - std::pow(1.0 - params.lambda / params.mu, params.alpha / params.lambda);

  const double d = static_cast<double>(params.d);
  const unsigned jmax = cycles.j_max();
  double sum = 0.0;
  double geom = d;   // d (1-d)^{j-1} w^j, updated per j
  double prev = std::numeric_limits<double>::infinity();
  int used = static_cast<int>(jmax);
  for (unsigned j = 1; j <= jmax && static_cast<int>(j) <= ctl.max_terms; ++j) {
    double term = geom * w * cycles.F_at(j, t);
    sum += term;
    double mag = std::abs(term);
    if (mag < ctl.rel_tol * std::max(1.0, std::abs(1.0 - sum)) && mag < prev) {
      if (diag) *diag = {static_cast<int>(j), mag};
      return 1.0 - sum;
    }
    prev = mag;
    geom *= (1.0 - d) * w;
    used = static_cast<int>(j);
  }
  (void)used;
  throw NonConvergence(
      "p0_theorem25: cycle series not converged before j_max (large d or t beyond reliable range)");
}

EqualRatesCoeffs equal_rates_coeffs(const combinatorics::PermutationComponentTable& table, int d) {
  if (d < 1) throw DomainError("equal_rates_coeffs: d >= 1 required");
  EqualRatesCoeffs c;
  c.d = d;
  c.n_max = table.n_max();
  c.s_over_fact.assign(c.n_max + 1, 0.0);
  BigInt fact = 1;
  for (unsigned n = 1; n <= c.n_max; ++n) {
    fact *= n;
    c.s_over_fact[n] = static_cast<double>(
        specfun::detail::big_ratio(table.weighted_row_sum(n, static_cast<unsigned>(d)), fact));
  }
  return c;
}

double series_p0_equal_rates(const ModelParams& params, double t,
                             const EqualRatesCoeffs& coeffs,
                             const SeriesControl& ctl, SeriesDiag* diag) {
  require_regime(params, Regime::EqualRates, "series_p0_equal_rates");
  ctl.validate();
  if (params.d != coeffs.d) throw DomainError("series_p0_equal_rates: coefficient table built for different d");
  if (t < 0.0) throw DomainError("series_p0_equal_rates: t >= 0 required");
  if (t == 0.0) return 1.0;
  if (!(t < 1.0 / params.lambda))
    throw DomainError("series_p0_equal_rates: t >= 1/lambda (outside the radius of convergence)");

  const double x = -params.lambda * t;
  CompensatedSum<double> sum;
  sum.add(1.0);
  StopRule stop(ctl);
  double xn = 1.0;
  for (unsigned n = 1; n <= coeffs.n_max && static_cast<int>(n) <= ctl.max_terms; ++n) {
    xn *= x;
    double term = xn * coeffs.s_over_fact[n];
    sum.add(term);
    stop.update(std::abs(term), std::abs(sum.value()));
    if (stop.done()) {
      if (diag) *diag = {static_cast<int>(n), std::abs(term)};
      return sum.value();
    }
  }
  throw NonConvergence("series_p0_equal_rates: table exhausted before the stopping rule");
}

double series_p0_equal_rates(const ModelParams& params, double t,
                             const combinatorics::PermutationComponentTable& table,
                             const SeriesControl& ctl, SeriesDiag* diag) {
  return series_p0_equal_rates(params, t, equal_rates_coeffs(table, params.d), ctl, diag);
}

double alpha_eq_lambda_radius(const ModelParams& params) {
  if (params.lambda == params.mu)
    throw DomainError("alpha_eq_lambda_radius: lambda != mu required");
  return std::log(params.mu / params.lambda) / (params.mu - params.lambda);
}

double series_p0_alpha_eq_lambda(const ModelParams& params, double t,
                                 const combinatorics::ThetaCoefficients& theta,
                                 const SeriesControl& ctl, SeriesDiag* diag) {
  require_regime(params, Regime::AlphaEqLambda, "series_p0_alpha_eq_lambda");
  ctl.validate();
  if (theta.params.lambda != params.lambda || theta.params.mu != params.mu ||
      theta.params.d != params.d)
    throw DomainError("series_p0_alpha_eq_lambda: theta table built for different parameters");
  if (t < 0.0) throw DomainError("series_p0_alpha_eq_lambda: t >= 0 required");
  if (t == 0.0) return 1.0;
  if (!(t < alpha_eq_lambda_radius(params)))
    throw DomainError("series_p0_alpha_eq_lambda: t outside the radius of convergence");

  const double la = params.lambda, mu = params.mu;
  const double dm1 = static_cast<double>(params.d - 1);
  const double closed = (mu - la) / (mu - la * std::exp(-(mu - la) * t));
  double block = 0.0;
  if (params.d > 1) {
    double x = la * t * dm1;
    block = (std::expm1(-x) + x) / dm1;
  }

  CompensatedSum<long double> tail;
  StopRule stop(ctl);
  int order = 0;
  double last = 0.0;
  bool converged = (params.d == 1);
  long double p = 1.0L;
  const long double x = -static_cast<long double>(la) * t;
  for (unsigned n = 1; n <= theta.n_max && static_cast<int>(n) <= ctl.max_terms && !converged; ++n) {
    p *= x;
    if (n < 3) continue;
    long double term = p * theta.qsum_over_fact[n];
    tail.add(term);
    last = static_cast<double>(std::abs(term));
    stop.update(last, std::abs(static_cast<double>(tail.value())) + 1.0);
    order = static_cast<int>(n);
    if (stop.done()) converged = true;
  }
  if (!converged)
    throw NonConvergence("series_p0_alpha_eq_lambda: theta table exhausted before the stopping rule");
  if (diag) *diag = {order, last};

  double inner = 1.0 - closed - block - static_cast<double>(tail.value());
  return 1.0 - static_cast<double>(params.d) * inner;
}

// ---------------------------------------------------------------------------
// Equal-rates P(k,t)
//
// The printed double series contains the terminating polynomials
// 2F1(-r,-k;1;-1/(lambda t)).  Resumming the r-sum through the Euler
// integral for n/(n+r) gives the equivalent positive-integrand form
//   R_n = n (1+lambda t)^{k+1} int_0^1 (1-tau)^{n-1} tau^k
//                                   (1 + lambda t tau)^{-(k+1)} dtau,
// which is what is evaluated here; the direct double series is kept as
// a small-order test oracle.
// ---------------------------------------------------------------------------

namespace {

double equal_rates_Rn(int n, int k, double lt) {
  auto f = [n, k, lt](double tau) {
    return std::pow(1.0 - tau, n - 1) * std::pow(tau, k) *
           std::pow(1.0 + lt * tau, -(k + 1));
  };
  double err = 0.0;
  double v = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
      f, 0.0, 1.0, 12, 1e-12, &err);
  return n * std::pow(1.0 + lt, k + 1) * v;
}

}  // namespace

double Pk_equal_rates(const ModelParams& params, int k, double t,
                      const EqualRatesCoeffs& coeffs,
                      const SeriesControl& ctl, SeriesDiag* diag) {
  require_regime(params, Regime::EqualRates, "Pk_equal_rates");
  ctl.validate();
  if (k < 1) throw DomainError("Pk_equal_rates: k >= 1 required");
  if (params.d != coeffs.d) throw DomainError("Pk_equal_rates: coefficient table built for different d");
  if (!(t > 0.0)) {
    if (t == 0.0) return 0.0;
    throw DomainError("Pk_equal_rates: t >= 0 required");
  }
  if (!(t < 1.0 / params.lambda))
    throw DomainError("Pk_equal_rates: t >= 1/lambda (outside the radius of convergence)");

  const double lt = params.lambda * t;
  const double pref = std::pow(lt, k) / std::pow(lt + 1.0, k + 1);
  double braces = static_cast<double>(params.d);
  if (params.d > 1) {
    CompensatedSum<double> s;
    StopRule stop(ctl);
    double xn = 1.0;
    bool converged = false;
    int order = 0;
    double last = 0.0;
    for (unsigned n = 1; n <= coeffs.n_max && static_cast<int>(n) <= ctl.max_terms; ++n) {
      xn *= -lt;
      double term = xn * coeffs.s_over_fact[n] * equal_rates_Rn(static_cast<int>(n), k, lt);
      s.add(term);
      last = std::abs(term);
      stop.update(last, std::abs(s.value()) + static_cast<double>(params.d));
      order = static_cast<int>(n);
      if (stop.done()) {
        converged = true;
        break;
      }
    }
    if (!converged)
      throw NonConvergence("Pk_equal_rates: table exhausted before the stopping rule");
    if (diag) *diag = {order, last};
    braces += (params.d - 1) * s.value();
  }
  return pref * braces;
}

double Pk_equal_rates(const ModelParams& params, int k, double t,
                      const combinatorics::PermutationComponentTable& table,
                      const SeriesControl& ctl, SeriesDiag* diag) {
  return Pk_equal_rates(params, k, t, equal_rates_coeffs(table, params.d), ctl, diag);
}

// ---------------------------------------------------------------------------
// alpha = lambda machinery
// ---------------------------------------------------------------------------

namespace detail {

long double j_hat(int k, double a, double t) {
  if (!(a > 0.0)) throw DomainError("j_hat: a > 0 required");
  if (t <= 0.0) return 0.0L;
  const long double at = static_cast<long double>(a) * t;
  if (at < 600.0L) {
    long double T = std::exp(-at);  // e^{-at} (at)^m / m!
    long double sum = 0.0L;
    for (int m = 0; m < 1000000; ++m) {
      long double add = T / (k + m + 1);
      sum += add;
      if (static_cast<long double>(m) > at && add < 1e-21L * sum) break;
      T *= at / (m + 1);
    }
    return sum;
  }
  // Watson-lemma expansion about y = t for very large at.
  long double term = 1.0L / at;
  long double sum = 0.0L;
  for (int i = 0; i <= k; ++i) {
    sum += term;
    long double next = -term * static_cast<long double>(k - i) / at;
    if (std::abs(next) >= std::abs(term)) break;
    term = next;
  }
  return sum;
}

double terminating_2f1_nn(long l, int k, double u) {
  // running binomials C(l,i) C(k,i)
  int top = static_cast<int>(std::min<long>(l, k));
  double cl = 1.0, ck = 1.0, ui = 1.0, sum = 1.0;
  for (int i = 1; i <= top; ++i) {
    cl *= static_cast<double>(l - i + 1) / i;
    ck *= static_cast<double>(k - i + 1) / i;
    ui *= u;
    sum += cl * ck * ui;
  }
  return sum;
}

double hyp2f1_neg_l(long l, int k, double x) {
  if (l == 0) return 1.0;
  return std::pow(x, static_cast<double>(l)) * terminating_2f1_nn(l, k, 1.0 - 1.0 / x);
}

double coeff_A(const ModelParams& params, int k, int j) {
  const double la = params.lambda, mu = params.mu;
  double s = 0.0, sign = 1.0;
  int top = std::min(j, k);
  double cji = 1.0;  // C(j,i)
  for (int i = 0; i <= top; ++i) {
    // C(j+k-i, j): product form
    double c2 = 1.0;
    for (int m = 1; m <= k - i; ++m) c2 *= static_cast<double>(j + m) / m;
    s += sign * cji * c2 * std::pow(mu / la, i);
    sign = -sign;
    cji *= static_cast<double>(j - i) / (i + 1);
  }
  return std::pow(la / mu, j + k) / mu * s;
}

double coeff_B(const ModelParams& params, int k, int j) {
  const double la = params.lambda, mu = params.mu;
  double s = 0.0, sign = 1.0;
  int top = std::min(j - 1, k);
  double cji = 1.0;  // C(j-1,i)
  for (int i = 0; i <= top; ++i) {
    double c2 = 1.0;  // C(k-i+j-1, j-1)
    for (int m = 1; m <= k - i; ++m) c2 *= static_cast<double>(j - 1 + m) / m;
    s += sign * cji * c2 * std::pow(la / mu, i);
    sign = -sign;
    cji *= static_cast<double>(j - 1 - i) / (i + 1);
  }
  return std::pow(mu / la, j) / mu * s;
}

// sum_j j c^j J_k(j |mu-lambda|, t) / t^{k+1}; g_k = t^{k+1} g_hat.
long double g_hat(const ModelParams& params, int k, double z, double t) {
  const double la = params.lambda, mu = params.mu;
  double c, aunit;
  if (mu > la) {
    c = la * (1.0 - z) / (mu - la * z);
    aunit = mu - la;
  } else {
    c = (mu - la * z) / (la * (1.0 - z));
    aunit = la - mu;
  }
  if (!(c >= 0.0 && c < 1.0))
    throw DomainError("g_hat: geometric ratio outside [0,1); z outside the admissible domain");
  long double sum = 0.0L;
  double cj = 1.0;
  for (int j = 1; j <= 4000; ++j) {
    cj *= c;
    long double w = static_cast<long double>(j) * cj * j_hat(k, j * aunit, t);
    sum += w;
    if (w < 1e-19L * std::max<long double>(sum, 1e-300L)) break;
  }
  return sum;
}

double g_stable(const ModelParams& params, int k, double z, double t) {
  return static_cast<double>(g_hat(params, k, z, t)) * std::pow(t, k + 1);
}

}  // namespace detail

double g_k_eval(const ModelParams& params, int k, double z, double t,
                const SeriesControl& ctl) {
  params.validate();
  ctl.validate();
  if (k < 1) throw DomainError("g_k_eval: k >= 1 required");
  if (params.lambda == params.mu) throw DomainError("g_k_eval: lambda != mu required");
  if (t < 0.0) throw DomainError("g_k_eval: t >= 0 required");

  const double la = params.lambda, mu = params.mu;
  double arg1, arg2;
  if (mu > la) {
    double den = mu - la * z;
    arg1 = la * (1.0 - z) * std::exp(-(mu - la) * t) / den;
    arg2 = la * (1.0 - z) / den;
  } else {
    double den = la * (1.0 - z);
    arg1 = (mu - la * z) * std::exp(-(la - mu) * t) / den;
    arg2 = (mu - la * z) / den;
  }
  if (!(std::abs(arg1) < 1.0 && std::abs(arg2) < 1.0))
    throw DomainError("g_k_eval: polylogarithm argument outside (-1,1)");

  // The printed polylog form cancels catastrophically as k grows (its
  // terms are k!-sized while g_k ~ t^{k+1}/(k+1)); the
  // exponential-integral series carries the same value with positive
  // terms throughout.
  return detail::g_stable(params, k, z, t);
}

double Pk_alpha_eq_lambda(const ModelParams& params, int k, double t,
                          const combinatorics::ThetaCoefficients& theta,
                          const SeriesControl& ctl, SeriesDiag* diag) {
  require_regime(params, Regime::AlphaEqLambda, "Pk_alpha_eq_lambda");
  ctl.validate();
  if (k < 0) throw DomainError("Pk_alpha_eq_lambda: k >= 0 required");
  if (theta.params.lambda != params.lambda || theta.params.mu != params.mu ||
      theta.params.d != params.d)
    throw DomainError("Pk_alpha_eq_lambda: theta table built for different parameters");
  if (t < 0.0) throw DomainError("Pk_alpha_eq_lambda: t >= 0 required");
  if (t == 0.0) return k == 0 ? 1.0 : 0.0;
  if (!(t < alpha_eq_lambda_radius(params)))
    throw DomainError("Pk_alpha_eq_lambda: t outside the radius of convergence");

  const double la = params.lambda, mu = params.mu;
  const double d = static_cast<double>(params.d);
  const bool mu_gt = mu > la;
  const double aunit = std::abs(mu - la);
  const double E = std::exp(-aunit * t);

  double first;
  if (mu_gt)
    first = d * (mu - la) * std::pow(la * (1.0 - E), k) / std::pow(mu - la * E, k + 1);
  else
    first = d * (la - mu) * E * std::pow(la * (1.0 - E), k) / std::pow(la - mu * E, k + 1);
  if (k == 0) first += 1.0 - d;  // constant part of F contributes to z^0 only

  if (params.d == 1) {
    if (diag) *diag = {0, 0.0};
    return first;
  }

  // weights j * [z^k]{c^j/(mu - lambda z)}; geometric decay in j
  std::vector<double> wj;
  double wmax = 0.0;
  for (int j = 1; j <= 2000; ++j) {
    double c = mu_gt ? detail::coeff_A(params, k, j) : detail::coeff_B(params, k, j);
    double w = j * c;
    if (!std::isfinite(w))
      throw NonConvergence(
          "Pk_alpha_eq_lambda: coefficient extraction overflows at this k (alternating hump "
          "exceeds double range); use the Monte Carlo or quadrature route");
    wj.push_back(w);
    wmax = std::max(wmax, std::abs(w));
    if (j > 4 && std::abs(w) < 1e-18 * std::max(wmax, 1e-30)) break;
  }

  CompensatedSum<long double> S;
  StopRule stop(ctl);
  long double xn = 1.0L;
  const long double x = -static_cast<long double>(la) * t;
  bool converged = false;
  int order = 0;
  double last = 0.0;
  for (unsigned n = 1; n <= theta.n_max && static_cast<int>(n) <= ctl.max_terms; ++n) {
    xn *= x;
    long double that = (n == 1) ? 1.0L : theta.theta_over_fact[n];
    long double inner = 0.0L;
    for (std::size_t j = 0; j < wj.size(); ++j)
      inner += static_cast<long double>(wj[j]) *
               detail::j_hat(static_cast<int>(n), static_cast<double>(j + 1) * aunit, t);
    long double term = xn * that * t * inner;
    S.add(term);
    last = static_cast<double>(std::abs(term));
    stop.update(last, std::abs(static_cast<double>(S.value())) + std::abs(first) + 1e-30);
    order = static_cast<int>(n);
    if (stop.done()) {
      converged = true;
      break;
    }
  }
  if (!converged)
    throw NonConvergence("Pk_alpha_eq_lambda: theta table exhausted before the stopping rule");
  if (diag) *diag = {order, last};

  double corr = d * (d - 1.0) * (mu - la) * (mu - la) * static_cast<double>(S.value());
  return first - corr;
}

double eval_F_equal_rates(const ModelParams& params, double z, double t,
                          const combinatorics::PermutationComponentTable& table,
                          const SeriesControl& ctl) {
  require_regime(params, Regime::EqualRates, "eval_F_equal_rates");
  ctl.validate();
  if (z < 0.0 || z > 1.0) throw DomainError("eval_F_equal_rates: z in [0,1] required");
  if (t < 0.0) throw DomainError("eval_F_equal_rates: t >= 0 required");
  if (t == 0.0) return 1.0;
  if (!(t < 1.0 / params.lambda))
    throw DomainError("eval_F_equal_rates: t >= 1/lambda (outside the radius of convergence)");

  auto coeffs = equal_rates_coeffs(table, params.d);
  const double lt = params.lambda * t;
  const double w = 1.0 - z;
  const double u = 1.0 + lt * w;
  double F = 1.0 / u;
  if (params.d == 1) return F;

  double p0 = series_p0_equal_rates(params, t, coeffs, ctl);
  F -= lt * (params.d - 1) * w / u * p0;

  const double zeta = 1.0 - 1.0 / u;
  CompensatedSum<double> s;
  StopRule stop(ctl);
  double xn = -lt;  // (-lt)^{n+1} accumulator starts at n=1 -> (-lt)^2
  bool converged = false;
  for (unsigned n = 1; n <= coeffs.n_max && static_cast<int>(n) <= ctl.max_terms; ++n) {
    xn *= -lt;
    double term = static_cast<double>(n) / (n + 1.0) * xn * coeffs.s_over_fact[n] *
                  specfun::hyp2f1(1.0, n + 1.0, n + 2.0, zeta, ctl);
    s.add(term);
    stop.update(std::abs(term), std::abs(s.value()) + 1.0);
    if (stop.done()) {
      converged = true;
      break;
    }
  }
  if (!converged)
    throw NonConvergence("eval_F_equal_rates: table exhausted before the stopping rule");
  F -= (params.d - 1) * w / (u * u) * s.value();
  return F;
}

double eval_F_alpha_eq_lambda(const ModelParams& params, double z, double t,
                              const combinatorics::ThetaCoefficients& theta,
                              const SeriesControl& ctl) {
  require_regime(params, Regime::AlphaEqLambda, "eval_F_alpha_eq_lambda");
  ctl.validate();
  if (t < 0.0) throw DomainError("eval_F_alpha_eq_lambda: t >= 0 required");
  if (t == 0.0) return 1.0;
  if (!(t < alpha_eq_lambda_radius(params)))
    throw DomainError("eval_F_alpha_eq_lambda: t outside the radius of convergence");
  const double la = params.lambda, mu = params.mu;
  if (mu < la && !(z < mu / la))
    throw DomainError("eval_F_alpha_eq_lambda: z >= mu/lambda in the mu < lambda branch");
  if (z < 0.0 || z > 1.0) throw DomainError("eval_F_alpha_eq_lambda: z in [0,1] required");

  const double d = static_cast<double>(params.d);
  double H = kernel_h(params, z, t);
  double F = 1.0 - d + d * H;
  if (params.d == 1) return F;

  CompensatedSum<long double> S;
  StopRule stop(ctl);
  long double xn = 1.0L;
  const long double x = -static_cast<long double>(la) * t;
  bool converged = false;
  for (unsigned n = 1; n <= theta.n_max && static_cast<int>(n) <= ctl.max_terms; ++n) {
    xn *= x;
    long double that = (n == 1) ? 1.0L : theta.theta_over_fact[n];
    long double ghat = detail::g_hat(params, static_cast<int>(n), z, t);
    long double term = xn * that * t * ghat;
    S.add(term);
    stop.update(static_cast<double>(std::abs(term)),
                std::abs(static_cast<double>(S.value())) + 1.0);
    if (stop.done()) {
      converged = true;
      break;
    }
  }
  if (!converged)
    throw NonConvergence("eval_F_alpha_eq_lambda: theta table exhausted before the stopping rule");

  F -= d * (d - 1.0) * (mu - la) * (mu - la) / (mu - la * z) * static_cast<double>(S.value());
  return F;
}

double eval_F_quadrature(const ModelParams& params, double z, double t,
                         const TransientLaw& volterra_p0, int n_quad) {
  params.validate();
  if (z < 0.0 || z > 1.0) throw DomainError("eval_F_quadrature: z in [0,1] required");
  if (t < 0.0) throw DomainError("eval_F_quadrature: t >= 0 required");
  if (t == 0.0) return 1.0;
  if (t > volterra_p0.t_max() * (1.0 + 1e-12))
    throw DomainError("eval_F_quadrature: t beyond the Volterra history extent");
  if (n_quad < 8) throw DomainError("eval_F_quadrature: n_quad >= 8 required");

  double F = kernel_h(params, z, t);
  if (params.d == 1) return F;
  const double h = t / n_quad;
  double s = 0.5 * (kernel_h_dt(params, z, t) * volterra_p0.p0_at(0.0) +
                    kernel_h_dt(params, z, 0.0) * volterra_p0.p0_at(t));
  for (int i = 1; i < n_quad; ++i) {
    double y = i * h;
    s += kernel_h_dt(params, z, t - y) * volterra_p0.p0_at(y);
  }
  return F + (params.d - 1) * h * s;
}

double eval_F(const ModelParams& params, double z, double t, const FContext& ctx,
              const SeriesControl& ctl) {
  Regime r = params.regime();
  if (r == Regime::EqualRates && ctx.table && t < 1.0 / params.lambda)
    return eval_F_equal_rates(params, z, t, *ctx.table, ctl);
  if (r == Regime::AlphaEqLambda && ctx.theta && t < alpha_eq_lambda_radius(params) &&
      !(params.mu < params.lambda && !(z < params.mu / params.lambda)))
    return eval_F_alpha_eq_lambda(params, z, t, *ctx.theta, ctl);
  if (ctx.volterra) return eval_F_quadrature(params, z, t, *ctx.volterra);
  throw DomainError("eval_F: no applicable route (provide a Volterra history as fallback)");
}

double polylog_identity_check(int k, double x, const SeriesControl& ctl) {
  if (k < 0) throw DomainError("polylog_identity_check: k >= 0 required");
  if (!(x > 0.0 && x < 1.0)) throw DomainError("polylog_identity_check: x in (0,1) required");
  ctl.validate();

  double lhs = specfun::polylog(k + 1, x, ctl);
  CompensatedSum<double> rhs;
  StopRule stop(ctl);
  bool converged = false;
  for (int s = 1; s <= ctl.max_terms; ++s) {
    double term = detail::hyp2f1_neg_l(s - 1, k, x) / s;
    rhs.add(term);
    stop.update(std::abs(term), std::abs(rhs.value()) + 1e-30);
    if (stop.done()) {
      converged = true;
      break;
    }
  }
  if (!converged)
    throw NonConvergence("polylog_identity_check: max_terms reached before the stopping rule");
  return std::abs(lhs - x * rhs.value());
}

}  // namespace starbdi::transient
