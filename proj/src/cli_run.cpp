#include "starbdi/cli_run.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <vector>

#include "starbdi/asymptotics.hpp"
#include "starbdi/combinatorics.hpp"
#include "starbdi/transient.hpp"

namespace starbdi::cli {

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

GridSpec parse_grid(const std::string& s) {
  GridSpec g;
  char c1 = 0, c2 = 0;
  std::istringstream in(s);
  if (!(in >> g.start >> c1 >> g.stop >> c2 >> g.points) || c1 != ':' || c2 != ':' || !in.eof())
    throw DomainError("grid spec must be start:stop:points, got '" + s + "'");
  if (g.points < 2) throw DomainError("grid spec: points >= 2 required");
  if (!(g.stop >= g.start)) throw DomainError("grid spec: stop >= start required");
  return g;
}

namespace {

std::vector<double> grid_values(const GridSpec& g) {
  if (g.points < 2) throw DomainError("grid: points >= 2 required");
  std::vector<double> v(static_cast<std::size_t>(g.points));
  double step = (g.stop - g.start) / (g.points - 1);
  for (int i = 0; i < g.points; ++i) v[static_cast<std::size_t>(i)] = g.start + i * step;
  return v;
}

class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_.open(path, std::ios::out | std::ios::trunc);
      if (!file_) throw DomainError("cannot open output path '" + path + "'");
    }
  }
  std::ostream& os() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

// Truncation order needed for a series with geometric tail ratio q.
unsigned series_order_for(double q) {
  if (!(q > 0.0) || q >= 1.0) return 64;
  double n = std::log(1e-15) / std::log(q);
  return static_cast<unsigned>(std::clamp(n * 1.2 + 24.0, 24.0, 420.0));
}

using transient::Method;
using transient::SeriesDiag;

const char* method_name(Method m) {
  switch (m) {
    case Method::SeriesEqualRates: return "series";
    case Method::SeriesAlphaEqLambda: return "series";
    case Method::Theorem25: return "theorem25";
    case Method::Volterra: return "volterra";
    case Method::MonteCarlo: return "mc";
  }
  return "?";
}

int run_transient(const RunConfig& cfg) {
  cfg.params.validate();
  auto ts = grid_values(cfg.t);
  const double t_max = ts.back();
  Regime regime = cfg.params.regime();

  MethodSel sel = cfg.method;
  if (sel == MethodSel::Auto) {
    bool series_ok =
        (regime == Regime::EqualRates && t_max < 1.0 / cfg.params.lambda) ||
        (regime == Regime::AlphaEqLambda &&
         t_max < transient::alpha_eq_lambda_radius(cfg.params));
    sel = series_ok ? MethodSel::Series : MethodSel::Volterra;
  }

  Output out(cfg.out);
  out.os() << "method,t,k,value,trunc_order,tail_bound\n";
  auto row = [&](Method m, double t, int k, double v, const SeriesDiag& dg) {
    out.os() << method_name(m) << ',' << fmt17(t) << ',' << k << ',' << fmt17(v) << ','
             << dg.order << ',' << fmt17(dg.tail) << '\n';
  };

  switch (sel) {
    case MethodSel::Series: {
      if (regime == Regime::EqualRates) {
        if (!(t_max < 1.0 / cfg.params.lambda))
          throw DomainError("transient: series method outside its radius t < 1/lambda");
        auto table = combinatorics::t_table_recursive(
            std::max(cfg.n_max, series_order_for(cfg.params.lambda * t_max)));
        auto coeffs = transient::equal_rates_coeffs(table, cfg.params.d);
        for (double t : ts) {
          SeriesDiag dg;
          double p0 = t == 0.0 ? 1.0 : transient::series_p0_equal_rates(cfg.params, t, coeffs, {}, &dg);
          row(Method::SeriesEqualRates, t, -1, p0, dg);
          for (int k = 1; k <= cfg.k_show; ++k) {
            SeriesDiag dk;
            double pk = t == 0.0 ? 0.0 : transient::Pk_equal_rates(cfg.params, k, t, coeffs, {}, &dk);
            row(Method::SeriesEqualRates, t, k, pk, dk);
          }
        }
      } else if (regime == Regime::AlphaEqLambda) {
        double radius = transient::alpha_eq_lambda_radius(cfg.params);
        if (!(t_max < radius))
          throw DomainError("transient: series method outside its radius log(mu/lambda)/(mu-lambda)");
        auto theta = combinatorics::theta_coefficients(
            cfg.params, std::max(cfg.n_max, series_order_for(t_max / radius)));
        for (double t : ts) {
          SeriesDiag dg;
          double p0 = t == 0.0 ? 1.0
                               : transient::series_p0_alpha_eq_lambda(cfg.params, t, theta, {}, &dg);
          row(Method::SeriesAlphaEqLambda, t, -1, p0, dg);
          for (int k = 1; k <= cfg.k_show; ++k) {
            SeriesDiag dk;
            double pk =
                t == 0.0 ? 0.0 : transient::Pk_alpha_eq_lambda(cfg.params, k, t, theta, {}, &dk);
            row(Method::SeriesAlphaEqLambda, t, k, pk, dk);
          }
        }
      } else {
        throw DomainError("transient: no closed series in this regime (alpha != lambda); use volterra/theorem25/mc");
      }
      break;
    }
    case MethodSel::Volterra: {
      int n_steps = 1 << 14;
      auto law = transient::solve_volterra_p0(cfg.params, t_max > 0 ? t_max : 1.0, n_steps);
      for (double t : ts)
        row(Method::Volterra, t, -1, law.p0_at(t), {n_steps, 0.0});
      break;
    }
    case MethodSel::Theorem25: {
      auto cycles = transient::build_cycle_distribution(cfg.params, t_max > 0 ? t_max : 1.0);
      for (double t : ts) {
        SeriesDiag dg;
        double p0 = t == 0.0 ? 1.0 : transient::p0_theorem25(cfg.params, cycles, t, {}, &dg);
        row(Method::Theorem25, t, -1, p0, dg);
      }
      break;
    }
    case MethodSel::MC: {
      for (double t : ts) {
        if (t == 0.0) {
          row(Method::MonteCarlo, t, -1, 1.0, {0, 0.0});
          for (int k = 1; k <= cfg.k_show; ++k) row(Method::MonteCarlo, t, k, 0.0, {0, 0.0});
          continue;
        }
        auto m = empirical_marginal(cfg.params, t, cfg.n_paths, cfg.seed, cfg.k_max);
        row(Method::MonteCarlo, t, -1, m.p0_hat, {0, 3.0 * m.stderr_of(0)});
        for (int k = 1; k <= cfg.k_show; ++k)
          row(Method::MonteCarlo, t, k, m.at(k), {0, 3.0 * m.stderr_of(k)});
      }
      break;
    }
    case MethodSel::Auto: break;  // resolved above
  }
  return 0;
}

int run_simulate(const RunConfig& cfg) {
  cfg.params.validate();
  Output out(cfg.out);
  out.os() << "t,level,probability,stderr\n";
  for (double t : grid_values(cfg.t)) {
    if (t == 0.0) {
      out.os() << fmt17(t) << ",-1," << fmt17(1.0) << ',' << fmt17(0.0) << '\n';
      continue;
    }
    auto m = empirical_marginal(cfg.params, t, cfg.n_paths, cfg.seed, cfg.k_max);
    out.os() << fmt17(t) << ",-1," << fmt17(m.p0_hat) << ',' << fmt17(m.stderr_of(0)) << '\n';
    for (int k = 1; k <= m.k_max; ++k) {
      double p = m.at(k);
      if (p > 0.0)
        out.os() << fmt17(t) << ',' << k << ',' << fmt17(p) << ',' << fmt17(m.stderr_of(k)) << '\n';
    }
  }
  return 0;
}

int run_asymptotic(const RunConfig& cfg) {
  cfg.params.validate();
  auto law = asymptotics::limit_law(cfg.params, cfg.k_max);
  Output out(cfg.out);
  out.os() << "k,limit_probability,nb_pi\n";
  for (int k = 0; k <= law.k_max; ++k)
    out.os() << k << ',' << fmt17(law.at(k)) << ','
             << fmt17(law.nb_pi[static_cast<std::size_t>(k)]) << '\n';
  out.os() << "theta_d,mean,variance\n";
  out.os() << fmt17(law.theta_d) << ',' << fmt17(law.mean) << ',' << fmt17(law.variance) << '\n';
  return 0;
}

int run_diffusion(const RunConfig& cfg) {
  cfg.dp.validate();
  Output out(cfg.out);
  out.os() << "x,t,h_density\n";
  for (double t : grid_values(cfg.t)) {
    if (t <= 0.0) continue;
    auto gd = diffusion::transient_density(cfg.dp, t);
    for (double x : grid_values(cfg.x))
      out.os() << fmt17(x) << ',' << fmt17(t) << ',' << fmt17(gd.pdf(x)) << '\n';
  }
  if (cfg.probe) {
    auto pr = diffusion::convergence_probe(cfg.dp, cfg.params.d, cfg.probe_t, cfg.probe_paths,
                                           cfg.seed);
    out.os() << "epsilon,t,ks_distance,n_paths,seed\n";
    out.os() << fmt17(cfg.dp.epsilon) << ',' << fmt17(cfg.probe_t) << ','
             << fmt17(pr.ks_distance) << ',' << cfg.probe_paths << ',' << cfg.seed << '\n';
  }
  return 0;
}

int run_combinatorics(const RunConfig& cfg) {
  auto table = combinatorics::t_table_recursive(std::max(cfg.n_max, 1u));
  int status = 0;
  if (cfg.check) {
    unsigned n_hi = std::min(table.n_max(), 8u);
    for (unsigned n = 1; n <= n_hi && status == 0; ++n) {
      for (unsigned k = 1; k <= n; ++k) {
        BigInt rec = table.at(n, k);
        BigInt bf = combinatorics::t_bruteforce(n, k);
        BigInt cf = n >= 2 ? combinatorics::t_closed_form(n, k) : rec;
        if (rec != bf || rec != cf) {
          std::cerr << "combinatorics check failed at n=" << n << " k=" << k << ": recursive=" << rec
                    << " bruteforce=" << bf << " closed=" << cf << '\n';
          status = 1;
        }
      }
      if (table.row_sum(n) != combinatorics::factorial(n)) {
        std::cerr << "combinatorics row-sum check failed at n=" << n << '\n';
        status = 1;
      }
    }
  }
  Output out(cfg.out);
  out.os() << "n,k,t_nk\n";
  for (unsigned n = 1; n <= table.n_max(); ++n)
    for (unsigned k = 1; k <= n; ++k) out.os() << n << ',' << k << ',' << table.at(n, k) << '\n';
  return status;
}

// ---------------------------------------------------------------------------
// validate: cross-method campaign
// ---------------------------------------------------------------------------

struct Check {
  std::string name;
  std::string detail;
  double residual;
  double tolerance;
  bool pass() const { return residual <= tolerance; }
};

void run_validate_campaign(const RunConfig& cfg, std::vector<Check>& checks) {
  using namespace transient;
  const bool quick = cfg.quick;

  // Exact combinatorics: three routes must agree.
  {
    unsigned n_hi = quick ? 7 : 8;
    auto table = combinatorics::t_table_recursive(n_hi);
    bool ok = true;
    for (unsigned n = 1; n <= n_hi && ok; ++n) {
      if (table.row_sum(n) != combinatorics::factorial(n)) ok = false;
      for (unsigned k = 1; k <= n && ok; ++k) {
        if (table.at(n, k) != combinatorics::t_bruteforce(n, k)) ok = false;
        if (n >= 2 && table.at(n, k) != combinatorics::t_closed_form(n, k)) ok = false;
      }
    }
    checks.push_back({"tnk_three_routes", "n<=" + std::to_string(n_hi), ok ? 0.0 : 1.0, 0.5});
  }

  // Polylogarithm series identity.
  {
    double worst = 0.0;
    for (int k : {0, 2, 4})
      for (double x : {0.2, 0.5, 0.8})
        worst = std::max(worst, polylog_identity_check(k, x));
    checks.push_back({"polylog_identity", "k in {0,2,4}, x in {0.2,0.5,0.8}", worst, 1e-8});
  }

  // Equal-rates series vs Volterra.
  {
    double worst = 0.0;
    int n_steps = quick ? (1 << 12) : (1 << 14);
    for (int d : (quick ? std::vector<int>{2, 3} : std::vector<int>{1, 2, 3, 4, 10})) {
      ModelParams p{0.5, 0.5, 0.5, d};
      auto table = combinatorics::t_table_recursive(series_order_for(0.5 * 1.8));
      auto coeffs = equal_rates_coeffs(table, d);
      auto law = solve_volterra_p0(p, 1.8, n_steps);
      for (int i = 1; i <= 18; ++i) {
        double t = 0.1 * i;
        worst = std::max(worst,
                         std::abs(series_p0_equal_rates(p, t, coeffs) - law.p0_at(t)));
      }
    }
    checks.push_back({"equal_rates_series_vs_volterra", "lambda=mu=alpha=0.5, t<=1.8", worst, 1e-6});
  }

  // alpha = lambda series vs Volterra, both orderings of lambda and mu.
  {
    double worst = 0.0;
    int n_steps = quick ? (1 << 12) : (1 << 14);
    for (auto [la, mu] : {std::pair{0.1, 0.5}, std::pair{0.5, 0.1}}) {
      ModelParams p{la, la, mu, 2};
      double radius = alpha_eq_lambda_radius(p);
      double t_hi = 0.85 * radius;
      auto theta = combinatorics::theta_coefficients(p, series_order_for(0.85));
      auto law = solve_volterra_p0(p, t_hi, n_steps);
      for (int i = 1; i <= 12; ++i) {
        double t = t_hi * i / 12.0;
        worst = std::max(worst,
                         std::abs(series_p0_alpha_eq_lambda(p, t, theta) - law.p0_at(t)));
      }
    }
    checks.push_back({"alpha_eq_lambda_series_vs_volterra", "(0.1,0.5) and (0.5,0.1), d=2", worst, 1e-6});
  }

  // Cycle-series representation vs Volterra in all three regimes.
  {
    double worst = 0.0;
    for (auto [la, mu] : {std::pair{0.5, 0.5}, std::pair{0.6, 0.3}, std::pair{0.1, 0.5}}) {
      ModelParams p{la, la, mu, 2};
      double t_hi = 3.0;
      auto cycles = build_cycle_distribution(p, t_hi, quick ? 2048 : 4096, 48);
      auto law = solve_volterra_p0(p, t_hi, 1 << 13);
      for (int i = 1; i <= 10; ++i) {
        double t = t_hi * i / 10.0;
        worst = std::max(worst, std::abs(p0_theorem25(p, cycles, t) - law.p0_at(t)));
      }
    }
    checks.push_back({"theorem25_vs_volterra", "three regimes, d=2, t<=3", worst, 2e-4});
  }

  // Normalization p(0,t) + sum_k P(k,t) = 1.
  {
    ModelParams p{0.5, 0.5, 0.5, 3};
    double t = 1.0;
    auto table = combinatorics::t_table_recursive(series_order_for(0.5));
    auto coeffs = equal_rates_coeffs(table, 3);
    double total = series_p0_equal_rates(p, t, coeffs);
    for (int k = 1; k <= cfg.k_max; ++k) total += Pk_equal_rates(p, k, t, coeffs);
    checks.push_back({"normalization_equal_rates", "lambda=0.5, d=3, t=1", std::abs(total - 1.0), 1e-4});
  }

  // Generating-function consistency against the quadrature route.
  {
    ModelParams p{0.1, 0.1, 0.5, 3};
    auto law = solve_volterra_p0(p, 2.0, 1 << 13);
    double worst = std::abs(eval_F_quadrature(p, 0.3, 0.0, law) - 1.0);
    worst = std::max(worst, std::abs(eval_F_quadrature(p, 0.0, 1.5, law) - law.p0_at(1.5)));
    worst = std::max(worst, std::abs(eval_F_quadrature(p, 1.0, 1.5, law) - 1.0));
    checks.push_back({"generating_function_consistency", "F(z,0)=1, F(0,t)=p0, F(1,t)=1", worst, 1e-5});
  }

  // Asymptotic moments vs pmf summation.
  {
    ModelParams p{0.1, 0.1, 0.5, 3};
    auto law = asymptotics::limit_law(p, 500);
    double m1 = 0.0, m2 = 0.0;
    for (int k = 1; k <= law.k_max; ++k) {
      m1 += k * law.at(k);
      m2 += static_cast<double>(k) * k * law.at(k);
    }
    double res = std::abs(m1 - law.mean) / law.mean +
                 std::abs(m2 - m1 * m1 - law.variance) / law.variance;
    checks.push_back({"asymptotic_moments", "lambda=0.1, mu=0.5, d=3", res, 1e-6});
  }

  // Diffusion: Fokker-Planck residual and stationary seam.
  {
    diffusion::DiffusionParams dp{1.5, 1.0, -0.5, 0.01};
    double worst = 0.0;
    for (int i = 1; i <= (quick ? 6 : 20); ++i)
      for (int j = 1; j <= (quick ? 6 : 20); ++j) {
        double x = 0.1 + (5.0 - 0.1) * (i - 1) / (quick ? 5.0 : 19.0);
        double t = 0.1 + (5.0 - 0.1) * (j - 1) / (quick ? 5.0 : 19.0);
        worst = std::max(worst, diffusion::fokker_planck_residual(dp, x, t));
      }
    checks.push_back({"fokker_planck_residual", "20x20 grid", worst, 1e-4});
    double seam = std::abs(diffusion::transient_density(dp, 1000.0 / 0.5).rate -
                           diffusion::stationary_density(dp).rate);
    checks.push_back({"stationary_vs_transient_rate", "t = 1000/|beta|", seam, 1e-8});
  }

  // Monte Carlo spot checks.
  {
    ModelParams p{0.5, 0.5, 0.5, 2};
    long n = quick ? 100000 : 1000000;
    auto m = empirical_marginal(p, 1.0, n, cfg.seed);
    auto table = combinatorics::t_table_recursive(series_order_for(0.5));
    auto coeffs = equal_rates_coeffs(table, 2);
    double p0 = series_p0_equal_rates(p, 1.0, coeffs);
    double p1 = Pk_equal_rates(p, 1, 1.0, coeffs);
    double r0 = std::abs(m.p0_hat - p0) / (3.0 * m.stderr_of(0));
    double r1 = std::abs(m.at(1) - p1) / (3.0 * m.stderr_of(1));
    checks.push_back({"mc_vs_series", "lambda=mu=alpha=0.5, d=2, t=1 (units of 3 SE)",
                      std::max(r0, r1), 1.0});
  }

  // Diffusion probe.
  {
    diffusion::DiffusionParams dp{1.0, 1.0, -0.5, quick ? 0.02 : 0.01};
    auto pr = diffusion::convergence_probe(dp, 3, 1.0, quick ? 2000 : 10000, cfg.seed);
    checks.push_back({"diffusion_probe_ks", "gamma=mu=1, beta=-0.5, d=3, t=1", pr.ks_distance,
                      quick ? 0.05 : 0.03});
  }
}

int run_validate(const RunConfig& cfg) {
  std::vector<Check> checks;
  run_validate_campaign(cfg, checks);
  Output out(cfg.out);
  out.os() << "check,detail,residual,tolerance,pass\n";
  int failures = 0;
  for (const auto& c : checks) {
    bool ok = c.pass();
    if (!ok) ++failures;
    out.os() << c.name << ",\"" << c.detail << "\"," << fmt17(c.residual) << ','
             << fmt17(c.tolerance) << ',' << (ok ? "1" : "0") << '\n';
    std::cerr << (ok ? "PASS " : "FAIL ") << c.name << " (residual " << c.residual
              << ", tolerance " << c.tolerance << ")\n";
  }
  return failures == 0 ? 0 : 1;
}

}  // namespace

int run(const RunConfig& cfg) {
  switch (cfg.sub) {
    case Sub::Transient: return run_transient(cfg);
    case Sub::Simulate: return run_simulate(cfg);
    case Sub::Asymptotic: return run_asymptotic(cfg);
    case Sub::Diffusion: return run_diffusion(cfg);
    case Sub::Combinatorics: return run_combinatorics(cfg);
    case Sub::Validate: return run_validate(cfg);
  }
  return 1;
}

}  // namespace starbdi::cli
