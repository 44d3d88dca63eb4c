// starbdi — birth-death-immigration processes on star graphs.
//
// Subcommands: transient, simulate, asymptotic, diffusion,
// combinatorics, validate.  Exit codes: 0 success, 1 computational
// failure, 2 usage error.

#include <CLI11.hpp>

#include <exception>
#include <iostream>
#include <string>

#include "starbdi/cli_run.hpp"

int main(int argc, char** argv) {
  using namespace starbdi;
  CLI::App app{"birth-death-immigration process on a d-ray star graph"};
  app.require_subcommand(1);

  cli::RunConfig cfg;
  std::string t_spec = "0:1:50", x_spec = "0.1:5:25", method = "auto";

  auto add_rates = [&](CLI::App* sub) {
    sub->add_option("--lambda", cfg.params.lambda, "per-individual birth rate");
    sub->add_option("--mu", cfg.params.mu, "per-individual death rate");
    sub->add_option("--alpha", cfg.params.alpha, "immigration rate");
    sub->add_option("--d", cfg.params.d, "ray count");
  };
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--t", t_spec, "time grid start:stop:points");
    sub->add_option("--k", cfg.k_show, "highest level to emit");
    sub->add_option("--kmax", cfg.k_max, "level truncation / marginal cap");
    sub->add_option("--paths", cfg.n_paths, "Monte Carlo path count");
    sub->add_option("--seed", cfg.seed, "RNG seed");
    sub->add_option("--out", cfg.out, "output CSV path (default stdout)");
  };

  auto* tr = app.add_subcommand("transient", "transient law p(0,t), P(k,t)");
  add_rates(tr);
  add_common(tr);
  tr->add_option("--method", method, "series|volterra|theorem25|mc|auto");

  auto* sim = app.add_subcommand("simulate", "Monte Carlo marginal");
  add_rates(sim);
  add_common(sim);

  auto* asy = app.add_subcommand("asymptotic", "long-time limit law");
  add_rates(asy);
  asy->add_option("--kmax", cfg.k_max, "highest level");
  asy->add_option("--out", cfg.out, "output CSV path");

  auto* dif = app.add_subcommand("diffusion", "diffusion approximation");
  dif->add_option("--gamma", cfg.dp.gamma_t, "scaled immigration ratio");
  dif->add_option("--mut", cfg.dp.mu_t, "scale rate");
  dif->add_option("--beta", cfg.dp.beta_t, "drift slope");
  dif->add_option("--eps", cfg.dp.epsilon, "scaling parameter");
  dif->add_option("--d", cfg.params.d, "ray count (for the probe)");
  dif->add_option("--t", t_spec, "time grid start:stop:points");
  dif->add_option("--x", x_spec, "space grid start:stop:points");
  dif->add_flag("--probe", cfg.probe, "run the scaling-limit KS probe");
  dif->add_option("--probe-t", cfg.probe_t, "probe evaluation time");
  dif->add_option("--probe-paths", cfg.probe_paths, "probe path count");
  dif->add_option("--seed", cfg.seed, "RNG seed");
  dif->add_option("--out", cfg.out, "output CSV path");

  auto* com = app.add_subcommand("combinatorics", "t_{n,k} tables");
  com->add_option("--nmax", cfg.n_max, "table size");
  com->add_flag("--check", cfg.check, "cross-check the three t_{n,k} routes");
  com->add_option("--out", cfg.out, "output CSV path");

  auto* val = app.add_subcommand("validate", "cross-method validation campaign");
  val->add_flag("--quick", cfg.quick, "reduced-size campaign (< 5 min)");
  val->add_option("--seed", cfg.seed, "RNG seed");
  val->add_option("--out", cfg.out, "report CSV path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << '\n';
    return 2;
  }

  if (tr->parsed()) cfg.sub = cli::Sub::Transient;
  if (sim->parsed()) cfg.sub = cli::Sub::Simulate;
  if (asy->parsed()) cfg.sub = cli::Sub::Asymptotic;
  if (dif->parsed()) cfg.sub = cli::Sub::Diffusion;
  if (com->parsed()) cfg.sub = cli::Sub::Combinatorics;
  if (val->parsed()) cfg.sub = cli::Sub::Validate;

  try {
    cfg.t = cli::parse_grid(t_spec);
    cfg.x = cli::parse_grid(x_spec);
    if (method == "auto")
      cfg.method = cli::MethodSel::Auto;
    else if (method == "series")
      cfg.method = cli::MethodSel::Series;
    else if (method == "volterra")
      cfg.method = cli::MethodSel::Volterra;
    else if (method == "theorem25")
      cfg.method = cli::MethodSel::Theorem25;
    else if (method == "mc")
      cfg.method = cli::MethodSel::MC;
    else
      throw DomainError("unknown --method '" + method + "'");
    return cli::run(cfg);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
