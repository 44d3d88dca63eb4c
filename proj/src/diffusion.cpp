#include "starbdi/diffusion.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "starbdi/rng.hpp"

namespace starbdi::diffusion {

ModelParams induced_ctmc_params(const DiffusionParams& dp, int d) {
  dp.validate();
  ModelParams p;
  p.alpha = dp.gamma_t * dp.mu_t / dp.epsilon;
  p.lambda = dp.mu_t / dp.epsilon + dp.beta_t;
  p.mu = dp.mu_t / dp.epsilon;
  p.d = d;
  if (!(p.lambda > 0.0))
    throw DomainError("induced_ctmc_params: nonpositive birth rate (epsilon too large for beta_t < 0)");
  p.validate();
  return p;
}

double psi(const DiffusionParams& dp, double t) {
  dp.validate();
  if (!(t > 0.0)) throw DomainError("psi: t > 0 required");
  // expm1 keeps the seam at beta = 0 smooth; below 1e-8 the limit form
  // is exact to rounding anyway.
  if (std::abs(dp.beta_t * t) < 1e-8) return 1.0 / (dp.mu_t * t);
  return dp.beta_t / (dp.mu_t * std::expm1(dp.beta_t * t));
}

double GammaDensity::pdf(double x) const {
  if (x < 0.0) return 0.0;
  if (x == 0.0) {
    if (shape > 1.0) return 0.0;
    if (shape == 1.0) return rate;
    return std::numeric_limits<double>::infinity();
  }
  return std::exp(shape * std::log(rate) + (shape - 1.0) * std::log(x) - rate * x -
                  std::lgamma(shape));
}

double GammaDensity::cdf(double x) const {
  if (x <= 0.0) return 0.0;
  return boost::math::gamma_p(shape, rate * x);
}

GammaDensity transient_density(const DiffusionParams& dp, double t) {
  return GammaDensity{dp.gamma_t, psi(dp, t)};
}

GammaDensity stationary_density(const DiffusionParams& dp) {
  dp.validate();
  if (!(dp.beta_t < 0.0)) throw DomainError("stationary_density: beta_t < 0 required");
  return GammaDensity{dp.gamma_t, -dp.beta_t / dp.mu_t};
}

double fokker_planck_residual(const DiffusionParams& dp, double x, double t, double step) {
  dp.validate();
  if (!(x > 0.0) || !(t > step)) throw DomainError("fokker_planck_residual: x > 0, t > step required");

  auto h = [&](double xx, double tt) { return transient_density(dp, tt).pdf(xx); };
  auto drift = [&](double xx, double tt) {
    return (dp.beta_t * xx + dp.gamma_t * dp.mu_t) * h(xx, tt);
  };
  auto diff = [&](double xx, double tt) { return dp.mu_t * xx * h(xx, tt); };

  double ht = (h(x, t + step) - h(x, t - step)) / (2.0 * step);
  double ddx = (drift(x + step, t) - drift(x - step, t)) / (2.0 * step);
  double d2dx2 = (diff(x + step, t) - 2.0 * diff(x, t) + diff(x - step, t)) / (step * step);
  double res = ht + ddx - d2dx2;
  double scale = std::abs(ht) + std::abs(ddx) + std::abs(d2dx2) + 1e-12;
  return std::abs(res) / scale;
}

double boundary_flux(const DiffusionParams& dp, double t, double x, double step) {
  dp.validate();
  if (!(t > 0.0)) throw DomainError("boundary_flux: t > 0 required");
  auto h = [&](double xx) { return transient_density(dp, t).pdf(xx); };
  double adv = (dp.beta_t * x + dp.gamma_t * dp.mu_t) * h(x);
  double div = (dp.mu_t * (x + step) * h(x + step) - dp.mu_t * (x - step) * h(x - step)) /
               (2.0 * step);
  return adv - div;
}

namespace {

ProbeResult ks_against(const GammaDensity& target, const DiffusionParams& dp, int d,
                       double t, long n_paths, std::uint64_t seed) {
  if (!(t > 0.0)) throw DomainError("convergence_probe: t > 0 required");
  if (n_paths < 100) throw DomainError("convergence_probe: n_paths >= 100 required");
  ModelParams p = induced_ctmc_params(dp, d);

  std::vector<long> counts;
  for (long i = 0; i < n_paths; ++i) {
    StarState s = simulate_state_at(p, t, rng::stream_seed(seed, static_cast<std::uint64_t>(i)));
    auto lvl = static_cast<std::size_t>(s.level);
    if (lvl >= counts.size()) counts.resize(lvl + 1, 0);
    ++counts[lvl];
  }

  // Each lattice atom eps*k is merged into the bin [eps k, eps (k+1));
  // compare cumulative bin mass against the gamma CDF at bin edges.
  double ks = 0.0;
  double cum = 0.0;
  const double n = static_cast<double>(n_paths);
  for (std::size_t k = 0; k < counts.size(); ++k) {
    cum += static_cast<double>(counts[k]) / n;
    double edge = dp.epsilon * static_cast<double>(k + 1);
    ks = std::max(ks, std::abs(cum - target.cdf(edge)));
  }
  return {ks, 0.5 / std::sqrt(n)};
}

}  // namespace

ProbeResult convergence_probe(const DiffusionParams& dp, int d, double t,
                              long n_paths, std::uint64_t seed) {
  return ks_against(transient_density(dp, t), dp, d, t, n_paths, seed);
}

ProbeResult stationary_probe(const DiffusionParams& dp, int d, double t,
                             long n_paths, std::uint64_t seed) {
  return ks_against(stationary_density(dp), dp, d, t, n_paths, seed);
}

}  // namespace starbdi::diffusion
