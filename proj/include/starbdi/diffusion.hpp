#ifndef STARBDI_DIFFUSION_HPP
#define STARBDI_DIFFUSION_HPP

#include <cstdint>

#include "starbdi/model.hpp"

namespace starbdi::diffusion {

// Scaled parameterization
//   alpha = gamma_t mu_t / eps,  lambda = mu_t / eps + beta_t,  mu = mu_t / eps.
// The scaled process eps * N(t) converges weakly (eps -> 0) to a
// diffusion on the star graph with drift beta_t x + gamma_t mu_t and
// infinitesimal variance 2 mu_t x.
struct DiffusionParams {
  double gamma_t = 1.0;   // dimensionless shape-driving ratio, > 0
  double mu_t = 1.0;      // scale rate, > 0
  double beta_t = -0.5;   // drift slope, any sign
  double epsilon = 0.01;  // scaling parameter, > 0

  void validate() const {
    if (!(gamma_t > 0.0)) throw DomainError("DiffusionParams: gamma_t > 0 required");
    if (!(mu_t > 0.0)) throw DomainError("DiffusionParams: mu_t > 0 required");
    if (!(epsilon > 0.0)) throw DomainError("DiffusionParams: epsilon > 0 required");
  }
};

// The exact mapped rate triple with the ray count supplied by the caller.
ModelParams induced_ctmc_params(const DiffusionParams& dp, int d);

// Gamma rate of the transient density: psi(t) = (beta/mu) / (e^{beta t} - 1),
// with the removable-singularity limit 1/(mu t) at beta = 0.
double psi(const DiffusionParams& dp, double t);

struct GammaDensity {
  double shape = 1.0;
  double rate = 1.0;

  double pdf(double x) const;
  double cdf(double x) const;
  double mean() const { return shape / rate; }
  double mode() const { return shape >= 1.0 ? (shape - 1.0) / rate : 0.0; }
};

// h(x,t): gamma with shape gamma_t and rate psi(t).
GammaDensity transient_density(const DiffusionParams& dp, double t);

// Stationary gamma law, rate |beta|/mu; requires beta_t < 0.
GammaDensity stationary_density(const DiffusionParams& dp);

// Fokker-Planck residual of the closed-form density at (x,t) by central
// finite differences, normalized by the local scale of the three terms.
double fokker_planck_residual(const DiffusionParams& dp, double x, double t,
                              double step = 1e-4);

// Probability flux (beta x + gamma mu) h - d/dx (mu x h) at position x,
// evaluated with a central difference for the divergence term.  The
// zero-flux boundary condition makes this vanish as x -> 0.
double boundary_flux(const DiffusionParams& dp, double t, double x = 1e-6,
                     double step = 1e-7);

// Kolmogorov-Smirnov distance between the empirical law of eps*level
// under the induced CTMC at time t and the gamma transient density.
// The lattice atom at each eps*k (including the origin atom) occupies
// the bin [eps k, eps (k+1)), so the empirical CDF is compared against
// the gamma CDF at the bin edges.
struct ProbeResult {
  double ks_distance = 0.0;
  double stderr_band = 0.0;  // 0.5/sqrt(n): max binomial SE of a CDF point
};

ProbeResult convergence_probe(const DiffusionParams& dp, int d, double t,
                              long n_paths, std::uint64_t seed);

// Same comparison against the stationary law (beta_t < 0).
ProbeResult stationary_probe(const DiffusionParams& dp, int d, double t,
                             long n_paths, std::uint64_t seed);

}  // namespace starbdi::diffusion

#endif
