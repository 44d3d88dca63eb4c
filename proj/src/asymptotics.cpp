#include "starbdi/asymptotics.hpp"

#include <cmath>
#include <string>

namespace starbdi::asymptotics {

AsymptoticLaw limit_law(const ModelParams& params, int k_max) {
  params.validate();
  if (k_max < 1) throw DomainError("limit_law: k_max >= 1 required");

  AsymptoticLaw law;
  law.params = params;
  law.k_max = k_max;
  law.pk_limit.assign(static_cast<std::size_t>(k_max), 0.0);
  law.nb_pi.assign(static_cast<std::size_t>(k_max) + 1, 0.0);

  if (params.lambda >= params.mu) {
    law.degenerate = true;
    return law;
  }

  const double a = params.alpha / params.lambda;
  const double rho = params.lambda / params.mu;
  const double c = std::pow(1.0 - rho, a);  // pi(0)
  const double d = static_cast<double>(params.d);
  law.theta_d = 1.0 / (1.0 - (1.0 - 1.0 / d) * c);
  law.p0_limit = c / (d * (1.0 - (1.0 - 1.0 / d) * c));

  // Negative binomial terms via log-Pochhammer ratios: (a)_k / k! grows
  // factorially and would overflow directly.
  const double lg_a = std::lgamma(a);
  const double log_rho = std::log(rho);
  for (int k = 0; k <= k_max; ++k) {
    double lp = std::log(c) + std::lgamma(a + k) - lg_a - std::lgamma(k + 1.0) + k * log_rho;
    law.nb_pi[static_cast<std::size_t>(k)] = std::exp(lp);
    if (k >= 1)
      law.pk_limit[static_cast<std::size_t>(k) - 1] =
          law.theta_d * law.nb_pi[static_cast<std::size_t>(k)];
  }

  // Mixture identity at k = 0 must reproduce the closed p0 limit.
  double mix0 = law.theta_d * law.nb_pi[0] + (1.0 - law.theta_d);
  if (std::abs(mix0 - law.p0_limit) > 1e-12 * std::max(1.0, std::abs(law.p0_limit)))
    throw std::logic_error("limit_law: mixture identity violated at k = 0");

  auto [m, v] = limit_moments(params);
  law.mean = m;
  law.variance = v;
  return law;
}

std::pair<double, double> limit_moments(const ModelParams& params) {
  params.validate();
  if (!(params.lambda < params.mu))
    throw DomainError("limit_moments: lambda < mu required for a nondegenerate limit");

  const double a = params.alpha;
  const double mu = params.mu, la = params.lambda;
  const double c = std::pow(1.0 - la / mu, a / la);
  const double d = static_cast<double>(params.d);
  const double theta_d = 1.0 / (1.0 - (1.0 - 1.0 / d) * c);

  double mean = theta_d * a / (mu - la);
  double variance = theta_d * theta_d * a * mu / ((mu - la) * (mu - la)) *
                    (1.0 - (1.0 - 1.0 / d) * (a / mu + 1.0) * c);
  return {mean, variance};
}

}  // namespace starbdi::asymptotics
