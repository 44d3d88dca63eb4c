#ifndef STARBDI_ASYMPTOTICS_HPP
#define STARBDI_ASYMPTOTICS_HPP

#include <utility>
#include <vector>

#include "starbdi/model.hpp"

namespace starbdi::asymptotics {

// Long-time limit of the law.  For lambda < mu the limit is a
// zero-modified negative binomial: P(N=k) = theta_d pi(k) + (1-theta_d) 1{k=0}
// with pi the negative binomial pmf and
// theta_d = 1 / (1 - (1-1/d)(1-lambda/mu)^{alpha/lambda}).
// For lambda >= mu every state probability tends to zero; that case is
// returned tagged `degenerate` rather than as an error.
struct AsymptoticLaw {
  ModelParams params;
  bool degenerate = false;
  int k_max = 0;
  double p0_limit = 0.0;
  std::vector<double> pk_limit;  // index k-1 holds lim P(k,t), k = 1..k_max
  std::vector<double> nb_pi;     // pi(k), k = 0..k_max
  double theta_d = 0.0;
  double mean = 0.0;
  double variance = 0.0;

  double at(int k) const {
    if (k == 0) return p0_limit;
    if (k < 1 || k > k_max) throw DomainError("AsymptoticLaw: k out of range");
    return pk_limit[static_cast<std::size_t>(k) - 1];
  }
};

AsymptoticLaw limit_law(const ModelParams& params, int k_max);

// Closed-form mean and variance of the limit law; lambda < mu required.
std::pair<double, double> limit_moments(const ModelParams& params);

}  // namespace starbdi::asymptotics

#endif
