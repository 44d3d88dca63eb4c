#ifndef STARBDI_MODEL_HPP
#define STARBDI_MODEL_HPP

#include <cstdint>
#include <vector>

#include "starbdi/errors.hpp"

namespace starbdi {

// Parameter regime driving formula selection.  EqualRates and
// AlphaEqLambda select the closed transient series of the two analytic
// regimes; the remaining three label the lambda-vs-mu comparison used
// by the cycle-time representation of p(0,t).
enum class Regime { EqualRates, AlphaEqLambda, Subcritical, Supercritical, Critical };
enum class Criticality { Subcritical, Critical, Supercritical };

// Rate triple of the walk on the d-ray star graph:
//   q(0, 1_j)        = alpha          (origin -> first state of ray j)
//   q(k_j, (k+1)_j)  = alpha + lambda k
//   q(k_j, (k-1)_j)  = mu k
struct ModelParams {
  double alpha = 0.5;
  double lambda = 0.5;
  double mu = 0.5;
  int d = 1;

  void validate() const {
    if (!(alpha > 0.0)) throw DomainError("ModelParams: alpha must be > 0");
    if (!(lambda > 0.0)) throw DomainError("ModelParams: lambda must be > 0");
    if (!(mu > 0.0)) throw DomainError("ModelParams: mu must be > 0");
    if (d < 1) throw DomainError("ModelParams: d must be >= 1");
  }

  // Exact comparisons, no epsilon snapping: callers wanting a limit
  // regime must pass exactly equal rates.
  Regime regime() const {
    if (mu == lambda && alpha == lambda) return Regime::EqualRates;
    if (alpha == lambda) return Regime::AlphaEqLambda;
    if (lambda < mu) return Regime::Subcritical;
    if (lambda > mu) return Regime::Supercritical;
    return Regime::Critical;
  }

  Criticality criticality() const {
    if (lambda < mu) return Criticality::Subcritical;
    if (lambda > mu) return Criticality::Supercritical;
    return Criticality::Critical;
  }
};

// Position on the star graph: the origin, or level k >= 1 on ray j in [1,d].
struct StarState {
  int ray = 0;            // 0 at the origin
  std::int64_t level = 0;  // 0 at the origin

  bool is_origin() const { return level == 0; }
  bool operator==(const StarState&) const = default;
};

struct TrajectoryEvent {
  double time;
  StarState state;
  bool operator==(const TrajectoryEvent&) const = default;
};

// Timestamped path of one exact simulation; first entry is (0, origin).
struct Trajectory {
  std::uint64_t seed = 0;
  std::vector<TrajectoryEvent> events;
  const StarState& final_state() const { return events.back().state; }
  bool operator==(const Trajectory&) const = default;
};

// Monte Carlo estimate of the time-t marginal.  Levels above k_max are
// aggregated into the overflow bucket, so
// p0_hat + sum_k pk_hat + overflow_hat = 1 exactly.
struct EmpiricalMarginal {
  double t = 0.0;
  long n_paths = 0;
  int k_max = 0;
  double p0_hat = 0.0;
  std::vector<double> pk_hat;        // index k-1 holds level k, k = 1..k_max
  double overflow_hat = 0.0;
  std::vector<long> per_ray_counts;  // occupancy among non-origin samples

  double at(int k) const {
    if (k == 0) return p0_hat;
    if (k < 1 || k > k_max) throw DomainError("EmpiricalMarginal: level out of range");
    return pk_hat[static_cast<std::size_t>(k) - 1];
  }
  double stderr_of(int k) const;
};

// Exact event-driven (Gillespie) path up to t_end, reproducible from
// the seed.  Paths that climb past the level guard abort loudly.
Trajectory simulate_path(const ModelParams& params, double t_end, std::uint64_t seed);

// Final state only; the fast path used by the estimators below.
StarState simulate_state_at(const ModelParams& params, double t, std::uint64_t seed);

// Marginal over n_paths independent trajectories; per-path seeds are
// derived from `seed` by a counter-based split, so the result is
// deterministic and independent of evaluation order.
EmpiricalMarginal empirical_marginal(const ModelParams& params, double t,
                                     long n_paths, std::uint64_t seed,
                                     int k_max = 200);

// Simulated level cap; exceeding it throws LevelOverflow.
inline constexpr std::int64_t kLevelGuard = std::int64_t{1} << 40;

}  // namespace starbdi

#endif
