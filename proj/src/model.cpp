#include "starbdi/model.hpp"

#include <cmath>
#include <string>

#include "starbdi/rng.hpp"

namespace starbdi {

double EmpiricalMarginal::stderr_of(int k) const {
  double p = at(k);
  return std::sqrt(p * (1.0 - p) / static_cast<double>(n_paths));
}

namespace {

// One jump of the chain; returns the holding time drawn before it.
inline double step(const ModelParams& p, StarState& s, rng::SplitMix64& gen) {
  double dt;
  if (s.is_origin()) {
    dt = gen.exponential(static_cast<double>(p.d) * p.alpha);
    int ray = 1 + static_cast<int>(gen.uniform01() * p.d);
    if (ray > p.d) ray = p.d;
    s.ray = ray;
    s.level = 1;
  } else {
    double k = static_cast<double>(s.level);
    double up = p.alpha + p.lambda * k;
    double total = up + p.mu * k;
    dt = gen.exponential(total);
    if (gen.uniform01() * total < up) {
      if (++s.level > kLevelGuard)
        throw LevelOverflow("simulate_path: level exceeded guard at " +
                            std::to_string(kLevelGuard) +
                            " (supercritical blow-up?)");
    } else {
      if (--s.level == 0) s.ray = 0;
    }
  }
  return dt;
}

}  // namespace

Trajectory simulate_path(const ModelParams& params, double t_end, std::uint64_t seed) {
  params.validate();
  if (!(t_end > 0.0)) throw DomainError("simulate_path: t_end > 0 required");

  rng::SplitMix64 gen(rng::stream_seed(seed, 0));
  Trajectory traj;
  traj.seed = seed;
  StarState s;
  double t = 0.0;
  traj.events.push_back({0.0, s});
  for (;;) {
    StarState next = s;
    double dt = step(params, next, gen);
    if (t + dt > t_end) break;
    t += dt;
    s = next;
    traj.events.push_back({t, s});
  }
  return traj;
}

StarState simulate_state_at(const ModelParams& params, double t, std::uint64_t seed) {
  rng::SplitMix64 gen(rng::stream_seed(seed, 0));
  StarState s;
  double now = 0.0;
  for (;;) {
    StarState next = s;
    double dt = step(params, next, gen);
    if (now + dt > t) return s;
    now += dt;
    s = next;
  }
}

EmpiricalMarginal empirical_marginal(const ModelParams& params, double t,
                                     long n_paths, std::uint64_t seed, int k_max) {
  params.validate();
  if (!(t > 0.0)) throw DomainError("empirical_marginal: t > 0 required");
  if (n_paths < 1) throw DomainError("empirical_marginal: n_paths >= 1 required");
  if (k_max < 1) throw DomainError("empirical_marginal: k_max >= 1 required");

  std::vector<long> level_counts(static_cast<std::size_t>(k_max) + 1, 0);
  long overflow = 0;
  std::vector<long> ray_counts(static_cast<std::size_t>(params.d), 0);

  for (long i = 0; i < n_paths; ++i) {
    StarState s = simulate_state_at(params, t, rng::stream_seed(seed, static_cast<std::uint64_t>(i)));
    if (s.is_origin()) {
      ++level_counts[0];
    } else {
      ++ray_counts[static_cast<std::size_t>(s.ray) - 1];
      if (s.level <= k_max)
        ++level_counts[static_cast<std::size_t>(s.level)];
      else
        ++overflow;
    }
  }

  EmpiricalMarginal m;
  m.t = t;
  m.n_paths = n_paths;
  m.k_max = k_max;
  double n = static_cast<double>(n_paths);
  m.p0_hat = static_cast<double>(level_counts[0]) / n;
  m.pk_hat.resize(static_cast<std::size_t>(k_max));
  for (int k = 1; k <= k_max; ++k)
    m.pk_hat[static_cast<std::size_t>(k) - 1] =
        static_cast<double>(level_counts[static_cast<std::size_t>(k)]) / n;
  m.overflow_hat = static_cast<double>(overflow) / n;
  m.per_ray_counts = std::move(ray_counts);
  return m;
}

}  // namespace starbdi
