#ifndef STARBDI_RNG_HPP
#define STARBDI_RNG_HPP

#include <cmath>
#include <cstdint>

namespace starbdi::rng {

// splitmix64 finalizer (Steele, Lea, Flood 2014).
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Counter-based stream derivation: path i of a run seeded with `seed`
// uses stream_seed(seed, i).  Two mixing rounds keep distinct counters
// from producing overlapping splitmix sequences.
inline std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t counter) {
  std::uint64_t a = mix64(seed);
  std::uint64_t b = mix64(counter ^ 0x632BE59BD9B4E019ULL);
  return mix64(a ^ (b + 0x9E3779B97F4A7C15ULL * counter));
}

// Minimal 64-bit generator with platform-independent output.  The
// standard distributions are implementation-defined, which would break
// bit-identical reproducibility across toolchains, so uniforms are
// built from the raw bits directly.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    state_ += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform on [0,1) with 53-bit resolution.
  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Uniform on (0,1]; safe as a log argument.
  double uniform01_open_low() {
    return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53;
  }

  // Exponential holding time; strictly positive.
  double exponential(double rate) {
    double dt;
    do {
      dt = -std::log(uniform01_open_low()) / rate;
    } while (!(dt > 0.0));
    return dt;
  }

 private:
  std::uint64_t state_;
};

}  // namespace starbdi::rng

#endif
