#ifndef STARBDI_CLI_RUN_HPP
#define STARBDI_CLI_RUN_HPP

#include <cstdint>
#include <string>

#include "starbdi/diffusion.hpp"
#include "starbdi/model.hpp"

namespace starbdi::cli {

enum class Sub { Transient, Simulate, Asymptotic, Diffusion, Combinatorics, Validate };
enum class MethodSel { Auto, Series, Volterra, Theorem25, MC };

struct GridSpec {
  double start = 0.0;
  double stop = 1.0;
  int points = 50;
};

// Parsed command configuration.  `run` executes it and writes CSV
// artifacts; identical configs (seed included) produce byte-identical
// output.
struct RunConfig {
  Sub sub = Sub::Transient;
  ModelParams params;
  diffusion::DiffusionParams dp;
  GridSpec t;                       // time grid
  GridSpec x{0.1, 5.0, 25};        // diffusion space grid
  int k_show = 1;                   // highest level emitted by `transient`
  int k_max = 200;                  // truncation / marginal cap
  long n_paths = 100000;
  std::uint64_t seed = 12345;
  MethodSel method = MethodSel::Auto;
  std::string out;                  // empty: stdout
  unsigned n_max = 30;              // combinatorics table size
  bool check = false;               // combinatorics --check
  bool quick = false;               // validate --quick
  bool probe = false;               // diffusion --probe
  double probe_t = 1.0;
  long probe_paths = 10000;
};

// "start:stop:points"
GridSpec parse_grid(const std::string& s);

// Exit status: 0 success, 1 computational failure (domain/convergence
// errors are reported on stderr by the caller).
int run(const RunConfig& cfg);

// 17-significant-digit decimal formatting used by every CSV artifact.
std::string fmt17(double v);

}  // namespace starbdi::cli

#endif
