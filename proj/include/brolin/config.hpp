#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "brolin/errors.hpp"
#include "brolin/harmonic.hpp"
#include "brolin/tolerances.hpp"

namespace brolin {

/// Run settings shared by the CLI and the verdict pipeline. The defaults are
/// the reference settings the verdict thresholds were calibrated at; the grid
/// has to be fine for the harmonic sample to resolve the fattened Julia set,
/// and it needs dense witnesses to stay leak-free.
struct Config {
  std::uint64_t seed = 1;
  std::size_t samples = 4000000;  // Julia witnesses
  std::size_t walkers = 4000000;
  int depth = 64;                 // escape-rate series depth
  int burn_in = 30;
  int chains = 64;
  int nx = 8192, ny = 8192;       // harmonic labeling grid
  std::optional<BBox> bbox;      // unset: square box around the witness hull
  int trace_nx = 256, trace_ny = 256;
  unsigned threads = 0;
  Tolerances tolerances;

  void validate() const {
    if (samples < 1) throw ValidationError("samples must be >= 1");
    if (walkers < 1) throw ValidationError("walkers must be >= 1");
    if (depth < 1) throw ValidationError("depth must be >= 1");
    if (burn_in < 10) throw ValidationError("burn_in must be >= 10");
    if (chains < 1) throw ValidationError("chains must be >= 1");
    if (nx < 8 || ny < 8) throw ValidationError("grid must be at least 8x8");
    if (trace_nx < 64 || trace_ny < 64) throw ValidationError("trace grid must be at least 64x64");
    if (bbox && !(bbox->width() > 0.0 && bbox->height() > 0.0)) throw ValidationError("bbox is degenerate");
    const auto& t = tolerances;
    for (double v : {t.lead, t.res, t.gcd, t.form, t.root_residual, t.cluster, t.escape, t.pole_guard, t.trace,
                     t.normalization, t.infinity_chordal})
      if (!(v > 0.0)) throw ValidationError("tolerances must be positive");
    if (t.root_max_iter < 1 || t.escape_depth < 1) throw ValidationError("iteration limits must be positive");
  }

  SamplerConfig sampler() const {
    SamplerConfig c;
    c.n_samples = samples;
    c.burn_in = burn_in;
    c.seed = seed;
    c.chains = chains;
    c.threads = threads;
    return c;
  }
};

}  // namespace brolin
