#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "brolin/calibration.hpp"
#include "brolin/config.hpp"
#include "brolin/equilibrium.hpp"
#include "brolin/escape_rate.hpp"
#include "brolin/harmonic.hpp"
#include "brolin/lemniscate.hpp"
#include "brolin/rational_map.hpp"
#include "brolin/suite.hpp"

namespace brolin {

struct SpreadStatistic {
  double max_p = 0.0, min_p = 0.0, mean_p = 0.0;
  double spread = 0.0;
  std::size_t count = 0;
};

/// Julia witnesses keep a chordal distance above delta_inf from infinity.
inline bool infinity_in_fatou(const EmpiricalMeasure& witnesses, double delta_inf = 0.05) {
  if (witnesses.empty()) throw ValidationError("no witnesses");
  double closest = 1.0;
  for (const auto& z : witnesses.points) closest = std::min(closest, chordal_to_infinity(z));
  return closest > delta_inf;
}

inline bool infinity_in_fatou(const RationalMap& f, const EscapeRateEvaluator& /*ev*/, const EmpiricalMeasure& witnesses) {
  return infinity_in_fatou(witnesses, f.tolerances().infinity_chordal);
}

/// Range of the potential over the witnesses.
inline SpreadStatistic julia_potential_spread(const EscapeRateEvaluator& ev, const EmpiricalMeasure& witnesses,
                                              double delta_inf = 0.05, unsigned threads = 0) {
  if (witnesses.size() < 10000)
    throw ValidationError("spread needs at least 10^4 witnesses, got " + std::to_string(witnesses.size()));
  if (!infinity_in_fatou(witnesses, delta_inf))
    throw ValidationError("Julia witnesses approach infinity", "InfinityInJulia");
  std::vector<double> p(witnesses.size());
  parallel_for(p.size(), threads, [&](std::size_t i) { p[i] = ev.potential(witnesses.points[i]); });
  SpreadStatistic s;
  s.count = p.size();
  s.max_p = *std::max_element(p.begin(), p.end());
  s.min_p = *std::min_element(p.begin(), p.end());
  for (double v : p) s.mean_p += v;
  s.mean_p /= static_cast<double>(p.size());
  s.spread = s.max_p - s.min_p;
  return s;
}

/// `count` points on a circle about 0 enclosing both supports with 50% room.
inline std::vector<Complex> enclosing_probes(const EmpiricalMeasure& a, const EmpiricalMeasure& b, int count = 64) {
  const double r = 1.5 * std::max({a.max_modulus(), b.max_modulus(), 1e-3});
  std::vector<Complex> out;
  for (int k = 0; k < count; ++k) out.push_back(std::polar(r, 2.0 * std::numbers::pi * (k + 0.5) / count));
  return out;
}

/// Max over probes of |p_mu - p_nu|.
inline double measure_discrepancy(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu,
                                  const std::vector<Complex>& probes) {
  if (mu.empty() || nu.empty()) throw ValidationError("measure discrepancy of an empty measure");
  double worst = 0.0;
  for (const auto& z : probes) worst = std::max(worst, std::abs(empirical_potential(mu, z) - empirical_potential(nu, z)));
  return worst;
}

inline double measure_discrepancy(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu) {
  return measure_discrepancy(mu, nu, enclosing_probes(mu, nu));
}

/// Square box centered on the witness hull with 30% of the larger extent as margin.
inline BBox auto_bbox(const EmpiricalMeasure& witnesses) {
  double lx = 1e300, hx = -1e300, ly = 1e300, hy = -1e300;
  for (const auto& p : witnesses.points) {
    lx = std::min(lx, p.real());
    hx = std::max(hx, p.real());
    ly = std::min(ly, p.imag());
    hy = std::max(hy, p.imag());
  }
  const double e = std::max({hx - lx, hy - ly, 1e-6});
  const double h = 0.8 * e, cx = 0.5 * (lx + hx), cy = 0.5 * (ly + hy);
  return {cx - h, cy - h, cx + h, cy + h};
}

/// Seed for the harmonic stage, decorrelated from the sampler seed.
inline std::uint64_t harmonic_seed(std::uint64_t seed) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

enum class VerdictStatus { consistent, inconsistent, inconclusive, refused, failed };

inline const char* to_string(VerdictStatus s) {
  switch (s) {
    case VerdictStatus::consistent: return "consistent";
    case VerdictStatus::inconsistent: return "inconsistent";
    case VerdictStatus::inconclusive: return "inconclusive";
    case VerdictStatus::refused: return "refused";
    case VerdictStatus::failed: return "failed";
  }
  return "failed";
}

struct AlgebraicSide {
  bool is_poly = false;
  bool is_square_poly = false;
  std::optional<SpecialForm> special_form;
  std::vector<ProjectivePoint> exceptional;
};

inline AlgebraicSide classify(const RationalMap& f) {
  AlgebraicSide a;
  a.is_poly = is_polynomial(f);
  a.is_square_poly = is_square_polynomial(f);
  a.special_form = classify_special_form(f);
  a.exceptional = exceptional_set(f);
  return a;
}

struct StageFailure {
  std::string stage;
  std::string category;
  std::string kind;
  std::string message;
};

struct VerdictReport {
  std::string map_id;
  int d = 0;
  AlgebraicSide algebraic;
  bool infinity_in_fatou = false;
  std::optional<SpreadStatistic> spread;
  std::optional<double> harmonic_discrepancy;
  std::optional<double> energy;
  std::optional<double> base_height;
  std::optional<double> lemniscate_c;
  std::optional<ClaimStatistics> claims;
  std::optional<WalkerStats> walker_stats;
  std::optional<BBox> bbox;
  bool consistent = false;
  VerdictStatus status = VerdictStatus::failed;
  double tau_spread = calibration::kTauSpread;
  double equality_band = calibration::kEqualityBand;
  std::uint64_t sampler_seed = 0, harmonic_seed = 0;
  std::vector<std::string> notes;
  std::optional<StageFailure> failure;
  std::map<std::string, double> timings;  // seconds, per stage
};

/// Status from the algebraic flag and the spread. Only a square-polynomial
/// map with a large spread is inconsistent; a small or middling spread for a
/// non-square map is inconclusive at finite sampling.
inline VerdictStatus decide(bool is_square_poly, double spread, double tau) {
  if (is_square_poly) return spread < tau ? VerdictStatus::consistent : VerdictStatus::inconsistent;
  return spread >= 2.0 * tau ? VerdictStatus::consistent : VerdictStatus::inconclusive;
}

namespace detail {

inline const char* category_name(ErrorCategory c) {
  switch (c) {
    case ErrorCategory::validation: return "validation";
    case ErrorCategory::numerical: return "numerical";
    case ErrorCategory::io: return "io";
  }
  return "unknown";
}

}  // namespace detail

/// Classification, escape rate, sampling, energy, harmonic measure, spread,
/// discrepancy and, for non-polynomial maps, the lemniscate checks. A stage
/// that throws ends the run with a partial report naming the stage.
inline VerdictReport run_verdict(const RationalMap& f, const Config& cfg, const std::string& map_id = "map") {
  cfg.validate();
  VerdictReport r;
  r.map_id = map_id;
  r.d = f.degree();
  r.sampler_seed = cfg.seed;
  r.harmonic_seed = harmonic_seed(cfg.seed);

  std::string stage;
  auto timed = [&](const std::string& name, auto&& body) {
    stage = name;
    const auto t0 = std::chrono::steady_clock::now();
    body();
    r.timings[name] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  };

  try {
    timed("classify", [&] { r.algebraic = classify(f); });
    std::optional<EscapeRateEvaluator> ev;
    timed("escape_rate", [&] {
      ev.emplace(f.lift(), cfg.tolerances.escape, cfg.depth);
      r.base_height = ev->base_height();
    });
    EmpiricalMeasure mu;
    timed("julia_sample", [&] { mu = sample_julia(f, cfg.sampler()); });
    r.infinity_in_fatou = infinity_in_fatou(mu, cfg.tolerances.infinity_chordal);
    if (!r.infinity_in_fatou) {
      r.status = VerdictStatus::refused;
      r.notes.push_back("Julia witnesses reach infinity; the dichotomy needs infinity in the Fatou set");
      return r;
    }
    timed("energy", [&] { r.energy = energy(mu, *ev); });
    timed("spread", [&] {
      r.spread = julia_potential_spread(*ev, mu, cfg.tolerances.infinity_chordal, cfg.threads);
    });
    timed("harmonic_sample", [&] {
      r.bbox = cfg.bbox ? *cfg.bbox : auto_bbox(mu);
      const auto grid = label_grid(mu, *r.bbox, cfg.nx, cfg.ny);
      HarmonicConfig hc;
      hc.n_walkers = cfg.walkers;
      hc.seed = r.harmonic_seed;
      hc.threads = cfg.threads;
      const auto nu = sample_harmonic(grid, hc);
      r.walker_stats = nu.walker_stats;
      r.harmonic_discrepancy = measure_discrepancy(mu, nu.hits);
    });
    r.consistent = (r.algebraic.is_square_poly == (r.spread->spread < r.tau_spread));
    r.status = decide(r.algebraic.is_square_poly, r.spread->spread, r.tau_spread);
    if (!r.algebraic.is_poly) {
      timed("lemniscate", [&] {
        const auto L = make_lemniscate(*ev, *r.energy);
        r.lemniscate_c = L.c;
        const auto trace = trace_level_set(L, *r.bbox, cfg.trace_nx, cfg.trace_ny, cfg.tolerances.trace);
        r.claims = claim_checks(f, L, mu, trace, *ev, *r.energy);
      });
    }
  } catch (const Error& e) {
    r.failure = StageFailure{stage, detail::category_name(e.category()), e.kind(), e.what()};
    if (stage != "lemniscate") {
      r.status = VerdictStatus::failed;
      r.consistent = false;
    }
  }
  return r;
}

/// run_verdict over the built-in calibration set, in suite order. `progress`
/// is called after each map.
inline std::vector<VerdictReport> run_suite(const Config& cfg,
                                            const std::function<void(const VerdictReport&)>& progress = {}) {
  std::vector<VerdictReport> out;
  for (const auto& m : calibration_suite()) {
    out.push_back(run_verdict(m.build(cfg.tolerances), cfg, m.id));
    if (progress) progress(out.back());
  }
  return out;
}

}  // namespace brolin
