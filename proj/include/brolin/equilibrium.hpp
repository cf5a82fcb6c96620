#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <vector>

#include "brolin/errors.hpp"
#include "brolin/escape_rate.hpp"
#include "brolin/parallel.hpp"
#include "brolin/rational_map.hpp"
#include "brolin/rng.hpp"

namespace brolin {

/// Weighted finite point cloud in the plane approximating a probability measure.
struct EmpiricalMeasure {
  std::vector<Complex> points;
  std::vector<double> weights;

  std::size_t size() const { return points.size(); }
  bool empty() const { return points.empty(); }

  static EmpiricalMeasure uniform(std::vector<Complex> pts) {
    EmpiricalMeasure m;
    const double w = pts.empty() ? 0.0 : 1.0 / static_cast<double>(pts.size());
    m.weights.assign(pts.size(), w);
    m.points = std::move(pts);
    return m;
  }

  double total_weight() const {
    double s = 0.0;
    for (double w : weights) s += w;
    return s;
  }

  double max_modulus() const {
    double r = 0.0;
    for (const auto& p : points) r = std::max(r, std::abs(p));
    return r;
  }
};

/// Logarithmic potential sum_i w_i log|z - z_i|; distances below `smoothing`
/// are clamped to it.
inline double empirical_potential(const EmpiricalMeasure& mu, Complex z, double smoothing = 0.0) {
  double acc = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i)
    acc += mu.weights[i] * std::log(std::max(std::abs(z - mu.points[i]), smoothing));
  return acc;
}

struct SamplerConfig {
  std::size_t n_samples = 10000;
  int burn_in = 30;
  std::uint64_t seed = 0;
  int full_tree_depth = 0;  // 0 disables the exhaustive-tree mode
  int chains = 64;
  unsigned threads = 0;
  std::optional<Complex> start;  // explicit start; rejected if exceptional

  void validate() const {
    if (n_samples < 1) throw ValidationError("n_samples must be >= 1");
    if (burn_in < 10) throw ValidationError("burn_in must be >= 10");
    if (chains < 1) throw ValidationError("chains must be >= 1");
  }
};

inline const Complex kDefaultStart{1.6180339, 0.7320508};

namespace detail {

inline bool near_any(const ProjectivePoint& p, const std::vector<ProjectivePoint>& set, double tol) {
  return std::any_of(set.begin(), set.end(), [&](const ProjectivePoint& e) { return chordal(p, e) <= tol; });
}

inline ProjectivePoint random_preimage(const RationalMap& f, const ProjectivePoint& p, RngStream& rng) {
  const auto fib = preimages(f, p);
  auto pick = static_cast<int>(rng.below(static_cast<std::uint64_t>(f.degree())));
  for (std::size_t i = 0; i < fib.points.size(); ++i) {
    pick -= fib.multiplicities[i];
    if (pick < 0) return fib.points[i];
  }
  return fib.points.back();
}

}  // namespace detail

inline EmpiricalMeasure full_preimage_tree(const RationalMap& f, Complex z0, int depth);

/// Samples mu_f by random inverse iteration: independent chains, each with
/// its own (seed, chain) stream, step to a preimage chosen with probability
/// multiplicity / d and emit every point after burn-in. The result is
/// concatenated in chain order, so it does not depend on the thread count.
/// With full_tree_depth > 0 the exhaustive tree over the start is returned.
inline EmpiricalMeasure sample_julia(const RationalMap& f, const SamplerConfig& cfg) {
  cfg.validate();
  if (cfg.full_tree_depth > 0) return full_preimage_tree(f, cfg.start.value_or(kDefaultStart), cfg.full_tree_depth);
  const auto exceptional = exceptional_set(f);
  constexpr double kAvoid = 1e-9;

  ProjectivePoint start = ProjectivePoint::affine(cfg.start.value_or(kDefaultStart));
  if (detail::near_any(start, exceptional, kAvoid)) {
    if (cfg.start)
      throw ValidationError("start point lies in the exceptional set", "ExceptionalStart");
    auto rng = rng_stream(cfg.seed, ~std::uint64_t{0});
    while (detail::near_any(start, exceptional, kAvoid))
      start = ProjectivePoint::affine(std::polar(0.5 + 2.0 * rng.uniform(), rng.angle()));
  }

  const std::size_t chains = std::min<std::size_t>(static_cast<std::size_t>(cfg.chains), cfg.n_samples);
  std::vector<std::size_t> offset(chains + 1, 0);
  for (std::size_t c = 0; c < chains; ++c)
    offset[c + 1] = offset[c] + cfg.n_samples / chains + (c < cfg.n_samples % chains ? 1 : 0);

  std::vector<Complex> points(cfg.n_samples);
  parallel_for(chains, cfg.threads, [&](std::size_t c) {
    auto rng = rng_stream(cfg.seed, c);
    ProjectivePoint p = start;
    for (int k = 0; k < cfg.burn_in; ++k) p = detail::random_preimage(f, p, rng);
    std::size_t out = offset[c];
    while (out < offset[c + 1]) {
      p = detail::random_preimage(f, p, rng);
      if (p.is_infinity()) continue;  // affine samples only
      points[out++] = p.to_affine();
    }
  });
  return EmpiricalMeasure::uniform(std::move(points));
}

/// All d^n preimages of z0 under f^n, weighted by multiplicity / d^n.
inline EmpiricalMeasure full_preimage_tree(const RationalMap& f, Complex z0, int depth) {
  if (depth < 1) throw ValidationError("tree depth must be >= 1");
  const double leaves = std::pow(static_cast<double>(f.degree()), depth);
  if (leaves > 1e6) throw ValidationError("d^n exceeds 10^6 preimages", "TreeTooLarge");
  const auto root = ProjectivePoint::affine(z0);
  if (detail::near_any(root, exceptional_set(f), 1e-9))
    throw ValidationError("tree root lies in the exceptional set", "ExceptionalStart");

  std::vector<std::pair<ProjectivePoint, double>> level{{root, 1.0}};
  for (int k = 0; k < depth; ++k) {
    std::vector<std::pair<ProjectivePoint, double>> next;
    next.reserve(level.size() * static_cast<std::size_t>(f.degree()));
    for (const auto& [p, w] : level) {
      const auto fib = preimages(f, p);
      for (std::size_t i = 0; i < fib.points.size(); ++i)
        next.emplace_back(fib.points[i], w * fib.multiplicities[i] / f.degree());
    }
    level = std::move(next);
  }
  EmpiricalMeasure out;
  for (const auto& [p, w] : level) {
    if (p.is_infinity())
      throw ValidationError("preimage tree reaches infinity; the measure is not affine", "PreimageAtInfinity");
    out.points.push_back(p.to_affine());
    out.weights.push_back(w);
  }
  return out;
}

/// I_{mu_f} estimated as the integral of the closed-form potential against mu.
inline double energy(const EmpiricalMeasure& mu, const EscapeRateEvaluator& ev) {
  if (mu.empty()) throw ValidationError("energy of an empty measure");
  double acc = 0.0;
  for (std::size_t i = 0; i < mu.size(); ++i) acc += mu.weights[i] * ev.potential(mu.points[i]);
  return acc;
}

inline EmpiricalMeasure pushforward(const RationalMap& f, const EmpiricalMeasure& mu) {
  EmpiricalMeasure out;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    const auto q = evaluate_map(f, ProjectivePoint::affine(mu.points[i]));
    if (q.is_infinity()) continue;
    out.points.push_back(q.to_affine());
    out.weights.push_back(mu.weights[i]);
  }
  return out;
}

/// Max over a probe circle of |p_{f_* mu} - p_mu|. The circle defaults to
/// 1.5 times the largest modulus in either support.
inline double balance_residual(const RationalMap& f, const EmpiricalMeasure& mu, double probe_radius = 0.0,
                               int probes = 64) {
  const auto pushed = pushforward(f, mu);
  if (probe_radius <= 0.0) probe_radius = 1.5 * std::max({mu.max_modulus(), pushed.max_modulus(), 0.5});
  double worst = 0.0;
  for (int k = 0; k < probes; ++k) {
    const Complex z = std::polar(probe_radius, 2.0 * std::numbers::pi * (k + 0.5) / probes);
    worst = std::max(worst, std::abs(empirical_potential(pushed, z) - empirical_potential(mu, z)));
  }
  return worst;
}

}  // namespace brolin
