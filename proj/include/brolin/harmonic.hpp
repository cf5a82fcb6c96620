#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <numbers>
#include <optional>
#include <vector>

#include "brolin/equilibrium.hpp"
#include "brolin/errors.hpp"
#include "brolin/parallel.hpp"
#include "brolin/rng.hpp"

namespace brolin {

enum class CellLabel : std::uint8_t { DInf, Complement, NearJulia };

struct BBox {
  double x0 = -2.0, y0 = -2.0, x1 = 2.0, y1 = 2.0;

  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
  bool contains(Complex z) const { return z.real() >= x0 && z.real() < x1 && z.imag() >= y0 && z.imag() < y1; }
  double distance(Complex z) const {
    const double dx = std::max({x0 - z.real(), 0.0, z.real() - x1});
    const double dy = std::max({y0 - z.imag(), 0.0, z.imag() - y1});
    return std::hypot(dx, dy);
  }
};

/// Cell labels over a bbox plus the exact distance from every cell center to
/// the nearest non-D_INF cell center.
struct GridLabeling {
  BBox bbox;
  int nx = 0, ny = 0;
  double delta = 0.0;
  std::vector<CellLabel> labels;
  std::vector<double> distance;
  EmpiricalMeasure julia_witnesses;

  double dx() const { return bbox.width() / nx; }
  double dy() const { return bbox.height() / ny; }
  double diag() const { return std::hypot(dx(), dy()); }
  std::size_t index(int i, int j) const { return static_cast<std::size_t>(j) * nx + i; }
  CellLabel label(int i, int j) const { return labels[index(i, j)]; }
  Complex center(int i, int j) const { return {bbox.x0 + (i + 0.5) * dx(), bbox.y0 + (j + 0.5) * dy()}; }

  /// Cell containing z, or nullopt outside the bbox.
  std::optional<std::pair<int, int>> cell_of(Complex z) const {
    if (!bbox.contains(z)) return std::nullopt;
    const int i = std::min(nx - 1, static_cast<int>((z.real() - bbox.x0) / dx()));
    const int j = std::min(ny - 1, static_cast<int>((z.imag() - bbox.y0) / dy()));
    return std::pair{i, j};
  }

  std::size_t count(CellLabel l) const { return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), l)); }

  /// Smallest box holding every non-D_INF cell.
  BBox complement_box() const {
    BBox b{1e300, 1e300, -1e300, -1e300};
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i)
        if (label(i, j) != CellLabel::DInf) {
          b.x0 = std::min(b.x0, bbox.x0 + i * dx());
          b.x1 = std::max(b.x1, bbox.x0 + (i + 1) * dx());
          b.y0 = std::min(b.y0, bbox.y0 + j * dy());
          b.y1 = std::max(b.y1, bbox.y0 + (j + 1) * dy());
        }
    return b;
  }

  /// Max modulus over NEAR_JULIA cells, padded by half a diagonal.
  double julia_hull_radius() const {
    double r = 0.0;
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i)
        if (label(i, j) == CellLabel::NearJulia) r = std::max(r, std::abs(center(i, j)));
    return r + 0.5 * diag();
  }

  /// Centers of NEAR_JULIA cells that touch a D_INF cell.
  std::vector<Complex> frontier() const {
    std::vector<Complex> out;
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i) {
        if (label(i, j) != CellLabel::NearJulia) continue;
        const bool edge = (i > 0 && label(i - 1, j) == CellLabel::DInf) ||
                          (i + 1 < nx && label(i + 1, j) == CellLabel::DInf) ||
                          (j > 0 && label(i, j - 1) == CellLabel::DInf) ||
                          (j + 1 < ny && label(i, j + 1) == CellLabel::DInf);
        if (edge) out.push_back(center(i, j));
      }
    return out;
  }
};

namespace detail {

// 1D squared distance transform (lower envelope of parabolas), spacing^2 = w2.
inline void distance_transform_1d(const double* f, double* out, int n, std::size_t stride, double w2,
                                  std::vector<int>& v, std::vector<double>& z, std::vector<double>& buf) {
  for (int q = 0; q < n; ++q) buf[q] = f[q * stride];
  int k = 0;
  v[0] = 0;
  z[0] = -std::numeric_limits<double>::infinity();
  z[1] = std::numeric_limits<double>::infinity();
  auto meet = [&](int q, int p) { return ((buf[q] + w2 * q * q) - (buf[p] + w2 * p * p)) / (2.0 * w2 * (q - p)); };
  for (int q = 1; q < n; ++q) {
    double s = meet(q, v[k]);
    while (s <= z[k]) s = meet(q, v[--k]);
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = std::numeric_limits<double>::infinity();
  }
  k = 0;
  for (int q = 0; q < n; ++q) {
    while (z[k + 1] < q) ++k;
    const double t = q - v[k];
    out[q * stride] = w2 * t * t + buf[v[k]];
  }
}

// Exact Euclidean distance from each cell center to the nearest marked cell center.
inline std::vector<double> euclidean_distance(const std::vector<bool>& marked, int nx, int ny, double dx, double dy) {
  constexpr double kFar = 1e30;
  std::vector<double> g(marked.size());
  for (std::size_t i = 0; i < marked.size(); ++i) g[i] = marked[i] ? 0.0 : kFar;
  const int m = std::max(nx, ny);
  std::vector<int> v(m + 1);
  std::vector<double> z(m + 2), buf(m);
  for (int i = 0; i < nx; ++i) distance_transform_1d(&g[i], &g[i], ny, nx, dy * dy, v, z, buf);
  for (int j = 0; j < ny; ++j)
    distance_transform_1d(&g[static_cast<std::size_t>(j) * nx], &g[static_cast<std::size_t>(j) * nx], nx, 1,
                          dx * dx, v, z, buf);
  for (auto& x : g) x = std::sqrt(x);
  return g;
}

}  // namespace detail

/// Labels cells near the witnesses NEAR_JULIA, floods D_INF from the frame
/// through the remaining cells and calls everything unreached COMPLEMENT.
/// delta <= 0 selects two cell diagonals.
inline GridLabeling label_grid(const EmpiricalMeasure& witnesses, BBox bbox, int nx, int ny, double delta = 0.0) {
  if (witnesses.size() < 1000)
    throw ValidationError("need at least 1000 Julia witnesses, got " + std::to_string(witnesses.size()),
                          "InsufficientWitnesses");
  if (nx < 8 || ny < 8) throw ValidationError("grid must be at least 8x8");
  if (!(bbox.width() > 0.0 && bbox.height() > 0.0)) throw ValidationError("empty bbox");
  {
    double lx = 1e300, hx = -1e300, ly = 1e300, hy = -1e300;
    for (const auto& p : witnesses.points) {
      lx = std::min(lx, p.real());
      hx = std::max(hx, p.real());
      ly = std::min(ly, p.imag());
      hy = std::max(hy, p.imag());
    }
    const double mx = 0.25 * (hx - lx), my = 0.25 * (hy - ly);
    if (lx - mx < bbox.x0 || hx + mx > bbox.x1 || ly - my < bbox.y0 || hy + my > bbox.y1)
      throw ValidationError("bbox must contain the witness hull with a 25% margin", "BBoxTooSmall");
  }

  GridLabeling g;
  g.bbox = bbox;
  g.nx = nx;
  g.ny = ny;
  g.delta = delta > 0.0 ? delta : 2.0 * g.diag();
  g.julia_witnesses = witnesses;
  const std::size_t cells = static_cast<std::size_t>(nx) * ny;

  std::vector<bool> near(cells, false);
  const int ri = static_cast<int>(std::ceil(g.delta / g.dx())) + 1, rj = static_cast<int>(std::ceil(g.delta / g.dy())) + 1;
  for (const auto& p : witnesses.points) {
    const int ci = static_cast<int>(std::floor((p.real() - bbox.x0) / g.dx()));
    const int cj = static_cast<int>(std::floor((p.imag() - bbox.y0) / g.dy()));
    for (int j = std::max(0, cj - rj); j <= std::min(ny - 1, cj + rj); ++j)
      for (int i = std::max(0, ci - ri); i <= std::min(nx - 1, ci + ri); ++i)
        if (std::abs(g.center(i, j) - p) <= g.delta) near[g.index(i, j)] = true;
  }

  // flood fill from the exterior super-cell, which touches every frame cell
  std::vector<bool> outside(cells, false);
  std::deque<std::pair<int, int>> queue;
  auto seed = [&](int i, int j) {
    const auto k = g.index(i, j);
    if (!near[k] && !outside[k]) {
      outside[k] = true;
      queue.emplace_back(i, j);
    }
  };
  for (int i = 0; i < nx; ++i) {
    seed(i, 0);
    seed(i, ny - 1);
  }
  for (int j = 0; j < ny; ++j) {
    seed(0, j);
    seed(nx - 1, j);
  }
  while (!queue.empty()) {
    const auto [i, j] = queue.front();
    queue.pop_front();
    if (i > 0) seed(i - 1, j);
    if (i + 1 < nx) seed(i + 1, j);
    if (j > 0) seed(i, j - 1);
    if (j + 1 < ny) seed(i, j + 1);
  }

  g.labels.resize(cells);
  std::vector<bool> solid(cells);
  for (std::size_t k = 0; k < cells; ++k) {
    g.labels[k] = near[k] ? CellLabel::NearJulia : outside[k] ? CellLabel::DInf : CellLabel::Complement;
    solid[k] = g.labels[k] != CellLabel::DInf;
  }
  if (std::none_of(solid.begin(), solid.end(), [](bool b) { return b; }))
    throw ValidationError("no Julia witnesses fall inside the bbox", "InsufficientWitnesses");
  g.distance = detail::euclidean_distance(solid, nx, ny, g.dx(), g.dy());
  return g;
}

inline GridLabeling label_grid(const RationalMap& /*f*/, const EmpiricalMeasure& witnesses, BBox bbox, int nx, int ny,
                               double delta = 0.0) {
  return label_grid(witnesses, bbox, nx, ny, delta);
}

struct WalkerStats {
  double mean_steps = 0.0;
  std::uint64_t max_steps = 0;
  std::uint64_t abandoned = 0;
};

struct HarmonicSample {
  EmpiricalMeasure hits;
  WalkerStats walker_stats;
  double r_launch = 0.0;
  double eps_hit = 0.0;
};

struct HarmonicConfig {
  std::size_t n_walkers = 100000;
  std::uint64_t seed = 0;
  double r_launch = 0.0;  // <= 0: four times the NEAR_JULIA hull radius
  double eps_hit = 0.0;   // <= 0: half a cell diagonal
  std::uint64_t max_steps = 100000;
  unsigned threads = 0;
};

namespace detail {

// Hitting point on the circle |w - c| = R of Brownian motion started at z
// outside it. The inversion z -> c + R^2 / conj(z - c) fixes the circle and
// carries the exterior kernel to the interior Poisson kernel, which is the
// image of the uniform law under a disk automorphism.
inline Complex exterior_disk_hit(Complex z, Complex c, double R, double phi) {
  const Complex a = R / std::conj(z - c);
  const Complex e = std::polar(1.0, phi);
  return c + R * (e + a) / (1.0 + std::conj(a) * e);
}

}  // namespace detail

/// Walk-on-spheres estimate of harmonic measure with pole at infinity. Walkers
/// start uniformly on |z| = R_launch; the uniform law there is exactly the
/// harmonic measure of that circle seen from infinity.
inline HarmonicSample sample_harmonic(const GridLabeling& grid, const HarmonicConfig& cfg) {
  if (cfg.n_walkers < 1) throw ValidationError("n_walkers must be >= 1");
  const double hull = grid.julia_hull_radius();
  const double r_launch = cfg.r_launch > 0.0 ? cfg.r_launch : 4.0 * hull;
  if (r_launch < 4.0 * hull * (1.0 - 1e-12))
    throw ValidationError("R_launch must be at least 4x the Julia hull radius");
  const double eps = cfg.eps_hit > 0.0 ? cfg.eps_hit : 0.5 * grid.diag();
  const double diag = grid.diag();
  const BBox kbox = grid.complement_box();
  const Complex kc{0.5 * (kbox.x0 + kbox.x1), 0.5 * (kbox.y0 + kbox.y1)};
  const double kr = 0.5 * std::hypot(kbox.width(), kbox.height());

  std::vector<std::optional<Complex>> hit(cfg.n_walkers);
  std::vector<std::uint64_t> steps(cfg.n_walkers, 0);
  parallel_for(cfg.n_walkers, cfg.threads, [&](std::size_t w) {
    auto rng = rng_stream(cfg.seed, w);
    Complex z = std::polar(r_launch, rng.angle());
    std::uint64_t s = 0;
    for (; s < cfg.max_steps; ++s) {
      if (const auto cell = grid.cell_of(z)) {
        const double r = grid.distance[grid.index(cell->first, cell->second)] - diag;
        if (r < eps) {
          hit[w] = z;
          break;
        }
        z += std::polar(r, rng.angle());
      } else if (std::abs(z - kc) > kr) {
        z = detail::exterior_disk_hit(z, kc, kr, rng.angle());
      } else {
        z += std::polar(kbox.distance(z), rng.angle());
      }
    }
    steps[w] = s;
  });

  HarmonicSample out;
  out.r_launch = r_launch;
  out.eps_hit = eps;
  std::vector<Complex> pts;
  double total = 0.0;
  for (std::size_t w = 0; w < cfg.n_walkers; ++w) {
    total += static_cast<double>(steps[w]);
    out.walker_stats.max_steps = std::max(out.walker_stats.max_steps, steps[w]);
    if (hit[w]) {
      pts.push_back(*hit[w]);
    } else {
      ++out.walker_stats.abandoned;
    }
  }
  out.walker_stats.mean_steps = total / static_cast<double>(cfg.n_walkers);
  out.hits = EmpiricalMeasure::uniform(std::move(pts));
  return out;
}

inline HarmonicSample sample_harmonic(const RationalMap& /*f*/, const GridLabeling& grid, std::size_t n_walkers,
                                      std::uint64_t seed, double r_launch = 0.0, double eps_hit = 0.0) {
  HarmonicConfig cfg;
  cfg.n_walkers = n_walkers;
  cfg.seed = seed;
  cfg.r_launch = r_launch;
  cfg.eps_hit = eps_hit;
  return sample_harmonic(grid, cfg);
}

struct FrostmanResidual {
  double max_dev = 0.0;
  double mean = 0.0;
  std::optional<double> min_margin;
};

/// Spread of p_nu over probes on K around their mean, and the smallest excess
/// over that mean at probes in D_INF.
inline FrostmanResidual frostman_residual(const EmpiricalMeasure& nu, const std::vector<Complex>& probes_on_k,
                                          const std::vector<Complex>& probes_in_d = {}, double smoothing = 0.0) {
  if (nu.empty()) throw ValidationError("frostman residual of an empty measure");
  if (probes_on_k.empty()) throw ValidationError("need at least one probe on K");
  std::vector<double> p(probes_on_k.size());
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = empirical_potential(nu, probes_on_k[i], smoothing);
  FrostmanResidual r;
  for (double v : p) r.mean += v;
  r.mean /= static_cast<double>(p.size());
  for (double v : p) r.max_dev = std::max(r.max_dev, std::abs(v - r.mean));
  for (const auto& z : probes_in_d) {
    const double m = empirical_potential(nu, z, smoothing) - r.mean;
    r.min_margin = r.min_margin ? std::min(*r.min_margin, m) : m;
  }
  return r;
}

/// `count` frontier cell centers chosen without replacement from the seed.
inline std::vector<Complex> frontier_probes(const GridLabeling& grid, std::size_t count, std::uint64_t seed) {
  auto pool = grid.frontier();
  auto rng = rng_stream(seed, 0);
  const std::size_t k = std::min(count, pool.size());
  for (std::size_t i = 0; i < k; ++i) std::swap(pool[i], pool[i + rng.below(pool.size() - i)]);
  pool.resize(k);
  return pool;
}

}  // namespace brolin
