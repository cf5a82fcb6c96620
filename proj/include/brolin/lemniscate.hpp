#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <vector>

#include "brolin/equilibrium.hpp"
#include "brolin/errors.hpp"
#include "brolin/escape_rate.hpp"
#include "brolin/harmonic.hpp"
#include "brolin/rational_map.hpp"
#include "brolin/rng.hpp"

namespace brolin {

/// Contour polylines plus the grid they were traced on.
struct LevelSetTrace {
  std::vector<std::vector<Complex>> polylines;
  std::vector<bool> closed;
  BBox bbox;
  int nx = 0, ny = 0;

  std::size_t vertex_count() const {
    std::size_t n = 0;
    for (const auto& p : polylines) n += p.size();
    return n;
  }
  std::vector<Complex> vertices() const {
    std::vector<Complex> out;
    for (const auto& p : polylines) out.insert(out.end(), p.begin(), p.end());
    return out;
  }
};

/// {z : |(cF)_0^(n)(1, z)| = 1} with c real positive.
struct NormalizedLemniscate {
  double c = 1.0;
  int n = 1;
  HomogeneousLift lift;             // cF
  std::optional<Poly> denom_poly;   // (cF)_0^(n)(1, .), expanded only for n <= 2
  std::optional<LevelSetTrace> trace;

  int degree() const { return lift.degree(); }
};

/// e^{-(d-1)(I + G^F(0,1))}, checked against G^{cF}(0,1) = -I.
inline Complex normalization_constant(const EscapeRateEvaluator& ev, double energy_value) {
  if (!std::isfinite(energy_value)) throw ValidationError("energy must be finite");
  const double d = ev.degree();
  const double c = std::exp(-(d - 1.0) * (energy_value + ev.base_height()));
  if (!(c > 0.0) || !std::isfinite(c))
    throw NumericalError("NormalizationMismatch", "normalization constant is not a positive finite number");
  const EscapeRateEvaluator scaled(ev.lift().scaled(c), ev.tol(), ev.max_depth());
  if (std::abs(scaled.base_height() + energy_value) > 1e-6)
    throw NumericalError("NormalizationMismatch", "G^{cF}(0,1) does not equal -I");
  return c;
}

inline Complex normalization_constant(const RationalMap& /*f*/, const EscapeRateEvaluator& ev, double energy_value) {
  return normalization_constant(ev, energy_value);
}

inline NormalizedLemniscate make_lemniscate(const EscapeRateEvaluator& ev, double energy_value, int n = 1) {
  if (n < 1) throw ValidationError("lemniscate order must be >= 1");
  NormalizedLemniscate L;
  L.c = normalization_constant(ev, energy_value).real();
  L.n = n;
  L.lift = ev.lift().scaled(L.c);
  if (n == 1) L.denom_poly = L.lift.f0_affine();
  if (n == 2) L.denom_poly = compose_lift(L.lift, L.lift).f0_affine();
  return L;
}

/// log|(cF)_0^(n)(1, z)|. Order 1 evaluates the polynomial directly; higher
/// orders telescope the orbit of (1, z) with renormalization at each step.
inline double lemniscate_log_value(const HomogeneousLift& cf, int n, Complex z) {
  if (n == 1) return std::log(std::abs(cf.f0_affine()(z)));
  const auto orbit = lift_orbit(cf, z, n);
  return orbit.log_scale + std::log(std::abs(orbit.w[0]));
}

inline double lemniscate_log_value(const NormalizedLemniscate& L, Complex z) {
  if (L.n == 1 && L.denom_poly) return std::log(std::abs((*L.denom_poly)(z)));
  return lemniscate_log_value(L.lift, L.n, z);
}

/// |(cF)_0^(n)(1, z)|; underflow gives 0.
inline double lemniscate_value(const NormalizedLemniscate& L, Complex z) { return std::exp(lemniscate_log_value(L, z)); }

/// Max relative gap between (cF)^(2)_0(1, z) from the composed lift and
/// (cF)_0(1, f(z)) (cF)_0(1, z)^d, over random z in [-2, 2]^2 away from poles.
inline double composition_identity_residual(const HomogeneousLift& f, Complex c, int samples = 100,
                                            std::uint64_t seed = 0) {
  const auto cf = f.scaled(c);
  const auto cf2 = compose_lift(cf, cf);
  const Poly p0 = cf.f0_affine(), p1 = cf.f1_affine(), q0 = cf2.f0_affine();
  const int d = cf.degree();
  auto rng = rng_stream(seed, 0);
  double worst = 0.0;
  for (int k = 0, tries = 0; k < samples && tries < 100 * samples; ++tries) {
    const Complex z{4.0 * rng.uniform() - 2.0, 4.0 * rng.uniform() - 2.0};
    const Complex a = p0(z);
    if (std::abs(a) <= 1e-6 * cf.max_coeff()) continue;  // near f^-1(inf)
    const Complex lhs = q0(z);
    const Complex rhs = p0(p1(z) / a) * std::pow(a, d);
    const double scale = std::max({std::abs(lhs), std::abs(rhs), 1e-300});
    worst = std::max(worst, std::abs(lhs - rhs) / scale);
    ++k;
  }
  return worst;
}

inline double composition_identity_residual(const RationalMap& f, Complex c, int samples = 100,
                                            std::uint64_t seed = 0) {
  return composition_identity_residual(f.lift(), c, samples, seed);
}

namespace detail {

// Contour of phi = 0 by marching squares; crossings are placed by linear
// interpolation on phi and then bisected along the edge.
inline LevelSetTrace march(const std::function<double(Complex)>& phi, BBox bbox, int nx, int ny) {
  if (nx < 64 || ny < 64) throw ValidationError("tracing grid must be at least 64x64");
  const double dx = bbox.width() / nx, dy = bbox.height() / ny;
  auto node = [&](int i, int j) { return Complex(bbox.x0 + i * dx, bbox.y0 + j * dy); };
  auto clamp = [](double v) { return std::isfinite(v) ? v : (v > 0 ? 700.0 : -700.0); };

  std::vector<double> val(static_cast<std::size_t>(nx + 1) * (ny + 1));
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i) val[static_cast<std::size_t>(j) * (nx + 1) + i] = clamp(phi(node(i, j)));
  auto at = [&](int i, int j) { return val[static_cast<std::size_t>(j) * (nx + 1) + i]; };

  const long horizontal = static_cast<long>(ny + 1) * nx;
  auto h_edge = [&](int i, int j) { return static_cast<long>(j) * nx + i; };
  auto v_edge = [&](int i, int j) { return horizontal + static_cast<long>(j) * (nx + 1) + i; };

  std::map<long, Complex> crossing;
  auto cross = [&](long id, Complex a, Complex b, double fa, double fb) {
    if (crossing.count(id)) return;
    double t = fa / (fa - fb);
    Complex lo = a, hi = b;
    double flo = fa;
    Complex p = a + t * (b - a);
    for (int it = 0; it < 60; ++it) {
      const double fp = clamp(phi(p));
      if (fp == 0.0) break;
      if ((fp > 0) == (flo > 0)) {
        lo = p;
        flo = fp;
      } else {
        hi = p;
      }
      p = 0.5 * (lo + hi);
      if (std::abs(hi - lo) < 1e-15 * (1.0 + std::abs(p))) break;
    }
    crossing[id] = p;
  };

  std::vector<std::pair<long, long>> segments;
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const double f[4] = {at(i, j), at(i + 1, j), at(i + 1, j + 1), at(i, j + 1)};
      const bool s[4] = {f[0] > 0, f[1] > 0, f[2] > 0, f[3] > 0};
      // edges: 0 bottom, 1 right, 2 top, 3 left
      const long id[4] = {h_edge(i, j), v_edge(i + 1, j), h_edge(i, j + 1), v_edge(i, j)};
      const int ends[4][2] = {{0, 1}, {1, 2}, {3, 2}, {0, 3}};
      const Complex corner[4] = {node(i, j), node(i + 1, j), node(i + 1, j + 1), node(i, j + 1)};
      std::vector<int> hit;
      for (int e = 0; e < 4; ++e)
        if (s[ends[e][0]] != s[ends[e][1]]) {
          hit.push_back(e);
          cross(id[e], corner[ends[e][0]], corner[ends[e][1]], f[ends[e][0]], f[ends[e][1]]);
        }
      if (hit.size() == 2) {
        segments.emplace_back(id[hit[0]], id[hit[1]]);
      } else if (hit.size() == 4) {
        const bool center = clamp(phi(node(i, j) + Complex(0.5 * dx, 0.5 * dy))) > 0;
        if (center == s[0]) {
          segments.emplace_back(id[0], id[1]);
          segments.emplace_back(id[2], id[3]);
        } else {
          segments.emplace_back(id[3], id[0]);
          segments.emplace_back(id[1], id[2]);
        }
      }
    }

  LevelSetTrace out;
  out.bbox = bbox;
  out.nx = nx;
  out.ny = ny;
  if (segments.empty()) throw ValidationError("no crossing of the level on the grid", "EmptyLevelSet");

  std::map<long, std::vector<std::size_t>> incident;
  for (std::size_t k = 0; k < segments.size(); ++k) {
    incident[segments[k].first].push_back(k);
    incident[segments[k].second].push_back(k);
  }
  std::vector<bool> used(segments.size(), false);
  auto other = [&](std::size_t seg, long e) { return segments[seg].first == e ? segments[seg].second : segments[seg].first; };
  auto next_segment = [&](long e) -> std::optional<std::size_t> {
    for (auto k : incident[e])
      if (!used[k]) return k;
    return std::nullopt;
  };
  // open chains start at edges with a single incident segment (grid boundary)
  std::vector<long> starts;
  for (const auto& [e, segs] : incident)
    if (segs.size() == 1) starts.push_back(e);
  for (const auto& [e, segs] : incident) starts.push_back(e);
  for (long start : starts) {
    while (next_segment(start)) {
      std::vector<long> chain{start};
      long cur = start;
      while (auto s = next_segment(cur)) {
        used[*s] = true;
        cur = other(*s, cur);
        chain.push_back(cur);
      }
      const bool closed = chain.size() > 2 && chain.front() == chain.back();
      if (closed) chain.pop_back();
      std::vector<Complex> line;
      for (long e : chain) line.push_back(crossing.at(e));
      out.polylines.push_back(std::move(line));
      out.closed.push_back(closed);
    }
  }
  return out;
}

inline void verify_trace(const LevelSetTrace& t, const std::function<double(Complex)>& value, double tol) {
  for (const auto& v : t.vertices())
    if (!(std::abs(value(v) - 1.0) < tol))
      throw NumericalError("TraceVerification", "traced vertex misses the level by more than trace_tol");
}

}  // namespace detail

/// Contours of {|P| = 1} for a plain polynomial.
inline LevelSetTrace trace_level_set(const Poly& p, BBox bbox, int nx, int ny, double trace_tol = 1e-3) {
  if (p.degree() < 1) throw ValidationError("constant polynomial has no level curve", "EmptyLevelSet");
  auto phi = [&](Complex z) { return std::log(std::abs(p(z))); };
  auto t = detail::march(phi, bbox, nx, ny);
  detail::verify_trace(t, [&](Complex z) { return std::abs(p(z)); }, trace_tol);
  return t;
}

/// Contours of L_{(cF)^n}.
inline LevelSetTrace trace_level_set(const NormalizedLemniscate& L, BBox bbox, int nx, int ny,
                                     double trace_tol = 1e-3) {
  if (L.lift.f0_affine().degree() < 1)
    throw ValidationError("F_0(1, .) is constant, the lemniscate is empty or the whole plane", "EmptyLevelSet");
  auto phi = [&](Complex z) { return lemniscate_log_value(L, z); };
  auto t = detail::march(phi, bbox, nx, ny);
  detail::verify_trace(t, [&](Complex z) { return lemniscate_value(L, z); }, trace_tol);
  return t;
}

struct ClaimStatistics {
  double julia_containment = 0.0;  // max over witnesses of ||(cF)_0(1, z)| - 1|
  double level_coincidence = 0.0;  // both inclusions between L_{cF} and L_{(cF)^2}
  double forward_invariance = 0.0; // ||(cF)_0(1, f(v))| - 1| on L_{cF}
  double doubling = 0.0;           // |(p(f v) - I) - d (p(v) - I)| on L_{cF}
};

/// The four lemniscate statistics for an order-1 lemniscate. The reverse
/// inclusion traces L_{(cF)^2} on the same grid as `trace`.
inline ClaimStatistics claim_checks(const RationalMap& f, const NormalizedLemniscate& L,
                                    const EmpiricalMeasure& witnesses, const LevelSetTrace& trace,
                                    const EscapeRateEvaluator& ev, double energy_value) {
  if (L.lift.f0_affine().degree() < 1)
    throw ValidationError("F_0(1, .) is constant; lemniscate checks are vacuous", "DegenerateLemniscate");
  if (L.n != 1) throw ValidationError("claim checks take the order-1 lemniscate");
  if (witnesses.empty() && trace.vertex_count() == 0) throw ValidationError("need witnesses or a trace");

  ClaimStatistics s;
  for (const auto& z : witnesses.points)
    s.julia_containment = std::max(s.julia_containment, std::abs(lemniscate_value(L, z) - 1.0));

  NormalizedLemniscate L2 = L;
  L2.n = 2;
  L2.denom_poly.reset();
  L2.trace.reset();
  const double d = f.degree();
  for (const auto& v : trace.vertices()) {
    s.level_coincidence = std::max(s.level_coincidence, std::abs(lemniscate_value(L2, v) - 1.0));
    const auto fv = evaluate_map(f, ProjectivePoint::affine(v));
    if (fv.is_infinity()) {
      s.forward_invariance = std::numeric_limits<double>::infinity();
      continue;
    }
    const Complex w = fv.to_affine();
    s.forward_invariance = std::max(s.forward_invariance, std::abs(lemniscate_value(L, w) - 1.0));
    s.doubling = std::max(s.doubling,
                          std::abs((ev.potential(w) - energy_value) - d * (ev.potential(v) - energy_value)));
  }
  // With f^2 a polynomial (cF)^(2)_0(1, .) is constant and L_{(cF)^2} is the
  // whole plane, so only the forward inclusion carries information.
  const auto f2_den = compose_lift(L.lift, L.lift).f0();
  const double f2_max = max_abs(f2_den);
  bool constant = true;
  for (std::size_t j = 1; j < f2_den.size(); ++j) constant = constant && std::abs(f2_den[j]) <= f.tolerances().lead * f2_max;
  if (constant || trace.vertex_count() == 0) return s;
  try {
    const auto reverse = trace_level_set(L2, trace.bbox, trace.nx, trace.ny);
    for (const auto& v : reverse.vertices())
      s.level_coincidence = std::max(s.level_coincidence, std::abs(lemniscate_value(L, v) - 1.0));
  } catch (const ValidationError& e) {
    if (e.kind() != "EmptyLevelSet") throw;
    s.level_coincidence = std::numeric_limits<double>::infinity();
  }
  return s;
}

}  // namespace brolin
