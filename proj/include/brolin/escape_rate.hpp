#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <vector>

#include "brolin/errors.hpp"
#include "brolin/lift.hpp"
#include "brolin/rng.hpp"
#include "brolin/tolerances.hpp"

namespace brolin {

namespace detail {

inline double radical_inverse(std::uint64_t i, std::uint64_t base) {
  double inv = 1.0 / static_cast<double>(base), f = inv, r = 0.0;
  while (i > 0) {
    r += f * static_cast<double>(i % base);
    i /= base;
    f *= inv;
  }
  return r;
}

// Point on the unit sphere of C^2 from three numbers in [0, 1): |z0|^2 = u is
// uniform under the invariant measure, the two phases are independent.
inline std::array<Complex, 2> sphere_point(double u, double a, double b) {
  const double r0 = std::sqrt(u), r1 = std::sqrt(1.0 - u);
  return {std::polar(r0, 2.0 * std::numbers::pi * a), std::polar(r1, 2.0 * std::numbers::pi * b)};
}

inline double norm2(const std::array<Complex, 2>& v) { return std::hypot(std::abs(v[0]), std::abs(v[1])); }

}  // namespace detail

/// Evaluates the escape rate G^F(Z) = lim log||F^n(Z)|| / d^n in renormalized
/// form: log||Z|| + sum_k d^-k log||F(W_{k-1})|| with W_k the orbit of Z pushed
/// back to the unit sphere after every step. The series is cut once the
/// geometric tail bound drops below tol.
class EscapeRateEvaluator {
public:
  static constexpr int kBoundSamples = 10000;

  explicit EscapeRateEvaluator(HomogeneousLift lift, double tol = 1e-12, int max_depth = 64)
      : lift_(std::move(lift)), tol_(tol), max_depth_(max_depth) {
    if (lift_.degree() < 2) throw ValidationError("escape rate needs degree > 1");
    if (!(tol_ > 0.0) || max_depth_ < 1) throw ValidationError("escape rate tol/depth must be positive");
    double lo = 1e300, hi = -1e300;
    for (std::uint64_t i = 1; i <= kBoundSamples; ++i) {
      const auto w = detail::sphere_point(detail::radical_inverse(i, 2), detail::radical_inverse(i, 3),
                                          detail::radical_inverse(i, 5));
      const double s = detail::norm2(lift_(w[0], w[1]));
      lo = std::min(lo, s);
      hi = std::max(hi, s);
    }
    if (!(lo > 0.0)) throw NumericalError("DegenerateEvaluation", "lift vanishes on a sphere sample");
    sphere_min_ = lo;
    sphere_max_ = hi;
    // safety factor 2 on the sampled log range
    log_bound_ = std::max(2.0 * std::max(std::abs(std::log(lo)), std::abs(std::log(hi))), 1e-300);
    base_height_ = (*this)(Complex(0.0), Complex(1.0));
  }

  EscapeRateEvaluator(HomogeneousLift lift, const Tolerances& tol)
      : EscapeRateEvaluator(std::move(lift), tol.escape, tol.escape_depth) {}

  const HomogeneousLift& lift() const { return lift_; }
  int degree() const { return lift_.degree(); }
  double tol() const { return tol_; }
  int max_depth() const { return max_depth_; }
  double sphere_min() const { return sphere_min_; }
  double sphere_max() const { return sphere_max_; }

  /// Bound on the neglected tail after k terms.
  double tail_bound(int k) const {
    return log_bound_ * std::pow(static_cast<double>(degree()), -k) / (degree() - 1.0);
  }

  /// G^F(z0, z1) for any nonzero pair.
  double operator()(Complex z0, Complex z1) const { return evaluate(z0, z1, max_depth_, true); }

  /// Same series cut at exactly `terms` terms, without the tolerance stop.
  double truncated(Complex z0, Complex z1, int terms) const { return evaluate(z0, z1, terms, false); }

  /// G^F(0, 1).
  double base_height() const { return base_height_; }

  /// p_{mu_f}(z) = G^F(1, z) - G^F(0, 1).
  double potential(Complex z) const { return (*this)(Complex(1.0), z) - base_height_; }

private:
  double evaluate(Complex z0, Complex z1, int depth, bool stop_on_tol) const {
    const double n = std::hypot(std::abs(z0), std::abs(z1));
    if (!(n > 0.0) || !std::isfinite(n)) throw ValidationError("escape rate of (0, 0) or non-finite point");
    std::array<Complex, 2> w{z0 / n, z1 / n};
    double g = std::log(n);
    const double d = degree();
    double weight = 1.0;
    for (int k = 1; k <= depth; ++k) {
      const auto fw = lift_(w[0], w[1]);
      const double s = detail::norm2(fw);
      if (!(s > 0.0)) throw NumericalError("DegenerateEvaluation", "F(W) vanished on the unit sphere");
      weight /= d;
      g += weight * std::log(s);
      w = {fw[0] / s, fw[1] / s};
      if (stop_on_tol && log_bound_ * weight / (d - 1.0) < tol_) return g;
    }
    if (stop_on_tol)
      throw NumericalError("DepthExceeded", "escape-rate tail bound not met within depth " +
                                                std::to_string(depth));
    return g;
  }

  HomogeneousLift lift_;
  double tol_;
  int max_depth_;
  double sphere_min_ = 0.0, sphere_max_ = 0.0, log_bound_ = 0.0;
  double base_height_ = 0.0;
};

/// Constants attached to a map once the pipeline has computed them.
struct PotentialProfile {
  double base_height = 0.0;           // G^F(0, 1)
  std::optional<double> energy;       // I_{mu_f}
  std::optional<Complex> lift_scale_c;
};

/// Orbit of (1, z) under the lift, in log-scaled form: F^n(1, z) = e^log_scale * w.
struct ScaledOrbitPoint {
  double log_scale;
  std::array<Complex, 2> w;
};

inline ScaledOrbitPoint lift_orbit(const HomogeneousLift& lift, Complex z, int n) {
  const double n0 = std::hypot(1.0, std::abs(z));
  ScaledOrbitPoint out{std::log(n0), {1.0 / n0, z / n0}};
  const double d = lift.degree();
  for (int k = 0; k < n; ++k) {
    const auto fw = lift(out.w[0], out.w[1]);
    const double s = detail::norm2(fw);
    out.log_scale = d * out.log_scale + std::log(s);
    out.w = {fw[0] / s, fw[1] / s};
  }
  return out;
}

/// | p(f^n z) + log|F_0^(n)(1, z)| - d^n p(z) - (d^n - 1) G^F(0, 1) |
inline double pullback_residual(const EscapeRateEvaluator& ev, int n, Complex z, double pole_guard = 1e-12) {
  if (n < 1) throw ValidationError("pullback order must be >= 1");
  const auto orbit = lift_orbit(ev.lift(), z, n);
  if (std::abs(orbit.w[0]) <= pole_guard)
    throw NumericalError("PoleProximity", "z is (numerically) in f^-n(infinity)");
  const Complex fz = orbit.w[1] / orbit.w[0];
  const double log_f0 = orbit.log_scale + std::log(std::abs(orbit.w[0]));
  const double dn = std::pow(static_cast<double>(ev.degree()), n);
  const double lhs = ev.potential(fz) + log_f0;
  const double rhs = dn * ev.potential(z) + (dn - 1.0) * ev.base_height();
  return std::abs(lhs - rhs);
}

struct FunctionalResiduals {
  double fe = 0.0;       // |G(F Z) - d G(Z)|
  double hom = 0.0;      // |G(cZ) - G(Z) - log|c||
  double scale = 0.0;    // |G^{cF}(Z) - G^F(Z) - log|c| / (d - 1)|
  double iterate = 0.0;  // |G^{F^2}(Z) - G^F(Z)|

  double max() const { return std::max({fe, hom, scale, iterate}); }
};

/// Max residuals of the escape-rate identities over random unit-norm points
/// and c in {0.5, 2, 1+i}.
inline FunctionalResiduals functional_equation_residuals(const EscapeRateEvaluator& ev, int samples,
                                                         std::uint64_t seed) {
  if (samples < 1) throw ValidationError("samples must be >= 1");
  const std::array<Complex, 3> cs{Complex(0.5), Complex(2.0), Complex(1.0, 1.0)};
  std::vector<EscapeRateEvaluator> scaled;
  for (const auto& c : cs) scaled.emplace_back(ev.lift().scaled(c), ev.tol(), ev.max_depth());
  const EscapeRateEvaluator second(compose_lift(ev.lift(), ev.lift()), ev.tol(), ev.max_depth());
  const double d = ev.degree();

  auto rng = rng_stream(seed, 0);
  FunctionalResiduals r;
  for (int i = 0; i < samples; ++i) {
    const double u = rng.uniform(), a = rng.uniform(), b = rng.uniform();
    const auto w = detail::sphere_point(u, a, b);
    const double g = ev(w[0], w[1]);
    const auto fw = ev.lift()(w[0], w[1]);
    r.fe = std::max(r.fe, std::abs(ev(fw[0], fw[1]) - d * g));
    for (std::size_t k = 0; k < cs.size(); ++k) {
      const double lc = std::log(std::abs(cs[k]));
      r.hom = std::max(r.hom, std::abs(ev(cs[k] * w[0], cs[k] * w[1]) - g - lc));
      r.scale = std::max(r.scale, std::abs(scaled[k](w[0], w[1]) - g - lc / (d - 1.0)));
    }
    r.iterate = std::max(r.iterate, std::abs(second(w[0], w[1]) - g));
  }
  return r;
}

}  // namespace brolin
