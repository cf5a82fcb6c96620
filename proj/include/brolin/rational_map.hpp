#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "brolin/errors.hpp"
#include "brolin/lift.hpp"
#include "brolin/poly.hpp"
#include "brolin/roots.hpp"
#include "brolin/tolerances.hpp"

namespace brolin {

/// Fiber of a map over one point: distinct points with multiplicities.
struct SphericalPointSet {
  std::vector<ProjectivePoint> points;
  std::vector<int> multiplicities;

  int total() const {
    int t = 0;
    for (int m : multiplicities) t += m;
    return t;
  }
};

/// Rational map num/den of degree d = max(deg num, deg den) > 1, validated as
/// reduced and non-degenerate, together with its canonical lift (the one whose
/// largest coefficient magnitude is 1).
class RationalMap {
public:
  RationalMap(const std::vector<Complex>& numerator, const std::vector<Complex>& denominator,
              const Tolerances& tol = {})
      : tol_(tol) {
    for (const auto& c : numerator)
      if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
        throw ValidationError("numerator has a non-finite coefficient");
    for (const auto& c : denominator)
      if (!std::isfinite(c.real()) || !std::isfinite(c.imag()))
        throw ValidationError("denominator has a non-finite coefficient");
    std::vector<Complex> both(numerator);
    both.insert(both.end(), denominator.begin(), denominator.end());
    const double scale = max_abs(both);
    if (!(scale > 0.0)) throw ValidationError("map has all-zero coefficients");
    num_ = trim(numerator, tol.lead * scale);
    den_ = trim(denominator, tol.lead * scale);
    if (den_.is_zero()) throw ValidationError("denominator is zero");
    if (num_.is_zero()) throw ValidationError("numerator is zero (constant map)");
    validate();
  }

  /// The map represented by a lift, e.g. an iterate F^n. Reducedness follows
  /// from non-degeneracy, which is still checked.
  static RationalMap from_lift(const HomogeneousLift& lift, const Tolerances& tol = {}) {
    return RationalMap(lift.f1(), lift.f0(), tol);
  }

  int degree() const { return degree_; }
  const Poly& numerator() const { return num_; }
  const Poly& denominator() const { return den_; }
  const HomogeneousLift& lift() const { return lift_; }
  const Tolerances& tolerances() const { return tol_; }

  /// Affine evaluation; callers avoid poles.
  Complex operator()(Complex z) const { return num_(z) / den_(z); }

private:
  static Poly trim(const std::vector<Complex>& c, double cut) {
    std::vector<Complex> v(c);
    if (v.empty()) v.push_back(0.0);
    while (v.size() > 1 && std::abs(v.back()) <= cut) v.pop_back();
    if (v.size() == 1 && std::abs(v[0]) <= cut) v[0] = 0.0;
    return Poly(std::move(v));
  }

  // Largest |p(r)| relative to sum |p_i| |r|^i over the roots r of q; small
  // values mean p and q share (numerically) the root r.
  static std::optional<Complex> shared_root(const Poly& p, const Poly& q, const Tolerances& tol) {
    if (q.degree() < 1) return std::nullopt;
    for (const auto& c : roots_with_multiplicity(q, tol)) {
      double scale = 0.0;
      const double ar = std::abs(c.value);
      for (int i = p.degree(); i >= 0; --i) scale = scale * ar + std::abs(p[i]);
      if (std::abs(p(c.value)) <= tol.gcd * scale) return c.value;
    }
    return std::nullopt;
  }

  void validate() {
    std::vector<std::string> problems;
    degree_ = std::max(num_.degree(), den_.degree());
    auto fmt = [](Complex z) {
      std::ostringstream os;
      os.precision(12);
      os << z.real() << (z.imag() < 0 ? "-" : "+") << std::abs(z.imag()) << "i";
      return os.str();
    };
    if (auto r = shared_root(num_, den_, tol_))
      problems.push_back("numerator and denominator share the root z = " + fmt(*r));
    else if (auto r2 = shared_root(den_, num_, tol_))
      problems.push_back("numerator and denominator share the root z = " + fmt(*r2));
    if (degree_ <= 1) problems.push_back("degree " + std::to_string(degree_) + " <= 1");

    if (problems.empty()) {
      const double scale = std::max(num_.max_coeff(), den_.max_coeff());
      auto f0 = den_.padded(static_cast<std::size_t>(degree_) + 1);
      auto f1 = num_.padded(static_cast<std::size_t>(degree_) + 1);
      for (auto& c : f0) c /= scale;
      for (auto& c : f1) c /= scale;
      lift_ = HomogeneousLift(std::move(f0), std::move(f1));
      if (lift_.normalized_resultant() <= tol_.res)
        problems.push_back("lift is degenerate (resultant below tolerance)");
    }
    if (!problems.empty()) {
      std::string msg;
      for (const auto& p : problems) msg += (msg.empty() ? "" : "; ") + p;
      throw ValidationError(msg);
    }
  }

  Poly num_, den_;
  int degree_ = 0;
  HomogeneousLift lift_;
  Tolerances tol_;
};

/// f(z) in homogeneous coordinates, normalized.
inline ProjectivePoint evaluate_map(const RationalMap& f, const ProjectivePoint& z) {
  const auto& lift = f.lift();
  const auto w = lift(z);
  const double n = std::hypot(std::abs(w[0]), std::abs(w[1]));
  const double floor = 1e-14 * lift.max_coeff();
  if (n > floor) return {w[0], w[1]};
  // retry in extended precision before giving up
  using LC = std::complex<long double>;
  const auto wl = lift(LC(z.z0()), LC(z.z1()));
  const long double nl = std::hypot(std::abs(wl[0]), std::abs(wl[1]));
  if (nl > 1e-17L * lift.max_coeff())
    return {Complex(static_cast<double>(wl[0].real() / nl), static_cast<double>(wl[0].imag() / nl)),
            Complex(static_cast<double>(wl[1].real() / nl), static_cast<double>(wl[1].imag() / nl))};
  throw NumericalError("DegenerateEvaluation", "F(Z) vanishes numerically; lift is nearly degenerate");
}

namespace detail {

// a0 * F_1(1, z) - a1 * F_0(1, z), trimmed to its numerical degree.
inline Poly fiber_polynomial(const HomogeneousLift& lift, const ProjectivePoint& a, double lead_tol) {
  const std::size_t n = lift.f0().size();
  std::vector<Complex> c(n);
  for (std::size_t j = 0; j < n; ++j) c[j] = a.z0() * lift.f1()[j] - a.z1() * lift.f0()[j];
  return Poly(std::move(c), lead_tol);
}

inline SphericalPointSet preimages_of(const HomogeneousLift& lift, const ProjectivePoint& a,
                                      const Tolerances& tol) {
  const Poly p = fiber_polynomial(lift, a, tol.lead);
  SphericalPointSet out;
  for (const auto& c : roots_with_multiplicity(p, tol)) {
    out.points.push_back(ProjectivePoint::affine(c.value));
    out.multiplicities.push_back(c.multiplicity);
  }
  const int drop = lift.degree() - p.degree();
  if (drop > 0) {
    out.points.push_back(ProjectivePoint::infinity());
    out.multiplicities.push_back(drop);
  }
  return out;
}

// The single point of the fiber over a, when the fiber is one point.
inline std::optional<ProjectivePoint> totally_ramified_fiber(const HomogeneousLift& lift,
                                                             const ProjectivePoint& a,
                                                             const Tolerances& tol) {
  const Poly p = fiber_polynomial(lift, a, tol.lead);
  if (p.degree() == 0) return ProjectivePoint::infinity();
  if (p.degree() < lift.degree()) return std::nullopt;
  if (auto b = perfect_power_root(p, tol.form)) return ProjectivePoint::affine(*b);
  return std::nullopt;
}

inline bool same_point(const ProjectivePoint& a, const ProjectivePoint& b, const Tolerances& tol) {
  return chordal(a, b) <= tol.cluster;
}

}  // namespace detail

/// The fiber f^{-1}(a) with multiplicities; total multiplicity is d.
inline SphericalPointSet preimages(const RationalMap& f, const ProjectivePoint& a) {
  return detail::preimages_of(f.lift(), a, f.tolerances());
}

/// E(f) = { a : f^{-2}(a) = {a} }, at most two points. Such a point and its
/// image each have a single-point fiber over the other, so candidates are the
/// fixed points of f^2, filtered by total ramification.
inline std::vector<ProjectivePoint> exceptional_set(const RationalMap& f) {
  const auto& tol = f.tolerances();
  const HomogeneousLift f2 = compose_lift(f.lift(), f.lift());
  // z0 * F2_1 - z1 * F2_0, homogeneous of degree D + 1
  const std::size_t n = f2.f0().size();
  std::vector<Complex> h(n + 1, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    h[j] += f2.f1()[j];
    h[j + 1] -= f2.f0()[j];
  }
  const Poly fixed(std::move(h), tol.lead);
  std::vector<ProjectivePoint> candidates;
  for (const auto& c : roots_with_multiplicity(fixed, tol)) candidates.push_back(ProjectivePoint::affine(c.value));
  if (fixed.degree() < static_cast<int>(n)) candidates.push_back(ProjectivePoint::infinity());

  std::vector<ProjectivePoint> out;
  for (const auto& a : candidates) {
    const auto b = detail::totally_ramified_fiber(f.lift(), a, tol);
    if (!b) continue;
    const auto back = detail::totally_ramified_fiber(f.lift(), *b, tol);
    if (!back || !detail::same_point(*back, a, tol)) continue;
    const bool dup = std::any_of(out.begin(), out.end(),
                                 [&](const ProjectivePoint& e) { return detail::same_point(e, a, tol); });
    if (!dup) out.push_back(a);
  }
  if (out.size() > 2)
    throw NumericalError("RootSolveFailure", "more than two exceptional points found; tolerances too loose");
  return out;
}

inline bool is_exceptional(const RationalMap& f, const ProjectivePoint& a) {
  for (const auto& e : exceptional_set(f))
    if (detail::same_point(e, a, f.tolerances())) return true;
  return false;
}

inline bool is_polynomial(const RationalMap& f) { return f.denominator().degree() == 0; }

/// f^{-2}(inf) = {inf}, by walking two levels of preimages.
inline bool is_square_polynomial(const RationalMap& f) {
  const auto& tol = f.tolerances();
  const auto inf = ProjectivePoint::infinity();
  for (const auto& q : preimages(f, inf).points)
    for (const auto& r : preimages(f, q).points)
      if (!detail::same_point(r, inf, tol)) return false;
  return true;
}

/// Same question answered from the composed lift: the denominator F2_0(1, .)
/// of f^2 is constant.
inline bool is_square_polynomial_by_composition(const RationalMap& f) {
  const auto f2 = compose_lift(f.lift(), f.lift());
  const double cut = f.tolerances().lead * f2.max_coeff();
  for (std::size_t j = 1; j < f2.f0().size(); ++j)
    if (std::abs(f2.f0()[j]) > cut) return false;
  return true;
}

struct SpecialForm {
  Complex a;
  Complex b;
};

/// Detects f(z) = a (z - b)^{-d} + b.
inline std::optional<SpecialForm> classify_special_form(const RationalMap& f) {
  const int d = f.degree();
  const Poly& den = f.denominator();
  const double tol = f.tolerances().form;
  if (den.degree() != d) return std::nullopt;
  const auto b = perfect_power_root(den, tol);
  if (!b) return std::nullopt;
  const Complex lead = den.leading();
  const Poly rest = (1.0 / lead) * f.numerator() - (*b) * Poly::linear_power(*b, d);
  const double scale = std::max({1.0, std::abs(*b), (1.0 / lead * f.numerator()).max_coeff()});
  for (int i = 1; i <= rest.degree(); ++i)
    if (std::abs(rest[i]) > tol * scale) return std::nullopt;
  if (std::abs(rest[0]) <= tol * scale) return std::nullopt;
  return SpecialForm{rest[0], *b};
}

namespace detail {

struct Atom {
  ProjectivePoint point;
  double mass;
};

inline void add_atom(std::vector<Atom>& atoms, const ProjectivePoint& p, double mass, const Tolerances& tol) {
  for (auto& a : atoms)
    if (same_point(a.point, p, tol)) {
      a.mass += mass;
      return;
    }
  atoms.push_back({p, mass});
}

}  // namespace detail

/// Total-variation distance between f^* nu_a / d and nu_a for nu_a =
/// (delta_a + delta_{f(a)}) / 2, which is balanced exactly when a is exceptional.
inline double balanced_check_exceptional(const RationalMap& f, const ProjectivePoint& a) {
  const auto& tol = f.tolerances();
  if (!is_exceptional(f, a))
    throw ValidationError("point is not in the exceptional set", "NotExceptional");
  const double d = f.degree();
  std::vector<detail::Atom> nu;
  detail::add_atom(nu, a, 0.5, tol);
  detail::add_atom(nu, evaluate_map(f, a), 0.5, tol);

  std::vector<detail::Atom> pulled;
  for (const auto& atom : nu) {
    const auto fib = preimages(f, atom.point);
    for (std::size_t i = 0; i < fib.points.size(); ++i)
      detail::add_atom(pulled, fib.points[i], atom.mass * fib.multiplicities[i] / d, tol);
  }
  std::vector<detail::Atom> diff = pulled;
  for (const auto& atom : nu) detail::add_atom(diff, atom.point, -atom.mass, tol);
  double tv = 0.0;
  for (const auto& atom : diff) tv += std::abs(atom.mass);
  return 0.5 * tv;
}

}  // namespace brolin
