#pragma once

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <complex>
#include <vector>

#include "brolin/errors.hpp"
#include "brolin/poly.hpp"

namespace brolin {

/// A point of the Riemann sphere in homogeneous coordinates [z0 : z1],
/// stored with unit Euclidean norm. The affine coordinate is z1 / z0, so
/// [1 : 0] is 0 and [0 : 1] is infinity.
class ProjectivePoint {
public:
  ProjectivePoint() : z0_(1.0), z1_(0.0) {}

  ProjectivePoint(Complex z0, Complex z1) {
    const double n = std::hypot(std::abs(z0), std::abs(z1));
    if (!(n > 0.0) || !std::isfinite(n))
      throw ValidationError("projective point must be a finite nonzero pair");
    z0_ = z0 / n;
    z1_ = z1 / n;
  }

  static ProjectivePoint affine(Complex z) { return {1.0, z}; }
  static ProjectivePoint infinity() { return {0.0, 1.0}; }

  Complex z0() const { return z0_; }
  Complex z1() const { return z1_; }

  bool is_infinity(double tol = 1e-14) const { return std::abs(z0_) <= tol; }
  /// z1 / z0; callers check is_infinity() first.
  Complex to_affine() const { return z1_ / z0_; }

  /// Chordal distance, in [0, 1].
  friend double chordal(const ProjectivePoint& a, const ProjectivePoint& b) {
    return std::abs(a.z0_ * b.z1_ - a.z1_ * b.z0_);
  }

private:
  Complex z0_, z1_;
};

inline double chordal_to_infinity(Complex z) { return 1.0 / std::sqrt(1.0 + std::norm(z)); }

/// Homogeneous lift F = (F_0, F_1) of degree d. Index j of each coefficient
/// vector multiplies z0^(d-j) z1^j, so F_0(1, z) and F_1(1, z) are ordinary
/// polynomials in ascending order.
class HomogeneousLift {
public:
  HomogeneousLift() = default;

  HomogeneousLift(std::vector<Complex> f0, std::vector<Complex> f1) : f0_(std::move(f0)), f1_(std::move(f1)) {
    if (f0_.size() != f1_.size() || f0_.size() < 2)
      throw ValidationError("lift components must have equal length d+1 with d >= 1");
  }

  int degree() const { return static_cast<int>(f0_.size()) - 1; }
  const std::vector<Complex>& f0() const { return f0_; }
  const std::vector<Complex>& f1() const { return f1_; }

  double max_coeff() const { return std::max(max_abs(f0_), max_abs(f1_)); }

  /// F_0(1, .), the denominator of the map in the affine chart.
  Poly f0_affine() const { return Poly(f0_); }
  /// F_1(1, .), the numerator.
  Poly f1_affine() const { return Poly(f1_); }

  template <class Real = double>
  std::array<std::complex<Real>, 2> operator()(std::complex<Real> z0, std::complex<Real> z1) const {
    const int d = degree();
    // Horner in z1 with z0 powers carried along: sum_j c_j z0^(d-j) z1^j
    std::complex<Real> a0 = std::complex<Real>(f0_[d]), a1 = std::complex<Real>(f1_[d]);
    std::complex<Real> p0 = 1;
    for (int j = d - 1; j >= 0; --j) {
      p0 *= z0;
      a0 = a0 * z1 + std::complex<Real>(f0_[j]) * p0;
      a1 = a1 * z1 + std::complex<Real>(f1_[j]) * p0;
    }
    return {a0, a1};
  }

  std::array<Complex, 2> operator()(const ProjectivePoint& p) const { return (*this)(p.z0(), p.z1()); }

  HomogeneousLift scaled(Complex c) const {
    auto a = f0_, b = f1_;
    for (auto& x : a) x *= c;
    for (auto& x : b) x *= c;
    return {std::move(a), std::move(b)};
  }

  /// Homogeneous resultant of (F_0, F_1) via the Sylvester determinant of the
  /// formal degree-d coefficient arrays.
  Complex resultant() const {
    const int d = degree();
    const int n = 2 * d;
    Eigen::MatrixXcd s = Eigen::MatrixXcd::Zero(n, n);
    for (int r = 0; r < d; ++r)
      for (int j = 0; j <= d; ++j) {
        s(r, r + j) = f0_[d - j];
        s(r + d, r + j) = f1_[d - j];
      }
    return s.determinant();
  }

  /// |Res|^(1/2d) / max |coeff|: invariant under rescaling the lift and
  /// comparable across degrees (the Sylvester determinant is homogeneous of
  /// degree 2d in the coefficients).
  double normalized_resultant() const {
    return std::pow(std::abs(resultant()), 1.0 / (2.0 * degree())) / max_coeff();
  }

private:
  std::vector<Complex> f0_, f1_;
};

namespace detail {

// Homogeneous polynomials of a fixed degree are coefficient arrays in the
// same convention as the lift; products are plain convolutions.
inline std::vector<Complex> convolve(const std::vector<Complex>& a, const std::vector<Complex>& b) {
  std::vector<Complex> out(a.size() + b.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}

}  // namespace detail

/// F o G, of degree d_F * d_G, by exact polynomial arithmetic on coefficients.
inline HomogeneousLift compose_lift(const HomogeneousLift& f, const HomogeneousLift& g) {
  const int df = f.degree();
  const int dg = g.degree();
  if (df < 2 || dg < 2) throw ValidationError("compose_lift requires degrees > 1");
  const std::size_t len = static_cast<std::size_t>(df * dg) + 1;

  std::vector<std::vector<Complex>> pow0(df + 1), pow1(df + 1);
  pow0[0] = pow1[0] = {1.0};
  for (int k = 1; k <= df; ++k) {
    pow0[k] = detail::convolve(pow0[k - 1], g.f0());
    pow1[k] = detail::convolve(pow1[k - 1], g.f1());
  }
  std::vector<Complex> h0(len, 0.0), h1(len, 0.0);
  for (int j = 0; j <= df; ++j) {
    const auto term = detail::convolve(pow0[df - j], pow1[j]);
    for (std::size_t i = 0; i < len; ++i) {
      h0[i] += f.f0()[j] * term[i];
      h1[i] += f.f1()[j] * term[i];
    }
  }
  for (std::size_t i = 0; i < len; ++i)
    if (!std::isfinite(std::abs(h0[i])) || !std::isfinite(std::abs(h1[i])))
      throw NumericalError("CoefficientOverflow", "composed lift coefficient is not finite");
  return {std::move(h0), std::move(h1)};
}

/// F^n by repeated composition.
inline HomogeneousLift iterate_lift(const HomogeneousLift& f, int n) {
  if (n < 1) throw ValidationError("iterate order must be >= 1");
  HomogeneousLift out = f;
  for (int k = 1; k < n; ++k) out = compose_lift(f, out);
  return out;
}

}  // namespace brolin
