#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <span>
#include <vector>

namespace brolin {

using Complex = std::complex<double>;

inline double max_abs(std::span<const Complex> c) {
  double m = 0.0;
  for (const auto& x : c) m = std::max(m, std::abs(x));
  return m;
}

/// Univariate complex polynomial, coefficients in ascending degree order.
///
/// Construction trims trailing coefficients whose magnitude is at most
/// `lead_tol` times the largest one, so degree() is the numerical degree.
/// The zero polynomial is represented as a single zero coefficient.
class Poly {
public:
  Poly() : coeffs_{Complex{0.0, 0.0}} {}

  explicit Poly(std::vector<Complex> coeffs, double lead_tol = 0.0) : coeffs_(std::move(coeffs)) {
    if (coeffs_.empty()) coeffs_.push_back(0.0);
    const double cut = lead_tol * max_abs(coeffs_);
    while (coeffs_.size() > 1 && std::abs(coeffs_.back()) <= cut) coeffs_.pop_back();
  }

  static Poly monomial(int degree, Complex coeff = 1.0) {
    std::vector<Complex> c(static_cast<std::size_t>(degree) + 1, 0.0);
    c.back() = coeff;
    return Poly(std::move(c));
  }

  /// (z - root)^power
  static Poly linear_power(Complex root, int power) {
    Poly out(std::vector<Complex>{1.0});
    const Poly lin(std::vector<Complex>{-root, 1.0});
    for (int i = 0; i < power; ++i) out = out * lin;
    return out;
  }

  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  std::span<const Complex> coeffs() const { return coeffs_; }
  const Complex& operator[](std::size_t i) const { return coeffs_[i]; }
  Complex leading() const { return coeffs_.back(); }
  bool is_zero() const { return coeffs_.size() == 1 && coeffs_[0] == Complex{}; }
  double max_coeff() const { return max_abs(coeffs_); }

  Complex operator()(Complex z) const {
    Complex acc = 0.0;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * z + *it;
    return acc;
  }

  Poly derivative() const {
    if (coeffs_.size() == 1) return Poly();
    std::vector<Complex> d(coeffs_.size() - 1);
    for (std::size_t i = 1; i < coeffs_.size(); ++i) d[i - 1] = coeffs_[i] * static_cast<double>(i);
    return Poly(std::move(d));
  }

  friend Poly operator*(const Poly& a, const Poly& b) {
    std::vector<Complex> out(a.coeffs_.size() + b.coeffs_.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.coeffs_.size(); ++i)
      for (std::size_t j = 0; j < b.coeffs_.size(); ++j) out[i + j] += a.coeffs_[i] * b.coeffs_[j];
    return Poly(std::move(out));
  }

  friend Poly operator*(Complex s, const Poly& p) {
    std::vector<Complex> out(p.coeffs_);
    for (auto& c : out) c *= s;
    return Poly(std::move(out));
  }

  friend Poly operator+(const Poly& a, const Poly& b) {
    std::vector<Complex> out(std::max(a.coeffs_.size(), b.coeffs_.size()), 0.0);
    for (std::size_t i = 0; i < a.coeffs_.size(); ++i) out[i] += a.coeffs_[i];
    for (std::size_t i = 0; i < b.coeffs_.size(); ++i) out[i] += b.coeffs_[i];
    return Poly(std::move(out));
  }

  friend Poly operator-(const Poly& a, const Poly& b) { return a + Complex{-1.0, 0.0} * b; }

  /// Coefficients padded with zeros to length n (n >= size).
  std::vector<Complex> padded(std::size_t n) const {
    std::vector<Complex> out(coeffs_);
    out.resize(std::max(n, out.size()), 0.0);
    return out;
  }

private:
  std::vector<Complex> coeffs_;
};

}  // namespace brolin
