#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <vector>

#include "brolin/errors.hpp"
#include "brolin/poly.hpp"
#include "brolin/tolerances.hpp"

namespace brolin {

struct RootCluster {
  Complex value;
  int multiplicity = 1;
};

namespace detail {

// Horner for p and p' together; also the backward-error scale sum |a_i| |z|^i.
inline void horner_with_derivative(std::span<const Complex> a, Complex z, Complex& p, Complex& dp,
                                   double& scale) {
  p = a.back();
  dp = 0.0;
  scale = std::abs(a.back());
  const double az = std::abs(z);
  for (std::size_t i = a.size() - 1; i-- > 0;) {
    dp = dp * z + p;
    p = p * z + a[i];
    scale = scale * az + std::abs(a[i]);
  }
}

struct AberthResult {
  std::vector<Complex> roots;
  bool converged = false;
  int iterations = 0;
};

/// Aberth-Ehrlich simultaneous iteration on a polynomial of degree >= 1
/// with nonzero leading coefficient.
inline AberthResult aberth(std::span<const Complex> a, double tol, int max_iter) {
  const int n = static_cast<int>(a.size()) - 1;
  AberthResult out;
  out.roots.resize(static_cast<std::size_t>(n));

  // Start on a circle about the root centroid, radius from the Fujiwara-type bound
  // of the shifted polynomial's coefficients.
  const Complex centroid = -a[n - 1] / (a[n] * static_cast<double>(n));
  double radius = 0.0;
  for (int k = 1; k <= n; ++k)
    radius = std::max(radius, std::pow(std::abs(a[n - k] / a[n]), 1.0 / k));
  radius = std::max(radius, 1e-3);
  for (int k = 0; k < n; ++k) {
    const double theta = 2.0 * std::numbers::pi * k / n + 0.4;
    out.roots[k] = centroid + radius * Complex(std::cos(theta), std::sin(theta));
  }

  // A root counts as converged once its backward error is below tol; it is
  // then polished a few more sweeps so clustered (multiple) roots settle to
  // about eps^(1/m) instead of tol^(1/m).
  constexpr double eps_floor = 4.0 * std::numeric_limits<double>::epsilon();
  constexpr int polish_sweeps = 25;
  std::vector<char> done(static_cast<std::size_t>(n), 0);
  std::vector<int> polish(static_cast<std::size_t>(n), 0);
  for (int it = 1; it <= max_iter; ++it) {
    out.iterations = it;
    int n_done = 0;
    for (int k = 0; k < n; ++k) {
      if (done[k]) {
        ++n_done;
        continue;
      }
      Complex p, dp;
      double scale;
      horner_with_derivative(a, out.roots[k], p, dp, scale);
      const double resid = std::abs(p);
      if (resid <= tol * scale) {
        if (resid <= eps_floor * scale || ++polish[k] > polish_sweeps) {
          done[k] = 1;
          ++n_done;
          continue;
        }
      }
      Complex s = 0.0;
      for (int j = 0; j < n; ++j)
        if (j != k) s += 1.0 / (out.roots[k] - out.roots[j]);
      Complex w = (dp == Complex{}) ? Complex(tol + 1e-8, 1e-8) : p / dp;
      Complex step = w / (1.0 - w * s);
      if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) step = w;
      out.roots[k] -= step;
    }
    if (n_done == n) {
      out.converged = true;
      break;
    }
  }
  if (!out.converged) {
    // budget spent while polishing still counts as converged
    out.converged = true;
    for (int k = 0; k < n; ++k) {
      Complex p, dp;
      double scale;
      horner_with_derivative(a, out.roots[k], p, dp, scale);
      if (!(std::abs(p) <= tol * scale)) out.converged = false;
    }
  }
  for (const auto& r : out.roots)
    if (!std::isfinite(r.real()) || !std::isfinite(r.imag())) out.converged = false;
  return out;
}

inline std::vector<Complex> companion_roots(std::span<const Complex> a) {
  const int n = static_cast<int>(a.size()) - 1;
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
  for (int i = 1; i < n; ++i) m(i, i - 1) = 1.0;
  for (int i = 0; i < n; ++i) m(i, n - 1) = -a[i] / a[n];
  Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(m, false);
  if (solver.info() != Eigen::Success)
    throw NumericalError("RootSolveFailure", "companion eigenvalue solver did not converge");
  std::vector<Complex> roots(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) roots[i] = solver.eigenvalues()[i];
  // a few Newton polishing steps
  for (auto& r : roots) {
    for (int s = 0; s < 3; ++s) {
      Complex p, dp;
      double scale;
      horner_with_derivative(a, r, p, dp, scale);
      if (dp == Complex{} || std::abs(p) <= 1e-16 * scale) break;
      const Complex next = r - p / dp;
      if (!std::isfinite(next.real()) || !std::isfinite(next.imag())) break;
      r = next;
    }
  }
  return roots;
}

inline double residual_scale(std::span<const Complex> a, Complex z) {
  Complex p, dp;
  double scale;
  horner_with_derivative(a, z, p, dp, scale);
  return scale == 0.0 ? 0.0 : std::abs(p) / scale;
}

}  // namespace detail

/// All roots of p (degree >= 1), repeated according to multiplicity as the
/// iteration returns them. Aberth first, companion matrix if it stalls.
inline std::vector<Complex> solve_roots(const Poly& p, const Tolerances& tol = {}) {
  if (p.degree() < 1) return {};
  const auto a = p.coeffs();
  if (p.degree() == 1) return {-a[0] / a[1]};
  auto res = detail::aberth(a, tol.root_residual, tol.root_max_iter);
  if (res.converged) return res.roots;
  auto roots = detail::companion_roots(a);
  for (const auto& r : roots)
    if (!std::isfinite(r.real()) || !std::isfinite(r.imag()) ||
        detail::residual_scale(a, r) > 1e-8)
      throw NumericalError("RootSolveFailure", "root solver failed to converge within " +
                                                   std::to_string(tol.root_max_iter) +
                                                   " iterations (degree " +
                                                   std::to_string(p.degree()) + ")");
  return roots;
}

/// Single-linkage clustering of numerically computed roots; each cluster is
/// reported at its centroid with the cluster size as multiplicity.
inline std::vector<RootCluster> cluster_roots(std::span<const Complex> roots, double radius) {
  const std::size_t n = roots.size();
  std::vector<int> label(n, -1);
  int next = 0;
  for (std::size_t i = 0; i < n; ++i) {
    if (label[i] >= 0) continue;
    label[i] = next;
    std::vector<std::size_t> stack{i};
    while (!stack.empty()) {
      const auto k = stack.back();
      stack.pop_back();
      for (std::size_t j = 0; j < n; ++j) {
        if (label[j] >= 0) continue;
        const double r = radius * std::max(1.0, std::min(std::abs(roots[k]), std::abs(roots[j])));
        if (std::abs(roots[k] - roots[j]) <= r) {
          label[j] = next;
          stack.push_back(j);
        }
      }
    }
    ++next;
  }
  std::vector<RootCluster> out(static_cast<std::size_t>(next), RootCluster{0.0, 0});
  for (std::size_t i = 0; i < n; ++i) {
    out[label[i]].value += roots[i];
    out[label[i]].multiplicity += 1;
  }
  for (auto& c : out) c.value /= static_cast<double>(c.multiplicity);
  return out;
}

/// If p is (numerically) lead * (z - b)^k, returns b.
inline std::optional<Complex> perfect_power_root(const Poly& p, double rel_tol) {
  const int k = p.degree();
  if (k < 1) return std::nullopt;
  const Complex b = -p[k - 1] / (p.leading() * static_cast<double>(k));
  const Poly model = p.leading() * Poly::linear_power(b, k);
  const double scale = std::max(p.max_coeff(), model.max_coeff());
  for (int i = 0; i <= k; ++i)
    if (std::abs(model[i] - p[i]) > rel_tol * scale) return std::nullopt;
  return b;
}

/// Distinct roots with multiplicities. Exact zero low-order coefficients and
/// perfect powers (z - b)^k are detected algebraically before iterating, since
/// a k-fold root is only resolved to about eps^(1/k) by any iteration.
inline std::vector<RootCluster> roots_with_multiplicity(const Poly& p, const Tolerances& tol = {}) {
  std::vector<RootCluster> out;
  if (p.degree() < 1) return out;
  const auto a = p.coeffs();
  const double cut = tol.lead * p.max_coeff();
  std::size_t zeros = 0;
  while (zeros < a.size() - 1 && std::abs(a[zeros]) <= cut) ++zeros;
  if (zeros > 0) out.push_back({0.0, static_cast<int>(zeros)});
  const Poly rest(std::vector<Complex>(a.begin() + static_cast<std::ptrdiff_t>(zeros), a.end()));
  if (rest.degree() < 1) return out;
  if (auto b = perfect_power_root(rest, tol.form)) {
    out.push_back({*b, rest.degree()});
    return out;
  }
  const auto roots = solve_roots(rest, tol);
  for (const auto& c : cluster_roots(roots, tol.cluster)) out.push_back(c);
  return out;
}

}  // namespace brolin
