#ifndef VAROSC_QUADRATURE_HPP
#define VAROSC_QUADRATURE_HPP

#include <cmath>
#include <cstddef>
#include <vector>

#include <Eigen/Eigenvalues>

#include "varosc/error.hpp"
#include "varosc/oscbasis.hpp"

namespace varosc {

/// Gauss-Hermite rule for integrals over the whole line of the form
/// integral f(x) dx, with f decaying like exp(-Omega x^2).
///
/// Weights already carry the exp(+x^2) factor, i.e. integral f dx is
/// approximated by sum_i weights[i] * f(nodes[i]). They are computed as
/// 1 / sum_k psi_k(y_i)^2 from the normalized Hermite functions, which
/// stays finite for rules with hundreds of nodes.
template <typename Real = double>
struct GaussHermiteRule {
  std::vector<Real> nodes;
  std::vector<Real> weights;

  template <typename F>
  auto integrate(F&& f) const {
    decltype(f(nodes[0])) acc{};
    for (std::size_t i = 0; i < nodes.size(); ++i)
      acc += weights[i] * f(nodes[i]);
    return acc;
  }
};

/// n-point rule matched to exp(-omega x^2): exact for polynomial times
/// exp(-omega x^2) up to polynomial degree 2n - 1.
template <typename Real = double>
GaussHermiteRule<Real> gauss_hermite(std::size_t n, Real omega = Real(1)) {
  if (n < 1)
    throw DomainError("gauss_hermite: need at least one node");
  if (!(omega > Real(0)))
    throw DomainError("gauss_hermite: omega must be positive");

  // Golub-Welsch for the physicists' Hermite weight exp(-y^2).
  Vector<Real> diag = Vector<Real>::Zero(n);
  Vector<Real> sub(n > 1 ? n - 1 : 0);
  for (std::size_t k = 1; k < n; ++k)
    sub[k - 1] = std::sqrt(Real(k) / 2);
  Eigen::SelfAdjointEigenSolver<Matrix<Real>> es;
  es.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success)
    throw NumericalError("gauss_hermite: tridiagonal eigensolver failed");

  GaussHermiteRule<Real> rule;
  rule.nodes.resize(n);
  rule.weights.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    Real y = es.eigenvalues()[static_cast<Eigen::Index>(i)];
    // Newton polish on psi_n(y) = 0, psi_n' = sqrt(2n) psi_{n-1} - y psi_n.
    for (int it = 0; it < 3; ++it) {
      const auto psi = basis_function_values<Real>(n + 1, Real(1), y);
      const Real d = std::sqrt(Real(2 * n)) * psi[n - 1] - y * psi[n];
      if (d == Real(0))
        break;
      y -= psi[n] / d;
    }
    const auto psi = basis_function_values<Real>(n, Real(1), y);
    Real s = 0;
    for (auto v : psi)
      s += v * v;
    rule.nodes[i] = y;
    rule.weights[i] = Real(1) / s;
  }
  // The rule is symmetric about 0; impose it exactly.
  for (std::size_t i = 0; i < n / 2; ++i) {
    const std::size_t j = n - 1 - i;
    const Real y = (rule.nodes[j] - rule.nodes[i]) / 2;
    const Real w = (rule.weights[i] + rule.weights[j]) / 2;
    rule.nodes[i] = -y;
    rule.nodes[j] = y;
    rule.weights[i] = rule.weights[j] = w;
  }
  if (n % 2 == 1)
    rule.nodes[n / 2] = Real(0);
  // Rescale y = sqrt(omega) x.
  const Real alpha = std::sqrt(omega);
  for (std::size_t i = 0; i < n; ++i) {
    rule.nodes[i] /= alpha;
    rule.weights[i] /= alpha;
  }
  return rule;
}

} // namespace varosc

#endif // VAROSC_QUADRATURE_HPP
