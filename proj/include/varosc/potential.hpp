#ifndef VAROSC_POTENTIAL_HPP
#define VAROSC_POTENTIAL_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

#include "varosc/error.hpp"

namespace varosc {

/// Polynomial potential V(x) = sum_j k_j x^j with only bound states.
///
/// Coefficients are stored densely from the constant term upward. Trailing
/// zeros are stripped on construction; the remaining degree must be even and
/// the leading coefficient positive, otherwise the potential is unbounded
/// below and construction throws DomainError.
template <typename Real = double>
class PolynomialPotential {
public:
  using value_type = Real;

  PolynomialPotential() = delete;

  explicit PolynomialPotential(std::vector<Real> coeffs) : coeffs_(std::move(coeffs)) {
    while (!coeffs_.empty() && coeffs_.back() == Real(0))
      coeffs_.pop_back();
    if (coeffs_.empty())
      throw DomainError("potential: all coefficients are zero");
    for (auto c : coeffs_)
      if (!std::isfinite(static_cast<double>(c)))
        throw DomainError("potential: non-finite coefficient");
    if (degree() == 0 || degree() % 2 != 0)
      throw DomainError("potential: degree " + std::to_string(degree()) +
                        " is not a positive even number");
    if (!(coeffs_.back() > Real(0)))
      throw DomainError("potential: leading coefficient must be positive");
  }

  std::size_t degree() const { return coeffs_.size() - 1; }
  Real leading() const { return coeffs_.back(); }

  /// Coefficient of x^j (zero past the degree).
  Real operator[](std::size_t j) const { return j < coeffs_.size() ? coeffs_[j] : Real(0); }

  std::span<const Real> coeffs() const { return coeffs_; }

  bool operator==(const PolynomialPotential&) const = default;

private:
  std::vector<Real> coeffs_;
};

/// 1/2 (p^2 + sign*m^2 x^2) + g x^4, returned as its potential part.
template <typename Real = double>
PolynomialPotential<Real> from_quartic(Real m_squared, Real g, int sign = +1) {
  if (!(g > Real(0)))
    throw DomainError("quartic: g must be positive");
  if (sign != 1 && sign != -1)
    throw DomainError("quartic: sign must be +1 or -1");
  return PolynomialPotential<Real>({Real(0), Real(0), Real(sign) * m_squared / 2, Real(0), g});
}

/// lambda (x^2 - a^2)^2 / 24 with the constant lambda a^4 / 24 dropped, i.e.
/// -m^2 x^2 / 2 + g x^4 with m^2 = lambda a^2 / 6 and g = lambda / 24.
template <typename Real = double>
PolynomialPotential<Real> from_double_well(Real lambda, Real a) {
  if (!(lambda > Real(0)))
    throw DomainError("double well: lambda must be positive");
  return PolynomialPotential<Real>({Real(0), Real(0), -lambda * a * a / 12, Real(0), lambda / 24});
}

/// 11 - 118 x - 44 x^2 + 80 x^3 + 16 x^4, the strongly asymmetric demo.
template <typename Real = double>
PolynomialPotential<Real> asym_demo() {
  return PolynomialPotential<Real>({Real(11), Real(-118), Real(-44), Real(80), Real(16)});
}

/// Horner evaluation.
template <typename Real>
Real evaluate(const PolynomialPotential<Real>& pot, Real x) {
  auto c = pot.coeffs();
  Real acc = 0;
  for (auto it = c.rbegin(); it != c.rend(); ++it)
    acc = acc * x + *it;
  return acc;
}

namespace detail {

// Coefficients of q(x + sigma) for a dense coefficient list q.
template <typename Real>
std::vector<Real> shift_coeffs(std::span<const Real> c, Real sigma) {
  const std::size_t n = c.size();
  std::vector<Real> out(n, Real(0));
  std::vector<Real> sig_pow(n, Real(1));
  for (std::size_t k = 1; k < n; ++k)
    sig_pow[k] = sig_pow[k - 1] * sigma;
  // binom[k] = C(j, k) for the current j
  std::vector<Real> binom(n, Real(0));
  if (n > 0)
    binom[0] = 1;
  for (std::size_t j = 0; j < n; ++j) {
    if (j > 0)
      for (std::size_t k = j; k > 0; --k)
        binom[k] += binom[k - 1];
    if (c[j] == Real(0))
      continue;
    for (std::size_t k = 0; k <= j; ++k)
      out[j - k] += c[j] * binom[k] * sig_pow[k];
  }
  return out;
}

template <typename Real>
std::vector<Real> derivative_coeffs(std::span<const Real> c) {
  std::vector<Real> d;
  for (std::size_t j = 1; j < c.size(); ++j)
    d.push_back(Real(j) * c[j]);
  return d;
}

} // namespace detail

/// Coefficients of V(x + sigma), by binomial re-expansion. Degree and
/// leading coefficient are unchanged.
template <typename Real>
PolynomialPotential<Real> shift(const PolynomialPotential<Real>& pot, Real sigma) {
  return PolynomialPotential<Real>(detail::shift_coeffs(pot.coeffs(), sigma));
}

/// Real roots of V'(x), from the companion matrix of the derivative.
template <typename Real>
std::vector<Real> stationary_points(const PolynomialPotential<Real>& pot) {
  const std::size_t deg = pot.degree() - 1; // degree of V'
  const std::vector<Real> d = detail::derivative_coeffs(pot.coeffs());
  std::vector<Real> roots;
  if (deg == 1) {
    roots.push_back(-d[0] / d[1]);
    return roots;
  }
  Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic> companion =
      Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>::Zero(deg, deg);
  for (std::size_t i = 1; i < deg; ++i)
    companion(i, i - 1) = 1;
  for (std::size_t i = 0; i < deg; ++i)
    companion(i, deg - 1) = -d[i] / d[deg];
  Eigen::EigenSolver<decltype(companion)> es(companion, false);
  const auto& ev = es.eigenvalues();
  for (Eigen::Index i = 0; i < ev.size(); ++i) {
    const Real im = ev[i].imag(), re = ev[i].real();
    if (std::abs(im) <= Real(1e-9) * std::max(Real(1), std::abs(re)))
      roots.push_back(re);
  }
  std::sort(roots.begin(), roots.end());
  return roots;
}

} // namespace varosc

#endif // VAROSC_POTENTIAL_HPP
