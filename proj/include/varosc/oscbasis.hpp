#ifndef VAROSC_OSCBASIS_HPP
#define VAROSC_OSCBASIS_HPP

// Harmonic-oscillator basis phi_n(x) = N_n exp(-Omega x^2 / 2) H_n(sqrt(Omega) x)
// and its matrix elements of x^p and p^2.

#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "varosc/error.hpp"
#include "varosc/potential.hpp"

namespace varosc {

template <typename Real>
using Matrix = Eigen::Matrix<Real, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Real>
using Vector = Eigen::Matrix<Real, Eigen::Dynamic, 1>;

/// Truncated oscillator basis: indices [center, center + dim) of frequency
/// omega, with the potential evaluated as V(x + sigma).
template <typename Real = double>
struct BasisConfig {
  std::size_t dim = 1;
  Real omega = 1;
  Real sigma = 0;
  std::size_t center = 0;

  void validate() const {
    if (dim < 1)
      throw DomainError("basis: dim must be at least 1");
    if (!(omega > Real(0)) || !std::isfinite(static_cast<double>(omega)))
      throw DomainError("basis: omega must be positive and finite");
    if (!std::isfinite(static_cast<double>(sigma)))
      throw DomainError("basis: sigma must be finite");
  }
};

template <typename Real = double>
struct HamiltonianMatrix {
  Matrix<Real> entries;
  BasisConfig<Real> config;
  PolynomialPotential<Real> potential;
};

namespace detail {

inline void require_positive_omega(double omega) {
  if (!(omega > 0.0) || !std::isfinite(omega))
    throw DomainError("basis: omega must be positive and finite, got " + std::to_string(omega));
}

// Powers x^1..x^max_power on [lo, lo + size), built from the tridiagonal
// ladder matrix by repeated multiplication. Only rows/columns at least
// max_power away from an artificial edge are exact; callers crop.
template <typename Real>
std::vector<Matrix<Real>> ladder_powers(std::size_t max_power, Real omega, std::size_t lo,
                                        std::size_t size) {
  const Real scale = Real(1) / std::sqrt(Real(2) * omega);
  Vector<Real> off(size > 0 ? size - 1 : 0);
  for (std::size_t i = 0; i + 1 < size; ++i)
    off[i] = std::sqrt(Real(lo + i + 1)) * scale;

  std::vector<Matrix<Real>> powers;
  powers.reserve(max_power + 1);
  powers.push_back(Matrix<Real>::Identity(size, size));
  for (std::size_t p = 1; p <= max_power; ++p) {
    const Matrix<Real>& prev = powers.back();
    Matrix<Real> next = Matrix<Real>::Zero(size, size);
    // next = prev * X, with X tridiagonal and zero diagonal.
    for (std::size_t j = 0; j < size; ++j) {
      if (j > 0)
        next.col(j) += prev.col(j - 1) * off[j - 1];
      if (j + 1 < size)
        next.col(j) += prev.col(j + 1) * off[j];
    }
    powers.push_back(std::move(next));
  }
  return powers;
}

template <typename Real>
void mirror_upper(Matrix<Real>& m) {
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = j + 1; i < m.rows(); ++i)
      m(i, j) = m(j, i);
}

} // namespace detail

/// (x^p)_{n,l} for n, l in [center, center + dim).
///
/// The ladder matrix is built on [center - p, center + dim + p) (clamped at
/// zero), raised to the p-th power and cropped, so the returned block is
/// exact; truncation never reaches it.
template <typename Real>
Matrix<Real> position_power_matrix(std::size_t p, Real omega, std::size_t dim,
                                   std::size_t center = 0) {
  detail::require_positive_omega(static_cast<double>(omega));
  const std::size_t lo = center > p ? center - p : 0;
  const std::size_t size = center + dim + p - lo;
  auto powers = detail::ladder_powers(p, omega, lo, size);
  Matrix<Real> out = powers[p].block(center - lo, center - lo, dim, dim);
  detail::mirror_upper(out);
  return out;
}

/// (p^2)_{n,l}: Omega (2n+1)/2 on the diagonal, -(Omega/2) sqrt((n+1)(n+2))
/// two off the diagonal.
template <typename Real>
Matrix<Real> momentum_squared_matrix(Real omega, std::size_t dim, std::size_t center = 0) {
  detail::require_positive_omega(static_cast<double>(omega));
  Matrix<Real> out = Matrix<Real>::Zero(dim, dim);
  for (std::size_t i = 0; i < dim; ++i) {
    const Real n = Real(center + i);
    out(i, i) = omega * (2 * n + 1) / 2;
    if (i + 2 < dim) {
      const Real v = -omega / 2 * std::sqrt((n + 1) * (n + 2));
      out(i, i + 2) = v;
      out(i + 2, i) = v;
    }
  }
  return out;
}

/// H = p^2/2 + sum_j k'_j x^j where k' are the coefficients of V(x + sigma).
template <typename Real>
HamiltonianMatrix<Real> assemble_hamiltonian(const PolynomialPotential<Real>& pot,
                                             const BasisConfig<Real>& cfg) {
  cfg.validate();
  const auto shifted = shift(pot, cfg.sigma);
  const std::size_t deg = shifted.degree();
  const std::size_t lo = cfg.center > deg ? cfg.center - deg : 0;
  const std::size_t size = cfg.center + cfg.dim + deg - lo;
  const std::size_t off = cfg.center - lo;

  Matrix<Real> h = momentum_squared_matrix(cfg.omega, cfg.dim, cfg.center) / Real(2);
  const auto powers = detail::ladder_powers(deg, cfg.omega, lo, size);
  for (std::size_t j = 0; j <= deg; ++j)
    if (shifted[j] != Real(0))
      h += shifted[j] * powers[j].block(off, off, cfg.dim, cfg.dim);
  detail::mirror_upper(h);
  return {std::move(h), cfg, pot};
}

/// (x^p)_{n,l} from the closed-form finite sums for even and odd powers.
///
/// For l - n = 2*lambda (p = 2r) or 2*lambda + 1 (p = 2r + 1), with l >= n:
///   sqrt(n! l!) / alpha^p * sum_k p! / (2^(2r - k - lambda [+ 1/2])
///       (r - lambda - k)! (n - k)! (2 lambda [+1] + k)! k!)
/// and alpha = sqrt(Omega). Factorial ratios are formed as short products.
template <typename Real>
Real position_power_element_closed_form(std::size_t p, std::size_t n, std::size_t l, Real omega) {
  detail::require_positive_omega(static_cast<double>(omega));
  if (n > l)
    std::swap(n, l);
  const std::size_t gap = l - n;
  if ((gap + p) % 2 != 0 || gap > p)
    return Real(0);
  const bool odd = p % 2 == 1;
  const std::size_t r = p / 2;
  const std::size_t lambda = gap / 2; // gap = 2 lambda (+1 if odd)
  if (r < lambda)
    return Real(0);

  auto factorial = [](std::size_t m) {
    Real f = 1;
    for (std::size_t i = 2; i <= m; ++i)
      f *= Real(i);
    return f;
  };
  // prod_{i=a+1}^{b} i, empty product 1
  auto rising = [](std::size_t a, std::size_t b) {
    Real f = 1;
    for (std::size_t i = a + 1; i <= b; ++i)
      f *= Real(i);
    return f;
  };

  const Real pfact = factorial(p);
  const std::size_t kmax = std::min(n, r - lambda);
  Real sum = 0;
  for (std::size_t k = 0; k <= kmax; ++k) {
    // sqrt(n! l!) / (n-k)! = sqrt(n!/(n-k)! * l!/(n-k)!)
    const Real ratio = std::sqrt(rising(n - k, n) * rising(n - k, l));
    const Real two_exp = Real(2 * r - k - lambda) + (odd ? Real(0.5) : Real(0));
    const Real denom = std::pow(Real(2), two_exp) * factorial(r - lambda - k) *
                       factorial(2 * lambda + (odd ? 1 : 0) + k) * factorial(k);
    sum += ratio * pfact / denom;
  }
  return sum / std::pow(std::sqrt(omega), Real(p));
}

/// phi_0 .. phi_{count-1} at x, via the normalized three-term recurrence.
template <typename Real>
std::vector<Real> basis_function_values(std::size_t count, Real omega, Real x) {
  detail::require_positive_omega(static_cast<double>(omega));
  std::vector<Real> phi(count, Real(0));
  if (count == 0)
    return phi;
  const Real alpha = std::sqrt(omega);
  const Real y = alpha * x;
  phi[0] = std::sqrt(alpha / std::sqrt(std::numbers::pi_v<Real>)) * std::exp(-y * y / 2);
  if (count > 1)
    phi[1] = std::sqrt(Real(2)) * y * phi[0];
  for (std::size_t k = 2; k < count; ++k)
    phi[k] = std::sqrt(Real(2) / Real(k)) * y * phi[k - 1] -
             std::sqrt(Real(k - 1) / Real(k)) * phi[k - 2];
  return phi;
}

template <typename Real>
Real basis_function_value(std::size_t n, Real omega, Real x) {
  return basis_function_values(n + 1, omega, x)[n];
}

} // namespace varosc

#endif // VAROSC_OSCBASIS_HPP
