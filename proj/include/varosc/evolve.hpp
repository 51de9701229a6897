#ifndef VAROSC_EVOLVE_HPP
#define VAROSC_EVOLVE_HPP

// Time evolution by the method of stationary states:
//   Psi(x, t) = sum_n a_n exp(-i E_n t) psi_n(x),  psi_n = sum_k d_nk phi_k.

#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "varosc/eigen.hpp"
#include "varosc/error.hpp"
#include "varosc/oscbasis.hpp"
#include "varosc/parallel.hpp"
#include "varosc/quadrature.hpp"

namespace varosc {

/// (width / 2 pi)^{1/4} exp(-width (x - x0)^2 / 4), unit L2 norm.
template <typename Real = double>
struct InitialGaussian {
  Real width = 1;
  Real x0 = 0;

  void validate() const {
    if (!(width > Real(0)) || !std::isfinite(static_cast<double>(width)))
      throw DomainError("gaussian: width must be positive");
    if (!std::isfinite(static_cast<double>(x0)))
      throw DomainError("gaussian: x0 must be finite");
  }

  Real operator()(Real x) const {
    const Real d = x - x0;
    return std::pow(width / (2 * std::numbers::pi_v<Real>), Real(0.25)) * std::exp(-width * d * d / 4);
  }
};

namespace detail {

template <typename Real>
void require_plain_basis(const BasisConfig<Real>& basis, const char* what) {
  basis.validate();
  if (basis.sigma != Real(0) || basis.center != 0)
    throw DomainError(std::string(what) +
                      ": closed form needs an unshifted basis starting at n = 0; use quadrature");
}

} // namespace detail

/// c_n for the centered Gaussian. Only even n contribute:
///   c_2l = (N_2l / alpha) (m / 2 pi)^{1/4} sum_k (-1)^k (2l)! / ((2l-2k)! k!)
///          2^{2(l-k)} r^{2(l-k)+1} Gamma(l - k + 1/2),   r = sqrt(2) alpha / beta,
/// with beta^2 = m/2 + alpha^2. The alternating sum equals
/// sqrt(pi) r (2l)!/l! (r^2 - 1)^l, so the coefficients are generated by
/// c_{2l+2} = c_2l (r^2 - 1) sqrt((2l + 1) / (2l + 2)); summing the terms
/// one by one cancels catastrophically beyond 2l ~ 30.
template <typename Real>
std::vector<Real> project_centered_gaussian(const InitialGaussian<Real>& g, const BasisConfig<Real>& basis) {
  g.validate();
  if (g.x0 != Real(0))
    throw DomainError("centered projection: x0 must be zero");
  detail::require_plain_basis(basis, "centered projection");
  const Real pi = std::numbers::pi_v<Real>;
  const Real alpha = std::sqrt(basis.omega);
  const Real beta2 = g.width / 2 + basis.omega;
  const Real r2 = 2 * basis.omega / beta2;
  std::vector<Real> c(basis.dim, Real(0));
  // N_0 / alpha * (m/2pi)^{1/4} * sqrt(pi) * r
  Real term = std::sqrt(alpha / std::sqrt(pi)) / alpha * std::pow(g.width / (2 * pi), Real(0.25)) *
              std::sqrt(pi) * std::sqrt(r2);
  for (std::size_t n = 0; n < basis.dim; n += 2) {
    c[n] = term;
    const Real l = Real(n / 2);
    term *= (r2 - 1) * std::sqrt((2 * l + 1) / (2 * l + 2));
  }
  return c;
}

/// c_n for the Gaussian centered at x0 with width mu.
///
/// The double sum over k and j (with K_2j = sqrt(2)^{2j+1} Gamma(j + 1/2))
/// equals sqrt(2 pi) E[H_n(a (Y + b))] for Y ~ N(0, 1), a = alpha / beta,
/// b = mu x0 / (2 beta). With g_n = E[H_n(..)] / sqrt(2^n n!) it obeys
///   g_{n+1} = a b sqrt(2/(n+1)) g_n + (2a^2 - 1) sqrt(n/(n+1)) g_{n-1},
/// which is what is evaluated here; the prefactor is
/// (N_n / beta) (mu / 2 pi)^{1/4} exp(-mu x0^2 alpha^2 / (4 beta^2)).
template <typename Real>
std::vector<Real> project_shifted_gaussian(const InitialGaussian<Real>& g, const BasisConfig<Real>& basis) {
  g.validate();
  detail::require_plain_basis(basis, "shifted projection");
  const Real pi = std::numbers::pi_v<Real>;
  const Real alpha = std::sqrt(basis.omega);
  const Real beta2 = g.width / 2 + basis.omega;
  const Real beta = std::sqrt(beta2);
  const Real a = alpha / beta;
  const Real b = g.width * g.x0 / (2 * beta);
  const Real pref = std::sqrt(alpha / std::sqrt(pi)) / beta * std::pow(g.width / (2 * pi), Real(0.25)) *
                    std::exp(-g.width * g.x0 * g.x0 * basis.omega / (4 * beta2)) * std::sqrt(2 * pi);
  std::vector<Real> c(basis.dim);
  Real prev = 0, cur = 1;
  for (std::size_t n = 0; n < basis.dim; ++n) {
    c[n] = pref * cur;
    const Real nn = Real(n);
    const Real next = a * b * std::sqrt(2 / (nn + 1)) * cur + (2 * a * a - 1) * std::sqrt(nn / (nn + 1)) * prev;
    prev = cur;
    cur = next;
  }
  return c;
}

/// c_n = integral phi_n(x) psi0(x + sigma) dx by Gauss-Hermite quadrature
/// matched to exp(-Omega x^2). n_nodes = 0 selects N + 40.
///
/// Throws NumericalError when |c_{N-1}|^2 > 1e-6: the basis does not
/// resolve psi0.
template <typename Real, typename F>
std::vector<Real> project_by_quadrature(F&& psi0, const BasisConfig<Real>& basis, std::size_t n_nodes = 0) {
  basis.validate();
  if (n_nodes == 0)
    n_nodes = basis.dim + 40;
  const auto rule = gauss_hermite<Real>(n_nodes, basis.omega);
  const std::size_t top = basis.center + basis.dim;
  std::vector<Real> c(basis.dim, Real(0));
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const Real x = rule.nodes[i];
    const Real f = rule.weights[i] * static_cast<Real>(psi0(x + basis.sigma));
    const auto phi = basis_function_values<Real>(top, basis.omega, x);
    for (std::size_t k = 0; k < basis.dim; ++k)
      c[k] += phi[basis.center + k] * f;
  }
  const Real last = c.back();
  if (basis.dim > 1 && last * last > Real(1e-6))
    throw NumericalError("quadrature projection: |c_{N-1}|^2 = " + std::to_string(double(last * last)) +
                         ", basis too small for the initial state");
  return c;
}

/// Expansion coefficients a_n, spectrum and observables in the energy
/// eigenbasis. Immutable after construction.
template <typename Real = double>
class EvolutionState {
public:
  using Complex = std::complex<Real>;

  const std::vector<Real>& coefficients() const { return a_; }
  const Vector<Real>& energies() const { return energies_; }
  const Matrix<Real>& eigenvectors() const { return vectors_; }
  const BasisConfig<Real>& basis() const { return basis_; }
  /// 1 - sum_n a_n^2
  Real truncation_loss() const { return loss_; }

  /// <x>(t), in the original coordinate.
  Real expectation_x(Real t) const { return quadratic_form(x_eig_, t); }
  /// <x^2>(t), in the original coordinate.
  Real expectation_x2(Real t) const { return quadratic_form(x2_eig_, t); }

  /// sum_n |a_n exp(-i E_n t)|^2
  Real norm(Real t) const {
    Real s = 0;
    for (auto n : active_) {
      const Complex z = a_[n] * std::polar(Real(1), -energies_[static_cast<Eigen::Index>(n)] * t);
      s += std::norm(z);
    }
    return s;
  }

  /// sum_n |a_n|^2 E_n. Time-independent: phases drop out.
  Real energy() const {
    Real s = 0;
    for (auto n : active_)
      s += a_[n] * a_[n] * energies_[static_cast<Eigen::Index>(n)];
    return s;
  }

  /// Psi at each x of the grid, time t.
  std::vector<Complex> wavefunction(std::span<const Real> xs, Real t) const {
    // amplitude on basis function k: sum_n a_n exp(-i E_n t) d_nk
    const std::size_t dim = basis_.dim;
    std::vector<Complex> amp(dim, Complex(0));
    for (auto n : active_) {
      const Complex z = a_[n] * std::polar(Real(1), -energies_[static_cast<Eigen::Index>(n)] * t);
      for (std::size_t k = 0; k < dim; ++k)
        amp[k] += z * vectors_(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(k));
    }
    std::vector<Complex> out(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const auto phi = basis_function_values<Real>(basis_.center + dim, basis_.omega, xs[i] - basis_.sigma);
      Complex s(0);
      for (std::size_t k = 0; k < dim; ++k)
        s += amp[k] * phi[basis_.center + k];
      out[i] = s;
    }
    return out;
  }

  Complex wavefunction_at(Real x, Real t) const {
    const Real xs[1] = {x};
    return wavefunction(std::span<const Real>(xs, 1), t)[0];
  }

  /// Modes with |a_n| below this are left out of all sums. The dropped
  /// contribution to <x^p> is bounded by 2 sum_dropped |a_n| * ||x^p||.
  static constexpr Real drop_threshold = Real(1e-14);

private:
  template <typename R>
  friend EvolutionState<R> make_evolution(std::span<const R> c, const EigenSolution<R>& sol);

  EvolutionState() = default;

  Real quadratic_form(const Matrix<Real>& m, Real t) const {
    // z = a exp(-iEt); <M> = Re(z^H M z) = p^T M p + q^T M q for z = p + i q
    const std::size_t k = active_.size();
    std::vector<Real> p(k), q(k);
    for (std::size_t i = 0; i < k; ++i) {
      const auto n = active_[i];
      const Real ph = -energies_[static_cast<Eigen::Index>(n)] * t;
      p[i] = a_[n] * std::cos(ph);
      q[i] = a_[n] * std::sin(ph);
    }
    Real s = 0;
    for (std::size_t i = 0; i < k; ++i) {
      Real rp = 0, rq = 0;
      for (std::size_t j = 0; j < k; ++j) {
        const Real mij = m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        rp += mij * p[j];
        rq += mij * q[j];
      }
      s += p[i] * rp + q[i] * rq;
    }
    return s;
  }

  std::vector<Real> a_;
  Vector<Real> energies_;
  Matrix<Real> vectors_;
  BasisConfig<Real> basis_;
  Real loss_ = 0;
  std::vector<std::size_t> active_;
  // x and x^2 (original coordinate) restricted to the active modes
  Matrix<Real> x_eig_;
  Matrix<Real> x2_eig_;
};

/// a_n = sum_l c_l (d^{-1})_{l n}. The rows of d are orthonormal, so
/// d^{-1} = d^T and a = d c.
template <typename Real>
EvolutionState<Real> make_evolution(std::span<const Real> c, const EigenSolution<Real>& sol) {
  const std::size_t dim = sol.size();
  if (c.size() != dim)
    throw DomainError("evolution: " + std::to_string(c.size()) + " coefficients for a basis of " +
                      std::to_string(dim));
  if (orthonormality_defect(sol) > Real(1e-10))
    throw DomainError("evolution: eigenvectors are not orthonormal");

  EvolutionState<Real> st;
  st.energies_ = sol.energies;
  st.vectors_ = sol.vectors;
  st.basis_ = sol.config;
  Vector<Real> cv(dim);
  for (std::size_t k = 0; k < dim; ++k)
    cv[static_cast<Eigen::Index>(k)] = c[k];
  const Vector<Real> a = sol.vectors * cv;
  st.a_.assign(a.data(), a.data() + dim);
  Real norm = 0;
  for (auto v : st.a_)
    norm += v * v;
  st.loss_ = 1 - norm;
  for (std::size_t n = 0; n < dim; ++n)
    if (std::abs(st.a_[n]) >= EvolutionState<Real>::drop_threshold)
      st.active_.push_back(n);

  const auto& cfg = sol.config;
  const Real s = cfg.sigma;
  const Matrix<Real> x1 = position_power_matrix(1, cfg.omega, dim, cfg.center);
  const Matrix<Real> x2 = position_power_matrix(2, cfg.omega, dim, cfg.center);
  const Matrix<Real> id = Matrix<Real>::Identity(dim, dim);
  const Matrix<Real> x_phys = x1 + s * id;
  const Matrix<Real> x2_phys = x2 + 2 * s * x1 + s * s * id;

  Matrix<Real> d_act(st.active_.size(), dim);
  for (std::size_t i = 0; i < st.active_.size(); ++i)
    d_act.row(static_cast<Eigen::Index>(i)) = sol.vectors.row(static_cast<Eigen::Index>(st.active_[i]));
  st.x_eig_ = d_act * x_phys * d_act.transpose();
  st.x2_eig_ = d_act * x2_phys * d_act.transpose();
  return st;
}

template <typename Real>
EvolutionState<Real> make_evolution(const std::vector<Real>& c, const EigenSolution<Real>& sol) {
  return make_evolution(std::span<const Real>(c), sol);
}

template <typename Real = double>
struct ObservableRow {
  Real t;
  Real x_mean;
  Real x2_mean;
  Real sqrt_x2;
};

/// <x>, <x^2> and sqrt(<x^2>) at each time, in input order.
template <typename Real>
std::vector<ObservableRow<Real>> observables(const EvolutionState<Real>& st, std::span<const Real> times,
                                             unsigned threads = 1) {
  std::vector<ObservableRow<Real>> rows(times.size());
  detail::parallel_for(times.size(), threads, [&](std::size_t i) {
    const Real t = times[i];
    const Real x2 = st.expectation_x2(t);
    rows[i] = {t, st.expectation_x(t), x2, std::sqrt(std::max(x2, Real(0)))};
  });
  return rows;
}

/// 0, step, 2 step, ... up to t_max inclusive (within round-off).
template <typename Real>
std::vector<Real> uniform_times(Real t_max, Real step) {
  if (!(t_max >= Real(0)))
    throw DomainError("times: t_max must be non-negative");
  if (t_max == Real(0))
    return {Real(0)};
  if (!(step > Real(0)))
    throw DomainError("times: step must be positive");
  const auto count = static_cast<std::size_t>(std::floor(t_max / step * (1 + Real(1e-12)))) + 1;
  std::vector<Real> ts(count);
  for (std::size_t i = 0; i < count; ++i)
    ts[i] = step * Real(i);
  return ts;
}

} // namespace varosc

#endif // VAROSC_EVOLVE_HPP
