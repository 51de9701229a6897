#ifndef VAROSC_PMS_HPP
#define VAROSC_PMS_HPP

// Principle of minimal sensitivity on the truncated trace
// T_N(Omega, sigma) = sum_{n=center}^{center+N-1} H_nn.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "varosc/error.hpp"
#include "varosc/oscbasis.hpp"
#include "varosc/potential.hpp"

namespace varosc {

/// Trace of a diagonal block as an explicit function of (log Omega, sigma).
///
/// Diagonal elements scale as (x^j)_nn(Omega) = Omega^{-j/2} (x^j)_nn(1), so
/// the block sums D_j = sum_n (x^j)_nn(1) are computed once from the
/// closed-form sums and T, its gradient and Hessian follow in O(degree^2).
template <typename Real = double>
class TraceModel {
public:
  TraceModel(const PolynomialPotential<Real>& pot, std::size_t dim, std::size_t center = 0)
      : coeffs_(pot.coeffs().begin(), pot.coeffs().end()), dim_(dim), center_(center) {
    if (dim < 1)
      throw DomainError("trace: dim must be at least 1");
    const std::size_t deg = pot.degree();
    diag_sums_.assign(deg + 1, Real(0));
    for (std::size_t n = center; n < center + dim; ++n) {
      kinetic_sum_ += Real(2 * n + 1);
      for (std::size_t j = 0; j <= deg; j += 2)
        diag_sums_[j] += position_power_element_closed_form<Real>(j, n, n, Real(1));
    }
  }

  std::size_t dim() const { return dim_; }
  std::size_t center() const { return center_; }

  Real value(Real omega, Real sigma) const {
    const auto c = detail::shift_coeffs<Real>(coeffs_, sigma);
    Real t = omega * kinetic_sum_ / 4;
    for (std::size_t j = 0; j < c.size(); j += 2)
      t += c[j] * diag_sums_[j] * std::pow(omega, -Real(j) / 2);
    return t;
  }

  /// (dT/dlogOmega, dT/dsigma)
  std::array<Real, 2> gradient(Real omega, Real sigma) const {
    const auto c = detail::shift_coeffs<Real>(coeffs_, sigma);
    const auto d1 = shifted_derivative(1, sigma);
    Real gu = omega * kinetic_sum_ / 4, gs = 0;
    for (std::size_t j = 0; j < c.size(); j += 2) {
      const Real w = diag_sums_[j] * std::pow(omega, -Real(j) / 2);
      gu -= Real(j) / 2 * c[j] * w;
      if (j < d1.size())
        gs += d1[j] * w;
    }
    return {gu, gs};
  }

  /// (d2T/du2, d2T/du dsigma, d2T/dsigma2) with u = log Omega.
  std::array<Real, 3> hessian(Real omega, Real sigma) const {
    const auto c = detail::shift_coeffs<Real>(coeffs_, sigma);
    const auto d1 = shifted_derivative(1, sigma);
    const auto d2 = shifted_derivative(2, sigma);
    Real huu = omega * kinetic_sum_ / 4, hus = 0, hss = 0;
    for (std::size_t j = 0; j < c.size(); j += 2) {
      const Real w = diag_sums_[j] * std::pow(omega, -Real(j) / 2);
      const Real h = Real(j) / 2;
      huu += h * h * c[j] * w;
      if (j < d1.size())
        hus -= h * d1[j] * w;
      if (j < d2.size())
        hss += d2[j] * w;
    }
    return {huu, hus, hss};
  }

private:
  // coefficients of V^(order)(x + sigma)
  std::vector<Real> shifted_derivative(int order, Real sigma) const {
    std::vector<Real> d = coeffs_;
    for (int i = 0; i < order; ++i)
      d = detail::derivative_coeffs<Real>(d);
    return detail::shift_coeffs<Real>(d, sigma);
  }

  std::vector<Real> coeffs_;
  std::vector<Real> diag_sums_;
  Real kinetic_sum_ = 0;
  std::size_t dim_;
  std::size_t center_;
};

/// Sum of the diagonal elements of the assembled Hamiltonian, without
/// building the matrix.
template <typename Real>
Real trace(const PolynomialPotential<Real>& pot, const BasisConfig<Real>& cfg) {
  cfg.validate();
  return TraceModel<Real>(pot, cfg.dim, cfg.center).value(cfg.omega, cfg.sigma);
}

/// Closed-form stationary point of the quartic trace
///   (4/N) T_N = N (Omega - m2/Omega) + g (1 + 2N^2) / Omega^2,
/// i.e. Omega = m2 / X^{1/3} - X^{1/3} / 3 with
///   X = (3/N) [-9 g (1+2N^2) + sqrt(3) sqrt(N^2 m2^3 + 27 g^2 (1+2N^2)^2)].
///
/// m_squared_signed is the m2 of the trace above, so it is minus twice the
/// x^2 coefficient of the potential: -m^2 for 1/2 (p^2 + m^2 x^2) + g x^4 and
/// +m^2 for the double well. The bracket is evaluated in rationalized form
/// to avoid cancellation; when the root is complex (three real stationary
/// points) the cube-root branch that yields the positive root is taken.
template <typename Real>
Real pms_omega_quartic_closed_form(Real m_squared_signed, Real g, std::size_t n) {
  if (!(g > Real(0)))
    throw DomainError("closed-form PMS: g must be positive");
  if (n < 1)
    throw DomainError("closed-form PMS: N must be at least 1");
  using C = std::complex<Real>;
  const Real v = m_squared_signed;
  const Real nn = Real(n);
  const Real a = 1 + 2 * nn * nn;
  const Real lead = 9 * g * a;
  const Real rad = lead * lead + 3 * nn * nn * v * v * v; // (sqrt(3) sqrt(..))^2

  C bracket;
  if (rad >= Real(0)) {
    const Real root = std::sqrt(rad);
    bracket = C(3 * nn * nn * v * v * v / (root + lead), Real(0));
  } else {
    bracket = C(-lead, std::sqrt(-rad));
  }
  const C x = Real(3) / nn * bracket;

  const Real tol = Real(1e-9);
  const Real mag = std::cbrt(std::abs(x));
  const Real arg = std::arg(x);
  std::optional<Real> best;
  for (int k = 0; k < 3; ++k) {
    const C w = std::polar(mag, (arg + Real(2 * k) * std::numbers::pi_v<Real>) / 3);
    if (std::abs(w) == Real(0))
      continue;
    const C omega = v / w - w / Real(3);
    if (std::abs(omega.imag()) <= tol * std::max(Real(1), std::abs(omega.real())) &&
        omega.real() > Real(0)) {
      if (!best || omega.real() > *best)
        best = omega.real();
    }
  }
  if (!best)
    throw NumericalError("closed-form PMS: no positive real root");
  return *best;
}

/// Closed form for a symmetric quartic potential k2 x^2 + k4 x^4 (+ const).
template <typename Real>
Real pms_omega_quartic_closed_form(const PolynomialPotential<Real>& pot, std::size_t n) {
  if (pot.degree() != 4 || pot[1] != Real(0) || pot[3] != Real(0))
    throw DomainError("closed-form PMS: potential is not an even quartic");
  return pms_omega_quartic_closed_form(-2 * pot[2], pot[4], n);
}

template <typename Real = double>
struct PmsResult {
  Real omega = 0;
  Real sigma = 0;
  Real trace_value = 0;
  /// Norm of the gradient of T_N in (log Omega, sigma) at the returned point.
  Real stationarity_residual = 0;
};

template <typename Real = double>
struct PmsOptions {
  bool optimize_sigma = false;
  /// Starting (Omega, sigma). In one-parameter mode sigma stays at this value.
  std::optional<std::pair<Real, Real>> init;
  /// Lowest basis index of the block whose trace is made stationary.
  std::size_t center = 0;
  /// Extra diagonal elements included in the trace beyond the N of the block.
  std::size_t trace_padding = 0;
  Real tol_1d = Real(1e-10);
  Real tol_simplex = Real(1e-8);
  int max_iter_1d = 200;
  int max_iter_2d = 2000;
  /// Accept a point only if |grad T| <= residual_tol * max(1, |T|).
  Real residual_tol = Real(1e-7);
};

namespace detail {

template <typename Real>
Real natural_log_omega(const PolynomialPotential<Real>& pot) {
  // balance Omega against k_d Omega^{-d/2}
  const Real d = Real(pot.degree());
  return Real(2) / (d + 2) * std::log(pot.leading());
}

template <typename Real, typename F>
std::pair<Real, Real> golden_section(F&& f, Real a, Real b, Real tol, int max_iter) {
  const Real inv_phi = (std::sqrt(Real(5)) - 1) / 2;
  Real x1 = b - inv_phi * (b - a), x2 = a + inv_phi * (b - a);
  Real f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < max_iter && std::abs(b - a) > tol * std::max(Real(1), std::abs(a)); ++it) {
    if (f1 <= f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = f(x2);
    }
  }
  return f1 <= f2 ? std::pair{x1, f1} : std::pair{x2, f2};
}

// Nelder-Mead on R^2. Returns (point, converged).
template <typename Real, typename F>
std::pair<std::array<Real, 2>, bool> nelder_mead(F&& f, std::array<Real, 2> start,
                                                 std::array<Real, 2> step, Real tol,
                                                 int max_iter) {
  using Pt = std::array<Real, 2>;
  std::array<Pt, 3> s = {start, Pt{start[0] + step[0], start[1]},
                         Pt{start[0], start[1] + step[1]}};
  std::array<Real, 3> fv = {f(s[0]), f(s[1]), f(s[2])};
  auto lerp = [](const Pt& a, const Pt& b, Real t) {
    return Pt{a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])};
  };
  for (int it = 0; it < max_iter; ++it) {
    std::array<int, 3> idx = {0, 1, 2};
    std::sort(idx.begin(), idx.end(), [&](int i, int j) { return fv[i] < fv[j]; });
    s = {s[idx[0]], s[idx[1]], s[idx[2]]};
    fv = {fv[idx[0]], fv[idx[1]], fv[idx[2]]};

    Real size = 0;
    for (int i = 1; i < 3; ++i)
      size = std::max(size, std::hypot(s[i][0] - s[0][0], s[i][1] - s[0][1]));
    if (size < tol)
      return {s[0], true};
    if (!std::isfinite(static_cast<double>(fv[0])))
      return {s[0], false};

    const Pt centroid = lerp(s[0], s[1], Real(0.5));
    const Pt refl = lerp(s[2], centroid, Real(2));
    const Real fr = f(refl);
    if (fr < fv[0]) {
      const Pt exp = lerp(s[2], centroid, Real(3));
      const Real fe = f(exp);
      if (fe < fr) {
        s[2] = exp;
        fv[2] = fe;
      } else {
        s[2] = refl;
        fv[2] = fr;
      }
    } else if (fr < fv[1]) {
      s[2] = refl;
      fv[2] = fr;
    } else {
      const bool outside = fr < fv[2];
      const Pt con = outside ? lerp(s[2], centroid, Real(1.5)) : lerp(s[2], centroid, Real(0.5));
      const Real fc = f(con);
      if (fc < std::min(fr, fv[2])) {
        s[2] = con;
        fv[2] = fc;
      } else {
        for (int i = 1; i < 3; ++i) {
          s[i] = lerp(s[0], s[i], Real(0.5));
          fv[i] = f(s[i]);
        }
      }
    }
  }
  return {s[0], false};
}

// Newton steps on the analytic gradient, kept only while |grad| decreases.
template <typename Real>
void newton_polish(const TraceModel<Real>& model, Real& u, Real& sigma, bool with_sigma) {
  auto gnorm = [&](Real uu, Real ss) {
    const auto g = model.gradient(std::exp(uu), ss);
    return with_sigma ? std::hypot(g[0], g[1]) : std::abs(g[0]);
  };
  Real best = gnorm(u, sigma);
  for (int it = 0; it < 30 && best > Real(0); ++it) {
    const Real om = std::exp(u);
    const auto g = model.gradient(om, sigma);
    const auto h = model.hessian(om, sigma);
    Real du, ds = 0;
    if (with_sigma) {
      const Real det = h[0] * h[2] - h[1] * h[1];
      if (!(h[0] > 0 && det > 0))
        return;
      du = -(h[2] * g[0] - h[1] * g[1]) / det;
      ds = -(h[0] * g[1] - h[1] * g[0]) / det;
    } else {
      if (!(h[0] > 0))
        return;
      du = -g[0] / h[0];
    }
    const Real nu = u + du, ns = sigma + ds;
    const Real ng = gnorm(nu, ns);
    if (!(ng < best))
      return;
    u = nu;
    sigma = ns;
    best = ng;
  }
}

template <typename Real>
Real residual(const TraceModel<Real>& model, Real omega, Real sigma, bool with_sigma) {
  const auto g = model.gradient(omega, sigma);
  return with_sigma ? std::hypot(g[0], g[1]) : std::abs(g[0]);
}

template <typename Real>
PmsResult<Real> optimize_omega(const TraceModel<Real>& model, Real u_center, Real sigma,
                               const PmsOptions<Real>& opt) {
  // coarse log grid, then golden section inside the bracketing cell
  constexpr int half = 120;
  constexpr Real step = Real(0.25);
  auto f = [&](Real u) { return model.value(std::exp(u), sigma); };
  int best_i = -half;
  Real best_f = std::numeric_limits<Real>::infinity();
  for (int i = -half; i <= half; ++i) {
    const Real v = f(u_center + step * i);
    if (v < best_f) {
      best_f = v;
      best_i = i;
    }
  }
  if (best_i == -half || best_i == half)
    throw NumericalError("PMS: trace minimum not bracketed on the Omega grid");
  auto [u, fu] = golden_section(f, u_center + step * (best_i - 1), u_center + step * (best_i + 1),
                                opt.tol_1d, opt.max_iter_1d);
  newton_polish(model, u, sigma, false);
  const Real om = std::exp(u);
  return {om, sigma, model.value(om, sigma), residual(model, om, sigma, false)};
}

} // namespace detail

/// Stationary point (minimum) of the truncated trace over Omega, and over
/// sigma when opt.optimize_sigma is set.
///
/// One parameter: log-grid bracketing, golden section, Newton polish on the
/// analytic derivative. Two parameters: Nelder-Mead in (log Omega, sigma)
/// from a 5x5 grid spanning [0.1, 10] Omega* and [-R, R] in sigma, where
/// Omega* is the sigma = 0 optimum and R the largest |x| with V'(x) = 0;
/// each start is polished by Newton and the lowest trace wins (ties go to
/// the smaller Omega).
template <typename Real>
PmsResult<Real> pms_optimize(const PolynomialPotential<Real>& pot, std::size_t n,
                             const PmsOptions<Real>& opt = {}) {
  if (n < 1)
    throw DomainError("PMS: N must be at least 1");
  const TraceModel<Real> model(pot, n + opt.trace_padding, opt.center);
  const Real sigma0 = opt.init ? opt.init->second : Real(0);
  const Real u0 = opt.init ? std::log(opt.init->first) : detail::natural_log_omega(pot);
  if (opt.init && !(opt.init->first > Real(0)))
    throw DomainError("PMS: initial Omega must be positive");

  auto accept = [&](const PmsResult<Real>& r) {
    if (!(r.stationarity_residual <= opt.residual_tol * std::max(Real(1), std::abs(r.trace_value))))
      throw NumericalError("PMS: stationarity residual " + std::to_string(double(r.stationarity_residual)) +
                           " above tolerance");
    return r;
  };

  if (!opt.optimize_sigma)
    return accept(detail::optimize_omega(model, u0, sigma0, opt));

  const auto base = detail::optimize_omega(model, u0, Real(0), opt);
  Real range = 0;
  for (auto x : stationary_points(pot))
    range = std::max(range, std::abs(x));
  if (range == Real(0))
    range = 1;

  auto f = [&](const std::array<Real, 2>& p) {
    if (!std::isfinite(static_cast<double>(p[0])) || std::abs(p[0] - std::log(base.omega)) > 60)
      return std::numeric_limits<Real>::infinity();
    return model.value(std::exp(p[0]), p[1]);
  };

  std::optional<PmsResult<Real>> best;
  for (int i = 0; i < 5; ++i) {
    for (int j = 0; j < 5; ++j) {
      const Real u = std::log(base.omega) + std::log(Real(10)) * (Real(i) / 2 - 1);
      const Real s = -range + range * Real(j) / 2;
      auto [p, ok] = detail::nelder_mead(f, {u, s}, {Real(0.1), Real(0.1) * range},
                                         opt.tol_simplex, opt.max_iter_2d);
      if (!ok)
        continue;
      Real pu = p[0], ps = p[1];
      detail::newton_polish(model, pu, ps, true);
      const Real om = std::exp(pu);
      const PmsResult<Real> r{om, ps, model.value(om, ps), detail::residual(model, om, ps, true)};
      if (!std::isfinite(static_cast<double>(r.trace_value)))
        continue;
      if (r.stationarity_residual > opt.residual_tol * std::max(Real(1), std::abs(r.trace_value)))
        continue;
      const Real tie = Real(1e-12) * std::max(Real(1), std::abs(r.trace_value));
      if (!best || r.trace_value < best->trace_value - tie ||
          (std::abs(r.trace_value - best->trace_value) <= tie && r.omega < best->omega))
        best = r;
    }
  }
  if (!best)
    throw NumericalError("PMS: every simplex start diverged or failed to converge");
  return accept(*best);
}

} // namespace varosc

#endif // VAROSC_PMS_HPP
