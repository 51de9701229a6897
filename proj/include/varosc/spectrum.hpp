#ifndef VAROSC_SPECTRUM_HPP
#define VAROSC_SPECTRUM_HPP

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "varosc/eigen.hpp"
#include "varosc/error.hpp"
#include "varosc/oscbasis.hpp"
#include "varosc/parallel.hpp"
#include "varosc/pms.hpp"
#include "varosc/potential.hpp"

namespace varosc {

template <typename Real = double>
struct ConvergenceRow {
  std::size_t dim;
  std::size_t level;
  Real energy;
  /// |E_level(dim) - E_level(reference dim)|
  Real delta;
};

template <typename Real = double>
struct PmsRow {
  std::size_t dim;
  Real omega;
  Real sigma;
};

template <typename Real = double>
struct SpectrumReport {
  PmsResult<Real> pms;
  EigenSolution<Real> solution;
  /// Global quantum numbers [level_begin, level_end) requested by the caller.
  std::size_t level_begin = 0;
  std::size_t level_end = 0;
  std::vector<ConvergenceRow<Real>> convergence;
  std::vector<PmsRow<Real>> pms_by_dim;

  /// Lowest global level represented by the diagonalized block.
  std::size_t first_level() const { return solution.config.center; }
  std::size_t last_level() const { return solution.config.center + solution.size(); }

  /// Energy of global level n. In a centered block, the k-th eigenvalue is
  /// taken as level center + k.
  Real energy(std::size_t n) const {
    if (n < first_level() || n >= last_level())
      throw DomainError("spectrum: level " + std::to_string(n) + " outside the diagonalized block");
    return solution.energies[static_cast<Eigen::Index>(n - first_level())];
  }
};

template <typename Real = double>
struct SpectrumOptions {
  bool optimize_sigma = false;
  std::size_t trace_padding = 0;
  std::optional<std::pair<Real, Real>> init;
};

namespace detail {

template <typename Real>
SpectrumReport<Real> solve_block(const PolynomialPotential<Real>& pot, std::size_t n,
                                 std::size_t center, const SpectrumOptions<Real>& opt) {
  PmsOptions<Real> po;
  po.optimize_sigma = opt.optimize_sigma;
  po.init = opt.init;
  po.center = center;
  po.trace_padding = opt.trace_padding;
  const auto pms = pms_optimize(pot, n, po);
  const BasisConfig<Real> cfg{n, pms.omega, pms.sigma, center};
  const auto h = assemble_hamiltonian(pot, cfg);
  SpectrumReport<Real> report{pms, diagonalize(h)};
  report.level_begin = center;
  report.level_end = center + n;
  return report;
}

} // namespace detail

/// PMS -> Hamiltonian -> diagonalization for the lowest N levels.
template <typename Real>
SpectrumReport<Real> solve_spectrum(const PolynomialPotential<Real>& pot, std::size_t n,
                                    const SpectrumOptions<Real>& opt = {}) {
  if (n < 1)
    throw DomainError("spectrum: N must be at least 1");
  return detail::solve_block(pot, n, 0, opt);
}

/// Solve on the block of basis indices [c, c + N) with c = max(0, target - N/2),
/// with the PMS applied to that block's own trace.
template <typename Real>
SpectrumReport<Real> solve_centered(const PolynomialPotential<Real>& pot, std::size_t target_level,
                                    std::size_t n, const SpectrumOptions<Real>& opt = {}) {
  if (n < 1)
    throw DomainError("spectrum: N must be at least 1");
  const std::size_t center = target_level > n / 2 ? target_level - n / 2 : 0;
  auto report = detail::solve_block(pot, n, center, opt);
  report.level_begin = target_level;
  report.level_end = target_level + 1;
  return report;
}

/// Default reference dimension: 2.5x the largest dimension studied.
inline std::size_t default_reference_dim(std::span<const std::size_t> dims) {
  const std::size_t largest = dims.empty() ? 1 : *std::max_element(dims.begin(), dims.end());
  return (5 * largest + 1) / 2;
}

/// Errors of the selected levels for each N in dims against a reference run
/// of dimension ref_dim. Levels not inside a given block are skipped for it.
/// The report's pms and solution belong to the reference run.
template <typename Real>
SpectrumReport<Real> convergence_study(const PolynomialPotential<Real>& pot,
                                       std::span<const std::size_t> levels,
                                       std::span<const std::size_t> dims, std::size_t ref_dim,
                                       const SpectrumOptions<Real>& opt = {}, unsigned threads = 1) {
  if (dims.empty())
    throw DomainError("convergence: no dimensions requested");
  if (ref_dim < *std::max_element(dims.begin(), dims.end()))
    throw DomainError("convergence: reference dimension smaller than a studied dimension");
  for (auto l : levels)
    if (l >= ref_dim)
      throw DomainError("convergence: level " + std::to_string(l) + " not in the reference block");

  auto report = solve_spectrum(pot, ref_dim, opt);
  if (!levels.empty()) {
    report.level_begin = *std::min_element(levels.begin(), levels.end());
    report.level_end = *std::max_element(levels.begin(), levels.end()) + 1;
  }

  std::vector<SpectrumReport<Real>> runs(dims.size(), report);
  detail::parallel_for(dims.size(), threads, [&](std::size_t i) {
    runs[i] = dims[i] == ref_dim ? report : solve_spectrum(pot, dims[i], opt);
  });
  for (std::size_t i = 0; i < dims.size(); ++i) {
    report.pms_by_dim.push_back({dims[i], runs[i].pms.omega, runs[i].pms.sigma});
    for (auto l : levels) {
      if (l >= dims[i])
        continue;
      const Real e = runs[i].energy(l);
      report.convergence.push_back({dims[i], l, e, std::abs(e - report.energy(l))});
    }
  }
  return report;
}

} // namespace varosc

#endif // VAROSC_SPECTRUM_HPP
