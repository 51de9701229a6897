#ifndef VAROSC_EIGEN_HPP
#define VAROSC_EIGEN_HPP

#include <cmath>
#include <cstddef>
#include <string>

#include <Eigen/Eigenvalues>

#include "varosc/error.hpp"
#include "varosc/oscbasis.hpp"

namespace varosc {

/// Eigenpairs of a truncated Hamiltonian.
///
/// energies are ascending; row n of vectors holds the components d_{n,k}
/// of eigenstate n in the oscillator basis. Each row is signed so that its
/// largest-magnitude entry is positive.
template <typename Real = double>
struct EigenSolution {
  Vector<Real> energies;
  Matrix<Real> vectors;
  BasisConfig<Real> config;

  std::size_t size() const { return static_cast<std::size_t>(energies.size()); }
};

/// Dense symmetric eigendecomposition (Householder tridiagonalization + implicit QL).
template <typename Real>
EigenSolution<Real> diagonalize(const Matrix<Real>& h, const BasisConfig<Real>& cfg) {
  if (h.rows() != h.cols())
    throw DomainError("diagonalize: matrix is not square");
  Eigen::SelfAdjointEigenSolver<Matrix<Real>> es(h, Eigen::ComputeEigenvectors);
  if (es.info() != Eigen::Success)
    throw NumericalError("diagonalize: eigensolver did not converge for a " +
                         std::to_string(h.rows()) + "x" + std::to_string(h.cols()) + " matrix");

  EigenSolution<Real> sol{es.eigenvalues(), es.eigenvectors().transpose(), cfg};
  for (Eigen::Index n = 0; n < sol.vectors.rows(); ++n) {
    Eigen::Index arg = 0;
    Real best = -1;
    for (Eigen::Index k = 0; k < sol.vectors.cols(); ++k) {
      const Real a = std::abs(sol.vectors(n, k));
      // strict > keeps the first index on ties
      if (a > best) {
        best = a;
        arg = k;
      }
    }
    if (sol.vectors(n, arg) < Real(0))
      sol.vectors.row(n) *= Real(-1);
  }
  return sol;
}

template <typename Real>
EigenSolution<Real> diagonalize(const HamiltonianMatrix<Real>& h) {
  return diagonalize(h.entries, h.config);
}

/// max_n |sum_k d_nk d_mk - delta_nm| over all pairs.
template <typename Real>
Real orthonormality_defect(const EigenSolution<Real>& sol) {
  const Matrix<Real> g = sol.vectors * sol.vectors.transpose();
  return (g - Matrix<Real>::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff();
}

/// max_n |H d_n - E_n d_n| / max(1, |E_n|).
template <typename Real>
Real eigen_residual(const Matrix<Real>& h, const EigenSolution<Real>& sol) {
  Real worst = 0;
  for (Eigen::Index n = 0; n < sol.energies.size(); ++n) {
    const Vector<Real> d = sol.vectors.row(n).transpose();
    const Real r = (h * d - sol.energies[n] * d).norm();
    worst = std::max(worst, r / std::max(Real(1), std::abs(sol.energies[n])));
  }
  return worst;
}

} // namespace varosc

#endif // VAROSC_EIGEN_HPP
