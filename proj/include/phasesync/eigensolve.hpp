#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "phasesync/phase_vector.hpp"

namespace phasesync {

// Leading eigenpair as produced by the shifted power iteration.
struct EigResult {
  CVector vector;   // unit l2-norm eigenvector of the largest eigenvalue
  double value;     // the eigenvalue (algebraically largest)
  int iterations;   // matvecs spent
  double residual;  // ||C u - value * u||_2; <= tol * ||C||_F on success
};

// All eigenvalues of a Hermitian matrix, ascending. Dense tridiagonalization
// + implicit QL via Eigen.
inline RVector hermitian_eigenvalues(const HermitianMatrix& A) {
  Eigen::SelfAdjointEigenSolver<CMatrix> solver(A.mat(),
                                                Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw ConvergenceError("dense Hermitian eigensolve did not converge", 0.0,
                           0.0, 0);
  }
  return solver.eigenvalues();
}

// Operator norm of a Hermitian matrix: largest |eigenvalue|.
inline double hermitian_opnorm(const HermitianMatrix& A) {
  const RVector ev = hermitian_eigenvalues(A);
  return std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
}

inline double hermitian_lambda_min(const HermitianMatrix& A) {
  return hermitian_eigenvalues(A)(0);
}

// Eigenvector of the algebraically largest eigenvalue of C. The matrix is
// shifted by s = ||C||_F * (1 + 1e-3) so that the target eigenvalue is the
// largest in magnitude, then plain power iteration runs until the Rayleigh
// residual ||C u - lambda u|| drops below tol * ||C||_F.
//
// max_iter <= 0 selects the default budget 50*n + 1000.
inline EigResult leading_eigenvector(const HermitianMatrix& C,
                                     double tol = 1e-10, int max_iter = 0) {
  const Eigen::Index n = C.n();
  if (!(tol > 0.0)) throw ConfigError("leading_eigenvector: tol must be > 0");
  if (max_iter <= 0) max_iter = static_cast<int>(50 * n + 1000);

  const double fro = C.mat().norm();
  // Deterministic pseudo-random start; orthogonality to the target
  // eigenvector has probability zero.
  Xoshiro256pp rng(0x9d2c5680u, /*stream_tag=*/0);
  CVector u(n);
  for (Eigen::Index j = 0; j < n; ++j) u(j) = rng.complex_normal();
  u.normalize();

  if (fro == 0.0) {
    // Zero matrix: every unit vector is an eigenvector for eigenvalue 0.
    return {u, 0.0, 0, 0.0};
  }

  const double shift = fro * (1.0 + 1e-3);
  double value = 0.0;
  double residual = 0.0;
  for (int k = 1; k <= max_iter; ++k) {
    const CVector Cu = C.mat() * u;
    value = u.dot(Cu).real();  // Rayleigh quotient, real for Hermitian C
    residual = (Cu - value * u).norm();
    if (residual <= tol * fro) {
      return {u, value, k, residual};
    }
    u = (Cu + shift * u).normalized();
  }
  throw ConvergenceError(
      "power iteration did not reach residual " + std::to_string(tol) +
          " * ||C||_F in " + std::to_string(max_iter) +
          " iterations (best residual " + std::to_string(residual) + ")",
      value, residual, max_iter);
}

}  // namespace phasesync
