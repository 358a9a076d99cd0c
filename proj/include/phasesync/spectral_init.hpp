#pragma once

#include <vector>

#include "phasesync/eigensolve.hpp"
#include "phasesync/phase_vector.hpp"

namespace phasesync {

// Entrywise normalization of a leading eigenvector u, with the phase of
// a^H u filling entries of u that are numerically zero (below
// 1e-14 * ||u||_inf; an exact-zero test is a measure-zero event in floating
// point). Indices that used the fallback are appended to *fallback_entries
// when provided.
inline PhaseVector estimator_from_eigenvector(
    const CVector& u, const CVector& a,
    std::vector<Eigen::Index>* fallback_entries = nullptr) {
  if (u.size() < 1) throw DimensionError("estimator requires n >= 1");
  if (a.size() != u.size()) {
    throw DimensionError("fallback vector has wrong dimension");
  }
  const double zero_threshold = 1e-14 * u.lpNorm<Eigen::Infinity>();

  bool fallback_ready = false;
  Complex fallback_phase(0.0, 0.0);
  CVector out(u.size());
  for (Eigen::Index j = 0; j < u.size(); ++j) {
    const double m = std::abs(u(j));
    if (m > zero_threshold) {
      out(j) = u(j) / m;
      continue;
    }
    if (!fallback_ready) {
      const Complex inner = a.dot(u);  // a^H u
      if (std::abs(inner) <= 1e-14) {
        throw DegenerateFallbackError(
            "degenerate fallback vector: |a^H u| <= 1e-14");
      }
      fallback_phase = inner / std::abs(inner);
      fallback_ready = true;
    }
    out(j) = fallback_phase;
    if (fallback_entries != nullptr) fallback_entries->push_back(j);
  }
  return PhaseVector(std::move(out));
}

// Spectral initializer: leading eigenvector of C, entrywise normalized.
inline PhaseVector eigenvector_estimator(
    const HermitianMatrix& C, const CVector& a, double tol = 1e-10,
    int max_iter = 0, std::vector<Eigen::Index>* fallback_entries = nullptr) {
  const EigResult eig = leading_eigenvector(C, tol, max_iter);
  return estimator_from_eigenvector(eig.vector, a, fallback_entries);
}

// Default fallback vector a = ones. On a degenerate fallback the caller
// should retry with a different a (see solve_to_maximizer).
inline PhaseVector eigenvector_estimator(const HermitianMatrix& C,
                                         double tol = 1e-10,
                                         int max_iter = 0) {
  return eigenvector_estimator(C, CVector::Ones(C.n()), tol, max_iter);
}

}  // namespace phasesync
