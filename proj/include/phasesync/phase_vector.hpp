#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <utility>

#include "phasesync/errors.hpp"
#include "phasesync/rng.hpp"

namespace phasesync {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;
using CMatrix = Eigen::MatrixXcd;
using RVector = Eigen::VectorXd;
using RMatrix = Eigen::MatrixXd;

// A vector on the torus T^n: every entry has unit modulus. Estimates on T^n
// are only identified up to a common phase; the quotient distances in
// distances.hpp account for that.
class PhaseVector {
 public:
  static constexpr double kUnitModulusTol = 1e-12;

  explicit PhaseVector(CVector entries) : entries_(std::move(entries)) {
    if (entries_.size() < 1) throw DimensionError("PhaseVector requires n >= 1");
    for (Eigen::Index j = 0; j < entries_.size(); ++j) {
      if (!(std::abs(std::abs(entries_(j)) - 1.0) <= kUnitModulusTol)) {
        throw NumericalError("PhaseVector entry " + std::to_string(j) +
                             " has non-unit modulus");
      }
    }
  }

  static PhaseVector ones(Eigen::Index n) {
    return PhaseVector(CVector::Ones(n));
  }

  Eigen::Index size() const { return entries_.size(); }
  const CVector& vec() const { return entries_; }
  Complex operator()(Eigen::Index j) const { return entries_(j); }

 private:
  CVector entries_;
};

// Dense Hermitian matrix. Construction mirrors the upper triangle so the
// Hermitian symmetry holds exactly (bitwise), not just up to rounding.
class HermitianMatrix {
 public:
  static HermitianMatrix from_upper(const CMatrix& m) {
    if (m.rows() != m.cols() || m.rows() < 1) {
      throw DimensionError("HermitianMatrix requires a square matrix, n >= 1");
    }
    CMatrix out(m.rows(), m.cols());
    for (Eigen::Index j = 0; j < m.rows(); ++j) {
      out(j, j) = Complex(m(j, j).real(), 0.0);
      for (Eigen::Index l = j + 1; l < m.cols(); ++l) {
        out(j, l) = m(j, l);
        out(l, j) = std::conj(m(j, l));
      }
    }
    return HermitianMatrix(std::move(out));
  }

  static HermitianMatrix zero(Eigen::Index n) {
    if (n < 1) throw DimensionError("HermitianMatrix requires n >= 1");
    return HermitianMatrix(CMatrix::Zero(n, n));
  }

  static HermitianMatrix identity(Eigen::Index n) {
    if (n < 1) throw DimensionError("HermitianMatrix requires n >= 1");
    return HermitianMatrix(CMatrix::Identity(n, n));
  }

  Eigen::Index n() const { return mat_.rows(); }
  const CMatrix& mat() const { return mat_; }

 private:
  explicit HermitianMatrix(CMatrix m) : mat_(std::move(m)) {}

  CMatrix mat_;
};

// What entrywise normalization does with an exactly-zero entry. Mapping it
// to zero would leave T^n, so a unit value must be chosen.
enum class ZeroPolicy {
  kUnitOne,          // 0 -> 1
  kPreviousIterate,  // 0 -> same entry of the prior phase vector
  kRandomUnit,       // 0 -> seeded random phase
};

// Entrywise w_j / |w_j|, with `policy` supplying the value for zero entries.
// Total by construction: always returns a valid PhaseVector.
inline PhaseVector normalize_entrywise(const CVector& w,
                                       ZeroPolicy policy = ZeroPolicy::kUnitOne,
                                       const CVector* previous = nullptr,
                                       Xoshiro256pp* rng = nullptr) {
  if (w.size() < 1) throw DimensionError("normalize_entrywise requires n >= 1");
  CVector out(w.size());
  for (Eigen::Index j = 0; j < w.size(); ++j) {
    const double m = std::abs(w(j));
    if (m > 0.0) {
      out(j) = w(j) / m;
      continue;
    }
    switch (policy) {
      case ZeroPolicy::kUnitOne:
        out(j) = Complex(1.0, 0.0);
        break;
      case ZeroPolicy::kPreviousIterate:
        if (previous == nullptr || previous->size() != w.size()) {
          throw ConfigError(
              "previous-iterate zero policy needs the prior vector");
        }
        out(j) = (*previous)(j);
        break;
      case ZeroPolicy::kRandomUnit:
        if (rng == nullptr) {
          throw ConfigError("random-unit zero policy needs a seeded generator");
        }
        out(j) = rng->unit_phase();
        break;
    }
  }
  return PhaseVector(std::move(out));
}

// Real part of z^H C z given a precomputed C*z. Hermitian quadratic forms are
// real; the imaginary residue is checked against the stated budget.
inline double quadratic_form(const CVector& Cz, const CVector& z) {
  const Complex val = z.dot(Cz);  // z^H (C z)
  const double n = static_cast<double>(z.size());
  if (!(std::abs(val.imag()) <= 1e-9 * n * std::max(1.0, std::abs(val.real())))) {
    throw NumericalError("quadratic form has non-negligible imaginary part");
  }
  return val.real();
}

// Objective f(z) = z^H C z for z on the torus.
inline double objective(const HermitianMatrix& C, const PhaseVector& z) {
  if (C.n() != z.size()) throw DimensionError("objective: dimension mismatch");
  const CVector Cz = C.mat() * z.vec();
  return quadratic_form(Cz, z.vec());
}

// Plain q-norm for q in {1, 2, inf}; q is a structural choice here, not a
// continuum parameter.
enum class QNorm { kOne, kTwo, kInf };

inline double vector_norm(const CVector& v, QNorm q) {
  switch (q) {
    case QNorm::kOne:
      return v.lpNorm<1>();
    case QNorm::kTwo:
      return v.norm();
    case QNorm::kInf:
      return v.lpNorm<Eigen::Infinity>();
  }
  return 0.0;  // unreachable
}

}  // namespace phasesync
