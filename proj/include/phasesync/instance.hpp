#pragma once

#include <cmath>
#include <cstdint>
#include <string>

#include "phasesync/eigensolve.hpp"
#include "phasesync/phase_vector.hpp"

namespace phasesync {

enum class GroundTruthMode { kRandomPhases, kAllOnes };

inline std::string to_string(GroundTruthMode mode) {
  return mode == GroundTruthMode::kAllOnes ? "all-ones" : "random-phases";
}

inline GroundTruthMode ground_truth_mode_from_string(const std::string& s) {
  if (s == "all-ones") return GroundTruthMode::kAllOnes;
  if (s == "random-phases") return GroundTruthMode::kRandomPhases;
  throw ConfigError("unknown ground-truth mode: " + s);
}

// A synthetic measurement of relative phases: C = z* (z*)^H + sigma * W,
// with W a Wigner draw (zero diagonal, unit-variance complex normal above
// the diagonal). Immutable once built.
struct Instance {
  int n;
  double sigma;
  std::uint64_t seed;
  GroundTruthMode mode;
  PhaseVector z_star;
  HermitianMatrix W;
  HermitianMatrix C;
};

// Noise magnitudes and the deterministic gates they imply. The gates are
// recomputed from the instance at hand, never assumed from sigma alone.
struct NoiseStats {
  double delta_op;          // ||Delta||_op, Delta = sigma * W
  double delta_zstar_inf;   // ||Delta z*||_inf
  // ||Delta||_op <= n/16: per-iteration error contraction applies.
  bool contraction_ok;
  // ||Delta||_op <= n^{3/4}/312 and ||Delta z*||_inf <= n/24: linear
  // convergence to the maximizer and the residual error bound apply.
  bool linear_rate_ok;
  // ||Delta||_op <= n^{2/3}/32768 and ||Delta z*||_inf <= n/24: every
  // second-order critical point is a global maximizer.
  bool second_order_global_ok;
};

// Wigner draw: zero diagonal, above-diagonal entries i.i.d. standard complex
// normal (E|W_jl|^2 = 1), mirrored conjugate below. Entries are drawn from
// the noise stream of `seed` in row-major upper-triangle order, so the draw
// is reproducible bit-for-bit.
inline HermitianMatrix sample_wigner(int n, std::uint64_t seed) {
  if (n < 1) throw DimensionError("sample_wigner requires n >= 1");
  Xoshiro256pp rng(seed, kStreamNoise);
  CMatrix w = CMatrix::Zero(n, n);
  for (int j = 0; j < n; ++j) {
    for (int l = j + 1; l < n; ++l) {
      w(j, l) = rng.complex_normal();
    }
  }
  return HermitianMatrix::from_upper(w);
}

inline PhaseVector sample_ground_truth(int n, std::uint64_t seed,
                                       GroundTruthMode mode) {
  if (n < 1) throw DimensionError("sample_ground_truth requires n >= 1");
  if (mode == GroundTruthMode::kAllOnes) return PhaseVector::ones(n);
  Xoshiro256pp rng(seed, kStreamGroundTruth);
  CVector z(n);
  for (int j = 0; j < n; ++j) z(j) = rng.unit_phase();
  return PhaseVector(std::move(z));
}

// C = z* (z*)^H + sigma * W. Shared by generation and file loading so both
// paths produce bit-identical matrices.
inline HermitianMatrix assemble_measurement(const PhaseVector& z_star,
                                            const HermitianMatrix& W,
                                            double sigma) {
  if (z_star.size() != W.n()) {
    throw DimensionError("assemble_measurement: dimension mismatch");
  }
  const CMatrix c =
      z_star.vec() * z_star.vec().adjoint() + sigma * W.mat();
  return HermitianMatrix::from_upper(c);
}

inline Instance instance_from_parts(int n, double sigma, std::uint64_t seed,
                                    GroundTruthMode mode, PhaseVector z_star,
                                    HermitianMatrix W) {
  if (n < 1) throw DimensionError("instance requires n >= 1");
  if (!(sigma >= 0.0)) throw ConfigError("instance requires sigma >= 0");
  if (z_star.size() != n || W.n() != n) {
    throw DimensionError("instance parts disagree on n");
  }
  HermitianMatrix C = assemble_measurement(z_star, W, sigma);
  return Instance{n,           sigma,        seed, mode,
                  std::move(z_star), std::move(W), std::move(C)};
}

inline Instance build_instance(int n, double sigma, std::uint64_t seed,
                               GroundTruthMode mode =
                                   GroundTruthMode::kRandomPhases) {
  PhaseVector z_star = sample_ground_truth(n, seed, mode);
  HermitianMatrix W = sample_wigner(n, seed);
  return instance_from_parts(n, sigma, seed, mode, std::move(z_star),
                             std::move(W));
}

inline NoiseStats noise_stats(const Instance& inst) {
  const double n = static_cast<double>(inst.n);
  const double delta_op =
      inst.sigma == 0.0
          ? 0.0
          : inst.sigma * hermitian_opnorm(inst.W);
  const double delta_zstar_inf =
      inst.sigma * (inst.W.mat() * inst.z_star.vec())
                       .lpNorm<Eigen::Infinity>();
  NoiseStats stats;
  stats.delta_op = delta_op;
  stats.delta_zstar_inf = delta_zstar_inf;
  stats.contraction_ok = delta_op <= n / 16.0;
  stats.linear_rate_ok = delta_op <= std::pow(n, 0.75) / 312.0 &&
                         delta_zstar_inf <= n / 24.0;
  stats.second_order_global_ok = delta_op <= std::pow(n, 2.0 / 3.0) / 32768.0 &&
                                 delta_zstar_inf <= n / 24.0;
  return stats;
}

}  // namespace phasesync
