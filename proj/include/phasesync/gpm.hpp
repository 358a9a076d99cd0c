#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "phasesync/diagnostics.hpp"
#include "phasesync/distances.hpp"
#include "phasesync/instance.hpp"
#include "phasesync/phase_vector.hpp"
#include "phasesync/spectral_init.hpp"

namespace phasesync {

inline constexpr double kAlphaInfinity =
    std::numeric_limits<double>::infinity();

// Solver configuration. alpha = kAlphaInfinity selects the pure power
// update z <- Cz / |Cz|.
struct GpmConfig {
  double alpha = 4.0;    // step size, in [2, inf]
  int max_iter = 10000;  // iteration cap (a termination criterion itself)
  double rho_tol = 1e-12;   // stop when rho(z) <= rho_tol * n; <= 0 disables
  double step_tol = 0.0;    // stop when ||z^{k+1}-z^k||_2 <= step_tol; <= 0
                            // disables
  ZeroPolicy zero_policy = ZeroPolicy::kPreviousIterate;
  bool record_iterates = false;
  std::uint64_t policy_seed = 0;  // only used by the random-unit zero policy
  LinfDistanceOptions linf_options{};

  // Default termination for dimension n: residual 1e-12*n, step 1e-13*sqrt(n),
  // cap 10^4 iterations.
  static GpmConfig defaults(int n) {
    GpmConfig cfg;
    cfg.step_tol = 1e-13 * std::sqrt(static_cast<double>(n));
    return cfg;
  }

  void validate() const {
    if (!(alpha >= 2.0)) {
      throw ConfigError("GpmConfig: alpha must be in [2, inf]");
    }
    if (max_iter < 1) throw ConfigError("GpmConfig: max_iter must be >= 1");
    if (std::isnan(rho_tol) || std::isnan(step_tol)) {
      throw ConfigError("GpmConfig: tolerances must not be NaN");
    }
  }
};

enum class TerminationReason { kRhoTol, kStepTol, kMaxIter };

inline std::string to_string(TerminationReason r) {
  switch (r) {
    case TerminationReason::kRhoTol:
      return "rho_tol";
    case TerminationReason::kStepTol:
      return "step_tol";
    case TerminationReason::kMaxIter:
      return "max_iter";
  }
  return "?";
}

inline TerminationReason termination_reason_from_string(const std::string& s) {
  if (s == "rho_tol") return TerminationReason::kRhoTol;
  if (s == "step_tol") return TerminationReason::kStepTol;
  if (s == "max_iter") return TerminationReason::kMaxIter;
  throw ConfigError("unknown termination reason: " + s);
}

// One row per iterate. step_norm is the l2 length of the step *leaving*
// iterate k; the terminal record has step_norm = 0 (no step was taken).
struct IterateRecord {
  int k;
  double f;              // objective value f(z^k)
  double d2_to_truth;    // d_2(z^k, z*)
  double dinf_to_truth;  // d_inf(z^k, z*)
  double rho;            // fixed-point residual at the run's alpha
  double step_norm;
  double ctilde_z_inf;   // ||(C + (n/alpha) I) z^k||_inf (tight safeguard
                         // constant accumulates over these)
  double d2_to_final;    // d_2(z^k, z_final); NaN unless iterates recorded
};

struct IterateTrace {
  std::vector<IterateRecord> records;     // dense in k
  std::vector<CVector> iterates;          // filled iff cfg.record_iterates
  CVector z_final;
  int iterations = 0;
  TerminationReason termination_reason = TerminationReason::kMaxIter;
  std::string init_label;  // "v_C" when initialized by the spectral estimator

  // Provenance, echoed into serialized traces.
  int n = 0;
  double sigma = 0.0;
  std::uint64_t seed = 0;
  GroundTruthMode mode = GroundTruthMode::kRandomPhases;
  GpmConfig config;
};

namespace detail {

// (I + (alpha/n) C) z for finite alpha, C z for alpha = inf. In both cases
// the result is a positive multiple of Ctilde z with Ctilde = C + (n/alpha) I,
// so normalization of either yields the same next iterate.
inline CVector gpm_matvec(const HermitianMatrix& C, const CVector& z,
                          double alpha) {
  if (std::isinf(alpha)) return C.mat() * z;
  const double n = static_cast<double>(z.size());
  return z + (alpha / n) * (C.mat() * z);
}

// Rescale the iteration matvec to Ctilde z.
inline CVector ctilde_z_from_matvec(const CVector& w, double alpha) {
  if (std::isinf(alpha)) return w;
  const double n = static_cast<double>(w.size());
  return (n / alpha) * w;
}

}  // namespace detail

// One iteration of the generalized power method.
inline PhaseVector gpm_step(const HermitianMatrix& C, const PhaseVector& z,
                            double alpha,
                            ZeroPolicy policy = ZeroPolicy::kPreviousIterate,
                            Xoshiro256pp* rng = nullptr) {
  if (C.n() != z.size()) throw DimensionError("gpm_step: dimension mismatch");
  if (!(alpha >= 2.0)) throw ConfigError("gpm_step: alpha must be in [2, inf]");
  const CVector w = detail::gpm_matvec(C, z.vec(), alpha);
  const CVector prev = z.vec();
  return normalize_entrywise(w, policy, &prev, rng);
}

// Runs the GPM from `init` until a termination criterion fires, recording
// per-iteration diagnostics (objective, quotient distances to the ground
// truth, fixed-point residual, step length).
inline IterateTrace run_gpm(const Instance& inst, const PhaseVector& init,
                            const GpmConfig& cfg,
                            const std::string& init_label = "custom") {
  cfg.validate();
  if (init.size() != inst.n) throw DimensionError("run_gpm: init has wrong n");

  const double n = static_cast<double>(inst.n);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  Xoshiro256pp policy_rng(cfg.policy_seed, kStreamZeroPolicy);

  IterateTrace trace;
  trace.init_label = init_label;
  trace.n = inst.n;
  trace.sigma = inst.sigma;
  trace.seed = inst.seed;
  trace.mode = inst.mode;
  trace.config = cfg;

  struct Diag {
    double f, d2, dinf, rho, ctz_inf;
  };
  const auto diagnostics_at = [&](const CVector& z, const CVector& w) -> Diag {
    const CVector ctz = detail::ctilde_z_from_matvec(w, cfg.alpha);
    const CVector cz = std::isinf(cfg.alpha)
                           ? ctz
                           : CVector(ctz - (n / cfg.alpha) * z);
    Diag d;
    d.f = quadratic_form(cz, z);
    d.d2 = dist_l2(z, inst.z_star.vec()).value;
    d.dinf = dist_linf(z, inst.z_star.vec(), cfg.linf_options).value;
    d.rho = (ctz.cwiseAbs().cwiseProduct(z) - ctz).norm();
    d.ctz_inf = ctz.lpNorm<Eigen::Infinity>();
    return d;
  };
  const auto push_record = [&](int k, const Diag& d, double step_norm) {
    trace.records.push_back(
        {k, d.f, d.d2, d.dinf, d.rho, step_norm, d.ctz_inf, nan});
  };
  const auto finish = [&](TerminationReason reason, const CVector& z, int k) {
    trace.termination_reason = reason;
    trace.z_final = z;
    trace.iterations = k;
    if (cfg.record_iterates) {
      for (std::size_t i = 0; i < trace.iterates.size(); ++i) {
        trace.records[i].d2_to_final =
            dist_l2(trace.iterates[i], z).value;
      }
    }
  };

  CVector z = init.vec();
  CVector w = detail::gpm_matvec(inst.C, z, cfg.alpha);
  if (!w.allFinite()) throw NumericalError("non-finite value at iteration 0", 0);
  Diag diag = diagnostics_at(z, w);

  for (int k = 0;; ++k) {
    if (cfg.record_iterates) trace.iterates.push_back(z);
    if (cfg.rho_tol > 0.0 && diag.rho <= cfg.rho_tol * n) {
      push_record(k, diag, 0.0);
      finish(TerminationReason::kRhoTol, z, k);
      return trace;
    }
    if (k == cfg.max_iter) {
      push_record(k, diag, 0.0);
      finish(TerminationReason::kMaxIter, z, k);
      return trace;
    }

    const CVector z_next =
        normalize_entrywise(w, cfg.zero_policy, &z, &policy_rng).vec();
    const double step_norm = (z_next - z).norm();
    push_record(k, diag, step_norm);

    const CVector w_next = detail::gpm_matvec(inst.C, z_next, cfg.alpha);
    if (!w_next.allFinite()) {
      throw NumericalError("non-finite value at iteration " +
                               std::to_string(k + 1),
                           k + 1);
    }
    const Diag diag_next = diagnostics_at(z_next, w_next);

    if (cfg.step_tol > 0.0 && step_norm <= cfg.step_tol) {
      if (cfg.record_iterates) trace.iterates.push_back(z_next);
      push_record(k + 1, diag_next, 0.0);
      finish(TerminationReason::kStepTol, z_next, k + 1);
      return trace;
    }
    z = z_next;
    w = w_next;
    diag = diag_next;
  }
}

// Result of the full pipeline: spectral initialization followed by the GPM.
struct SolveResult {
  PhaseVector z;
  IterateTrace trace;
  NoiseStats stats;
  // True when the noise gates and step size certify z as the global
  // maximizer (up to a common phase); otherwise z is a candidate only.
  bool certified = false;
  std::string label;  // "certified-maximizer" or "candidate"
};

inline bool alpha_in_certificate_range(double alpha, double n,
                                       double delta_op) {
  const double upper = delta_op > 0.0
                           ? n / delta_op
                           : std::numeric_limits<double>::infinity();
  return alpha >= 4.0 && alpha < upper;
}

// The solver pipeline computes its initializer tighter than the
// eigensolver's stand-alone default so that the residual of v_C itself sits
// below the default rho_tol; still an order of magnitude above the
// floating-point residual floor at desk scale.
inline constexpr double kSolveInitEigTol = 1e-13;

// Spectral initialization for the solver pipeline. If the default fallback
// vector a = 1 is degenerate for the leading eigenvector, retries with a
// seeded random a.
inline PhaseVector solve_initializer(const Instance& inst) {
  try {
    return eigenvector_estimator(inst.C, CVector::Ones(inst.n),
                                 kSolveInitEigTol);
  } catch (const DegenerateFallbackError&) {
    Xoshiro256pp rng(inst.seed, kStreamFallback);
    CVector a(inst.n);
    for (int j = 0; j < inst.n; ++j) a(j) = rng.unit_phase();
    return eigenvector_estimator(inst.C, a, kSolveInitEigTol);
  }
}

// Spectral initialization plus GPM.
inline SolveResult solve_to_maximizer(const Instance& inst,
                                      const GpmConfig& cfg) {
  PhaseVector init = solve_initializer(inst);

  SolveResult result{PhaseVector::ones(1), run_gpm(inst, init, cfg, "v_C"),
                     noise_stats(inst), false, "candidate"};
  result.z = PhaseVector(result.trace.z_final);
  const bool converged =
      result.trace.termination_reason != TerminationReason::kMaxIter;
  if (converged && result.stats.linear_rate_ok &&
      alpha_in_certificate_range(cfg.alpha, static_cast<double>(inst.n),
                                 result.stats.delta_op) &&
      second_order_check(inst.C, result.z).is_second_order) {
    result.certified = true;
    result.label = "certified-maximizer";
  }
  return result;
}

}  // namespace phasesync
