#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>
#include <vector>

#include "phasesync/diagnostics.hpp"
#include "phasesync/gpm.hpp"
#include "phasesync/instance.hpp"

namespace phasesync {

// Verdict for one inequality. An inequality whose hypotheses do not hold is
// reported not-applicable, never failed.
struct BoundCheck {
  std::string name;
  std::string hypotheses;
  bool applicable = false;
  bool passed = false;
  double worst_margin = detail::kNaN;  // min over k of (bound - value)
  int worst_k = -1;
  std::string detail;
};

// Everything the run certifies: measured noise gates, evaluated constants,
// empirical convergence rate and one verdict per inequality.
struct BoundReport {
  NoiseStats stats{};
  BoundParams params{};
  double a1_tight = detail::kNaN;  // ||Ctilde||_op + ||Ctilde z_final||_inf
  double a2_tight = detail::kNaN;  // max_k ||Ctilde z^k||_inf
  double f_star = detail::kNaN;    // f(z*)
  double f_final = detail::kNaN;
  double d2_final = detail::kNaN;
  double dinf_final = detail::kNaN;
  double rho_final = detail::kNaN;
  double lambda_hat = detail::kNaN;  // fitted tail rate of f_final - f_k
  std::vector<BoundCheck> checks;

  bool all_applicable_passed() const {
    for (const auto& c : checks) {
      if (c.applicable && !c.passed) return false;
    }
    return true;
  }
  int applicable_count() const {
    int out = 0;
    for (const auto& c : checks) out += c.applicable ? 1 : 0;
    return out;
  }
  int failed_count() const {
    int out = 0;
    for (const auto& c : checks) out += (c.applicable && !c.passed) ? 1 : 0;
    return out;
  }
};

namespace detail {

// Least-squares slope of y against x.
inline double ls_slope(const std::vector<double>& x,
                       const std::vector<double>& y) {
  const double m = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  const double denom = m * sxx - sx * sx;
  if (denom == 0.0) return kNaN;
  return (m * sxy - sx * sy) / denom;
}

}  // namespace detail

// Fitted linear rate of the objective gaps g_k = f_final - f_k: exp of the
// least-squares slope of log(g_k + floor) over the last max(10, 20%)
// iterations before the tolerance hit. floor = 1e-15 n^2 avoids log(0).
inline double fit_linear_rate(const std::vector<IterateRecord>& records,
                              int n) {
  const int last = static_cast<int>(records.size()) - 1;
  if (last < 2) return detail::kNaN;
  const double f_final = records[last].f;
  const double floor_val =
      1e-15 * static_cast<double>(n) * static_cast<double>(n);
  const int tail_len = std::max(10, (last + 4) / 5);  // ceil(0.2 * last)
  const int begin = std::max(0, last - tail_len);
  std::vector<double> xs, ys;
  for (int k = begin; k < last; ++k) {
    xs.push_back(static_cast<double>(k));
    ys.push_back(std::log(std::max(0.0, f_final - records[k].f) + floor_val));
  }
  if (xs.size() < 2) return detail::kNaN;
  const double slope = detail::ls_slope(xs, ys);
  return std::isnan(slope) ? detail::kNaN : std::exp(slope);
}

// Evaluates every inequality whose hypotheses hold on this run, at every
// applicable iteration, recording pass/fail with the worst margin.
inline BoundReport verify_run(const Instance& inst, const IterateTrace& trace,
                              const GpmConfig& cfg) {
  if (trace.n != inst.n || trace.seed != inst.seed ||
      trace.sigma != inst.sigma || trace.mode != inst.mode) {
    throw MismatchError("trace and instance describe different runs");
  }
  if (trace.records.empty()) throw MismatchError("trace has no records");

  const double n = static_cast<double>(inst.n);
  const int K = static_cast<int>(trace.records.size()) - 1;
  const auto& rec = trace.records;
  const double rel_slack = 1e-9;           // absorbs float evaluation noise
  const double f_slack = 1e-9 * n * n;     // objective-scale slack
  const double dinf_slack = 2e-10;         // d_inf evaluation accuracy

  BoundReport report;
  report.stats = noise_stats(inst);
  const double d = report.stats.delta_op;
  const double dzinf = report.stats.delta_zstar_inf;

  // a0 = lambda_min(Delta + (n/alpha) I); Delta's spectrum needs a dense
  // eigensolve of W.
  const double lam_min_delta =
      inst.sigma == 0.0 ? 0.0 : inst.sigma * hermitian_lambda_min(inst.W);
  const double a0 = std::isinf(cfg.alpha) ? lam_min_delta
                                          : lam_min_delta + n / cfg.alpha;
  report.params = bound_params(inst.n, cfg.alpha, d, dzinf, a0);

  report.f_star = objective(inst.C, inst.z_star);
  report.f_final = rec[K].f;
  report.d2_final = rec[K].d2_to_truth;
  report.dinf_final = rec[K].dinf_to_truth;
  report.rho_final = rec[K].rho;
  report.lambda_hat = fit_linear_rate(rec, inst.n);

  const PhaseVector z_final(trace.z_final);
  CVector ctz_final = inst.C.mat() * trace.z_final;
  if (!std::isinf(cfg.alpha)) ctz_final += (n / cfg.alpha) * trace.z_final;
  {
    const RVector eig_c = hermitian_eigenvalues(inst.C);
    const double off = std::isinf(cfg.alpha) ? 0.0 : n / cfg.alpha;
    const double ct_op = std::max(std::abs(eig_c(0) + off),
                                  std::abs(eig_c(eig_c.size() - 1) + off));
    report.a1_tight = ct_op + ctz_final.lpNorm<Eigen::Infinity>();
    double ctz_inf_max = 0.0;
    for (const auto& r : rec) ctz_inf_max = std::max(ctz_inf_max, r.ctilde_z_inf);
    report.a2_tight = ctz_inf_max;
  }

  const bool from_spectral_init = trace.init_label == "v_C";
  const bool alpha_le_ratio = std::isinf(cfg.alpha)
                                  ? d == 0.0
                                  : (d == 0.0 || cfg.alpha <= n / d);
  const bool alpha_cert_range =
      !std::isinf(cfg.alpha) &&
      alpha_in_certificate_range(cfg.alpha, n, d);
  // Either tolerance criterion leaves the final residual tiny (the step
  // criterion via the safeguard bound), so both count as converged.
  const bool converged_rho =
      trace.termination_reason != TerminationReason::kMaxIter &&
      rec[K].rho <= 1e-9 * n;
  const bool have_d2_to_final = !std::isnan(rec[0].d2_to_final);

  // Helper: evaluate `margin(k)` = bound - value over a k range; the check
  // passes when every margin exceeds -slack(k).
  struct Scan {
    double worst = std::numeric_limits<double>::infinity();
    int worst_k = -1;
    bool ok = true;
    void feed(int k, double margin, double slack) {
      if (margin < worst) {
        worst = margin;
        worst_k = k;
      }
      if (!(margin + slack >= 0.0)) ok = false;
    }
  };
  const auto push = [&](std::string name, std::string hyp, bool applicable,
                        const std::function<void(Scan&)>& body,
                        std::string detail_str = "") {
    BoundCheck check;
    check.name = std::move(name);
    check.hypotheses = std::move(hyp);
    check.applicable = applicable;
    check.detail = std::move(detail_str);
    if (applicable) {
      Scan scan;
      body(scan);
      check.passed = scan.ok;
      check.worst_margin = scan.worst;
      check.worst_k = scan.worst_k;
    }
    report.checks.push_back(std::move(check));
  };

  // Initializer quality: d_2(z^0, z*) <= 8 ||Delta||_op / sqrt(n).
  push("init_distance_bound",
       "||Delta||_op <= n/16; init = v_C",
       report.stats.contraction_ok && from_spectral_init, [&](Scan& s) {
         const double bound = 8.0 * d / std::sqrt(n);
         // The absolute component covers the initializer's own eigensolve
         // tolerance, which dominates when the bound itself is ~0.
         s.feed(0, bound - rec[0].d2_to_truth, rel_slack * bound + 1e-11);
       });

  // One-step l2 contraction:
  // d_2(z^{k+1}, z*) <= mu d_2(z^k, z*) + nu 8||Delta||_op/sqrt(n).
  push("l2_contraction_step",
       "||Delta||_op <= n/16; alpha >= 2; init = v_C",
       report.stats.contraction_ok && from_spectral_init && K >= 1,
       [&](Scan& s) {
         const double offset = report.params.nu * 8.0 * d / std::sqrt(n);
         for (int k = 0; k + 1 <= K; ++k) {
           const double bound =
               report.params.mu * rec[k].d2_to_truth + offset;
           s.feed(k, bound - rec[k + 1].d2_to_truth,
                  rel_slack * std::max(1.0, bound));
         }
       });

  // Unrolled l2 trajectory bound:
  // d_2(z^{k+1}, z*) <= mu^{k+1} d_2(z^0, z*) + nu/(1-mu) 8||Delta||_op/sqrt(n).
  push("l2_trajectory_bound",
       "||Delta||_op <= n/16; alpha >= 2; init = v_C; mu < 1",
       report.stats.contraction_ok && from_spectral_init &&
           report.params.mu_lt_one && K >= 1,
       [&](Scan& s) {
         const double tail = report.params.nu / (1.0 - report.params.mu) *
                             8.0 * d / std::sqrt(n);
         double mu_pow = 1.0;
         for (int k = 0; k + 1 <= K; ++k) {
           mu_pow *= report.params.mu;
           const double bound = mu_pow * rec[0].d2_to_truth + tail;
           s.feed(k, bound - rec[k + 1].d2_to_truth,
                  rel_slack * std::max(1.0, bound));
         }
       });

  // Unrolled l_inf trajectory bound:
  // d_inf(z^{k+1}, z*) <= gamma^{k+1} d_inf(z^0, z*)
  //                       + zeta mu^k / (1 - gamma/mu) + omega / (1 - gamma).
  push("linf_trajectory_bound",
       "||Delta||_op <= n/16; alpha >= 2; init = v_C; gamma/mu < 1",
       report.stats.contraction_ok && from_spectral_init &&
           report.params.linf_usable && K >= 1,
       [&](Scan& s) {
         const double geo = 1.0 - report.params.gamma_over_mu;
         const double omega_tail =
             report.params.omega / (1.0 - report.params.gamma);
         double gamma_pow = 1.0;
         double mu_pow = 1.0;  // mu^k at step k
         for (int k = 0; k + 1 <= K; ++k) {
           gamma_pow *= report.params.gamma;
           const double bound = gamma_pow * rec[0].dinf_to_truth +
                                report.params.zeta * mu_pow / geo +
                                omega_tail;
           s.feed(k, bound - rec[k + 1].dinf_to_truth,
                  rel_slack * std::max(1.0, bound) + dinf_slack);
           mu_pow *= report.params.mu;
         }
       });

  // Objective never decreases when alpha <= n / ||Delta||_op.
  push("monotone_ascent", "alpha <= n / ||Delta||_op",
       alpha_le_ratio && K >= 1, [&](Scan& s) {
         for (int k = 0; k + 1 <= K; ++k) {
           s.feed(k, rec[k + 1].f - rec[k].f, f_slack);
         }
       });

  // Quantitative ascent: f(z^{k+1}) - f(z^k) >= a0 ||z^{k+1} - z^k||^2 with
  // a0 = lambda_min(Delta + (n/alpha) I) >= 0.
  push("sufficient_ascent",
       "alpha <= n / ||Delta||_op (a0 >= 0)",
       alpha_le_ratio && a0 >= 0.0 && K >= 1, [&](Scan& s) {
         for (int k = 0; k + 1 <= K; ++k) {
           const double gain = rec[k + 1].f - rec[k].f;
           const double need = a0 * rec[k].step_norm * rec[k].step_norm;
           s.feed(k, gain - need, f_slack);
         }
       });

  // Cost-to-go: f(zhat) - f(z^k) <= 3n d_2(z^k, zhat)^2, zhat = z_final of a
  // residual-converged run.
  push("cost_to_go_bound",
       "linear-rate gates; alpha in [4, n/||Delta||_op); residual-converged",
       report.stats.linear_rate_ok && alpha_cert_range && converged_rho &&
           have_d2_to_final && K >= 1,
       [&](Scan& s) {
         for (int k = 0; k <= K; ++k) {
           const double bound =
               3.0 * n * rec[k].d2_to_final * rec[k].d2_to_final;
           s.feed(k, bound - (report.f_final - rec[k].f),
                  rel_slack * std::max(1.0, bound) + f_slack);
         }
       });

  // Safeguard: rho(z^k) <= (3/2) n^{5/4} ||z^{k+1} - z^k||_2.
  push("residual_safeguard",
       "linear-rate gates; alpha in [4, n/||Delta||_op)",
       report.stats.linear_rate_ok && alpha_cert_range && K >= 1,
       [&](Scan& s) {
         for (int k = 0; k + 1 <= K; ++k) {
           const double bound = report.params.a2_cap * rec[k].step_norm;
           s.feed(k, bound - rec[k].rho,
                  rel_slack * std::max(1.0, bound) + 1e-12 * n);
         }
       });

  // Residual error bound: d_2(z^k, zhat) <= (8/n) rho(z^k) at points with
  // d_2(z^k, z*) <= sqrt(n)/2.
  push("residual_error_bound",
       "linear-rate gates; alpha in [4, n/||Delta||_op); residual-converged; "
       "d_2(z, z*) <= sqrt(n)/2",
       report.stats.linear_rate_ok && alpha_cert_range && converged_rho &&
           have_d2_to_final,
       [&](Scan& s) {
         for (int k = 0; k <= K; ++k) {
           if (!(rec[k].d2_to_truth <= std::sqrt(n) / 2.0)) continue;
           const double bound = error_bound_to_maximizer(rec[k].rho, inst.n);
           s.feed(k, bound - rec[k].d2_to_final,
                  rel_slack * std::max(1.0, bound) + 1e-12);
         }
       });

  const bool z_final_second_order =
      converged_rho && second_order_check(inst.C, z_final).is_second_order;

  // Same certificate against the nearest second-order critical point. Its
  // gates are far stricter on the noise but place no upper bound on alpha.
  push("residual_error_bound_2crit",
       "second-order-global gates; alpha >= 4; residual-converged "
       "second-order point; d_2(z, z*) <= sqrt(n)/2",
       report.stats.second_order_global_ok && cfg.alpha >= 4.0 &&
           z_final_second_order && have_d2_to_final,
       [&](Scan& s) {
         for (int k = 0; k <= K; ++k) {
           if (!(rec[k].d2_to_truth <= std::sqrt(n) / 2.0)) continue;
           const double bound = error_bound_to_maximizer(rec[k].rho, inst.n);
           s.feed(k, bound - rec[k].d2_to_final,
                  rel_slack * std::max(1.0, bound) + 1e-12);
         }
       });

  // Any point at least as good as z* in objective lies within
  // 4 ||Delta||_op / sqrt(n) of it.
  push("optimal_distance_bound", "f(z_final) >= f(z*)",
       report.f_final >= report.f_star, [&](Scan& s) {
         const double bound = 4.0 * d / std::sqrt(n) + 1e-9;
         s.feed(K, bound - report.d2_final, 0.0);
       });

  // Fixed-point identities at the converged point: the residual vanishes and
  // z^H C z = ||C z||_1 (for both C and Ctilde).
  {
    push("fixed_point_identities",
         "residual-converged; second-order criticality verified",
         z_final_second_order, [&](Scan& s) {
           const CVector cz = std::isinf(cfg.alpha)
                                  ? ctz_final
                                  : CVector(ctz_final -
                                            (n / cfg.alpha) * trace.z_final);
           const double f_from_c = quadratic_form(cz, trace.z_final);
           const double l1_c = cz.lpNorm<1>();
           s.feed(K, 1e-8 * std::abs(l1_c) - std::abs(l1_c - f_from_c), 0.0);
           const double f_from_ct = quadratic_form(ctz_final, trace.z_final);
           const double l1_ct = ctz_final.lpNorm<1>();
           s.feed(K, 1e-8 * std::abs(l1_ct) - std::abs(l1_ct - f_from_ct),
                  0.0);
           const double resid =
               (ctz_final.cwiseAbs().cwiseProduct(trace.z_final) - ctz_final)
                   .norm();
           const double resid_bound = std::max(
               cfg.rho_tol * n, report.params.a2_cap * cfg.step_tol);
           s.feed(K, resid_bound * (1.0 + rel_slack) + 1e-12 * n - resid,
                  0.0);
         });
  }

  // Geometric decrease of the objective gaps g_k = f_final - f_k, checked
  // while the gaps stay above the 1e-10 n^2 floating-point floor.
  {
    const double tau = 1e-10 * n * n;
    int last_meaningful = -1;
    for (int k = 0; k + 1 <= K; ++k) {
      if (report.f_final - rec[k].f > tau) last_meaningful = k;
    }
    const bool enough = last_meaningful >= 2;
    push("geometric_value_convergence",
         "linear-rate gates; alpha in [4, n/||Delta||_op); "
         "residual-converged; gaps above 1e-10 n^2",
         report.stats.linear_rate_ok && alpha_cert_range && converged_rho &&
             enough,
         [&](Scan& s) {
           double ratio_max = 0.0;
           for (int k = 0; k <= last_meaningful; ++k) {
             const double g0 = report.f_final - rec[k].f;
             const double g1 = report.f_final - rec[k + 1].f;
             s.feed(k, g0 - g1, 0.0);  // strict decrease through the range
             if (g0 > 0.0) ratio_max = std::max(ratio_max, g1 / g0);
           }
           s.feed(last_meaningful, 1.0 - ratio_max, 0.0);
         },
         "empirical rate from gap ratios");
  }

  // Termination consistency: the final residual obeys whichever criterion
  // fired, rho(z_final) <= max(rho_tol n, a2 step_tol).
  push("termination_residual", "terminated by a tolerance criterion",
       trace.termination_reason != TerminationReason::kMaxIter, [&](Scan& s) {
         const double bound = std::max(cfg.rho_tol * n,
                                       report.params.a2_cap * cfg.step_tol);
         s.feed(K, bound - report.rho_final,
                rel_slack * std::max(1.0, bound) + 1e-12 * n);
       });

  // Internal consistency of the stored trace against recomputation from
  // z_final (guards against tampered or mismatched files).
  push("trace_consistency", "always", true, [&](Scan& s) {
    const double rho_re =
        (ctz_final.cwiseAbs().cwiseProduct(trace.z_final) - ctz_final).norm();
    s.feed(K, 1e-8 * std::max(1.0, rec[K].rho) - std::abs(rho_re - rec[K].rho),
           0.0);
    const CVector cz = std::isinf(cfg.alpha)
                           ? ctz_final
                           : CVector(ctz_final - (n / cfg.alpha) * trace.z_final);
    const double f_re = quadratic_form(cz, trace.z_final);
    s.feed(K, 1e-8 * std::max(1.0, std::abs(f_re)) - std::abs(f_re - rec[K].f),
           0.0);
    const double d2_re = dist_l2(trace.z_final, inst.z_star.vec()).value;
    s.feed(K, 1e-8 * std::max(1.0, d2_re) - std::abs(d2_re - rec[K].d2_to_truth),
           0.0);
  });

  return report;
}

}  // namespace phasesync
