#pragma once

#include <cmath>
#include <limits>
#include <optional>

#include "phasesync/eigensolve.hpp"
#include "phasesync/phase_vector.hpp"

namespace phasesync {

namespace detail {
inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

// Fixed-point residual rho(z) = ||(Diag(|Ctilde z|) - Ctilde) z||_2 with
// Ctilde = C + (n/alpha) I. Zero exactly at fixed points of the GPM step;
// under the linear-rate noise gates, (8/n) * rho(z) bounds the distance to
// the global maximizer.
inline double rho(const HermitianMatrix& C, const PhaseVector& z,
                  double alpha) {
  if (C.n() != z.size()) throw DimensionError("rho: dimension mismatch");
  if (!(alpha > 0.0)) throw ConfigError("rho: alpha must be positive");
  const double n = static_cast<double>(z.size());
  CVector ctz = C.mat() * z.vec();
  if (!std::isinf(alpha)) ctz += (n / alpha) * z.vec();
  return (ctz.cwiseAbs().cwiseProduct(z.vec()) - ctz).norm();
}

// Distance certificate: given rho(z), the distance from z to the (unique up
// to phase) global maximizer is at most (8/n) * rho(z). Pure arithmetic; the
// caller is responsible for the gates (linear_rate_ok, d_2(z, z*) <= sqrt(n)/2,
// alpha in [4, n/||Delta||_op)).
inline double error_bound_to_maximizer(double rho_val, int n) {
  if (n < 1) throw DimensionError("error_bound_to_maximizer: n >= 1 required");
  return 8.0 * rho_val / static_cast<double>(n);
}

// S(z) = Re{Diag(diag(C z z^H))} - C; its diagonal is Re{(Cz)_j conj(z_j)}.
// The quadratic form w^H S(z) w on the tangent space at z is the curvature
// certificate: nonnegative exactly at second-order critical points.
inline HermitianMatrix criticality_matrix(const HermitianMatrix& C,
                                          const PhaseVector& z) {
  if (C.n() != z.size()) {
    throw DimensionError("criticality_matrix: dimension mismatch");
  }
  const CVector cz = C.mat() * z.vec();
  CMatrix s = -C.mat();
  for (Eigen::Index j = 0; j < z.size(); ++j) {
    s(j, j) += (cz(j) * std::conj(z(j))).real();
  }
  return HermitianMatrix::from_upper(s);
}

// The tangent space at z is parametrized by w = i * Diag(z) t with t real;
// then w^H S(z) w = t^T M t for the real symmetric
// M = Re{Diag(conj(z)) S(z) Diag(z)}. The map is a real-linear bijection
// onto the tangent space, so no curvature information is lost.
inline RMatrix tangent_form_matrix(const HermitianMatrix& C,
                                   const PhaseVector& z) {
  const HermitianMatrix S = criticality_matrix(C, z);
  const Eigen::Index n = z.size();
  RMatrix m(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index l = 0; l < n; ++l) {
      m(j, l) = (std::conj(z(j)) * S.mat()(j, l) * z(l)).real();
    }
  }
  return RMatrix((m + m.transpose()) / 2.0);
}

struct CriticalityReport {
  double rho;              // first-order residual ||(Diag(|Cz|) - C) z||_2
  double min_tangent_eig;  // smallest curvature orthogonal to the phase
                           // direction (see below)
  bool is_first_order;     // rho <= tol * n
  bool is_second_order;    // min_tangent_eig >= -tol * n
};

// Second-order criticality test. The direction t = 1 (i.e. w = i z, the
// common-phase rotation) is an exact null vector of M for every z on the
// torus, so it carries no information; the reported minimum eigenvalue is
// taken over the complement of that direction. The boolean verdict is
// unchanged by the deflation since the deflated direction contributes
// exactly zero.
inline CriticalityReport second_order_check(const HermitianMatrix& C,
                                            const PhaseVector& z,
                                            double tol = 1e-8) {
  const Eigen::Index n = z.size();
  RMatrix m = tangent_form_matrix(C, z);
  const double lift = m.norm() + static_cast<double>(n);
  m += (lift / static_cast<double>(n)) * RMatrix::Ones(n, n);
  Eigen::SelfAdjointEigenSolver<RMatrix> solver(m, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw ConvergenceError("tangent-form eigensolve did not converge", 0.0,
                           0.0, 0);
  }
  const double min_eig = solver.eigenvalues()(0);

  // alpha-free residual (the alpha -> inf form): both vanish together at
  // fixed points.
  const CVector cz = C.mat() * z.vec();
  const double first_order_resid =
      (cz.cwiseAbs().cwiseProduct(z.vec()) - cz).norm();

  CriticalityReport report;
  report.rho = first_order_resid;
  report.min_tangent_eig = min_eig;
  report.is_first_order =
      first_order_resid <= tol * static_cast<double>(n);
  report.is_second_order = min_eig >= -tol * static_cast<double>(n);
  return report;
}

// Constants of the per-iteration bounds, evaluated from (n, alpha) and the
// measured noise magnitudes:
//   mu    = 16 (alpha d + n) / ((7 alpha + 8) n)   l2 contraction factor
//   nu    = 2 alpha / (7 alpha + 8)                l2 offset factor
//   gamma = 16 / (7 alpha + 8)                     l_inf contraction factor
//   zeta  = 128 alpha d^2 / ((7 alpha + 8) n^{3/2})
//   omega = (16 alpha / (7 alpha + 8)) (nu/(1-mu) * 8 d^2 / n^{3/2} + dinf/n)
// with d = ||Delta||_op and dinf = ||Delta z*||_inf. alpha = inf uses the
// limits of these expressions.
struct BoundParams {
  double mu = detail::kNaN;
  double nu = detail::kNaN;
  double gamma = detail::kNaN;
  double zeta = detail::kNaN;
  double omega = detail::kNaN;
  double gamma_over_mu = detail::kNaN;  // equals n / (alpha d + n)
  bool mu_lt_one = false;     // the l2 bound is non-vacuous
  bool linf_usable = false;   // mu < 1, gamma < 1 and gamma/mu < 1 strictly
  double a0 = detail::kNaN;   // lambda_min(Delta + (n/alpha) I) when supplied
  double a1_cap = detail::kNaN;  // 3 n          (cost-to-go constant cap)
  double a2_cap = detail::kNaN;  // 1.5 n^{5/4}  (safeguard constant cap)
  double lambda_nominal = detail::kNaN;  // (a'-1)/a', a' = 64 a1 a2^2/(a0 n^2)
};

inline BoundParams bound_params(int n_int, double alpha, double delta_op,
                                double delta_zstar_inf,
                                std::optional<double> a0 = std::nullopt) {
  if (n_int < 1) throw DimensionError("bound_params: n >= 1 required");
  if (!(alpha >= 2.0)) throw ConfigError("bound_params: alpha must be >= 2");
  const double n = static_cast<double>(n_int);
  const double d = delta_op;

  BoundParams p;
  if (std::isinf(alpha)) {
    p.mu = 16.0 * d / (7.0 * n);
    p.nu = 2.0 / 7.0;
    p.gamma = 0.0;
    p.zeta = 128.0 * d * d / (7.0 * std::pow(n, 1.5));
    p.gamma_over_mu = d > 0.0 ? 0.0 : detail::kNaN;
  } else {
    const double denom = 7.0 * alpha + 8.0;
    p.mu = 16.0 * (alpha * d + n) / (denom * n);
    p.nu = 2.0 * alpha / denom;
    p.gamma = 16.0 / denom;
    p.zeta = 128.0 * alpha * d * d / (denom * std::pow(n, 1.5));
    p.gamma_over_mu = n / (alpha * d + n);
  }
  p.mu_lt_one = p.mu < 1.0;
  if (p.mu_lt_one) {
    const double scale =
        std::isinf(alpha) ? 16.0 / 7.0 : 16.0 * alpha / (7.0 * alpha + 8.0);
    p.omega = scale * (p.nu / (1.0 - p.mu) * 8.0 * d * d / std::pow(n, 1.5) +
                       delta_zstar_inf / n);
  }
  p.linf_usable = p.mu_lt_one && p.gamma < 1.0 &&
                  !std::isnan(p.gamma_over_mu) && p.gamma_over_mu < 1.0;

  p.a1_cap = 3.0 * n;
  p.a2_cap = 1.5 * std::pow(n, 1.25);
  if (a0.has_value()) {
    p.a0 = *a0;
    if (*a0 > 0.0) {
      const double a_prime =
          64.0 * p.a1_cap * p.a2_cap * p.a2_cap / (*a0 * n * n);
      p.lambda_nominal = a_prime > 1.0 ? (a_prime - 1.0) / a_prime : 0.0;
    }
  }
  return p;
}

}  // namespace phasesync
