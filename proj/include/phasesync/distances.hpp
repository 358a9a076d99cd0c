#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>

#include "phasesync/phase_vector.hpp"

namespace phasesync {

// Distance between two vectors after minimizing over a common phase:
//   d_q(w, z) = min over theta of ||w - e^{i theta} z||_q.
struct QuotientDistance {
  double value;             // the minimized norm
  double minimizing_theta;  // argmin, in [0, 2*pi)
};

namespace detail {

inline double wrap_angle(double theta) {
  const double two_pi = 2.0 * std::numbers::pi;
  theta = std::fmod(theta, two_pi);
  if (theta < 0.0) theta += two_pi;
  if (theta >= two_pi) theta = 0.0;
  return theta;
}

inline void check_same_size(const CVector& w, const CVector& z,
                            const char* who) {
  if (w.size() < 1 || z.size() < 1) {
    throw DimensionError(std::string(who) + ": n >= 1 required");
  }
  if (w.size() != z.size()) {
    throw DimensionError(std::string(who) + ": dimension mismatch");
  }
}

}  // namespace detail

// Closed form: the optimal rotation aligns z with w, theta = arg(z^H w),
// and the minimized squared norm is ||w||^2 + ||z||^2 - 2 |z^H w|. The value
// is evaluated as ||w - e^{i theta} z|| directly: the explicit form cancels
// catastrophically for nearly aligned vectors (error floor ~ n sqrt(eps)),
// while the difference norm stays accurate down to machine precision.
inline QuotientDistance dist_l2(const CVector& w, const CVector& z) {
  detail::check_same_size(w, z, "dist_l2");
  const Complex inner = z.dot(w);  // z^H w
  const double theta =
      (inner == Complex(0.0, 0.0)) ? 0.0 : detail::wrap_angle(std::arg(inner));
  const Complex rot = std::polar(1.0, theta);
  return {(w - rot * z).norm(), theta};
}

struct LinfDistanceOptions {
  int grid_points = 4096;     // coarse bracketing grid over [0, 2*pi)
  double interval_tol = 1e-12;  // golden-section stops at this bracket width
};

// d_inf has no closed form: the objective in theta is a max of n smooth
// terms. A fine grid brackets the global minimum; golden-section refinement
// narrows the bracket. Accurate to ~1e-10 at desk scale.
inline QuotientDistance dist_linf(const CVector& w, const CVector& z,
                                  const LinfDistanceOptions& opts = {}) {
  detail::check_same_size(w, z, "dist_linf");
  if (opts.grid_points < 4) throw ConfigError("dist_linf: grid too coarse");

  const auto eval = [&](double theta) {
    const Complex rot(std::cos(theta), std::sin(theta));
    double worst = 0.0;
    for (Eigen::Index j = 0; j < w.size(); ++j) {
      worst = std::max(worst, std::abs(w(j) - rot * z(j)));
    }
    return worst;
  };

  const double two_pi = 2.0 * std::numbers::pi;
  const double h = two_pi / opts.grid_points;
  double best_theta = 0.0;
  double best_val = eval(0.0);
  for (int i = 1; i < opts.grid_points; ++i) {
    const double theta = i * h;
    const double val = eval(theta);
    if (val < best_val) {
      best_val = val;
      best_theta = theta;
    }
  }

  // Golden-section on the bracketing cell pair around the grid argmin.
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = best_theta - h;
  double b = best_theta + h;
  double c = b - invphi * (b - a);
  double d = a + invphi * (b - a);
  double fc = eval(c);
  double fd = eval(d);
  while (b - a > opts.interval_tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = eval(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = eval(d);
    }
    if (fc < best_val) {
      best_val = fc;
      best_theta = c;
    }
    if (fd < best_val) {
      best_val = fd;
      best_theta = d;
    }
  }
  return {best_val, detail::wrap_angle(best_theta)};
}

}  // namespace phasesync
