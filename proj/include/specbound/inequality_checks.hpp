#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>

#include "specbound/core.hpp"
#include "specbound/curves.hpp"

#if defined(__GNUC__) && !defined(__clang__) && __has_include(<quadmath.h>)
#include <quadmath.h>
#define SPECBOUND_HAVE_QUADMATH 1
#endif

namespace specbound {

/// Outcome of certifying one appendix inequality on a grid. min_margin is
/// the smallest slack of the strict inequality over the sampled interior
/// points; equality points and exact identities are verified separately and
/// raise std::runtime_error on failure (they signal an implementation bug,
/// not a thin margin).
struct GridReport {
  std::string lemma;
  std::size_t grid_size = 0;
  double min_margin = 0.0;
  double worst_point = 0.0;
  bool passed = false;
};

namespace detail {

// The first-lemma margin near its endpoints degenerates at most
// quadratically, so double precision resolves it. The A.3 estimate margin
// degenerates cubically and needs more bits; see a3_estimate_margin below.
#if defined(SPECBOUND_HAVE_QUADMATH)
using wide_real = __float128;
inline wide_real wide_pi() { return 2 * asinq(1); }  // M_PIq needs -fext-numeric-literals
inline wide_real wide_sin(wide_real x) { return sinq(x); }
inline wide_real wide_asin(wide_real x) { return asinq(x); }
inline wide_real wide_sqrt(wide_real x) { return sqrtq(x); }
#else
using wide_real = long double;
inline wide_real wide_pi() { return std::acos(-1.0L); }
inline wide_real wide_sin(wide_real x) { return std::sin(x); }
inline wide_real wide_asin(wide_real x) { return std::asin(x); }
inline wide_real wide_sqrt(wide_real x) { return std::sqrt(x); }
#endif

/// (1-2x)^2 (1-2y) - (1 - (2/pi) sin(2 theta/3))^3 for the A.3
/// parametrization, evaluated in extended precision: the margin vanishes
/// like 2.9 (x - 2/pi^2)^3 at the left endpoint, far below double-precision
/// cancellation noise at fine grids.
inline double a3_estimate_margin(double x_in) {
  const wide_real pi = wide_pi();
  const wide_real x = x_in;
  const wide_real y = (4 - (pi * pi + 4) * x) / (pi * pi + 4 - 4 * pi * pi * x);
  const wide_real theta = wide_asin(pi * x) + wide_asin(pi * y) / 2;
  const wide_real a = (1 - 2 * x) * (1 - 2 * x) * (1 - 2 * y);
  const wide_real s = 1 - (2 / pi) * wide_sin(2 * theta / 3);
  return static_cast<double>(a - s * s * s);
}

template <class F>
void scan_margin(double lo, double hi, bool closed_hi, std::size_t grid, F&& margin_at,
                 GridReport& report) {
  const double lo_x = lo + 1e-9;
  const double hi_x = hi - (closed_hi ? 0.0 : 1e-9);
  for (std::size_t i = 0; i < grid; ++i) {
    const double x = lo_x + (hi_x - lo_x) * (static_cast<double>(i) + 0.5) / grid;
    const double m = margin_at(x);
    if (std::isnan(m)) continue;  // excluded point
    if (m < report.min_margin) {
      report.min_margin = m;
      report.worst_point = x;
    }
  }
  if (closed_hi) {
    const double m = margin_at(hi_x);
    if (!std::isnan(m) && m < report.min_margin) {
      report.min_margin = m;
      report.worst_point = hi_x;
    }
  }
}

inline GridReport fresh_report(std::string lemma, std::size_t grid) {
  if (grid < 1000) throw std::invalid_argument("appendix checks: grid must be >= 1000");
  GridReport r;
  r.lemma = std::move(lemma);
  r.grid_size = grid;
  r.min_margin = std::numeric_limits<double>::infinity();
  return r;
}

inline void require(bool ok, const char* what) {
  if (!ok) throw std::runtime_error(std::string("appendix check failed: ") + what);
}

}  // namespace detail

enum class A1Variant { kA, kB, kC, kD, kE };

/// The a1 family of elementary sine comparisons, variants (a)-(e), as
/// strict inequalities on their stated open domains.
inline GridReport check_A1(A1Variant variant, std::size_t grid) {
  const double p = kPi;
  const auto equi_two = [p](double th) {  // (2/pi)(1 - sin(th)/pi) sin(th)
    const double s = std::sin(th);
    return 2.0 / p * (1.0 - s / p) * s;
  };
  const auto two_block = [p](double th) {  // 2/pi^2 + (pi^2-4)/(2 pi^2) sin^2
    const double s = std::sin(th);
    return 2.0 / (p * p) + (p * p - 4.0) / (2.0 * p * p) * s * s;
  };
  const auto single = [p](double th) { return std::sin(2.0 * th) / p; };

  GridReport r;
  switch (variant) {
    case A1Variant::kA: {
      r = detail::fresh_report("a1a", grid);
      const auto lhs = [p](double th) {
        const double s = std::sin(th);
        return 2.0 / (p * p) + (2.0 * p - 4.0) / (p * p) * s * s;
      };
      detail::scan_margin(std::asin(1.0 / (p - 1.0)), kHalfPi, false, grid,
                          [&](double th) { return equi_two(th) - lhs(th); }, r);
      break;
    }
    case A1Variant::kB: {
      r = detail::fresh_report("a1b", grid);
      detail::scan_margin(kThetaSingleEnd, kQuarterPi, true, grid,
                          [&](double th) { return two_block(th) - single(th); }, r);
      // Equality at the left endpoint arctan(2/pi).
      detail::require(std::abs(two_block(kThetaSingleEnd) - single(kThetaSingleEnd)) < 1e-10,
                      "A.1(b) equality at arctan(2/pi)");
      break;
    }
    case A1Variant::kC: {
      r = detail::fresh_report("a1c", grid);
      // Equality exactly where sin(theta) = 2/pi; both such points on
      // (0, pi) are excluded from the strictness scan.
      detail::scan_margin(0.0, kPi, false, grid,
                          [&](double th) {
                            if (std::abs(th - kThetaTwoEqualStart) < 1e-6 ||
                                std::abs(th - (kPi - kThetaTwoEqualStart)) < 1e-6) {
                              return std::numeric_limits<double>::quiet_NaN();
                            }
                            return two_block(th) - equi_two(th);
                          },
                          r);
      detail::require(
          std::abs(two_block(kThetaTwoEqualStart) - equi_two(kThetaTwoEqualStart)) < 1e-10,
          "A.1(c) equality at arcsin(2/pi)");
      break;
    }
    case A1Variant::kD: {
      r = detail::fresh_report("a1d", grid);
      const double end = 2.0 * std::atan(1.0 / p);
      detail::scan_margin(0.0, end, false, grid,
                          [&](double th) { return single(th) - equi_two(th); }, r);
      detail::require(std::abs(single(end) - equi_two(end)) < 1e-10,
                      "A.1(d) equality at 2 arctan(1/pi)");
      break;
    }
    case A1Variant::kE: {
      r = detail::fresh_report("a1e", grid);
      detail::scan_margin(2.0 * std::atan(1.0 / p), kPi, false, grid,
                          [&](double th) { return equi_two(th) - single(th); }, r);
      break;
    }
  }
  r.passed = r.min_margin > 0.0;
  return r;
}

/// The a2 square/cube comparison, which switches sign exactly at vartheta.
inline GridReport check_A2(std::size_t grid, double vartheta) {
  GridReport r = detail::fresh_report("a2", grid);
  const auto square = [](double th) {
    const double t = 1.0 - (2.0 / kPi) * std::sin(th);
    return t * t;
  };
  const auto cube = [](double th) {
    const double t = 1.0 - (2.0 / kPi) * std::sin(2.0 * th / 3.0);
    return t * t * t;
  };
  const std::size_t half = grid / 2;
  detail::scan_margin(0.0, vartheta, false, half,
                      [&](double th) { return cube(th) - square(th); }, r);
  detail::scan_margin(vartheta, kHalfPi, true, grid - half,
                      [&](double th) { return square(th) - cube(th); }, r);
  detail::require(std::abs(square(vartheta) - cube(vartheta)) < 1e-10,
                  "A.2 equality at vartheta");
  r.passed = r.min_margin > 0.0;
  return r;
}

/// The a3 parametrization of the three-entry critical sequences:
/// alpha, the partner parameter y with the same constraint value, and the
/// total angle cost theta = asin(pi x) + asin(pi y)/2.
struct LemA3Point {
  double alpha;
  Ratio y;
  Angle theta;
};

inline LemA3Point lemA3_parametrization(Ratio x) {
  const double v = x.value();
  if (!(v > kConstraintCriticalPoint && v < kBreakFirst)) {
    throw std::domain_error("lemA3_parametrization: x must lie in (2/pi^2, 4/(pi^2+4))");
  }
  const double p2 = kPi * kPi;
  const double alpha = constraint_map(x);
  const double y = (4.0 - (p2 + 4.0) * v) / (p2 + 4.0 - 4.0 * p2 * v);
  const double theta = std::asin(kPi * v) + 0.5 * std::asin(kPi * y);
  return {alpha, Ratio(y), Angle(theta)};
}

/// The a3 claims: the two strict ones (lower theta bound and the estimate)
/// enter min_margin; the attained upper theta bound, the 1-2y identity, the
/// constraint-value round trip, the closed-form derivative of theta, and
/// the single sign change of theta' are verified as hard checks.
inline GridReport check_A3(std::size_t grid) {
  GridReport r = detail::fresh_report("a3", grid);
  const double p2 = kPi * kPi;
  const double lo = kConstraintCriticalPoint;
  const double hi = kBreakFirst;
  const double theta_lo = 1.5 * kThetaTwoEqualStart;
  const double theta_hi = std::asin((12.0 + p2) / (8.0 * kPi)) +
                          0.5 * std::asin((12.0 - p2) / (4.0 * kPi));
  const double x_crit = (12.0 + p2) / (8.0 * p2);

  const auto theta_at = [&](double x) { return lemA3_parametrization(Ratio(x)).theta.radians(); };
  const auto dtheta_formula = [&](double x) {
    return 0.5 * kPi / std::sqrt(1.0 - p2 * x * x) * (12.0 + p2 - 8.0 * p2 * x) /
           (p2 + 4.0 - 4.0 * p2 * x);
  };

  const double lo_x = lo + 1e-9;
  const double hi_x = hi - 1e-9;
  const double fd_h = 1e-6;
  int sign_changes = 0;
  double change_at = 0.0;
  double prev_sign = 1.0;
  const double cell = (hi_x - lo_x) / grid;

  for (std::size_t i = 0; i < grid; ++i) {
    const double x = lo_x + (hi_x - lo_x) * (static_cast<double>(i) + 0.5) / grid;
    const LemA3Point pt = lemA3_parametrization(Ratio(x));
    const double y = pt.y.value();
    const double theta = pt.theta.radians();

    const double m_lower = theta - theta_lo;
    const double m_estimate = detail::a3_estimate_margin(x);
    const double m = std::min(m_lower, m_estimate);
    if (m < r.min_margin) {
      r.min_margin = m;
      r.worst_point = x;
    }

    detail::require(theta <= theta_hi + 1e-12, "A.3 upper theta bound");
    detail::require(std::abs((1.0 - 2.0 * y) -
                             (p2 - 4.0) / (p2 + 4.0 - 4.0 * p2 * x) * (1.0 - 2.0 * x)) < 1e-12,
                    "A.3 identity for 1-2y");
    detail::require(std::abs(constraint_map(Ratio(x)) - constraint_map(pt.y)) < 1e-10,
                    "A.3 constraint-value round trip");

    const double der = dtheta_formula(x);
    if (x - fd_h > lo && x + fd_h < hi) {
      const double fd = (theta_at(x + fd_h) - theta_at(x - fd_h)) / (2.0 * fd_h);
      detail::require(std::abs(fd - der) <= 1e-5 * std::max(1.0, std::abs(der)),
                      "A.3 derivative formula vs finite differences");
    }
    const double sign = der >= 0.0 ? 1.0 : -1.0;
    if (i > 0 && sign != prev_sign) {
      ++sign_changes;
      change_at = x;
    }
    prev_sign = sign;
  }
  detail::require(sign_changes == 1, "A.3 theta' changes sign exactly once");
  detail::require(std::abs(change_at - x_crit) <= 1.5 * cell,
                  "A.3 sign change located at (12+pi^2)/(8 pi^2)");

  r.passed = r.min_margin > 0.0;
  return r;
}

/// The a4 comparison (1 - (2/pi) sin(2 theta/3))^3 < (1 - (2/pi) sin(theta/2))^4
/// on (0, pi/2].
inline GridReport check_A4(std::size_t grid) {
  GridReport r = detail::fresh_report("a4", grid);
  detail::scan_margin(0.0, kHalfPi, true, grid,
                      [](double th) {
                        const double a = 1.0 - (2.0 / kPi) * std::sin(2.0 * th / 3.0);
                        const double b = 1.0 - (2.0 / kPi) * std::sin(0.5 * th);
                        return b * b * b * b - a * a * a;
                      },
                      r);
  r.passed = r.min_margin > 0.0;
  return r;
}

}  // namespace specbound
