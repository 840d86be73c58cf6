#pragma once

#include <array>
#include <cmath>
#include <stdexcept>

#include "specbound/core.hpp"
#include "specbound/curves.hpp"
#include "specbound/root_finding.hpp"

namespace specbound {

/// Residual of the matching equation for vartheta,
///   (1 - (2/pi) sin v)^2 - (1 - (2/pi) sin(2v/3))^3.
inline double vartheta_equation(double v) {
  const double a = 1.0 - (2.0 / kPi) * std::sin(v);
  const double b = 1.0 - (2.0 / kPi) * std::sin(2.0 * v / 3.0);
  return a * a - b * b * b;
}

/// Residual of the matching equation for kappa,
///   asin((pi/2)(1 - sqrt(1-2k))) - (3/2) asin((pi/2)(1 - cbrt(1-2k))).
inline double kappa_equation(double k) {
  const double w = 1.0 - 2.0 * k;
  const double lhs = std::asin(std::min(1.0, 0.5 * kPi * (1.0 - std::sqrt(w))));
  const double rhs = 1.5 * std::asin(std::min(1.0, 0.5 * kPi * (1.0 - std::cbrt(w))));
  return lhs - rhs;
}

/// Solves the vartheta equation on its bracket (arcsin(2/pi), pi/2).
inline double solve_vartheta(double tol = 1e-12) {
  if (!(tol > 0.0)) throw std::invalid_argument("solve_vartheta: tol must be positive");
  const double root =
      find_root([](double v) { return vartheta_equation(v); },
                kThetaTwoEqualStart, kHalfPi, std::min(tol, 4e-16));
  if (std::abs(vartheta_equation(root)) >= 1e-12) {
    throw std::runtime_error("solve_vartheta: residual above 1e-12");
  }
  return root;
}

/// Solves the kappa equation on its bracket (4(pi^2-2)/pi^4, 2(pi-1)/pi^2).
inline double solve_kappa(double tol = 1e-12) {
  if (!(tol > 0.0)) throw std::invalid_argument("solve_kappa: tol must be positive");
  const double root =
      find_root([](double k) { return kappa_equation(k); },
                kBreakSecond, kKappaUpper, std::min(tol, 4e-16));
  if (std::abs(kappa_equation(root)) >= 1e-12) {
    throw std::runtime_error("solve_kappa: residual above 1e-12");
  }
  return root;
}

/// Departure of the pair (kappa, vartheta) from the defining relation
/// kappa = 1/2 - 1/2 (1 - (2/pi) sin(vartheta))^2.
inline double cross_check_kappa_vartheta(double kappa, double vartheta) {
  const double t = 1.0 - (2.0 / kPi) * std::sin(vartheta);
  return std::abs(kappa - (0.5 - 0.5 * t * t));
}

/// Every named constant of the bound family, solved once and passed around
/// explicitly (no global cache).
struct BoundConstants {
  double kappa;
  double vartheta;
  double c_crit;
  double c_star;
  double c_kmm;
  double c_ms;
  // 4/(pi^2+4), 4(pi^2-2)/pi^4, 8pi^2/(pi^2+4)^2, 2(pi-1)/pi^2,
  // arctan(2/pi), arcsin(2/pi), arcsin(4pi/(pi^2+4))
  std::array<double, 7> breakpoints;
};

inline BoundConstants compute_constants(double tol = 1e-12) {
  BoundConstants c{};
  c.kappa = solve_kappa(tol);
  c.vartheta = solve_vartheta(tol);
  c.c_crit = kDomainNew;
  c.c_star = kDomainAm;
  c.c_kmm = kDomainKmm;
  c.c_ms = kDomainMs;
  c.breakpoints = {kBreakFirst,     kBreakSecond,       kBreakAmThird, kKappaUpper,
                   kThetaSingleEnd, kThetaTwoEqualStart, kThetaAmKink};
  if (cross_check_kappa_vartheta(c.kappa, c.vartheta) >= 1e-10) {
    throw std::runtime_error("compute_constants: kappa/vartheta cross-check failed");
  }
  return c;
}

}  // namespace specbound
