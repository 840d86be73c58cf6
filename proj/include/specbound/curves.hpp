#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>

#include "specbound/core.hpp"

namespace specbound {

// ---------------------------------------------------------------------------
// Domain constants of the four estimating functions (all closed forms).
// ---------------------------------------------------------------------------

/// Domain endpoint of the KMM bound, 2/(2+pi).
inline constexpr double kDomainKmm = 2.0 / (2.0 + kPi);

/// Domain endpoint of the MS bound, sinh(1)/e.
inline const double kDomainMs = std::sinh(1.0) / std::exp(1.0);

/// Domain endpoint c* of M*, 16 (pi^6 - 2 pi^4 + 32 pi^2 - 32) / (pi^2+4)^4.
inline constexpr double kDomainAm = [] {
  const double p2 = kPi * kPi;
  const double p4 = p2 * p2;
  const double p6 = p4 * p2;
  const double q = p2 + 4.0;
  return 16.0 * (p6 - 2.0 * p4 + 32.0 * p2 - 32.0) / (q * q * q * q);
}();

/// Domain endpoint c_crit of N, (1 - (1 - sqrt(3)/pi)^3) / 2.
inline const double kDomainNew = [] {
  const double t = 1.0 - std::sqrt(3.0) / kPi;
  return 0.5 * (1.0 - t * t * t);
}();

// Branch points shared by M*, N and the closed forms of T.
inline constexpr double kBreakFirst = 4.0 / (kPi * kPi + 4.0);          // 4/(pi^2+4)
inline constexpr double kBreakSecond =
    4.0 * (kPi * kPi - 2.0) / (kPi * kPi * kPi * kPi);                  // 4(pi^2-2)/pi^4
inline constexpr double kBreakAmThird = [] {
  const double q = kPi * kPi + 4.0;
  return 8.0 * kPi * kPi / (q * q);                                     // 8pi^2/(pi^2+4)^2
}();
inline constexpr double kKappaUpper = 2.0 * (kPi - 1.0) / (kPi * kPi);  // 2(pi-1)/pi^2

inline const double kThetaSingleEnd = std::atan(2.0 / kPi);             // arctan(2/pi)
inline const double kThetaTwoEqualStart = std::asin(2.0 / kPi);         // arcsin(2/pi)
inline const double kThetaAmKink =
    std::asin(4.0 * kPi / (kPi * kPi + 4.0));                           // arcsin(4pi/(pi^2+4))

// ---------------------------------------------------------------------------
// The four estimating functions.
// ---------------------------------------------------------------------------

enum class BoundKind { kKmm, kMs, kAm, kNew };

/// A bound kind together with its domain upper endpoint.
struct BoundDomain {
  BoundKind kind;
  double limit;
};

inline BoundDomain bound_domain(BoundKind kind) {
  switch (kind) {
    case BoundKind::kKmm: return {kind, kDomainKmm};
    case BoundKind::kMs: return {kind, kDomainMs};
    case BoundKind::kAm: return {kind, kDomainAm};
    case BoundKind::kNew: return {kind, kDomainNew};
  }
  throw std::logic_error("bound_domain: bad kind");
}

/// f_KMM(x) = asin((pi/2) x/(1-x)) on [0, 2/(2+pi)).
inline Angle eval_kmm(Ratio x) {
  const double v = x.value();
  if (!(v < kDomainKmm)) {
    throw std::domain_error("eval_kmm: x must lie in [0, 2/(2+pi))");
  }
  const double arg = std::min(1.0, 0.5 * kPi * v / (1.0 - v));
  return Angle(std::asin(arg));
}

/// f_MS(x) = (pi/4) log(1/(1-2x)) on [0, sinh(1)/e).
inline Angle eval_ms(Ratio x) {
  const double v = x.value();
  if (!(v < kDomainMs)) {
    throw std::domain_error("eval_ms: x must lie in [0, sinh(1)/e)");
  }
  return Angle(0.25 * kPi * std::log(1.0 / (1.0 - 2.0 * v)));
}

/// M*(x), the three-branch piecewise bound on [0, c*].
inline Angle eval_am(Ratio x) {
  const double v = x.value();
  if (v > kDomainAm + kDomainSlack) {
    throw std::domain_error("eval_am: x must lie in [0, c*]");
  }
  const double p2 = kPi * kPi;
  if (v <= kBreakFirst) {
    return Angle(0.5 * std::asin(std::min(1.0, kPi * v)));
  }
  if (v <= kBreakAmThird) {
    const double arg = kPi * ((p2 + 4.0) * v - 4.0) / (p2 - 4.0);
    return Angle(0.5 * kThetaAmKink + 0.5 * std::asin(std::min(1.0, arg)));
  }
  const double q = p2 + 4.0;
  const double r = p2 - 4.0;
  const double arg = kPi * (q * q * std::min(v, kDomainAm) - 8.0 * p2) / (r * r);
  return Angle(kThetaAmKink + 0.5 * std::asin(std::min(1.0, arg)));
}

/// N(x), the four-branch optimal bound on [0, c_crit]. kappa is the solved
/// matching constant (see constants.hpp); it is injected rather than
/// re-solved because N sits in grid-sweep hot loops.
inline Angle eval_new(Ratio x, double kappa) {
  const double v = x.value();
  if (v > kDomainNew + kDomainSlack) {
    throw std::domain_error("eval_new: x must lie in [0, c_crit]");
  }
  const double p2 = kPi * kPi;
  if (v <= kBreakFirst) {
    return Angle(0.5 * std::asin(std::min(1.0, kPi * v)));
  }
  if (v < kBreakSecond) {
    const double arg = std::sqrt((2.0 * p2 * v - 4.0) / (p2 - 4.0));
    return Angle(std::asin(std::min(1.0, arg)));
  }
  const double w = 1.0 - 2.0 * std::min(v, kDomainNew);
  if (v <= kappa) {
    return Angle(std::asin(std::min(1.0, 0.5 * kPi * (1.0 - std::sqrt(w)))));
  }
  return Angle(1.5 * std::asin(std::min(1.0, 0.5 * kPi * (1.0 - std::cbrt(w)))));
}

// ---------------------------------------------------------------------------
// Side-by-side evaluation.
// ---------------------------------------------------------------------------

/// All bounds evaluated at one abscissa; entries are absent where x lies
/// outside the corresponding domain.
struct CurveSample {
  double x = 0.0;
  std::optional<double> kmm;
  std::optional<double> ms;
  std::optional<double> am;
  std::optional<double> new_bound;
  BoundKind minimum = BoundKind::kNew;
};

inline CurveSample compare_bounds(Ratio x, double kappa) {
  const double v = x.value();
  if (v > 0.5 + kDomainSlack) {
    throw std::domain_error("compare_bounds: x must lie in [0, 1/2]");
  }
  CurveSample s;
  s.x = v;
  if (v < kDomainKmm) s.kmm = eval_kmm(x).radians();
  if (v < kDomainMs) s.ms = eval_ms(x).radians();
  if (v <= kDomainAm) s.am = eval_am(x).radians();
  if (v <= kDomainNew) s.new_bound = eval_new(x, kappa).radians();

  double best = std::numeric_limits<double>::infinity();
  if (s.kmm && *s.kmm < best) { best = *s.kmm; s.minimum = BoundKind::kKmm; }
  if (s.ms && *s.ms < best) { best = *s.ms; s.minimum = BoundKind::kMs; }
  if (s.am && *s.am < best) { best = *s.am; s.minimum = BoundKind::kAm; }
  if (s.new_bound && *s.new_bound <= best) { best = *s.new_bound; s.minimum = BoundKind::kNew; }
  return s;
}

}  // namespace specbound
