#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <utility>

namespace specbound {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kHalfPi = kPi / 2.0;
inline constexpr double kQuarterPi = kPi / 4.0;

/// Upper endpoint of the step-parameter range.
inline constexpr double kStepParamMax = 1.0 / kPi;

/// Slack absorbed at closed interval endpoints (round-off at e.g. x = 1/pi).
inline constexpr double kDomainSlack = 1e-12;

/// An angle in radians, restricted to [0, pi/2].
class Angle {
 public:
  explicit Angle(double radians) : radians_(radians) {
    if (!(radians >= -kDomainSlack && radians <= kHalfPi + kDomainSlack)) {
      throw std::domain_error("Angle: value outside [0, pi/2]");
    }
    radians_ = std::clamp(radians, 0.0, kHalfPi);
  }

  double radians() const { return radians_; }

 private:
  double radians_;
};

/// A dimensionless nonnegative ratio: a perturbation-to-gap ratio ||V||/d
/// or a step parameter lambda. Step-parameter range checks (<= 1/pi) are
/// enforced by the operations that require them, not by the type.
class Ratio {
 public:
  explicit Ratio(double value) : value_(value) {
    if (!(value >= -1e-15)) {
      throw std::domain_error("Ratio: value must be nonnegative");
    }
    value_ = std::max(value, 0.0);
  }

  double value() const { return value_; }

 private:
  double value_;
};

/// Angle cost of one interpolation step: (1/2) asin(pi x) on [0, 1/pi].
inline Angle step_cost(Ratio x) {
  const double v = x.value();
  if (v > kStepParamMax + kDomainSlack) {
    throw std::domain_error("step_cost: x must lie in [0, 1/pi]");
  }
  const double arg = std::min(1.0, kPi * v);
  return Angle(0.5 * std::asin(arg));
}

/// Inverse of step_cost on [0, pi/4]: the step parameter whose angle cost
/// is theta, lambda = (1/pi) sin(2 theta).
inline double step_cost_inverse(double theta) {
  if (!(theta >= -kDomainSlack && theta <= kQuarterPi + kDomainSlack)) {
    throw std::domain_error("step_cost_inverse: theta must lie in [0, pi/4]");
  }
  return std::sin(2.0 * std::clamp(theta, 0.0, kQuarterPi)) / kPi;
}

/// The mapping x -> sqrt(1 - pi^2 x^2) / (1 - 2x) on [0, 1/pi].
/// Equals 1 at x = 0 and x = 4/(pi^2+4), 0 at x = 1/pi, and attains its
/// maximum m at the single critical point x = 2/pi^2.
inline double constraint_map(Ratio x) {
  const double v = x.value();
  if (v > kStepParamMax + kDomainSlack) {
    throw std::domain_error("constraint_map: x must lie in [0, 1/pi]");
  }
  const double num = std::sqrt(std::max(0.0, 1.0 - kPi * kPi * v * v));
  return num / (1.0 - 2.0 * v);
}

/// Critical point of constraint_map.
inline constexpr double kConstraintCriticalPoint = 2.0 / (kPi * kPi);

/// Maximum of constraint_map, m = (1 - 4/pi^2)^(-1/2).
inline const double kConstraintMax = 1.0 / std::sqrt(1.0 - 4.0 / (kPi * kPi));

/// The two preimages of alpha in (1, m) under constraint_map, as roots of
///   z^2 - 4a^2/(pi^2+4a^2) z + (a^2-1)/(pi^2+4a^2) = 0.
/// Returns (lambda_small, lambda_large) with
/// 0 < lambda_small < 2/pi^2 < lambda_large < 4/(pi^2+4).
inline std::pair<Ratio, Ratio> constraint_preimages(double alpha) {
  if (!(alpha > 1.0 && alpha < kConstraintMax)) {
    throw std::domain_error("constraint_preimages: alpha must lie in (1, m)");
  }
  const double a2 = alpha * alpha;
  const double den = kPi * kPi + 4.0 * a2;
  const double sum = 4.0 * a2 / den;
  const double prod = (a2 - 1.0) / den;

  double disc = sum * sum - 4.0 * prod;
  if (disc < 0.0) {
    // Double root at 2/pi^2: only reachable by round-off when alpha ~ m.
    if (alpha < kConstraintMax - kDomainSlack) {
      throw std::domain_error("constraint_preimages: negative discriminant away from m");
    }
    disc = 0.0;
  }
  const double large = 0.5 * (sum + std::sqrt(disc));
  const double small = prod / large;
  return {Ratio(small), Ratio(large)};
}

}  // namespace specbound
