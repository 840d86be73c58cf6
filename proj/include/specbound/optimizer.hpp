#pragma once

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <thread>
#include <utility>
#include <vector>

#include "specbound/core.hpp"
#include "specbound/curves.hpp"

namespace specbound {

// ---------------------------------------------------------------------------
// Step-parameter sequences and the partition operator W.
// ---------------------------------------------------------------------------

/// A finite nonempty sequence of step parameters, each in [0, 1/pi].
class ParamSeq {
 public:
  explicit ParamSeq(std::vector<double> params) : params_(std::move(params)) {
    if (params_.empty()) {
      throw std::invalid_argument("ParamSeq: sequence must be nonempty");
    }
    for (double& p : params_) {
      if (!(p >= -1e-15 && p <= kStepParamMax + kDomainSlack)) {
        throw std::domain_error("ParamSeq: entry outside [0, 1/pi]");
      }
      p = std::clamp(p, 0.0, kStepParamMax);
    }
  }

  const std::vector<double>& params() const { return params_; }
  std::size_t size() const { return params_.size(); }

 private:
  std::vector<double> params_;
};

/// The interpolation coordinates t_0 < ... < t_{n+1} produced by W.
struct Partition {
  std::vector<double> ts;
};

/// W: t_{j+1} = t_j + lambda_j (1 - 2 t_j), t_0 = 0.
inline Partition apply_W(const ParamSeq& lambda) {
  Partition p;
  p.ts.reserve(lambda.size() + 1);
  double t = 0.0;
  p.ts.push_back(t);
  for (double l : lambda.params()) {
    t = t + l * (1.0 - 2.0 * t);
    p.ts.push_back(t);
  }
  return p;
}

/// Closed form for the last partition point:
/// max W(lambda) = (1 - prod_j (1 - 2 lambda_j)) / 2.
inline double max_W(const ParamSeq& lambda) {
  double prod = 1.0;
  for (double l : lambda.params()) prod *= 1.0 - 2.0 * l;
  return 0.5 * (1.0 - prod);
}

// ---------------------------------------------------------------------------
// Closed forms for T_n.
// ---------------------------------------------------------------------------

/// T_0(theta) = (1/pi) sin(2 theta) for theta <= pi/4, else 0 (D_0 empty).
inline double T0_closed(Angle theta) {
  const double th = theta.radians();
  if (th > kQuarterPi + kDomainSlack) return 0.0;
  return std::sin(2.0 * th) / kPi;
}

/// T_1(theta): T_0 below arctan(2/pi), the two-block value up to
/// arcsin(2/pi), the two-equal value beyond.
inline double T1_closed(Angle theta) {
  const double th = theta.radians();
  const double p2 = kPi * kPi;
  if (th <= kThetaSingleEnd) {
    return std::sin(2.0 * th) / kPi;
  }
  if (th < kThetaTwoEqualStart) {
    const double s = std::sin(th);
    return 2.0 / p2 + (p2 - 4.0) / (2.0 * p2) * s * s;
  }
  const double t = 1.0 - (2.0 / kPi) * std::sin(th);
  return 0.5 - 0.5 * t * t;
}

/// T_2(theta): T_1 up to vartheta, the three-equal value beyond.
inline double T2_closed(Angle theta, double vartheta) {
  const double th = theta.radians();
  if (th <= vartheta) return T1_closed(theta);
  const double t = 1.0 - (2.0 / kPi) * std::sin(2.0 * th / 3.0);
  return 0.5 - 0.5 * t * t * t;
}

// ---------------------------------------------------------------------------
// The full solution T = T_2 with its maximizer.
// ---------------------------------------------------------------------------

enum class OptBranch { kSingle, kTwoBlock, kTwoEqual, kThreeEqual };

struct OptResult {
  Angle theta;
  double value;
  ParamSeq argmax;
  OptBranch branch;
};

/// T(theta) together with a maximizing sequence and the regime it came from.
inline OptResult T_closed(Angle theta, double vartheta) {
  const double th = theta.radians();
  if (th <= kThetaSingleEnd) {
    const double l = std::sin(2.0 * th) / kPi;
    return {theta, T2_closed(theta, vartheta), ParamSeq({l}), OptBranch::kSingle};
  }
  if (th < kThetaTwoEqualStart) {
    // Round-off can push alpha a few ulp outside (1, m) right at the regime
    // boundaries; the clamp shifts the preimages by O(sqrt(1e-12)) at most,
    // well inside the 1e-10 certification tolerances.
    const double alpha = std::clamp(0.5 * kPi * std::tan(th), 1.0 + 1e-15,
                                    kConstraintMax - 1e-13);
    const auto [small, large] = constraint_preimages(alpha);
    return {theta, T2_closed(theta, vartheta),
            ParamSeq({large.value(), small.value()}), OptBranch::kTwoBlock};
  }
  if (th <= vartheta) {
    const double l = std::sin(th) / kPi;
    return {theta, T2_closed(theta, vartheta), ParamSeq({l, l}), OptBranch::kTwoEqual};
  }
  const double l = std::sin(2.0 * th / 3.0) / kPi;
  return {theta, T2_closed(theta, vartheta), ParamSeq({l, l, l}), OptBranch::kThreeEqual};
}

// ---------------------------------------------------------------------------
// Brute-force oracle for T_n.
// ---------------------------------------------------------------------------

namespace detail {

/// Value of the candidate whose free coordinates are `free` and whose last
/// parameter is eliminated from the cost constraint. Returns -1 when the
/// remaining budget is not absorbable by a single parameter.
inline double brute_candidate_value(const std::vector<double>& free, double theta) {
  double budget = theta;
  double prod = 1.0;
  for (double l : free) {
    if (!(l >= -1e-15 && l <= kStepParamMax * (1.0 + 1e-14))) return -1.0;
    budget -= 0.5 * std::asin(std::min(1.0, kPi * l));
    prod *= 1.0 - 2.0 * l;
  }
  if (budget < -1e-12 || budget > kQuarterPi + 1e-8) return -1.0;
  budget = std::clamp(budget, 0.0, kQuarterPi);
  const double last = std::sin(2.0 * budget) / kPi;
  return 0.5 * (1.0 - prod * (1.0 - 2.0 * last));
}

/// Maximizes f over [lo, hi] by golden-section search; f may return -1 for
/// infeasible points. Returns the best abscissa found.
template <class F>
double golden_max(F&& f, double lo, double hi) {
  constexpr double kInvPhi = 0.6180339887498949;
  double a = lo, b = hi;
  double x1 = b - kInvPhi * (b - a);
  double x2 = a + kInvPhi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int i = 0; i < 60 && b - a > 1e-14; ++i) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kInvPhi * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - kInvPhi * (b - a);
      f1 = f(x1);
    }
  }
  return f1 >= f2 ? x1 : x2;
}

struct BruteBest {
  double value = -1.0;
  std::array<int, 4> idx{-1, -1, -1, -1};

  void offer(double v, const std::array<int, 4>& i) {
    if (v > value || (v == value && i < idx)) {
      value = v;
      idx = i;
    }
  }
  void merge(const BruteBest& o) { offer(o.value, o.idx); }
};

}  // namespace detail

/// Grid-search lower bound for T_n(theta), n <= 4. Ordered enumeration
/// lambda_0 >= ... >= lambda_{n-1} over an equispaced grid of [0, 1/pi];
/// the last parameter is eliminated exactly from the cost constraint.
/// One golden-section pass per free coordinate refines the best grid point.
inline double brute_force_Tn(Angle theta_in, int n, int steps) {
  if (n < 0 || n > 4) {
    throw std::invalid_argument("brute_force_Tn: n must lie in [0, 4]");
  }
  if (steps < 100) {
    throw std::invalid_argument("brute_force_Tn: steps must be >= 100");
  }
  const double theta = theta_in.radians();
  if (theta <= 0.0) return 0.0;
  if (theta > (n + 1) * kQuarterPi + kDomainSlack) return 0.0;  // D_n(theta) empty
  if (n == 0) {
    return theta <= kQuarterPi + kDomainSlack
               ? step_cost_inverse(std::min(theta, kQuarterPi))
               : 0.0;
  }

  const int k = n;  // free coordinates
  std::vector<double> lam(steps + 1), cost(steps + 1), fac(steps + 1);
  for (int i = 0; i <= steps; ++i) {
    lam[i] = kStepParamMax * static_cast<double>(i) / steps;
    cost[i] = 0.5 * std::asin(std::min(1.0, kPi * lam[i]));
    fac[i] = 1.0 - 2.0 * lam[i];
  }
  // The representable 1/pi costs ~4e-9 less than pi/4; snap the endpoint so
  // boundary budgets like (n+1) pi/4 keep a nonempty window. Remainders are
  // clamped downward, so candidate values stay valid lower bounds.
  cost[steps] = kQuarterPi;

  // Index window at one depth: cost[i] <= budget (feasible) and the
  // remaining slots (free ones capped by lam[i], plus the eliminated one
  // capped by pi/4) can still absorb the leftover budget.
  const auto window = [&](int hi, double budget, int remaining_entries) {
    int i_max = static_cast<int>(
        std::upper_bound(cost.begin(), cost.end(), budget + 1e-12) - cost.begin() - 1);
    i_max = std::min(i_max, hi);
    const double need = (budget - kQuarterPi - 1e-12) / remaining_entries;
    int i_min = static_cast<int>(std::lower_bound(cost.begin(), cost.end(), need) - cost.begin());
    return std::pair<int, int>{i_min, i_max};
  };

  const auto enumerate_from = [&](int i0, detail::BruteBest& best) {
    std::array<int, 4> idx{-1, -1, -1, -1};
    idx[0] = i0;
    const double b0 = theta - cost[i0];
    const double p0 = fac[i0];

    const auto leaf = [&](double budget, double prod, int i) {
      const double rem = std::clamp(budget - cost[i], 0.0, kQuarterPi);
      const double last = std::sin(2.0 * rem) / kPi;
      return 0.5 * (1.0 - prod * fac[i] * (1.0 - 2.0 * last));
    };

    if (k == 1) {
      best.offer(leaf(theta, 1.0, i0), idx);
      return;
    }
    auto [lo1, hi1] = window(i0, b0, k - 1);
    for (int i1 = lo1; i1 <= hi1; ++i1) {
      idx[1] = i1;
      if (k == 2) {
        best.offer(leaf(b0, p0, i1), idx);
        continue;
      }
      const double b1 = b0 - cost[i1];
      const double p1 = p0 * fac[i1];
      auto [lo2, hi2] = window(i1, b1, k - 2);
      for (int i2 = lo2; i2 <= hi2; ++i2) {
        idx[2] = i2;
        if (k == 3) {
          best.offer(leaf(b1, p1, i2), idx);
          continue;
        }
        const double b2 = b1 - cost[i2];
        const double p2 = p1 * fac[i2];
        auto [lo3, hi3] = window(i2, b2, 1);
        for (int i3 = lo3; i3 <= hi3; ++i3) {
          idx[3] = i3;
          best.offer(leaf(b2, p2, i3), idx);
        }
        idx[3] = -1;
      }
      idx[2] = -1;
    }
  };

  auto [lo0, hi0] = window(steps, theta, k);
  detail::BruteBest best;
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const int span = hi0 - lo0 + 1;
  if (k >= 2 && hw >= 2 && span > 64) {
    const unsigned workers = std::min<unsigned>(hw, 8);
    std::vector<detail::BruteBest> bests(workers);
    std::atomic<int> next{lo0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (;;) {
          const int i0 = next.fetch_add(1);
          if (i0 > hi0) break;
          enumerate_from(i0, bests[w]);
        }
      });
    }
    for (auto& t : pool) t.join();
    for (const auto& b : bests) best.merge(b);
  } else {
    for (int i0 = lo0; i0 <= hi0; ++i0) enumerate_from(i0, best);
  }

  if (best.value < 0.0) return 0.0;

  // Local refinement: one golden-section sweep per free coordinate,
  // radius one grid cell around the best grid point.
  const double cell = kStepParamMax / steps;
  std::vector<double> free(static_cast<std::size_t>(k));
  for (int d = 0; d < k; ++d) free[d] = lam[best.idx[d]];
  double refined = detail::brute_candidate_value(free, theta);
  for (int d = 0; d < k; ++d) {
    const double lo = std::max(0.0, free[d] - cell);
    const double hi = std::min(kStepParamMax, free[d] + cell);
    const double x = detail::golden_max(
        [&](double v) {
          std::vector<double> probe = free;
          probe[d] = v;
          return detail::brute_candidate_value(probe, theta);
        },
        lo, hi);
    std::vector<double> probe = free;
    probe[d] = x;
    const double fv = detail::brute_candidate_value(probe, theta);
    if (fv > refined) {
      refined = fv;
      free[d] = x;
    }
  }
  return std::max(best.value, refined);
}

// ---------------------------------------------------------------------------
// Truncation optimality check.
// ---------------------------------------------------------------------------

struct PrefixCheck {
  std::size_t k;         // prefix (lambda_0, ..., lambda_k)
  double theta_k;        // cost of the prefix
  double prefix_value;   // max W of the prefix
  double oracle_value;   // brute-force T_k(theta_k)
  double slack;          // prefix_value - oracle_value
};

struct TruncationReport {
  std::vector<PrefixCheck> prefixes;
  double worst_slack = 0.0;

  bool passed(double tol) const { return worst_slack >= -tol; }
};

/// For a candidate maximizer, every truncation must solve its reduced
/// problem; reports the worst slack against the brute-force oracle.
inline TruncationReport truncation_check(const ParamSeq& lambda, int steps = 800) {
  if (lambda.size() > 5) {
    throw std::invalid_argument("truncation_check: oracle supports sequences of at most 5 entries");
  }
  TruncationReport report;
  report.worst_slack = std::numeric_limits<double>::infinity();
  std::vector<double> prefix;
  double theta_k = 0.0;
  for (std::size_t k = 0; k < lambda.size(); ++k) {
    prefix.push_back(lambda.params()[k]);
    theta_k += step_cost(Ratio(prefix.back())).radians();
    const double value = max_W(ParamSeq(prefix));
    const double oracle = brute_force_Tn(Angle(theta_k), static_cast<int>(k), steps);
    const double slack = value - oracle;
    report.prefixes.push_back({k, theta_k, value, oracle, slack});
    report.worst_slack = std::min(report.worst_slack, slack);
  }
  return report;
}

// ---------------------------------------------------------------------------
// Witness sequences for the comparison with M*.
// ---------------------------------------------------------------------------

/// The explicit two- or three-entry sequence whose angle costs sum to
/// M*(x) and whose max W equals x, witnessing x < T(M*(x)) for
/// x in (4/(pi^2+4), c*].
inline std::pair<ParamSeq, double> am_comparison_points(Ratio x) {
  const double v = x.value();
  if (!(v > kBreakFirst && v <= kDomainAm + kDomainSlack)) {
    throw std::domain_error("am_comparison_points: x must lie in (4/(pi^2+4), c*]");
  }
  const double theta = eval_am(x).radians();
  std::vector<double> lambda;
  if (theta <= kThetaAmKink) {
    lambda = {kBreakFirst, std::sin(2.0 * theta - kThetaAmKink) / kPi};
  } else {
    lambda = {kBreakFirst, kBreakFirst,
              std::sin(2.0 * (theta - kThetaAmKink)) / kPi};
  }
  ParamSeq seq(std::move(lambda));
  return {seq, max_W(seq)};
}

}  // namespace specbound
