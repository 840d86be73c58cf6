#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <random>

#include "specbound/constants.hpp"
#include "specbound/optimizer.hpp"
#include "specbound/random.hpp"
#include "test_util.hpp"

using namespace specbound;

namespace {
const double kVartheta = solve_vartheta();
const double kKappa = solve_kappa();
}

TEST_CASE("apply_W hand-checked recursions") {
  const Partition zero = apply_W(ParamSeq({0.0, 0.0, 0.0}));
  REQUIRE(zero.ts == std::vector<double>{0.0, 0.0, 0.0, 0.0});

  const Partition one = apply_W(ParamSeq({kStepParamMax}));
  REQUIRE(one.ts.size() == 2);
  REQUIRE(one.ts[0] == 0.0);
  REQUIRE(one.ts[1] == kStepParamMax);

  const Partition two = apply_W(ParamSeq({kStepParamMax, kStepParamMax}));
  const double expected = 2.0 * (kPi - 1.0) / (kPi * kPi);  // = 1/2 - (1-2/pi)^2/2
  REQUIRE(std::abs(two.ts[2] - expected) < 1e-15);
  const double t = 1.0 - 2.0 / kPi;
  REQUIRE(std::abs(two.ts[2] - (0.5 - 0.5 * t * t)) < 1e-15);
}

TEST_CASE("partitions are increasing and stay below 1/2") {
  Rng rng(11);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<double> lambda(1 + rng.uniform_index(6));
    for (double& l : lambda) l = rng.uniform(0.0, kStepParamMax);
    const Partition p = apply_W(ParamSeq(lambda));
    for (std::size_t j = 0; j + 1 < p.ts.size(); ++j) {
      REQUIRE(p.ts[j] <= p.ts[j + 1]);
      REQUIRE(p.ts[j + 1] < 0.5);
    }
  }
}

TEST_CASE("max_W equals the recursion endpoint") {
  Rng rng(12);
  for (int trial = 0; trial < 10000; ++trial) {
    std::vector<double> lambda(1 + rng.uniform_index(6));
    for (double& l : lambda) l = rng.uniform(0.0, kStepParamMax);
    const ParamSeq seq(lambda);
    REQUIRE(std::abs(apply_W(seq).ts.back() - max_W(seq)) < 1e-14);
  }
}

TEST_CASE("max_W special values and permutation invariance") {
  REQUIRE(max_W(ParamSeq({0.0, 0.0, 0.0})) == 0.0);
  const double t = 1.0 - 2.0 / kPi;
  REQUIRE(std::abs(max_W(ParamSeq({kStepParamMax, kStepParamMax})) - (0.5 - 0.5 * t * t)) <
          1e-15);

  std::vector<double> lambda{0.1, 0.2, 0.3};
  const double reference = max_W(ParamSeq(lambda));
  std::sort(lambda.begin(), lambda.end());
  do {
    REQUIRE(std::abs(max_W(ParamSeq(lambda)) - reference) < 1e-15);
  } while (std::next_permutation(lambda.begin(), lambda.end()));
}

TEST_CASE("permutation invariance on random sequences") {
  Rng rng(13);
  std::mt19937_64 shuffler(99);
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<double> lambda(2 + rng.uniform_index(5));
    for (double& l : lambda) l = rng.uniform(0.0, kStepParamMax);
    const double reference = max_W(ParamSeq(lambda));
    std::shuffle(lambda.begin(), lambda.end(), shuffler);
    REQUIRE(std::abs(max_W(ParamSeq(lambda)) - reference) < 1e-15);
  }
}

TEST_CASE("the step map t -> t + x(1-2t) is strictly increasing in t") {
  for (double x : test_util::linspace(0.0, 0.5 - 1e-9, 50)) {
    double prev = -1.0;
    for (double t : test_util::linspace(0.0, 0.5, 2000)) {
      const double v = t + x * (1.0 - 2.0 * t);
      if (x < 0.5) REQUIRE(v > prev);
      prev = v;
    }
  }
}

TEST_CASE("T0 closed form") {
  REQUIRE(T0_closed(Angle(0.0)) == 0.0);
  REQUIRE(std::abs(T0_closed(Angle(kQuarterPi)) - kStepParamMax) < 1e-15);
  REQUIRE(T0_closed(Angle(0.3 * kPi)) == 0.0);  // D_0 empty beyond pi/4
}

TEST_CASE("T1 closed form") {
  const double t = 1.0 - 2.0 / kPi;
  REQUIRE(std::abs(T1_closed(Angle(kHalfPi)) - (0.5 - 0.5 * t * t)) < 1e-15);
  for (double th : test_util::linspace(0.0, kThetaSingleEnd, 200)) {
    REQUIRE(T1_closed(Angle(th)) == T0_closed(Angle(th)));
  }
  // Both adjacent branch formulas agree at arcsin(2/pi).
  const double th = kThetaTwoEqualStart;
  const double s = std::sin(th);
  const double middle = 2.0 / (kPi * kPi) + (kPi * kPi - 4.0) / (2.0 * kPi * kPi) * s * s;
  const double last = 0.5 - 0.5 * (1.0 - 2.0 / kPi * s) * (1.0 - 2.0 / kPi * s);
  REQUIRE(std::abs(middle - last) < 1e-12);
  REQUIRE(std::abs(middle - kBreakSecond) < 1e-12);
  REQUIRE(std::abs(T1_closed(Angle(th)) - middle) < 1e-12);
}

TEST_CASE("T2 closed form") {
  REQUIRE(std::abs(T2_closed(Angle(kHalfPi), kVartheta) - kDomainNew) < 1e-15);
  const double left = T1_closed(Angle(kVartheta));
  const double u = 1.0 - 2.0 / kPi * std::sin(2.0 * kVartheta / 3.0);
  REQUIRE(std::abs(left - (0.5 - 0.5 * u * u * u)) < 1e-10);
  REQUIRE(T2_closed(Angle(0.5), kVartheta) == T1_closed(Angle(0.5)));
}

TEST_CASE("T is strictly increasing and N inverts it") {
  double prev = -1.0;
  for (double th : test_util::linspace(0.0, kHalfPi, 10000)) {
    const double v = T2_closed(Angle(th), kVartheta);
    REQUIRE(v > prev);
    prev = v;
    REQUIRE(std::abs(eval_new(Ratio(v), kKappa).radians() - th) < 1e-8);
  }
}

TEST_CASE("T_closed produces certified maximizers in every regime") {
  for (double th : {0.0, 0.2, 0.5, kThetaSingleEnd, 0.6, 0.65, kThetaTwoEqualStart, 0.8, 1.0,
                    kVartheta, 1.2, 1.4, kHalfPi}) {
    const OptResult r = T_closed(Angle(th), kVartheta);
    double cost = 0.0;
    for (double l : r.argmax.params()) cost += step_cost(Ratio(l)).radians();
    REQUIRE(std::abs(cost - th) < 1e-10);
    REQUIRE(std::abs(max_W(r.argmax) - r.value) < 1e-10);
    REQUIRE(r.value >= 0.0);
    REQUIRE(r.value <= 0.5);
  }
}

TEST_CASE("T_closed regime examples") {
  const OptResult zero = T_closed(Angle(0.0), kVartheta);
  REQUIRE(zero.value == 0.0);
  REQUIRE(zero.branch == OptBranch::kSingle);
  REQUIRE(zero.argmax.params() == std::vector<double>{0.0});

  const OptResult top = T_closed(Angle(kHalfPi), kVartheta);
  REQUIRE(top.branch == OptBranch::kThreeEqual);
  REQUIRE(std::abs(top.value - kDomainNew) < 1e-15);
  REQUIRE(top.argmax.size() == 3);
  for (double l : top.argmax.params()) {
    REQUIRE(std::abs(l - 0.2756644477108960) < 1e-15);  // sin(pi/3)/pi
  }

  const OptResult mid = T_closed(Angle(0.6), kVartheta);
  REQUIRE(mid.branch == OptBranch::kTwoBlock);
  const double s = std::sin(0.6);
  REQUIRE(std::abs(mid.value -
                   (2.0 / (kPi * kPi) + (kPi * kPi - 4.0) / (2.0 * kPi * kPi) * s * s)) <
          1e-15);
  const double alpha = 0.5 * kPi * std::tan(0.6);
  REQUIRE(std::abs(constraint_map(Ratio(mid.argmax.params()[0])) - alpha) < 1e-9);
  REQUIRE(std::abs(constraint_map(Ratio(mid.argmax.params()[1])) - alpha) < 1e-9);
  REQUIRE(mid.argmax.params()[0] > kConstraintCriticalPoint);
  REQUIRE(mid.argmax.params()[0] < kBreakFirst);
  REQUIRE(mid.argmax.params()[1] < kConstraintCriticalPoint);
  REQUIRE(mid.argmax.params()[1] > 0.0);
}

TEST_CASE("two-equal beats single exactly beyond 2 arctan(1/pi)") {
  const double crossover = 2.0 * std::atan(1.0 / kPi);
  const auto two_equal = [](double th) {
    const double u = 1.0 - 2.0 / kPi * std::sin(th);
    return 0.5 - 0.5 * u * u;
  };
  for (double th : test_util::interior_grid(1e-3, crossover - 1e-6, 300)) {
    REQUIRE(two_equal(th) < T0_closed(Angle(th)) + 1e-15);
  }
  for (double th : test_util::interior_grid(crossover + 1e-6, kQuarterPi, 300)) {
    REQUIRE(two_equal(th) > T0_closed(Angle(th)));
  }
}

TEST_CASE("brute force matches T0 when n = 0") {
  for (double th : test_util::linspace(0.01, kQuarterPi, 30)) {
    REQUIRE(std::abs(brute_force_Tn(Angle(th), 0, 100) - T0_closed(Angle(th))) < 1e-9);
  }
  REQUIRE(brute_force_Tn(Angle(0.3 * kPi), 0, 100) == 0.0);
}

TEST_CASE("brute force oracle example runs") {
  REQUIRE(std::abs(brute_force_Tn(Angle(0.6), 1, 2000) - T1_closed(Angle(0.6))) < 1e-6);
  REQUIRE(std::abs(brute_force_Tn(Angle(kHalfPi), 3, 300) -
                   T2_closed(Angle(kHalfPi), kVartheta)) < 1e-5);
}

TEST_CASE("brute force is infeasible for oversized budgets") {
  REQUIRE(brute_force_Tn(Angle(kHalfPi), 1, 200) ==
          Catch::Approx(T1_closed(Angle(kHalfPi))).margin(1e-6));
  REQUIRE_THROWS_AS(brute_force_Tn(Angle(0.5), 5, 200), std::invalid_argument);
  REQUIRE_THROWS_AS(brute_force_Tn(Angle(0.5), 1, 50), std::invalid_argument);
}

TEST_CASE("closed form vs oracle across the budget range") {
  for (double th : test_util::interior_grid(0.0, kHalfPi, 50)) {
    const double t1 = brute_force_Tn(Angle(th), 1, 1500);
    REQUIRE(std::abs(t1 - T1_closed(Angle(th))) < 2e-4);
    const double t2 = brute_force_Tn(Angle(th), 2, 1500);
    const double closed = T2_closed(Angle(th), kVartheta);
    REQUIRE(std::abs(t2 - closed) < 2e-4);
    REQUIRE(t2 <= closed + 1e-9);
  }
  // n = 3 brings no improvement over T_2 (coarser grid keeps this cheap).
  for (double th : test_util::interior_grid(0.0, kHalfPi, 10)) {
    const double t3 = brute_force_Tn(Angle(th), 3, 400);
    const double closed = T2_closed(Angle(th), kVartheta);
    REQUIRE(std::abs(t3 - closed) < 2e-4);
    REQUIRE(t3 <= closed + 1e-9);
  }
}

TEST_CASE("truncation check certifies maximizers and flags bad sequences") {
  const OptResult top = T_closed(Angle(kHalfPi), kVartheta);
  const TruncationReport good = truncation_check(top.argmax, 800);
  REQUIRE(good.passed(1e-5));
  REQUIRE(good.prefixes.size() == 3);

  const TruncationReport single = truncation_check(ParamSeq({0.2}), 400);
  REQUIRE(single.passed(1e-9));  // the k = n prefix is the sequence itself

  // A front-loaded sequence is not optimal for its own budget.
  const TruncationReport bad = truncation_check(ParamSeq({kStepParamMax, 0.01}), 800);
  REQUIRE(bad.worst_slack < -1e-3);
}

TEST_CASE("am_comparison_points reproduces M*^{-1} and witnesses domination") {
  const double x_lo = kBreakFirst + 1e-4;
  const auto [seq_lo, val_lo] = am_comparison_points(Ratio(x_lo));
  REQUIRE(seq_lo.size() == 2);
  REQUIRE(std::abs(val_lo - x_lo) < 1e-10);

  const auto [seq_hi, val_hi] = am_comparison_points(Ratio(kDomainAm));
  REQUIRE(seq_hi.size() == 3);
  REQUIRE(std::abs(val_hi - kDomainAm) < 1e-10);
  const double t_at = T_closed(eval_am(Ratio(kDomainAm)), kVartheta).value;
  REQUIRE(t_at - kDomainAm > 1e-4);  // strict-domination witness

  // Boundary regime theta = arcsin(4pi/(pi^2+4)): lambda = (b, b, 0).
  const auto [seq_mid, val_mid] = am_comparison_points(Ratio(kBreakAmThird));
  const double theta_mid = eval_am(Ratio(kBreakAmThird)).radians();
  REQUIRE(std::abs(theta_mid - kThetaAmKink) < 1e-12);
  REQUIRE(val_mid <= T1_closed(Angle(theta_mid)) + 1e-12);
  REQUIRE(T1_closed(Angle(theta_mid)) < T2_closed(Angle(theta_mid), kVartheta));

  REQUIRE_THROWS_AS(am_comparison_points(Ratio(kBreakFirst)), std::domain_error);
  REQUIRE_THROWS_AS(am_comparison_points(Ratio(kDomainAm + 1e-6)), std::domain_error);
}

TEST_CASE("x < T(M*(x)) across the comparison range") {
  for (double x : test_util::interior_grid(kBreakFirst, kDomainAm, 500)) {
    const auto [seq, value] = am_comparison_points(Ratio(x));
    REQUIRE(std::abs(value - x) < 1e-10);
    const double t_at = T_closed(eval_am(Ratio(x)), kVartheta).value;
    REQUIRE(x < t_at);
  }
}

TEST_CASE("ParamSeq validation") {
  REQUIRE_THROWS_AS(ParamSeq({}), std::invalid_argument);
  REQUIRE_THROWS_AS(ParamSeq({0.5}), std::domain_error);
  REQUIRE_THROWS_AS(ParamSeq({-0.1}), std::domain_error);
}
