#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "specbound/experiments.hpp"

using namespace specbound;

namespace {
const BoundConstants kConsts = compute_constants();
}

TEST_CASE("2x2 off-diagonal perturbation matches the analytic rotation") {
  const double d = 1.0;
  for (double v : {0.05, 0.2, 0.4}) {
    Matrix a(2, 2);
    a(0, 0) = -0.5 * d;
    a(1, 1) = 0.5 * d;
    Matrix pert(2, 2);
    pert(0, 1) = v;
    pert(1, 0) = v;
    const double sigma[1] = {-0.5 * d};
    const AngleRecord rec = measure_angle(a, pert, sigma, d, kConsts);
    REQUIRE(std::abs(rec.measured.radians() - 0.5 * std::atan(2.0 * v / d)) < 1e-10);
    REQUIRE(rec.slack >= -1e-9);
  }
}

TEST_CASE("trials are reproducible from the seed") {
  const AngleRecord a = run_trial(42, 8, 1.0, 0.3, kConsts);
  const AngleRecord b = run_trial(42, 8, 1.0, 0.3, kConsts);
  REQUIRE(a.measured.radians() == b.measured.radians());
  REQUIRE(a.slack == b.slack);
  const AngleRecord c = run_trial(43, 8, 1.0, 0.3, kConsts);
  REQUIRE(a.measured.radians() != c.measured.radians());
}

TEST_CASE("the ratio -> 0 limit rotates by almost nothing") {
  const AngleRecord rec = run_trial(5, 6, 1.0, 1e-6, kConsts);
  REQUIRE(rec.measured.radians() < 1e-5);
  REQUIRE(rec.slack >= -1e-9);
}

TEST_CASE("the bound holds across a small randomized sweep") {
  for (std::size_t dim : {2u, 4u, 8u}) {
    for (double ratio : {0.1, 0.3, 0.45}) {
      for (std::uint64_t seed = 0; seed < 25; ++seed) {
        const AngleRecord rec = run_trial(seed, dim, 2.5, ratio, kConsts);
        REQUIRE(rec.slack >= -1e-9);
        REQUIRE(rec.measured.radians() < kHalfPi - 1e-6);
        REQUIRE(std::abs(rec.ratio - ratio) < 1e-12);
      }
    }
  }
}

TEST_CASE("the a-priori half-arcsin bound holds for small ratios") {
  // For ||V|| <= d/pi the rotation is bounded by (1/2) arcsin(pi ||V||/d);
  // N coincides with it up to 4/(pi^2+4) and improves on it beyond.
  for (double ratio : {0.1, 0.25, 0.31}) {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
      const AngleRecord rec = run_trial(seed, 6, 1.0, ratio, kConsts);
      REQUIRE(rec.measured.radians() <= 0.5 * std::asin(kPi * ratio) + 1e-9);
      REQUIRE(rec.measured.radians() <= kQuarterPi + 1e-12);
    }
  }
}

TEST_CASE("split spectral layouts also respect the bound") {
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    const AngleRecord rec = run_trial(seed, 8, 1.0, 0.4, kConsts, /*split_sigma=*/true);
    REQUIRE(rec.slack >= -1e-9);
  }
  REQUIRE_THROWS_AS(run_trial(0, 2, 1.0, 0.3, kConsts, /*split_sigma=*/true),
                    std::invalid_argument);
}

TEST_CASE("trial preconditions are enforced") {
  REQUIRE_THROWS_AS(run_trial(0, 1, 1.0, 0.3, kConsts), std::invalid_argument);
  REQUIRE_THROWS_AS(run_trial(0, 4, 1.0, 0.0, kConsts), std::invalid_argument);
  REQUIRE_THROWS_AS(run_trial(0, 4, 1.0, kConsts.c_crit + 0.01, kConsts),
                    std::invalid_argument);
  REQUIRE_THROWS_AS(run_trial(0, 4, -1.0, 0.3, kConsts), std::invalid_argument);
}

TEST_CASE("constructed problems expose the advertised structure") {
  const SpectralProblem p = make_spectral_problem(7, 10, 1.5, 0.3, false, 0);
  REQUIRE(p.dim == 10);
  REQUIRE(p.sigma_set.size() == p.sigma_values.size());
  REQUIRE(p.sigma_values.size() + p.complement_values.size() == 10);
  // dist(sigma, Sigma) is exactly the gap.
  double dist = 1e300;
  for (double s : p.sigma_values)
    for (double t : p.complement_values) dist = std::min(dist, std::abs(s - t));
  REQUIRE(std::abs(dist - 1.5) < 1e-12);
  REQUIRE(std::abs(operator_norm_symmetric(p.v_matrix) - 0.3 * 1.5) < 1e-10);
  REQUIRE(std::abs(p.v_norm - 0.3 * 1.5) < 1e-10);
  REQUIRE(frobenius_norm(p.a_matrix - transpose(p.a_matrix)) < 1e-12);
  REQUIRE(spectrum_confinement_excess(p.a_matrix, p.v_matrix) <= 1e-9);
}

TEST_CASE("single-step path reduces the triangle inequality to equality") {
  const std::vector<double> partition{0.0, 0.3};
  const PathReport r = path_experiment(3, 6, 1.0, 0.3, partition);
  REQUIRE(r.passed);
  REQUIRE(std::abs(r.triangle_slack) < 1e-12);
}

TEST_CASE("uniform four-step path passes all three checks") {
  const std::vector<double> partition{0.0, 0.1, 0.2, 0.3, 0.4};
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const PathReport r = path_experiment(seed, 8, 1.0, 0.4, partition);
    REQUIRE(r.passed);
    REQUIRE(r.gap_margin_min >= -1e-9);
    REQUIRE(r.triangle_slack >= -1e-9);
    REQUIRE(r.local_margin_min >= -1e-9);
  }
}

TEST_CASE("the spectral gap along the path obeys (1-2t) d") {
  // delta_t at t = 0.25 must stay above gap/2.
  const std::vector<double> partition{0.0, 0.25};
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const PathReport r = path_experiment(seed, 6, 2.0, 0.25, partition);
    REQUIRE(r.gap_margin_min >= -1e-9);  // i.e. delta >= (1 - 2 t) d at both points
  }
}

TEST_CASE("path partitions are validated") {
  const std::vector<double> bad_start{0.1, 0.3};
  REQUIRE_THROWS_AS(path_experiment(0, 4, 1.0, 0.3, bad_start),
                    std::invalid_argument);
  const std::vector<double> not_increasing{0.0, 0.2, 0.15, 0.3};
  REQUIRE_THROWS_AS(path_experiment(0, 4, 1.0, 0.3, not_increasing),
                    std::invalid_argument);
  const std::vector<double> wrong_end{0.0, 0.2};
  REQUIRE_THROWS_AS(path_experiment(0, 4, 1.0, 0.3, wrong_end),
                    std::invalid_argument);
}

TEST_CASE("sharpness search includes the analytic planar cases") {
  const SharpnessResult r = sharpness_search(50, 2, 0.2, kConsts);
  REQUIRE(r.record.measured.radians() >= 0.5 * std::atan(0.4) - 1e-10);
  // The subordinated extremal reaches (1/2) arcsin(2 ratio) exactly.
  REQUIRE(r.record.measured.radians() >= 0.5 * std::asin(0.4) - 1e-10);
  REQUIRE(r.record.measured.radians() / r.record.bound.radians() <= 1.0 + 1e-9);
}

TEST_CASE("sharpness search never exceeds the bound in higher dimension") {
  const SharpnessResult r = sharpness_search(30, 6, 0.35, kConsts);
  REQUIRE(r.record.measured.radians() / r.record.bound.radians() <= 1.0 + 1e-9);
  REQUIRE(r.record.slack >= -1e-9);
}
