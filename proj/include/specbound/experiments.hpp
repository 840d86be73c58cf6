#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "specbound/constants.hpp"
#include "specbound/core.hpp"
#include "specbound/curves.hpp"
#include "specbound/matrix.hpp"
#include "specbound/random.hpp"

namespace specbound {

// ---------------------------------------------------------------------------
// Randomized spectral problems.
// ---------------------------------------------------------------------------

/// A finite symmetric matrix with a designated spectral split and a
/// perturbation of prescribed operator norm.
struct SpectralProblem {
  std::size_t dim = 0;
  Matrix a_matrix;
  std::vector<std::size_t> sigma_set;     // indices into ascending eigenvalues of A
  std::vector<double> sigma_values;       // spectrum component sigma
  std::vector<double> complement_values;  // spectrum component Sigma
  double gap = 0.0;                       // dist(sigma, Sigma)
  Matrix v_matrix;
  double v_norm = 0.0;
};

/// One measurement: perturbation ratio, measured maximal angle, predicted
/// bound N(ratio), and the slack between them.
struct AngleRecord {
  double ratio = 0.0;
  Angle measured{0.0};
  Angle bound{0.0};
  double slack = 0.0;
};

/// QR-orthogonalization (modified Gram-Schmidt with positive diagonal) of a
/// seeded standard-normal matrix.
inline Matrix random_orthogonal(Rng& rng, std::size_t n) {
  Matrix g(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) g(i, j) = rng.normal();
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k < j; ++k) {
      double dot = 0.0;
      for (std::size_t i = 0; i < n; ++i) dot += g(i, k) * g(i, j);
      for (std::size_t i = 0; i < n; ++i) g(i, j) -= dot * g(i, k);
    }
    double norm = 0.0;
    for (std::size_t i = 0; i < n; ++i) norm += g(i, j) * g(i, j);
    norm = std::sqrt(norm);
    if (norm < 1e-8) throw std::domain_error("random_orthogonal: degenerate column");
    if (g(0, j) < 0.0) norm = -norm;  // fix the sign convention
    for (std::size_t i = 0; i < n; ++i) g(i, j) /= norm;
  }
  return g;
}

/// Builds one randomized problem: two eigenvalue clusters at distance
/// exactly `gap` (optionally with Sigma split to both sides of sigma),
/// conjugated by a random orthogonal matrix, plus a random symmetric V
/// rescaled so that ||V|| = ratio * gap. Throws std::domain_error when the
/// construction lands too close to a spectral-projection boundary; callers
/// resample with the next substream.
inline SpectralProblem make_spectral_problem(std::uint64_t seed, std::size_t dim, double gap,
                                             double ratio, bool split_sigma,
                                             std::uint64_t attempt) {
  if (dim < 2) throw std::invalid_argument("make_spectral_problem: dim must be >= 2");
  if (split_sigma && dim < 3) {
    throw std::invalid_argument("make_spectral_problem: split layout needs dim >= 3");
  }
  if (!(gap > 0.0)) throw std::invalid_argument("make_spectral_problem: gap must be positive");
  if (!(ratio > 0.0 && ratio < 0.5)) {
    throw std::invalid_argument("make_spectral_problem: ratio must lie in (0, 1/2)");
  }

  Rng rng(seed, attempt);
  SpectralProblem prob;
  prob.dim = dim;
  prob.gap = gap;

  const std::size_t max_sigma = split_sigma ? dim - 2 : dim - 1;
  const std::size_t k_sigma = 1 + rng.uniform_index(max_sigma);
  const double spread = rng.uniform(0.0, 3.0 * gap);

  // sigma in [-spread, 0] with the contact point pinned at 0.
  prob.sigma_values.push_back(0.0);
  for (std::size_t i = 1; i < k_sigma; ++i) {
    prob.sigma_values.push_back(-spread * rng.uniform());
  }
  const double sigma_min =
      *std::min_element(prob.sigma_values.begin(), prob.sigma_values.end());

  const std::size_t k_big = dim - k_sigma;
  std::size_t k_left = 0;
  if (split_sigma) k_left = 1 + rng.uniform_index(k_big - 1);
  const std::size_t k_right = k_big - k_left;

  // Right part of Sigma in [gap, gap + spread], contact pinned at gap.
  prob.complement_values.push_back(gap);
  for (std::size_t i = 1; i < k_right; ++i) {
    prob.complement_values.push_back(gap + spread * rng.uniform());
  }
  // Optional left part at distance >= gap below sigma.
  for (std::size_t i = 0; i < k_left; ++i) {
    const double offset = (i == 0) ? 0.0 : spread * rng.uniform();
    prob.complement_values.push_back(sigma_min - gap - offset);
  }

  std::vector<std::pair<double, bool>> spectrum;  // (value, belongs to sigma)
  for (double v : prob.sigma_values) spectrum.emplace_back(v, true);
  for (double v : prob.complement_values) spectrum.emplace_back(v, false);
  std::sort(spectrum.begin(), spectrum.end());
  for (std::size_t i = 0; i < spectrum.size(); ++i) {
    if (spectrum[i].second) prob.sigma_set.push_back(i);
  }

  const Matrix q = random_orthogonal(rng, dim);
  Matrix d(dim, dim);
  for (std::size_t i = 0; i < dim; ++i) d(i, i) = spectrum[i].first;
  Matrix a = q * d * transpose(q);
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = i + 1; j < dim; ++j) {
      const double m = 0.5 * (a(i, j) + a(j, i));
      a(i, j) = m;
      a(j, i) = m;
    }
  prob.a_matrix = a;

  Matrix g(dim, dim);
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = 0; j < dim; ++j) g(i, j) = rng.normal();
  Matrix v(dim, dim);
  for (std::size_t i = 0; i < dim; ++i)
    for (std::size_t j = 0; j < dim; ++j) v(i, j) = 0.5 * (g(i, j) + g(j, i));
  const double vnorm0 = operator_norm_symmetric(v);
  if (vnorm0 < 1e-10) throw std::domain_error("make_spectral_problem: degenerate perturbation");
  prob.v_matrix = (ratio * gap / vnorm0) * v;
  prob.v_norm = operator_norm_symmetric(prob.v_matrix);

  // Reject constructions whose perturbed spectrum grazes the projection
  // boundary; the caller retries with the next substream.
  const IntervalSet nbhd = IntervalSet::neighborhood(prob.sigma_values, 0.5 * gap);
  const EigenDecomposition eig = symmetric_eigen(prob.a_matrix + prob.v_matrix);
  for (double mu : eig.values) {
    if (nbhd.boundary_distance(mu) < 1e-9) {
      throw std::domain_error("make_spectral_problem: eigenvalue near neighbourhood boundary");
    }
  }
  return prob;
}

// ---------------------------------------------------------------------------
// Measurements.
// ---------------------------------------------------------------------------

/// Measures the maximal angle between E_A(sigma) and E_{A+V}(O_{d/2}(sigma))
/// and compares it against N(||V||/d).
inline AngleRecord measure_angle(const Matrix& a, const Matrix& v,
                                 std::span<const double> sigma_values, double gap,
                                 const BoundConstants& consts) {
  if (!(gap > 0.0)) throw std::invalid_argument("measure_angle: gap must be positive");
  const IntervalSet nbhd = IntervalSet::neighborhood(sigma_values, 0.5 * gap);

  const EigenDecomposition eig_a = symmetric_eigen(a);
  const Matrix p0 = spectral_projection(eig_a, nbhd);
  const EigenDecomposition eig_b = symmetric_eigen(a + v);
  const Matrix p1 = spectral_projection(eig_b, nbhd);

  AngleRecord rec;
  rec.ratio = operator_norm_symmetric(v) / gap;
  rec.measured = maximal_angle(p0, p1);
  rec.bound = eval_new(Ratio(rec.ratio), consts.kappa);
  rec.slack = rec.bound.radians() - rec.measured.radians();
  return rec;
}

/// Checks that every eigenvalue of A+V lies within ||V|| of an eigenvalue
/// of A (classical spectrum confinement), with `tol` slack.
inline double spectrum_confinement_excess(const Matrix& a, const Matrix& v) {
  const EigenDecomposition ea = symmetric_eigen(a);
  const EigenDecomposition eb = symmetric_eigen(a + v);
  const double vnorm = operator_norm_symmetric(v);
  double excess = 0.0;
  for (double mu : eb.values) {
    double dist = std::numeric_limits<double>::infinity();
    for (double la : ea.values) dist = std::min(dist, std::abs(mu - la));
    excess = std::max(excess, dist - vnorm);
  }
  return excess;
}

/// One randomized trial. The seed fully determines the outcome; degenerate
/// constructions are resampled on the next substream.
inline AngleRecord run_trial(std::uint64_t seed, std::size_t dim, double gap, double ratio,
                             const BoundConstants& consts, bool split_sigma = false) {
  if (!(ratio > 0.0 && ratio < consts.c_crit)) {
    throw std::invalid_argument("run_trial: ratio must lie in (0, c_crit)");
  }
  for (std::uint64_t attempt = 0; attempt < 100; ++attempt) {
    SpectralProblem prob;
    try {
      prob = make_spectral_problem(seed, dim, gap, ratio, split_sigma, attempt);
    } catch (const std::domain_error&) {
      continue;
    }
    const AngleRecord rec =
        measure_angle(prob.a_matrix, prob.v_matrix, prob.sigma_values, gap, consts);
    if (rec.slack < -1e-9) {
      throw std::runtime_error("run_trial: measured angle exceeds the bound");
    }
    if (spectrum_confinement_excess(prob.a_matrix, prob.v_matrix) > 1e-9) {
      throw std::runtime_error("run_trial: spectrum confinement violated");
    }
    return rec;
  }
  throw std::runtime_error("run_trial: persistent degenerate construction");
}

// ---------------------------------------------------------------------------
// Path experiments along B_t = A + t d V/||V||.
// ---------------------------------------------------------------------------

struct PathReport {
  std::vector<double> ts;
  double gap_margin_min = 0.0;      // min over j of delta_j - (1-2 t_j) d
  double triangle_slack = 0.0;      // sum of step angles minus the direct angle
  double local_margin_min = 0.0;    // min over steps of localKMM bound minus step norm
  bool passed = false;
};

/// Walks the partition 0 = t_0 < ... < t_{n+1} = ratio along B_t, checking
/// the spectral gap lower bound, the metric triangle inequality, and the
/// per-step localKMM norm bound.
inline PathReport path_experiment(std::uint64_t seed, std::size_t dim, double gap, double ratio,
                                  std::span<const double> partition,
                                  bool split_sigma = false) {
  if (partition.size() < 2) {
    throw std::invalid_argument("path_experiment: partition needs at least two points");
  }
  if (std::abs(partition.front()) > 1e-15) {
    throw std::invalid_argument("path_experiment: partition must start at 0");
  }
  for (std::size_t j = 0; j + 1 < partition.size(); ++j) {
    if (!(partition[j] < partition[j + 1])) {
      throw std::invalid_argument("path_experiment: partition must be strictly increasing");
    }
  }
  if (std::abs(partition.back() - ratio) > 1e-12 || !(ratio < 0.5)) {
    throw std::invalid_argument("path_experiment: partition must end at ratio < 1/2");
  }

  for (std::uint64_t attempt = 0; attempt < 100; ++attempt) {
    SpectralProblem prob;
    try {
      prob = make_spectral_problem(seed, dim, gap, ratio, split_sigma, attempt);
    } catch (const std::domain_error&) {
      continue;
    }
    const Matrix unit_step = (1.0 / ratio) * prob.v_matrix;  // gap * V/||V||
    const IntervalSet nbhd = IntervalSet::neighborhood(prob.sigma_values, 0.5 * gap);

    PathReport report;
    report.ts.assign(partition.begin(), partition.end());
    report.gap_margin_min = std::numeric_limits<double>::infinity();
    report.local_margin_min = std::numeric_limits<double>::infinity();

    std::vector<Matrix> projections;
    bool degenerate = false;
    try {
      for (double t : partition) {
        const Matrix b = prob.a_matrix + t * unit_step;
        const EigenDecomposition eig = symmetric_eigen(b);
        projections.push_back(spectral_projection(eig, nbhd));

        // delta_t = dist(omega_t, Omega_t), classifying each perturbed
        // eigenvalue to the nearer unperturbed component.
        std::vector<double> omega, Omega;
        for (double mu : eig.values) {
          double d_sigma = std::numeric_limits<double>::infinity();
          double d_big = std::numeric_limits<double>::infinity();
          for (double s : prob.sigma_values) d_sigma = std::min(d_sigma, std::abs(mu - s));
          for (double s : prob.complement_values) d_big = std::min(d_big, std::abs(mu - s));
          (d_sigma <= d_big ? omega : Omega).push_back(mu);
        }
        double delta = std::numeric_limits<double>::infinity();
        for (double w : omega)
          for (double o : Omega) delta = std::min(delta, std::abs(w - o));
        report.gap_margin_min =
            std::min(report.gap_margin_min, delta - (1.0 - 2.0 * t) * gap);
      }
    } catch (const std::domain_error&) {
      degenerate = true;
    }
    if (degenerate) continue;

    double step_sum = 0.0;
    for (std::size_t j = 0; j + 1 < projections.size(); ++j) {
      const double norm = operator_norm_symmetric(projections[j] - projections[j + 1]);
      step_sum += std::asin(std::min(1.0, norm));
      const double t_next = partition[j + 1];
      const double local_bound =
          std::min(1.0, 0.5 * kPi * (t_next - partition[j]) / (1.0 - 2.0 * t_next));
      report.local_margin_min = std::min(report.local_margin_min, local_bound - norm);
    }
    const double direct =
        maximal_angle(projections.front(), projections.back()).radians();
    report.triangle_slack = step_sum - direct;

    report.passed = report.gap_margin_min >= -1e-9 && report.triangle_slack >= -1e-9 &&
                    report.local_margin_min >= -1e-9;
    return report;
  }
  throw std::runtime_error("path_experiment: persistent degenerate construction");
}

// ---------------------------------------------------------------------------
// Sharpness probing.
// ---------------------------------------------------------------------------

struct SharpnessResult {
  std::uint64_t seed = 0;  // UINT64_MAX marks the deterministic 2x2 probe
  AngleRecord record;
};

/// Sweeps seeds 0..trials-1 at gap 1 and returns the trial with the largest
/// measured/bound quotient. For dim 2 the deterministic off-diagonal
/// configuration is probed as well; it is the analytic worst case there.
/// Never asserts attainment: N is an upper bound, not a proven supremum.
inline SharpnessResult sharpness_search(std::size_t trials, std::size_t dim, double ratio,
                                        const BoundConstants& consts) {
  if (trials == 0) throw std::invalid_argument("sharpness_search: trials must be positive");
  SharpnessResult best;
  double best_quotient = -1.0;
  const auto offer = [&](std::uint64_t seed, const AngleRecord& rec) {
    const double q = rec.bound.radians() > 0.0 ? rec.measured.radians() / rec.bound.radians() : 0.0;
    if (q > best_quotient) {
      best_quotient = q;
      best = {seed, rec};
    }
  };
  for (std::uint64_t seed = 0; seed < trials; ++seed) {
    offer(seed, run_trial(seed, dim, 1.0, ratio, consts));
  }
  if (dim == 2) {
    const std::uint64_t probe = std::numeric_limits<std::uint64_t>::max();
    Matrix a(2, 2);
    a(0, 0) = -0.5;
    a(1, 1) = 0.5;
    Matrix v(2, 2);
    v(0, 1) = ratio;
    v(1, 0) = ratio;
    const double sigma[1] = {-0.5};
    offer(probe, measure_angle(a, v, sigma, 1.0, consts));

    // Gap-shrinking extremal for subordinated spectra: rotates by exactly
    // (1/2) arcsin(2 ratio), the sharp value in that disposition.
    Matrix a2(2, 2);
    a2(1, 1) = 1.0;
    Matrix v2(2, 2);
    v2(0, 0) = 2.0 * ratio * ratio;
    v2(1, 1) = -v2(0, 0);
    v2(0, 1) = ratio * std::sqrt(1.0 - 4.0 * ratio * ratio);
    v2(1, 0) = v2(0, 1);
    const double sigma2[1] = {0.0};
    offer(probe, measure_angle(a2, v2, sigma2, 1.0, consts));
  }
  return best;
}

}  // namespace specbound
