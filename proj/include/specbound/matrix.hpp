#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numeric>
#include <span>
#include <stdexcept>
#include <utility>
#include <vector>

#include "specbound/core.hpp"

namespace specbound {

/// Minimal dense real matrix, row-major. Sized for the small symmetric
/// problems of this library (dim <= 64).
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  static Matrix identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
    return m;
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

inline Matrix operator+(const Matrix& a, const Matrix& b) {
  Matrix r(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) r(i, j) = a(i, j) + b(i, j);
  return r;
}

inline Matrix operator-(const Matrix& a, const Matrix& b) {
  Matrix r(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) r(i, j) = a(i, j) - b(i, j);
  return r;
}

inline Matrix operator*(double s, const Matrix& a) {
  Matrix r(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) r(i, j) = s * a(i, j);
  return r;
}

inline Matrix operator*(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw std::invalid_argument("matrix product: shape mismatch");
  Matrix r(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (std::size_t j = 0; j < b.cols(); ++j) r(i, j) += aik * b(k, j);
    }
  return r;
}

inline Matrix transpose(const Matrix& a) {
  Matrix r(a.cols(), a.rows());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) r(j, i) = a(i, j);
  return r;
}

inline double frobenius_norm(const Matrix& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) s += a(i, j) * a(i, j);
  return std::sqrt(s);
}

inline double max_abs(const Matrix& a) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < a.cols(); ++j) s = std::max(s, std::abs(a(i, j)));
  return s;
}

// ---------------------------------------------------------------------------
// Symmetric eigendecomposition by cyclic Jacobi rotations.
// ---------------------------------------------------------------------------

struct EigenDecomposition {
  std::vector<double> values;  // ascending
  Matrix vectors;              // column i is the eigenvector of values[i]
};

/// Cyclic Jacobi with off-diagonal Frobenius threshold 1e-13 * ||A||_F and a
/// cap of 100 sweeps. Accurate and dependency-free for the small dimensions
/// used here.
inline EigenDecomposition symmetric_eigen(const Matrix& a_in) {
  const std::size_t n = a_in.rows();
  if (n == 0 || a_in.cols() != n) {
    throw std::invalid_argument("symmetric_eigen: matrix must be square and nonempty");
  }
  const double scale = std::max(1.0, max_abs(a_in));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (std::abs(a_in(i, j) - a_in(j, i)) > 1e-10 * scale) {
        throw std::invalid_argument("symmetric_eigen: matrix is not symmetric");
      }

  Matrix a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) a(i, j) = 0.5 * (a_in(i, j) + a_in(j, i));
  Matrix v = Matrix::identity(n);

  const double norm = frobenius_norm(a);
  const double threshold = 1e-13 * std::max(norm, std::numeric_limits<double>::min());

  bool converged = (n == 1);
  for (int sweep = 0; sweep < 100 && !converged; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += 2.0 * a(p, q) * a(p, q);
    if (std::sqrt(off) <= threshold) {
      converged = true;
      break;
    }
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        const double app = a(p, p);
        const double aqq = a(q, q);
        const double phi = (aqq - app) / (2.0 * apq);
        double t;
        if (std::abs(phi) > 1e10) {
          t = 1.0 / (2.0 * phi);
        } else {
          t = (phi >= 0.0 ? 1.0 : -1.0) / (std::abs(phi) + std::sqrt(phi * phi + 1.0));
        }
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        const double tau = s / (1.0 + c);

        a(p, p) = app - t * apq;
        a(q, q) = aqq + t * apq;
        a(p, q) = 0.0;
        a(q, p) = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          if (i == p || i == q) continue;
          const double aip = a(i, p);
          const double aiq = a(i, q);
          a(i, p) = aip - s * (aiq + tau * aip);
          a(p, i) = a(i, p);
          a(i, q) = aiq + s * (aip - tau * aiq);
          a(q, i) = a(i, q);
        }
        for (std::size_t i = 0; i < n; ++i) {
          const double vip = v(i, p);
          const double viq = v(i, q);
          v(i, p) = vip - s * (viq + tau * vip);
          v(i, q) = viq + s * (vip - tau * viq);
        }
      }
    }
  }
  if (!converged) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off += 2.0 * a(p, q) * a(p, q);
    if (std::sqrt(off) > threshold) {
      throw std::runtime_error("symmetric_eigen: Jacobi sweep cap reached without convergence");
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t i, std::size_t j) { return a(i, i) < a(j, j); });

  EigenDecomposition eig;
  eig.values.resize(n);
  eig.vectors = Matrix(n, n);
  for (std::size_t j = 0; j < n; ++j) {
    eig.values[j] = a(order[j], order[j]);
    for (std::size_t i = 0; i < n; ++i) eig.vectors(i, j) = v(i, order[j]);
  }
  return eig;
}

/// Operator norm of a symmetric matrix: max |eigenvalue|.
inline double operator_norm_symmetric(const Matrix& a) {
  const EigenDecomposition eig = symmetric_eigen(a);
  double s = 0.0;
  for (double v : eig.values) s = std::max(s, std::abs(v));
  return s;
}

// ---------------------------------------------------------------------------
// Interval sets and spectral projections.
// ---------------------------------------------------------------------------

/// A finite union of open intervals, kept merged and sorted.
class IntervalSet {
 public:
  IntervalSet() = default;

  static IntervalSet whole_line() {
    IntervalSet s;
    s.intervals_.emplace_back(-std::numeric_limits<double>::infinity(),
                              std::numeric_limits<double>::infinity());
    return s;
  }

  static IntervalSet neighborhood(std::span<const double> centers, double radius) {
    if (!(radius > 0.0)) throw std::invalid_argument("IntervalSet: radius must be positive");
    std::vector<std::pair<double, double>> raw;
    raw.reserve(centers.size());
    for (double c : centers) raw.emplace_back(c - radius, c + radius);
    std::sort(raw.begin(), raw.end());
    IntervalSet s;
    for (const auto& [lo, hi] : raw) {
      if (!s.intervals_.empty() && lo <= s.intervals_.back().second) {
        s.intervals_.back().second = std::max(s.intervals_.back().second, hi);
      } else {
        s.intervals_.emplace_back(lo, hi);
      }
    }
    return s;
  }

  bool contains(double x) const {
    for (const auto& [lo, hi] : intervals_)
      if (x > lo && x < hi) return true;
    return false;
  }

  /// Distance from x to the nearest finite interval endpoint.
  double boundary_distance(double x) const {
    double d = std::numeric_limits<double>::infinity();
    for (const auto& [lo, hi] : intervals_) {
      if (std::isfinite(lo)) d = std::min(d, std::abs(x - lo));
      if (std::isfinite(hi)) d = std::min(d, std::abs(x - hi));
    }
    return d;
  }

  const std::vector<std::pair<double, double>>& intervals() const { return intervals_; }

 private:
  std::vector<std::pair<double, double>> intervals_;
};

/// Sum of q qT over eigenpairs whose eigenvalue lies inside the set.
/// Requires every eigenvalue to keep a 1e-10 distance from the set boundary.
inline Matrix spectral_projection(const EigenDecomposition& eig, const IntervalSet& set) {
  const std::size_t n = eig.values.size();
  for (double v : eig.values) {
    if (set.boundary_distance(v) < 1e-10) {
      throw std::domain_error("spectral_projection: eigenvalue within 1e-10 of the set boundary");
    }
  }
  Matrix p(n, n);
  for (std::size_t k = 0; k < n; ++k) {
    if (!set.contains(eig.values[k])) continue;
    for (std::size_t i = 0; i < n; ++i) {
      const double qik = eig.vectors(i, k);
      for (std::size_t j = i; j < n; ++j) {
        const double add = qik * eig.vectors(j, k);
        p(i, j) += add;
        if (j != i) p(j, i) = p(i, j);
      }
    }
  }
  return p;
}

inline Matrix spectral_projection(const Matrix& a, const IntervalSet& set) {
  return spectral_projection(symmetric_eigen(a), set);
}

inline bool is_projector(const Matrix& p, double idem_tol = 1e-10, double sym_tol = 1e-12) {
  if (p.rows() != p.cols()) return false;
  if (frobenius_norm(p - transpose(p)) > sym_tol) return false;
  return frobenius_norm(p * p - p) <= idem_tol;
}

/// The metric rho(P, Q) = asin ||P - Q|| on orthogonal projectors.
inline Angle maximal_angle(const Matrix& p, const Matrix& q) {
  if (!is_projector(p) || !is_projector(q)) {
    throw std::invalid_argument("maximal_angle: inputs must be orthogonal projectors");
  }
  const double norm = operator_norm_symmetric(p - q);
  return Angle(std::asin(std::min(1.0, norm)));
}

}  // namespace specbound
