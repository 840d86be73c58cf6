#pragma once

#include <cmath>
#include <stdexcept>
#include <utility>

namespace specbound {

/// Bracketed scalar root finding by plain bisection.
///
/// Deterministic: the same inputs always produce the same iterate sequence.
/// The iteration cap makes failure loud instead of hanging a CI run.
template <class F>
double find_root(F&& f, double lo, double hi, double tol) {
  if (!(tol > 0.0)) {
    throw std::invalid_argument("find_root: tol must be positive");
  }
  if (!(lo < hi)) {
    throw std::invalid_argument("find_root: need lo < hi");
  }

  double flo = f(lo);
  double fhi = f(hi);
  if (!std::isfinite(flo) || !std::isfinite(fhi)) {
    throw std::runtime_error("find_root: non-finite function value at bracket endpoint");
  }
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  if (flo * fhi > 0.0) {
    throw std::runtime_error("find_root: no sign change on [lo, hi]");
  }

  constexpr int kMaxIterations = 200;
  for (int iter = 0; iter < kMaxIterations; ++iter) {
    const double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) return mid;  // bracket exhausted in double precision
    const double fmid = f(mid);
    if (!std::isfinite(fmid)) {
      throw std::runtime_error("find_root: non-finite function value inside bracket");
    }
    if (fmid == 0.0) return mid;
    if ((flo < 0.0) == (fmid < 0.0)) {
      lo = mid;
      flo = fmid;
    } else {
      hi = mid;
      fhi = fmid;
    }
    if (hi - lo <= tol) return lo + 0.5 * (hi - lo);
  }
  throw std::runtime_error("find_root: iteration cap reached before bracket width <= tol");
}

}  // namespace specbound
