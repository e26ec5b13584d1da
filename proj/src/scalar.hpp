#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <utility>

namespace rcd::detail {

/// Brackets h(t) = target for nondecreasing h by doubling steps away from
/// `start`. Returns nullopt when no bracket exists within `max_expand` doublings.
inline std::optional<std::pair<double, double>> bracket_increasing(
    const std::function<double(double)>& h, double target, double start, int max_expand = 200) {
  const double h0 = h(start);
  if (h0 == target) return std::make_pair(start, start);
  const double dir = h0 < target ? 1.0 : -1.0;
  double near = start, width = 1.0;
  for (int e = 0; e < max_expand; ++e) {
    const double far = start + dir * width;
    const double hf = h(far);
    if (std::isfinite(hf) && (dir > 0 ? hf >= target : hf <= target))
      return dir > 0 ? std::make_pair(near, far) : std::make_pair(far, near);
    near = far;
    width *= 2.0;
  }
  return std::nullopt;
}

/// Safeguarded Newton for h(t) = target on a bracket [lo, hi] with
/// h(lo) <= target <= h(hi). `dh` may be empty, in which case this is
/// plain bisection.
inline double solve_increasing(const std::function<double(double)>& h,
                               const std::function<double(double)>& dh, double target,
                               double lo, double hi, int max_iter = 400) {
  double t = 0.5 * (lo + hi);
  for (int it = 0; it < max_iter && lo < hi; ++it) {
    const double r = h(t) - target;
    if (r == 0.0) return t;
    if (r < 0.0) lo = t; else hi = t;
    double next = 0.5 * (lo + hi);
    if (dh) {
      const double slope = dh(t);
      if (slope > 0.0 && std::isfinite(slope)) {
        const double newton = t - r / slope;
        if (newton > lo && newton < hi) next = newton;
      }
    }
    if (next == t || next <= lo || next >= hi) {
      if (hi - lo <= 4.0 * std::abs(t) * 1e-16 + 1e-300) return t;
      next = 0.5 * (lo + hi);
      if (next == lo || next == hi) return t;
    }
    t = next;
  }
  return t;
}

/// Largest t in [inside, outside] (or smallest, when outside < inside) with
/// pred(t) true, assuming pred(inside) holds and pred switches once.
inline double bisect_boundary(const std::function<bool(double)>& pred, double inside,
                              double outside, int max_iter = 200) {
  for (int it = 0; it < max_iter; ++it) {
    const double mid = 0.5 * (inside + outside);
    if (mid == inside || mid == outside) break;
    (pred(mid) ? inside : outside) = mid;
  }
  return outside;
}

}  // namespace rcd::detail
