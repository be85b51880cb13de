#pragma once

// One-dimensional root bracketing and minimisation used by the solvers.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

namespace bneck::numeric {

/// `count` points geometrically spaced on [lo, hi], both ends included.
inline std::vector<double> log_spaced(double lo, double hi, int count) {
  std::vector<double> out;
  if (count <= 0) return out;
  if (count == 1 || lo == hi) return {lo};
  out.reserve(static_cast<std::size_t>(count));
  const double ratio = std::log(hi / lo);
  for (int j = 0; j < count; ++j)
    out.push_back(lo * std::exp(ratio * j / (count - 1)));
  out.back() = hi;
  return out;
}

/// `count` points uniformly spaced on [lo, hi], both ends included.
inline std::vector<double> lin_spaced(double lo, double hi, int count) {
  std::vector<double> out;
  if (count <= 0) return out;
  if (count == 1) return {lo};
  out.reserve(static_cast<std::size_t>(count));
  for (int j = 0; j < count; ++j) out.push_back(lo + (hi - lo) * j / (count - 1));
  out.back() = hi;
  return out;
}

/// Half log-spaced on [lo, split], half uniform on [split, hi]; sorted and
/// deduplicated.
inline std::vector<double> mixed_grid(double lo, double split, double hi,
                                      int count) {
  split = std::clamp(split, lo, hi);
  const int half = std::max(2, count / 2);
  std::vector<double> pts = log_spaced(lo, split, half);
  auto lin = lin_spaced(split, hi, std::max(2, count - half));
  pts.insert(pts.end(), lin.begin(), lin.end());
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

struct BisectResult {
  double x = 0.0;
  double fx = 0.0;
  int iterations = 0;
};

/// Bisection on [lo, hi] where f(lo) and f(hi) have opposite signs. Stops
/// when accept(x, fx) holds, the bracket stops shrinking, or after max_iter.
/// Returns whichever evaluated point had the smallest |f|.
template <class F, class Accept>
BisectResult bisect(F&& f, double lo, double hi, double f_lo, double f_hi,
                    Accept&& accept, int max_iter = 200) {
  BisectResult best{std::abs(f_lo) <= std::abs(f_hi) ? lo : hi,
                    std::abs(f_lo) <= std::abs(f_hi) ? f_lo : f_hi, 0};
  if (f_lo == 0.0) return {lo, 0.0, 0};
  if (f_hi == 0.0) return {hi, 0.0, 0};
  const bool lo_negative = f_lo < 0.0;
  for (int it = 1; it <= max_iter; ++it) {
    const double mid = lo + (hi - lo) / 2.0;
    if (mid <= lo || mid >= hi) break;
    const double fm = f(mid);
    best.iterations = it;
    if (std::abs(fm) < std::abs(best.fx)) {
      best.x = mid;
      best.fx = fm;
    }
    if (fm == 0.0 || accept(mid, fm)) return {mid, fm, it};
    if ((fm < 0.0) == lo_negative)
      lo = mid;
    else
      hi = mid;
  }
  return best;
}

struct MinimizeResult {
  double x = 0.0;
  double fx = 0.0;
  double lo = 0.0;  // final bracket
  double hi = 0.0;
};

/// Golden-section search for a minimum of f on [a, b].
template <class F>
MinimizeResult golden_section(F&& f, double a, double b, double x_tol,
                              int max_iter = 300) {
  static const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = f(c);
  double fd = f(d);
  for (int it = 0; it < max_iter && (b - a) > x_tol; ++it) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = f(d);
    }
  }
  if (fc <= fd) return {c, fc, a, b};
  return {d, fd, a, b};
}

}  // namespace bneck::numeric
