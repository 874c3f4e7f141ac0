#ifndef CLERAY_FIT_HPP_
#define CLERAY_FIT_HPP_

#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

namespace cleray {

struct LinearFit {
  double slope = std::numeric_limits<double>::quiet_NaN();
  double intercept = std::numeric_limits<double>::quiet_NaN();
  double r2 = std::numeric_limits<double>::quiet_NaN();
  std::size_t points = 0;
};

/// Ordinary least squares y = intercept + slope * x.
inline LinearFit fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  LinearFit f;
  const std::size_t n = x.size();
  f.points = n;
  if (n < 2 || y.size() != n) return f;
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) return f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  f.r2 = syy > 0.0 ? sxy * sxy / (sxx * syy) : 1.0;
  return f;
}

/// Fit log|y| = c + slope log|x|; non-positive entries are skipped.
inline LinearFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y) {
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < x.size() && i < y.size(); ++i) {
    if (x[i] > 0.0 && y[i] > 0.0 && std::isfinite(x[i]) && std::isfinite(y[i])) {
      lx.push_back(std::log(x[i]));
      ly.push_back(std::log(y[i]));
    }
  }
  return fit_line(lx, ly);
}

/// Richardson tail for a sequence whose increments shrink by the factor r < 1 per step:
/// v_inf = v_n + (v_n - v_{n-1}) r / (1 - r).
template <class T>
T richardson_tail(const T& prev, const T& last, double r) {
  if (!(r > 0.0 && r < 1.0)) return last;
  return last + (last - prev) * (r / (1.0 - r));
}

}  // namespace cleray

#endif  // CLERAY_FIT_HPP_
