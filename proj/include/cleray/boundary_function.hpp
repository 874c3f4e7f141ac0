#ifndef CLERAY_BOUNDARY_FUNCTION_HPP_
#define CLERAY_BOUNDARY_FUNCTION_HPP_

#include <array>
#include <cmath>
#include <functional>
#include <memory>
#include <string>
#include <utility>

#include "cleray/chart.hpp"
#include "cleray/point.hpp"

namespace cleray {

using AmbientGradient = std::array<cplx, 4>;

/// A function on the boundary, given as the restriction of a function on R^4, together with
/// its differential. The differential is the ambient real gradient when supplied and otherwise
/// central differences of the value along tangent vectors.
class BoundaryFunction {
 public:
  using Value = std::function<cplx(const RealPoint4&)>;
  using Gradient = std::function<AmbientGradient(const RealPoint4&)>;

  BoundaryFunction() : BoundaryFunction("zero", [](const RealPoint4&) { return cplx(0.0); }, [](const RealPoint4&) {
    return AmbientGradient{};
  }) {}
  BoundaryFunction(std::string name, Value value, Gradient gradient = {}, double fd_step = 1e-6)
      : name_(std::move(name)), value_(std::move(value)), gradient_(std::move(gradient)), fd_step_(fd_step) {}

  const std::string& name() const { return name_; }
  bool has_analytic_differential() const { return static_cast<bool>(gradient_); }
  double fd_step() const { return fd_step_; }

  cplx operator()(const RealPoint4& w) const { return value_(w); }

  /// df(T) for a real tangent vector T at w.
  cplx differential(const RealPoint4& w, const RealPoint4& tangent) const {
    if (gradient_) {
      const AmbientGradient g = gradient_(w);
      return g[0] * tangent[0] + g[1] * tangent[1] + g[2] * tangent[2] + g[3] * tangent[3];
    }
    const double h = fd_step_;
    return (value_(w + h * tangent) - value_(w - h * tangent)) / (2.0 * h);
  }

  std::array<cplx, 3> differential(const RealPoint4& w, const std::array<RealPoint4, 3>& tangents) const {
    return {differential(w, tangents[0]), differential(w, tangents[1]), differential(w, tangents[2])};
  }

  /// Same values, differential by finite differences only.
  BoundaryFunction without_gradient(double fd_step) const { return BoundaryFunction(name_ + "[fd]", value_, {}, fd_step); }

  BoundaryFunction scaled(cplx a) const {
    auto v = value_;
    auto g = gradient_;
    Gradient gs;
    if (g) gs = [g, a](const RealPoint4& w) {
        AmbientGradient r = g(w);
        for (auto& x : r) x *= a;
        return r;
      };
    return BoundaryFunction("(" + name_ + ")*a", [v, a](const RealPoint4& w) { return a * v(w); }, gs, fd_step_);
  }

  friend BoundaryFunction operator+(const BoundaryFunction& f, const BoundaryFunction& g) {
    auto fv = f.value_, gv = g.value_;
    auto fg = f.gradient_, gg = g.gradient_;
    Gradient sum;
    if (fg && gg) sum = [fg, gg](const RealPoint4& w) {
        AmbientGradient a = fg(w), b = gg(w);
        for (int k = 0; k < 4; ++k) a[k] += b[k];
        return a;
      };
    return BoundaryFunction(f.name_ + "+" + g.name_, [fv, gv](const RealPoint4& w) { return fv(w) + gv(w); }, sum,
                            std::min(f.fd_step_, g.fd_step_));
  }

  friend BoundaryFunction operator*(const BoundaryFunction& f, const BoundaryFunction& g) {
    auto fv = f.value_, gv = g.value_;
    auto fg = f.gradient_, gg = g.gradient_;
    Gradient prod;
    if (fg && gg) prod = [fv, gv, fg, gg](const RealPoint4& w) {
        const cplx a = fv(w), b = gv(w);
        AmbientGradient da = fg(w), db = gg(w), r;
        for (int k = 0; k < 4; ++k) r[k] = da[k] * b + a * db[k];
        return r;
      };
    return BoundaryFunction(f.name_ + "*" + g.name_, [fv, gv](const RealPoint4& w) { return fv(w) * gv(w); }, prod,
                            std::min(f.fd_step_, g.fd_step_));
  }

 private:
  std::string name_;
  Value value_;
  Gradient gradient_;
  double fd_step_;
};

namespace functions {

inline BoundaryFunction constant(cplx c) {
  return BoundaryFunction("const", [c](const RealPoint4&) { return c; }, [](const RealPoint4&) { return AmbientGradient{}; });
}

/// w1^a w2^b; the gradient uses d/du = d/dw and d/dv = i d/dw for holomorphic functions.
inline BoundaryFunction monomial(int a, int b) {
  auto pw = [](cplx x, int k) {
    cplx r = 1.0;
    for (int i = 0; i < k; ++i) r *= x;
    return r;
  };
  std::string name = a == 0 && b == 0 ? "1" : "";
  if (a) name += a == 1 ? "w1" : "w1^" + std::to_string(a);
  if (b) name += b == 1 ? "w2" : "w2^" + std::to_string(b);
  return BoundaryFunction(
      name, [=](const RealPoint4& w) { return pw(w.w1(), a) * pw(w.w2(), b); },
      [=](const RealPoint4& w) {
        const cplx d1 = a ? double(a) * pw(w.w1(), a - 1) * pw(w.w2(), b) : cplx(0.0);
        const cplx d2 = b ? double(b) * pw(w.w1(), a) * pw(w.w2(), b - 1) : cplx(0.0);
        const cplx i(0.0, 1.0);
        return AmbientGradient{d1, i * d1, d2, i * d2};
      });
}

inline BoundaryFunction conj_w2() {
  return BoundaryFunction(
      "conj(w2)", [](const RealPoint4& w) { return std::conj(w.w2()); },
      [](const RealPoint4&) { return AmbientGradient{0.0, 0.0, 1.0, cplx(0.0, -1.0)}; });
}

inline BoundaryFunction re_w2() {
  return BoundaryFunction(
      "Re(w2)", [](const RealPoint4& w) { return cplx(w[2]); },
      [](const RealPoint4&) { return AmbientGradient{0.0, 0.0, 1.0, 0.0}; });
}

inline BoundaryFunction real_coordinate(int k) {
  return BoundaryFunction(
      "x" + std::to_string(k), [k](const RealPoint4& w) { return cplx(w[k]); },
      [k](const RealPoint4&) {
        AmbientGradient g{};
        g[k] = 1.0;
        return g;
      });
}

/// exp(-s / (1 - s)) with s = |w - center|^2 / r^2: smooth, supported in the ball of radius r.
inline BoundaryFunction bump(const RealPoint4& center, double r) {
  auto val = [center, r](const RealPoint4& w) {
    const double s = dot(w - center, w - center) / (r * r);
    if (s >= 1.0) return cplx(0.0);
    return cplx(std::exp(-s / (1.0 - s)));
  };
  auto grad = [center, r](const RealPoint4& w) {
    const RealPoint4 d = w - center;
    const double s = dot(d, d) / (r * r);
    AmbientGradient g{};
    if (s >= 1.0) return g;
    const double a = 1.0 - s;
    const double e = std::exp(-s / a);
    const double ds = -e / (a * a);  // d/ds exp(-s/(1-s))
    for (int k = 0; k < 4; ++k) g[k] = ds * 2.0 * d[k] / (r * r);
    return g;
  };
  return BoundaryFunction("bump", val, grad);
}

/// Bump in the coordinates of a chart: product of profiles in the chart coordinates, supported
/// in the scaled box |t_a| < scale * h_a; zero off the chart's sheet.
inline BoundaryFunction chart_bump(const Domain& d, const BoundaryChart& c, double scale) {
  auto val = [d, c, scale](const RealPoint4& w) {
    const auto t = c.coords(w);
    if (!c.in_box(t, scale) || !c.on_sheet(real_gradient(d, w))) return cplx(0.0);
    double b = 1.0;
    for (int a = 0; a < 3; ++a) b *= bump_profile(t[a] / (scale * c.half_widths()[a]), 1.0);
    return cplx(b);
  };
  auto grad = [d, c, scale](const RealPoint4& w) {
    AmbientGradient g{};
    const auto t = c.coords(w);
    if (!c.in_box(t, scale) || !c.on_sheet(real_gradient(d, w))) return g;
    std::array<double, 3> p, dp;
    for (int a = 0; a < 3; ++a) {
      const double h = scale * c.half_widths()[a];
      const double x = t[a] / h;
      const double q = 1.0 - x * x;
      p[a] = bump_profile(x, 1.0);
      dp[a] = p[a] * (-2.0 * x / (q * q)) / h;
    }
    for (int a = 0; a < 3; ++a) {
      const double da = dp[a] * p[(a + 1) % 3] * p[(a + 2) % 3];
      for (int k = 0; k < 4; ++k) g[k] += da * c.frame()[a + 1][k];
    }
    return g;
  };
  return BoundaryFunction("chart_bump", val, grad);
}

}  // namespace functions

}  // namespace cleray

#endif  // CLERAY_BOUNDARY_FUNCTION_HPP_
