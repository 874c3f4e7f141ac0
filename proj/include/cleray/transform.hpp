#ifndef CLERAY_TRANSFORM_HPP_
#define CLERAY_TRANSFORM_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "cleray/boundary_function.hpp"
#include "cleray/chart.hpp"
#include "cleray/domain.hpp"
#include "cleray/errors.hpp"
#include "cleray/fit.hpp"
#include "cleray/measure.hpp"
#include "cleray/summation.hpp"

namespace cleray {

/// Direct evaluation needs dist(w, z) >= kGuardFactor * (local node spacing) at every node.
inline constexpr double kGuardFactor = 5.0;

namespace detail {

inline void check_guard(const Node& n, const RealPoint4& z, double factor) {
  const double spacing = std::cbrt(n.coord_weight);
  if (distance(n.geo.point, z) < factor * spacing) {
    std::ostringstream os;
    os << "target at distance " << distance(n.geo.point, z) << " from a node with spacing " << spacing
       << "; use the subtracted or decomposed form";
    throw GuardViolation(os.str());
  }
}

inline void check_interior(const Domain& d, const RealPoint4& z) {
  if (!(rho(d, z) < 0.0)) throw ConfigError("interior evaluation requested at a point with rho >= 0");
}

inline std::string point_string(const RealPoint4& p) {
  std::ostringstream os;
  os << "(" << p[0] << ", " << p[1] << ", " << p[2] << ", " << p[3] << ")";
  return os.str();
}

}  // namespace detail

/// C f(z) = (1/(2 pi i)^2) int f(w) / Delta(w, z)^2 dlambda(w) for interior z, batched over
/// functions and targets. Result index: i * zs.size() + k for function i and target k.
inline std::vector<cplx> cauchy_leray_interior(const QuadratureGrid& grid, const std::vector<BoundaryFunction>& fs,
                                               const std::vector<RealPoint4>& zs, double guard = kGuardFactor) {
  const Domain& d = grid.atlas().domain();
  for (const auto& z : zs) detail::check_interior(d, z);
  const std::size_t nf = fs.size(), nz = zs.size();
  std::vector<cplx> fv(nf), kernel(nz);
  return integrate_boundary_batch(grid, Measure::LerayLevi, nf * nz, [&](const Node& n, cplx* out) {
    for (std::size_t k = 0; k < nz; ++k) {
      if (guard > 0.0) detail::check_guard(n, zs[k], guard);
      const cplx D = delta(n.geo.stack.hol_grad, n.geo.point, zs[k]);
      kernel[k] = 1.0 / (D * D);
    }
    for (std::size_t i = 0; i < nf; ++i) fv[i] = fs[i](n.geo.point);
    for (std::size_t i = 0; i < nf; ++i)
      for (std::size_t k = 0; k < nz; ++k) out[i * nz + k] = fv[i] * kernel[k];
  });
}

inline cplx cauchy_leray_interior(const QuadratureGrid& grid, const BoundaryFunction& f, const RealPoint4& z,
                                  double guard = kGuardFactor) {
  return cauchy_leray_interior(grid, std::vector<BoundaryFunction>{f}, std::vector<RealPoint4>{z}, guard)[0];
}

/// A boundary point together with its push z_eps = z + eps N(z).
struct PushedTarget {
  RealPoint4 z;
  double eps = 0.0;
  RealPoint4 z_eps;
};

inline PushedTarget push_target(const Domain& d, const RealPoint4& z, double eps) {
  return {z, eps, eps_push(d, z, eps)};
}

/// int (f(w) - f(z)) / Delta(w, z_eps)^2 dlambda(w) + f(z), batched over pushed targets.
inline std::vector<cplx> cauchy_leray_subtracted(const QuadratureGrid& grid, const BoundaryFunction& f,
                                                 const std::vector<PushedTarget>& ts) {
  std::vector<cplx> fz(ts.size());
  for (std::size_t k = 0; k < ts.size(); ++k) fz[k] = f(ts[k].z);
  auto out = integrate_boundary_batch(grid, Measure::LerayLevi, ts.size(), [&](const Node& n, cplx* o) {
    const cplx fw = f(n.geo.point);
    for (std::size_t k = 0; k < ts.size(); ++k) {
      const cplx D = delta(n.geo.stack.hol_grad, n.geo.point, ts[k].z_eps);
      o[k] = (fw - fz[k]) / (D * D);
    }
  });
  for (std::size_t k = 0; k < ts.size(); ++k) out[k] += fz[k];
  return out;
}

inline cplx cauchy_leray_subtracted(const QuadratureGrid& grid, const BoundaryFunction& f, const RealPoint4& z, double eps) {
  if (!(eps > 0.0)) throw ConfigError("the subtracted form needs eps > 0");
  return cauchy_leray_subtracted(grid, f, {push_target(grid.atlas().domain(), z, eps)})[0];
}

/// C f(z_eps) = f(z) + E(df)(z_eps) + R(f)(z_eps) with
///   E = (1/(2 pi i)^2) int j^*(df ^ dbar d rho) / Delta(w, z_eps),
///   R = -(1/(2 pi i)^2) int (f(w) - f(z)) / Delta(w, z_eps)^2 j^*(H ^ dbar d rho),
///   H = sum_j (w_j - (z_eps)_j) d(d rho / d w_j).
struct Decomposition {
  cplx cauchy;  // subtracted-form value of C f(z_eps)
  cplx e;
  cplx r;
  cplx fz;
  cplx residual() const { return cauchy - fz - e - r; }
};

namespace detail {

inline void check_integrable(const Domain& d, const PushedTarget& t, double reach) {
  if (d.kind() == DomainKind::PowerM && d.m() <= 1.5 && t.eps == 0.0 && std::abs(t.z[0]) < reach) {
    throw NonIntegrable("E and R are not absolutely convergent at eps = 0 near {u1 = 0} for m <= 3/2 (target " +
                        point_string(t.z) + ")");
  }
}

}  // namespace detail

inline std::vector<Decomposition> decompose(const QuadratureGrid& grid, const BoundaryFunction& f,
                                            const std::vector<PushedTarget>& ts) {
  const Domain& d = grid.atlas().domain();
  for (const auto& t : ts) detail::check_integrable(d, t, grid.atlas().radius());
  const std::size_t nt = ts.size();
  std::vector<cplx> fz(nt);
  for (std::size_t k = 0; k < nt; ++k) fz[k] = f(ts[k].z);
  PairwiseSumVector<cplx> sums(3 * nt);
  grid.for_each([&](const Node& n) {
    const NodeGeometry& g = n.geo;
    const cplx fw = f(g.point);
    const cplx dfl = g.wedge_levi(f.differential(g.point, g.tangents));
    const double wk = n.weight * kLerayConstant;
    for (std::size_t k = 0; k < nt; ++k) {
      const RealPoint4& zh = ts[k].z_eps;
      const cplx D = delta(g.stack.hol_grad, g.point, zh);
      const cplx df = fw - fz[k];
      const cplx hl = g.wedge_levi(hessian_one_form(g.stack, g.point, zh));
      const cplx c = df / (D * D) * g.density.leray_levi;
      const cplx e = dfl / D;
      const cplx r = -df / (D * D) * hl;
      require_finite(c + e + r, n);
      sums.add(3 * k, wk * c);
      sums.add(3 * k + 1, wk * e);
      sums.add(3 * k + 2, wk * r);
    }
  });
  std::vector<Decomposition> out(nt);
  for (std::size_t k = 0; k < nt; ++k) out[k] = {sums.value(3 * k) + fz[k], sums.value(3 * k + 1), sums.value(3 * k + 2), fz[k]};
  return out;
}

inline cplx op_E(const QuadratureGrid& grid, const BoundaryFunction& f, const RealPoint4& z, double eps) {
  return decompose(grid, f, {push_target(grid.atlas().domain(), z, eps)})[0].e;
}

inline cplx op_R(const QuadratureGrid& grid, const BoundaryFunction& f, const RealPoint4& z, double eps) {
  return decompose(grid, f, {push_target(grid.atlas().domain(), z, eps)})[0].r;
}

/// max over sampled nodes of |H ^ dbar d rho| / (|w - z| * scale of the Leray-Levi minors).
inline double r_kernel_order(const QuadratureGrid& grid, const BoundaryFunction& f, const PushedTarget& t,
                             std::size_t stride = 97) {
  double worst = 0.0;
  std::size_t i = 0;
  const cplx fz = f(t.z);
  grid.for_each([&](const Node& n) {
    if (i++ % stride) return;
    const NodeGeometry& g = n.geo;
    const cplx D = delta(g.stack.hol_grad, g.point, t.z_eps);
    const double r = std::abs((f(g.point) - fz) / (D * D) * g.wedge_levi(hessian_one_form(g.stack, g.point, t.z_eps)));
    const double dist = distance(g.point, t.z_eps);
    const double scale = std::abs(g.density.leray_levi) + std::abs(g.minors[0]) + std::abs(g.minors[1]) + std::abs(g.minors[2]);
    if (dist > 0.0) worst = std::max(worst, r / (dist * dist / std::norm(D)) / scale);
  });
  return worst;
}

// Local integration by parts on a single chart.

struct IbpResult {
  cplx value;
  double min_derivative = 0.0;  // min |d Delta / d t_partner| over nodes
  double leading = 0.0;         // |III(zeta)|
};

/// int (1 / Delta(w, z)) d/dt_p (f gamma) dt, gamma = Lambda / (d Delta / d t_p), where Lambda dt is
/// the normalized Leray-Levi measure in chart coordinates; f must be supported inside the chart.
inline IbpResult local_ibp_eval(const Domain& d, const BoundaryChart& c, const GridSpec& spec, const BoundaryFunction& f,
                                const RealPoint4& z, double min_margin = 0.5, double fd_fraction = 1e-5) {
  const int p = c.partner_axis();
  const double h = fd_fraction * c.half_widths()[p];
  IbpResult res;
  res.leading = std::abs(ibp_leading_term(d, c));
  res.min_derivative = std::numeric_limits<double>::infinity();
  auto f_gamma = [&](std::array<double, 3> t, double* hint, double* dpd) {
    const ChartSample s = c.evaluate(d, t, hint);
    if (!s.valid) throw ChartMarginViolation("integration-by-parts stencil left the chart");
    const NodeGeometry g = node_geometry(d, c, s);
    const cplx dp = delta_chart_derivative(d, s, p, z);
    if (dpd) *dpd = std::abs(dp);
    return f(s.point) * (kLerayConstant * g.density.leray_levi) / dp;
  };
  PairwiseSum<cplx> sum;
  double hint = 0.0;
  for_each_chart_node(
      d, c, 0, spec, [](const RealPoint4&) { return 1.0; },
      [&](const Node& n) {
        double dpd = 0.0;
        auto tp = n.t, tm = n.t;
        tp[p] += h;
        tm[p] -= h;
        f_gamma(n.t, &hint, &dpd);
        res.min_derivative = std::min(res.min_derivative, dpd);
        const cplx deriv = (f_gamma(tp, &hint, nullptr) - f_gamma(tm, &hint, nullptr)) / (2.0 * h);
        const cplx D = delta(n.geo.stack.hol_grad, n.geo.point, z);
        const cplx v = deriv / D;
        require_finite(v, n);
        sum.add(n.coord_weight * v);
      });
  if (res.min_derivative < min_margin * res.leading) {
    std::ostringstream os;
    os << "min |dDelta/dt| = " << res.min_derivative << " below " << min_margin << " * |III| = " << min_margin * res.leading;
    throw ChartMarginViolation(os.str());
  }
  res.value = sum.value();
  return res;
}

inline IbpResult local_ibp_eval(const QuadratureGrid& grid, int j, const BoundaryFunction& f, const RealPoint4& z,
                                double min_margin = 0.5, double fd_fraction = 1e-5) {
  return local_ibp_eval(grid.atlas().domain(), grid.atlas().charts()[j], grid.spec(), f, z, min_margin, fd_fraction);
}

/// Direct evaluation on one chart without partition of unity (f supported in it).
inline cplx chart_direct_eval(const Domain& d, const BoundaryChart& c, const GridSpec& spec, const BoundaryFunction& f,
                              const RealPoint4& z) {
  PairwiseSum<cplx> sum;
  for_each_chart_node(
      d, c, 0, spec, [](const RealPoint4&) { return 1.0; },
      [&](const Node& n) {
        const cplx D = delta(n.geo.stack.hol_grad, n.geo.point, z);
        sum.add(n.coord_weight * kLerayConstant * n.geo.density.leray_levi * f(n.geo.point) / (D * D));
      });
  return sum.value();
}

inline cplx chart_direct_eval(const QuadratureGrid& grid, int j, const BoundaryFunction& f, const RealPoint4& z) {
  return chart_direct_eval(grid.atlas().domain(), grid.atlas().charts()[j], grid.spec(), f, z);
}

// Boundary values along z_eps.

enum class BoundaryMethod { Subtracted, Decomposed };

inline std::string to_string(BoundaryMethod m) { return m == BoundaryMethod::Subtracted ? "subtracted" : "decomposed"; }

struct BoundaryValueOptions {
  double eps0 = 0.1;
  int steps = 6;  // eps_k = eps0 * 2^-k, k = 0 .. steps-1
  double tol = 1e-3;
  BoundaryMethod method = BoundaryMethod::Decomposed;
  double focus_grading = 4.0;
};

struct BoundaryValueReport {
  RealPoint4 z;
  std::string function;
  std::string method;
  int level = 0;
  std::vector<double> eps;
  std::vector<cplx> values;
  std::vector<double> differences;  // |v_k - v_{k+1}|
  LinearFit rate;                   // log |difference| vs log eps
  cplx extrapolated;
  bool converged = false;
  bool decaying = false;  // differences decrease along the schedule
};

inline BoundaryValueReport boundary_value(const ChartAtlas& atlas, int level, const BoundaryFunction& f, const RealPoint4& z,
                                          const BoundaryValueOptions& opt = {}) {
  const Domain& d = atlas.domain();
  GridSpec spec;
  spec.level = level;
  spec.foci.push_back({z, opt.focus_grading});
  QuadratureGrid grid(atlas, spec);
  std::vector<PushedTarget> ts;
  BoundaryValueReport rep;
  rep.z = z;
  rep.function = f.name();
  rep.method = to_string(opt.method);
  rep.level = level;
  for (int k = 0; k < opt.steps; ++k) {
    const double e = opt.eps0 * std::ldexp(1.0, -k);
    rep.eps.push_back(e);
    ts.push_back(push_target(d, z, e));
  }
  if (opt.method == BoundaryMethod::Subtracted) {
    rep.values = cauchy_leray_subtracted(grid, f, ts);
  } else {
    for (const auto& dc : decompose(grid, f, ts)) rep.values.push_back(dc.fz + dc.e + dc.r);
  }
  std::vector<double> xe;
  for (std::size_t k = 0; k + 1 < rep.values.size(); ++k) {
    rep.differences.push_back(std::abs(rep.values[k] - rep.values[k + 1]));
    xe.push_back(rep.eps[k]);
  }
  rep.rate = fit_loglog(xe, rep.differences);
  const std::size_t n = rep.values.size();
  rep.extrapolated = rep.values.back();
  if (n >= 2 && rep.rate.slope > 0.0) {
    rep.extrapolated = richardson_tail(rep.values[n - 2], rep.values[n - 1], std::pow(2.0, -rep.rate.slope));
  }
  rep.converged = !rep.differences.empty() && rep.differences.back() < opt.tol;
  rep.decaying = rep.differences.size() >= 2;
  for (std::size_t k = 0; k + 1 < rep.differences.size(); ++k)
    if (!(rep.differences[k + 1] < rep.differences[k])) rep.decaying = false;
  return rep;
}

}  // namespace cleray

#endif  // CLERAY_TRANSFORM_HPP_
