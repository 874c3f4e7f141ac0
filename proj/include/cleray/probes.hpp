#ifndef CLERAY_PROBES_HPP_
#define CLERAY_PROBES_HPP_

#include <cmath>
#include <limits>
#include <string>
#include <vector>

#include "cleray/boundary_function.hpp"
#include "cleray/chart.hpp"
#include "cleray/errors.hpp"
#include "cleray/fit.hpp"
#include "cleray/measure.hpp"
#include "cleray/summation.hpp"
#include "cleray/transform.hpp"

namespace cleray {

// ---------------------------------------------------------------------------------------------
// L^p probe: concentrating bumps and the ratio ||C f_t||_{L^p(S_t)} / ||f_t||_{L^p(bD)}.

/// Support box of f_t at center zeta: half widths (r^2, r, r) along the unitary frame
/// (Reeb direction first), r = r0 t. The evaluation set S_t is the part of the box
/// outer * (r^2, r, r) lying outside gap * (r^2, r, r).
struct BumpFamily {
  RealPoint4 center;
  double r0 = 0.15;
  double gap = 2.0;
  double outer = 4.0;

  std::array<double, 3> widths(double t) const {
    const double r = r0 * t;
    return {r * r, r, r};
  }
};

struct LpProbeRow {
  double t = 0.0;
  std::vector<double> ratio;  // one per p
  std::size_t support_nodes = 0, evaluation_nodes = 0;
};

struct LpProbeResult {
  RealPoint4 center;
  std::vector<double> p;  // +inf for the max norm
  std::vector<LpProbeRow> rows;
  double homogeneity_residual = 0.0;  // max relative change of R under f -> a f
};

namespace detail {

struct WeightedValue {
  double weight;
  cplx value;
};

inline double lp_norm(const std::vector<WeightedValue>& v, double p) {
  if (std::isinf(p)) {
    double m = 0.0;
    for (const auto& x : v) m = std::max(m, std::abs(x.value));
    return m;
  }
  PairwiseSum<double> s;
  for (const auto& x : v) s.add(x.weight * std::pow(std::abs(x.value), p));
  return std::pow(s.value(), 1.0 / p);
}

}  // namespace detail

/// R(t, p) for each t of the schedule; the bump is the chart bump of the support box, and
/// C f_t(z) for z in S_t is the absolutely convergent integral over the support box.
inline LpProbeResult lp_probe(const Domain& d, const BumpFamily& fam, const std::vector<double>& ts, const std::vector<double>& ps,
                              int level, cplx scale = cplx(2.5)) {
  if (!(fam.gap > 1.0 && fam.outer > fam.gap)) throw ConfigError("lp probe needs 1 < gap < outer");
  const RealPoint4 n = real_gradient(d, fam.center);
  const auto frame = unitary_frame(n);
  LpProbeResult res;
  res.center = fam.center;
  res.p = ps;
  GridSpec spec;
  spec.level = level;
  spec.critical_grading = false;
  auto one = [](const RealPoint4&) { return 1.0; };
  for (double t : ts) {
    const auto h = fam.widths(t);
    const BoundaryChart support(fam.center, frame, h, ChartKind::Generic);
    const BoundaryChart around(fam.center, frame, {fam.outer * h[0], fam.outer * h[1], fam.outer * h[2]}, ChartKind::Generic);
    const BoundaryFunction f = functions::chart_bump(d, support, 1.0);
    struct Src {
      RealPoint4 w;
      std::array<cplx, 2> hg;
      cplx fw;  // f(w) times the Leray-Levi weight
    };
    std::vector<Src> src;
    std::vector<detail::WeightedValue> fvals;
    for_each_chart_node(d, support, 0, spec, one, [&](const Node& nd) {
      const cplx fw = f(nd.geo.point);
      fvals.push_back({nd.weight * nd.geo.density.lebesgue, fw});
      if (fw != cplx(0.0)) src.push_back({nd.geo.point, nd.geo.stack.hol_grad, fw * nd.weight * kLerayConstant * nd.geo.density.leray_levi});
    });
    std::vector<detail::WeightedValue> cvals;
    for_each_chart_node(d, around, 0, spec, one, [&](const Node& nd) {
      double q = 0.0;
      for (int a = 0; a < 3; ++a) q = std::max(q, std::abs(nd.t[a]) / h[a]);
      if (q < fam.gap) return;
      PairwiseSum<cplx> s;
      for (const auto& w : src) {
        const cplx D = delta(w.hg, w.w, nd.geo.point);
        s.add(w.fw / (D * D));
      }
      cvals.push_back({nd.weight * nd.geo.density.lebesgue, s.value()});
    });
    if (cvals.empty() || src.empty()) throw ConfigError("lp probe: empty support or evaluation set at t = " + std::to_string(t));
    LpProbeRow row;
    row.t = t;
    row.support_nodes = src.size();
    row.evaluation_nodes = cvals.size();
    auto scaled = [&](std::vector<detail::WeightedValue> v) {
      for (auto& x : v) x.value *= scale;
      return v;
    };
    const auto fs = scaled(fvals), cs = scaled(cvals);
    for (double p : ps) {
      const double r = detail::lp_norm(cvals, p) / detail::lp_norm(fvals, p);
      const double rs = detail::lp_norm(cs, p) / detail::lp_norm(fs, p);
      row.ratio.push_back(r);
      res.homogeneity_residual = std::max(res.homogeneity_residual, std::abs(rs - r) / r);
    }
    res.rows.push_back(row);
  }
  return res;
}

/// Geometric schedule t = 1, 1/2, ..., 2^-(count-1).
inline std::vector<double> halving_schedule(int count) {
  std::vector<double> t;
  for (int k = 0; k < count; ++k) t.push_back(std::ldexp(1.0, -k));
  return t;
}

/// Longest run of consecutive t (in decreasing t) over which the ratio strictly increases.
inline int longest_increasing_run(const LpProbeResult& r, std::size_t p_index) {
  int best = r.rows.empty() ? 0 : 1, run = 1;
  for (std::size_t k = 1; k < r.rows.size(); ++k) {
    run = r.rows[k].ratio[p_index] > r.rows[k - 1].ratio[p_index] ? run + 1 : 1;
    best = std::max(best, run);
  }
  return best;
}

/// Centers on the Flat boundary along {v1 = 0}, where the quartic term degenerates.
inline std::vector<RealPoint4> flat_locus_centers(const std::vector<double>& u1s) {
  std::vector<RealPoint4> out;
  for (double u : u1s) out.push_back({u, 0.0, std::sqrt(1.0 - u * u), 0.0});
  return out;
}

// ---------------------------------------------------------------------------------------------
// Growth of boundary values toward the critical variety of PowerM.

struct BlowupRow {
  double x1 = 0.0;
  RealPoint4 z;
  BoundaryValueReport value;
};

struct BlowupProfile {
  std::vector<BlowupRow> rows;
  LinearFit fit;  // log |C f(z)| vs log |x1|
};

/// Targets z(x1) on the boundary with fixed v1 and v2 = 0, solved for u2 > 0.
inline std::vector<RealPoint4> variety_approach(const Domain& d, const std::vector<double>& x1s, double v1) {
  std::vector<RealPoint4> out;
  for (double x : x1s) {
    const double r = 1.0 - d.phi(0, x) - d.phi(1, v1);
    if (!(r > 0.0)) throw ConfigError("blowup target off the boundary at x1 = " + std::to_string(x));
    out.push_back({x, v1, std::sqrt(r), 0.0});
  }
  return out;
}

inline BlowupProfile blowup_profile(const ChartAtlas& atlas, int level, const BoundaryFunction& f, const std::vector<double>& x1s, double v1,
                                    const BoundaryValueOptions& opt) {
  BlowupProfile p;
  const auto zs = variety_approach(atlas.domain(), x1s, v1);
  std::vector<double> xs, ys;
  for (std::size_t k = 0; k < zs.size(); ++k) {
    BlowupRow row{x1s[k], zs[k], boundary_value(atlas, level, f, zs[k], opt)};
    xs.push_back(std::abs(x1s[k]));
    ys.push_back(std::abs(row.value.extrapolated));
    p.rows.push_back(std::move(row));
  }
  p.fit = fit_loglog(xs, ys);
  return p;
}

}  // namespace cleray

#endif  // CLERAY_PROBES_HPP_
