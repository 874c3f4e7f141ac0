#ifndef CLERAY_MEASURE_HPP_
#define CLERAY_MEASURE_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "cleray/chart.hpp"
#include "cleray/domain.hpp"
#include "cleray/errors.hpp"
#include "cleray/point.hpp"
#include "cleray/summation.hpp"

namespace cleray {

/// 1/(2 pi i)^2, the normalization of the Cauchy-Leray kernel.
inline constexpr double kLerayConstant = -1.0 / (4.0 * kPi * kPi);

/// Densities against the chart volume element dt1 dt2 dt3.
///  leray_levi: coefficient of the pullback of d rho ^ dbar d rho (oriented as the boundary of D);
///  lebesgue:   the induced area element;
///  gamma:      kLerayConstant * leray_levi / lebesgue, so that C f = int f gamma / Delta^2 dsigma.
struct DensityPair {
  double leray_levi = 0.0;
  double lebesgue = 0.0;
  double gamma = 0.0;
};

/// Everything the evaluators need at a boundary node.
struct NodeGeometry {
  RealPoint4 point;
  std::array<RealPoint4, 3> tangents;
  DerivativeStack stack;
  double orientation = 1.0;
  /// Components of the pulled back 2-form dbar d rho: minors[b] pairs with the b-th tangent.
  std::array<cplx, 3> minors{};
  DensityPair density;

  /// Coefficient of j^*(alpha ^ dbar d rho) for a 1-form alpha given by its values on the tangents.
  cplx wedge_levi(const std::array<cplx, 3>& alpha) const {
    return orientation * (alpha[0] * minors[0] + alpha[1] * minors[1] + alpha[2] * minors[2]);
  }
  /// alpha = sum_k a_k dw_k + b_k dconj(w_k), coefficients (a1, a2, b1, b2).
  cplx wedge_levi(const std::array<cplx, 4>& c) const {
    std::array<cplx, 3> alpha;
    for (int b = 0; b < 3; ++b) {
      const RealPoint4& t = tangents[b];
      alpha[b] = c[0] * dw(t, 0) + c[1] * dw(t, 1) + c[2] * dwbar(t, 0) + c[3] * dwbar(t, 1);
    }
    return wedge_levi(alpha);
  }
};

namespace detail {

inline double det4(const std::array<RealPoint4, 4>& r) {
  double m[4][4];
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) m[i][j] = r[i][j];
  double det = 1.0;
  for (int c = 0; c < 4; ++c) {
    int p = c;
    for (int i = c + 1; i < 4; ++i)
      if (std::abs(m[i][c]) > std::abs(m[p][c])) p = i;
    if (m[p][c] == 0.0) return 0.0;
    if (p != c) {
      for (int j = 0; j < 4; ++j) std::swap(m[p][j], m[c][j]);
      det = -det;
    }
    det *= m[c][c];
    for (int i = c + 1; i < 4; ++i) {
      const double f = m[i][c] / m[c][c];
      for (int j = c; j < 4; ++j) m[i][j] -= f * m[c][j];
    }
  }
  return det;
}

inline cplx levi_pair(const ComplexMatrix2& mixed, const RealPoint4& x, const RealPoint4& y) {
  cplx s = 0.0;
  for (int j = 0; j < 2; ++j)
    for (int k = 0; k < 2; ++k) s += mixed[j][k] * (dwbar(x, k) * dw(y, j) - dwbar(y, k) * dw(x, j));
  return s;
}

}  // namespace detail

inline NodeGeometry node_geometry(const Domain& d, const BoundaryChart& c, const ChartSample& s) {
  NodeGeometry g;
  g.point = s.point;
  g.tangents = s.tangents;
  g.stack = derivative_stack(d, s.point);
  if (!g.stack.hess_finite) {
    throw NonFiniteIntegrand("Leray-Levi density is not finite on the critical variety u1 = 0");
  }
  const auto& T = s.tangents;
  const double det = detail::det4({g.stack.real_grad, T[0], T[1], T[2]});
  g.orientation = det > 0.0 ? 1.0 : -1.0;
  const auto& H = g.stack.mixed_hess;
  g.minors[0] = detail::levi_pair(H, T[1], T[2]);
  g.minors[1] = -detail::levi_pair(H, T[0], T[2]);
  g.minors[2] = detail::levi_pair(H, T[0], T[1]);
  std::array<cplx, 3> drho;
  for (int b = 0; b < 3; ++b) drho[b] = g.stack.hol_grad[0] * dw(T[b], 0) + g.stack.hol_grad[1] * dw(T[b], 1);
  g.density.leray_levi = g.wedge_levi(drho).real();
  const double gn = norm(g.stack.real_grad);
  const double gd = std::abs(dot(g.stack.real_grad, c.dependent_direction()));
  g.density.lebesgue = gn / gd;
  g.density.gamma = kLerayConstant * g.density.leray_levi / g.density.lebesgue;
  return g;
}

inline DensityPair leray_levi_density(const Domain& d, const BoundaryChart& c, const std::array<double, 3>& t) {
  const ChartSample s = c.evaluate(d, t);
  if (!s.valid) throw ConfigError("chart coordinates outside the chart");
  return node_geometry(d, c, s).density;
}

/// A point toward which quadrature nodes are graded (a near-singular target).
struct GridFocus {
  RealPoint4 point;
  double grading = 4.0;
};

struct GridSpec {
  int level = 5;
  std::vector<GridFocus> foci;
  /// Grade toward u1 = 0 on first-kind charts; exponent 2/(m-1) + 2 by default.
  bool critical_grading = true;
  double critical_exponent = 0.0;
  /// Foci farther than this multiple of the chart radius from a chart are ignored on it.
  double focus_reach = 1.5;
};

inline double critical_grading_exponent(const Domain& d, const GridSpec& spec) {
  if (spec.critical_exponent > 0.0) return spec.critical_exponent;
  return 2.0 / (d.m() - 1.0) + 2.0;
}

/// Composite midpoint rule on [lo, hi] with power grading toward breakpoints.
struct Rule1D {
  std::vector<double> x, w;
};

namespace detail {

/// g(s) = (1 + c) s^q / (s^(q-1) + c): g(0) = 0, g(1) = 1, g ~ s^q near 0 and ~ linear near 1.
inline double grade_map(double s, double q, double& dg) {
  constexpr double c = 0.1;
  const double sq1 = std::pow(s, q - 1.0);
  const double den = sq1 + c;
  const double g = (1.0 + c) * sq1 * s / den;
  dg = (1.0 + c) * (q * sq1 * den - sq1 * s * (q - 1.0) * std::pow(s, q - 2.0)) / (den * den);
  return g;
}

inline void append_segment(Rule1D& r, double a, double b, int n, double qa, double qb) {
  if (qa > 1.0 && qb > 1.0) {
    const int na = std::max(1, n / 2);
    append_segment(r, a, 0.5 * (a + b), na, qa, 0.0);
    append_segment(r, 0.5 * (a + b), b, std::max(1, n - na), 0.0, qb);
    return;
  }
  const double len = b - a;
  for (int i = 0; i < n; ++i) {
    const double s = (i + 0.5) / n;
    if (qa > 1.0) {
      double dg;
      const double g = grade_map(s, qa, dg);
      r.x.push_back(a + len * g);
      r.w.push_back(len * dg / n);
    } else if (qb > 1.0) {
      double dg;
      const double g = grade_map(s, qb, dg);
      r.x.push_back(b - len * g);
      r.w.push_back(len * dg / n);
    } else {
      r.x.push_back(a + len * s);
      r.w.push_back(len / n);
    }
  }
}

}  // namespace detail

/// Breakpoints are (position, grading exponent) pairs strictly inside (lo, hi).
inline Rule1D graded_rule(double lo, double hi, int n, std::vector<std::pair<double, double>> breaks) {
  std::sort(breaks.begin(), breaks.end());
  std::vector<std::pair<double, double>> merged;
  const double tol = 1e-12 * (hi - lo);
  for (const auto& b : breaks) {
    if (!(b.first > lo + tol && b.first < hi - tol)) continue;
    if (!merged.empty() && std::abs(merged.back().first - b.first) <= tol) {
      merged.back().second = std::max(merged.back().second, b.second);
    } else {
      merged.push_back(b);
    }
  }
  std::vector<double> ends{lo};
  std::vector<double> q{0.0};
  for (const auto& b : merged) {
    ends.push_back(b.first);
    q.push_back(b.second);
  }
  ends.push_back(hi);
  q.push_back(0.0);
  const int segs = static_cast<int>(ends.size()) - 1;
  const int min_nodes = 2;
  std::vector<int> count(segs, min_nodes);
  int left = n - min_nodes * segs;
  if (left > 0) {
    std::vector<double> frac(segs);
    int used = 0;
    for (int s = 0; s < segs; ++s) {
      const double share = left * (ends[s + 1] - ends[s]) / (hi - lo);
      const int k = static_cast<int>(std::floor(share));
      count[s] += k;
      used += k;
      frac[s] = share - k;
    }
    for (int extra = left - used; extra > 0; --extra) {
      int best = 0;
      for (int s = 1; s < segs; ++s)
        if (frac[s] > frac[best]) best = s;
      ++count[best];
      frac[best] = -1.0;
    }
  }
  Rule1D r;
  for (int s = 0; s < segs; ++s) detail::append_segment(r, ends[s], ends[s + 1], count[s], q[s], q[s + 1]);
  return r;
}

/// A quadrature node with its geometry and combined weight (chart-coordinate weight times
/// partition-of-unity factor).
struct Node {
  int chart = 0;
  std::array<double, 3> t{};
  double coord_weight = 0.0;
  double partition = 0.0;
  double weight = 0.0;
  NodeGeometry geo;
};

/// Graded tensor rules of one chart: toward u1 = 0 on first-kind charts and toward the foci.
inline std::array<Rule1D, 3> chart_rules(const Domain& d, const BoundaryChart& c, const GridSpec& spec) {
  std::array<std::vector<std::pair<double, double>>, 3> breaks;
  if (spec.critical_grading && c.kind() == ChartKind::FirstKind) {
    const int a = c.u1_axis();
    if (a >= 0) breaks[a].push_back({-c.center()[0], critical_grading_exponent(d, spec)});
  }
  for (const auto& f : spec.foci) {
    if (distance(f.point, c.center()) > spec.focus_reach * c.radius() + c.radius()) continue;
    const auto tf = c.coords(f.point);
    for (int a = 0; a < 3; ++a) breaks[a].push_back({tf[a], f.grading});
  }
  std::array<Rule1D, 3> r;
  for (int a = 0; a < 3; ++a) {
    const double h = c.half_widths()[a];
    r[a] = graded_rule(-h, h, 1 << spec.level, breaks[a]);
  }
  return r;
}

/// Visits the nodes of one chart; partition(point) is the partition-of-unity factor.
template <class Partition, class Visitor>
void for_each_chart_node(const Domain& d, const BoundaryChart& c, int chart_id, const GridSpec& spec, Partition&& partition,
                         Visitor&& visit) {
  const auto rules = chart_rules(d, c, spec);
  Node n;
  n.chart = chart_id;
  double hint = 0.0;
  for (std::size_t i0 = 0; i0 < rules[0].x.size(); ++i0)
    for (std::size_t i1 = 0; i1 < rules[1].x.size(); ++i1)
      for (std::size_t i2 = 0; i2 < rules[2].x.size(); ++i2) {
        n.t = {rules[0].x[i0], rules[1].x[i1], rules[2].x[i2]};
        n.coord_weight = rules[0].w[i0] * rules[1].w[i1] * rules[2].w[i2];
        const ChartSample s = c.evaluate(d, n.t, &hint);
        if (!s.valid) continue;
        n.partition = partition(s.point);
        if (n.partition == 0.0) continue;
        n.weight = n.coord_weight * n.partition;
        n.geo = node_geometry(d, c, s);
        visit(static_cast<const Node&>(n));
      }
}

/// Quadrature on the boundary: tensor graded midpoint rules on every chart of an atlas.
/// Nodes are generated on the fly (a level-6 grid does not fit comfortably in memory when
/// materialized with full geometry).
class QuadratureGrid {
 public:
  QuadratureGrid(const ChartAtlas& atlas, GridSpec spec) : atlas_(&atlas), spec_(std::move(spec)) {}

  const ChartAtlas& atlas() const { return *atlas_; }
  const GridSpec& spec() const { return spec_; }
  int level() const { return spec_.level; }
  int nodes_per_axis() const { return 1 << spec_.level; }

  std::array<Rule1D, 3> chart_rules(int j) const { return cleray::chart_rules(atlas_->domain(), atlas_->charts()[j], spec_); }

  /// Visits every node with nonzero weight, chart by chart in a fixed order.
  template <class Visitor>
  void for_each(Visitor&& visit) const {
    for (int j = 0; j < static_cast<int>(atlas_->charts().size()); ++j) for_each_in_chart(j, visit, true);
  }

  /// Visits the nodes of a single chart. With use_partition = false the partition-of-unity
  /// factor is 1 (for functions supported inside the chart).
  template <class Visitor>
  void for_each_in_chart(int j, Visitor&& visit, bool use_partition) const {
    for_each_chart_node(
        atlas_->domain(), atlas_->charts()[j], j, spec_,
        [&](const RealPoint4& p) { return use_partition ? atlas_->partition_weight(j, p) : 1.0; }, visit);
  }

  std::size_t node_count() const {
    std::size_t n = 0;
    for_each([&](const Node&) { ++n; });
    return n;
  }

 private:
  const ChartAtlas* atlas_;
  GridSpec spec_;
};

inline QuadratureGrid build_grid(const ChartAtlas& atlas, int level, std::vector<GridFocus> foci = {}) {
  GridSpec s;
  s.level = level;
  s.foci = std::move(foci);
  return QuadratureGrid(atlas, s);
}

enum class Measure { Lebesgue, LerayLevi };

inline double density_of(const Node& n, Measure m) {
  return m == Measure::Lebesgue ? n.geo.density.lebesgue : kLerayConstant * n.geo.density.leray_levi;
}

inline void require_finite(cplx v, const Node& n) {
  if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
    std::ostringstream os;
    os << "non-finite integrand at chart " << n.chart << " node (" << n.geo.point[0] << ", " << n.geo.point[1] << ", "
       << n.geo.point[2] << ", " << n.geo.point[3] << ")";
    throw NonFiniteIntegrand(os.str());
  }
}

/// sum weight * density * integrand over all nodes. With Measure::LerayLevi the density
/// includes the kernel constant 1/(2 pi i)^2, i.e. it is gamma * dsigma.
template <class F>
cplx integrate_boundary(const QuadratureGrid& grid, Measure m, F&& integrand) {
  PairwiseSum<cplx> sum;
  grid.for_each([&](const Node& n) {
    const cplx v = cplx(integrand(n));
    require_finite(v, n);
    sum.add(n.weight * density_of(n, m) * v);
  });
  return sum.value();
}

/// Batched variant: integrand(node, out) writes `width` values per node.
template <class F>
std::vector<cplx> integrate_boundary_batch(const QuadratureGrid& grid, Measure m, std::size_t width, F&& integrand) {
  PairwiseSumVector<cplx> sums(width);
  std::vector<cplx> buf(width);
  grid.for_each([&](const Node& n) {
    integrand(n, buf.data());
    const double wd = n.weight * density_of(n, m);
    for (std::size_t i = 0; i < width; ++i) {
      require_finite(buf[i], n);
      sums.add(i, wd * buf[i]);
    }
  });
  return sums.values();
}

inline double boundary_area(const QuadratureGrid& grid) {
  return integrate_boundary(grid, Measure::Lebesgue, [](const Node&) { return 1.0; }).real();
}

inline void export_grid_csv(const QuadratureGrid& grid, std::ostream& os) {
  os << "chart,t1,t2,t3,u1,v1,u2,v2,weight,partition,leray_levi,lebesgue,gamma\n";
  os.precision(17);
  grid.for_each([&](const Node& n) {
    const auto& p = n.geo.point;
    const auto& dn = n.geo.density;
    os << n.chart << ',' << n.t[0] << ',' << n.t[1] << ',' << n.t[2] << ',' << p[0] << ',' << p[1] << ',' << p[2] << ','
       << p[3] << ',' << n.coord_weight << ',' << n.partition << ',' << dn.leray_levi << ',' << dn.lebesgue << ','
       << dn.gamma << '\n';
  });
}

}  // namespace cleray

#endif  // CLERAY_MEASURE_HPP_
