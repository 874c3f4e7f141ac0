#ifndef CLERAY_CHART_HPP_
#define CLERAY_CHART_HPP_

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "cleray/domain.hpp"
#include "cleray/errors.hpp"
#include "cleray/point.hpp"

namespace cleray {

enum class ChartKind { FirstKind, SecondKind, Generic };

inline std::string to_string(ChartKind k) {
  switch (k) {
    case ChartKind::FirstKind: return "first";
    case ChartKind::SecondKind: return "second";
    case ChartKind::Generic: return "generic";
  }
  return "unknown";
}

/// Smooth compactly supported profile exp(-c t^2 / (1 - t^2)) on (-1, 1).
inline double bump_profile(double t, double c) {
  const double a = 1.0 - t * t;
  if (a <= 0.0) return 0.0;
  return std::exp(-c * t * t / a);
}

/// Boundary point and tangent frame of a chart at given chart coordinates.
struct ChartSample {
  bool valid = false;
  RealPoint4 point;
  std::array<RealPoint4, 3> tangents;
};

namespace detail {

inline RealPoint4 normalized(const RealPoint4& v) { return (1.0 / norm(v)) * v; }

/// Gram-Schmidt of a standard basis vector against an orthonormal set; picks the basis
/// vector with the largest remaining component.
inline RealPoint4 complete_basis(const std::vector<RealPoint4>& basis) {
  RealPoint4 best;
  double best_norm = -1.0;
  for (int k = 0; k < 4; ++k) {
    RealPoint4 e;
    e[k] = 1.0;
    for (const auto& b : basis) e -= dot(e, b) * b;
    const double n = norm(e);
    if (n > best_norm) {
      best_norm = n;
      best = e;
    }
  }
  return normalized(best);
}

}  // namespace detail

/// Unitary frame at a boundary point, as in the local coordinates of the Flat-domain argument:
/// f0 is the outward normal (the v2 direction), f1 = -J f0 (the u2 direction) and f2, f3 = J f2
/// span the complex tangent line.
inline std::array<RealPoint4, 4> unitary_frame(const RealPoint4& outward_normal) {
  std::array<RealPoint4, 4> f;
  f[0] = detail::normalized(outward_normal);
  f[1] = -1.0 * complex_structure(f[0]);
  f[2] = detail::complete_basis({f[0], f[1]});
  f[3] = complex_structure(f[2]);
  return f;
}

/// Frame whose first chart axis is exactly the u1 axis, used on patches meeting {u1 = 0}:
/// f0 is the normal with its u1 component removed.
inline std::array<RealPoint4, 4> critical_frame(const RealPoint4& outward_normal) {
  std::array<RealPoint4, 4> f;
  RealPoint4 n = outward_normal;
  n[0] = 0.0;
  f[0] = detail::normalized(n);
  f[1] = RealPoint4(1.0, 0.0, 0.0, 0.0);
  f[2] = detail::complete_basis({f[0], f[1]});
  f[3] = detail::complete_basis({f[0], f[1], f[2]});
  return f;
}

/// A graph parametrization of a boundary patch.
///
/// Chart coordinates t are offsets from the center along the orthonormal frame vectors
/// f1, f2, f3; the boundary is the graph of the offset along f0 (the dependent direction),
/// solved from rho = 0 by Newton's method.
class BoundaryChart {
 public:
  BoundaryChart() = default;
  BoundaryChart(const RealPoint4& center, const std::array<RealPoint4, 4>& frame, const std::array<double, 3>& half_widths,
                ChartKind kind)
      : center_(center), frame_(frame), half_widths_(half_widths), kind_(kind) {}

  ChartKind kind() const { return kind_; }
  const RealPoint4& center() const { return center_; }
  double radius() const { return std::max({half_widths_[0], half_widths_[1], half_widths_[2]}); }
  const std::array<double, 3>& half_widths() const { return half_widths_; }
  const std::array<RealPoint4, 4>& frame() const { return frame_; }
  const RealPoint4& dependent_direction() const { return frame_[0]; }

  /// Largest coordinate component of the dependent direction (the index of the normal
  /// component used to pick the graph variable).
  int dependent_component() const {
    int best = 0;
    for (int k = 1; k < 4; ++k)
      if (std::abs(frame_[0][k]) > std::abs(frame_[0][best])) best = k;
    return best;
  }

  /// Chart axis used for integration by parts (the complex partner of the dependent direction).
  int partner_axis() const { return 0; }

  /// Chart axis that coincides with the u1 coordinate, or -1.
  int u1_axis() const {
    for (int a = 0; a < 3; ++a)
      if (frame_[a + 1][0] == 1.0) return a;
    return -1;
  }

  std::array<double, 3> coords(const RealPoint4& w) const {
    const RealPoint4 r = w - center_;
    return {dot(r, frame_[1]), dot(r, frame_[2]), dot(r, frame_[3])};
  }

  bool in_box(const std::array<double, 3>& t, double scale = 1.0) const {
    for (int a = 0; a < 3; ++a)
      if (std::abs(t[a]) >= scale * half_widths_[a]) return false;
    return true;
  }

  /// True if w lies on this chart's sheet of the boundary (the graph side facing f0).
  bool on_sheet(const RealPoint4& grad_at_w) const { return dot(grad_at_w, frame_[0]) > 0.0; }

  /// offset_hint, if given, seeds Newton's method and receives the solved offset.
  ChartSample evaluate(const Domain& d, const std::array<double, 3>& t, double* offset_hint = nullptr) const {
    ChartSample s;
    const RealPoint4 base = center_ + t[0] * frame_[1] + t[1] * frame_[2] + t[2] * frame_[3];
    double off = offset_hint ? *offset_hint : 0.0;
    bool ok = false;
    for (int it = 0; it < 80; ++it) {
      const RealPoint4 p = base + off * frame_[0];
      const double f = rho(d, p);
      const double df = dot(real_gradient(d, p), frame_[0]);
      if (!(df > 0.0)) return s;
      const double step = f / df;
      off -= step;
      if (std::abs(step) <= 1e-15 * (1.0 + std::abs(off))) {
        ok = true;
        break;
      }
    }
    if (!ok) return s;
    if (offset_hint) *offset_hint = off;
    const RealPoint4 p = base + off * frame_[0];
    const RealPoint4 g = real_gradient(d, p);
    const double g0 = dot(g, frame_[0]);
    if (!(g0 > 0.0)) return s;
    for (int a = 0; a < 3; ++a) s.tangents[a] = frame_[a + 1] + (-dot(g, frame_[a + 1]) / g0) * frame_[0];
    s.point = p;
    s.valid = true;
    return s;
  }

  /// Product bump in chart coordinates; zero off the chart's sheet.
  double bump(const RealPoint4& w, const RealPoint4& grad_at_w) const {
    const RealPoint4 r = w - center_;
    double e = 0.0;
    for (int a = 0; a < 3; ++a) {
      const double t = dot(r, frame_[a + 1]) / half_widths_[a];
      const double q = 1.0 - t * t;
      if (q <= 0.0) return 0.0;
      e += t * t / q;
    }
    if (!on_sheet(grad_at_w)) return 0.0;
    return std::exp(-bump_sharpness * e);
  }

  double bump_sharpness = 2.0;

  // Diagnostics recorded by the atlas builder.
  double dominance_margin = 0.0;
  double ibp_margin = std::numeric_limits<double>::quiet_NaN();
  std::array<double, 4> support_lo{}, support_hi{};

 private:
  RealPoint4 center_;
  std::array<RealPoint4, 4> frame_{};
  std::array<double, 3> half_widths_{};
  ChartKind kind_ = ChartKind::Generic;
};

/// d Delta(w(t), z) / d t_a at a chart sample.
inline cplx delta_chart_derivative(const Domain& d, const ChartSample& s, int axis, const RealPoint4& z) {
  const DerivativeStack st = derivative_stack(d, s.point);
  const RealPoint4& tan = s.tangents[axis];
  cplx out = st.hol_grad[0] * dw(tan, 0) + st.hol_grad[1] * dw(tan, 1);
  const cplx d1 = s.point.w1() - z.w1(), d2 = s.point.w2() - z.w2();
  for (int j = 0; j < 2; ++j) {
    cplx drho_j = 0.0;
    for (int k = 0; k < 2; ++k) drho_j += st.hol_hess[j][k] * dw(tan, k) + st.mixed_hess[j][k] * dwbar(tan, k);
    out += (j == 0 ? d1 : d2) * drho_j;
  }
  return out;
}

struct AtlasOptions {
  std::uint64_t seed = 1;
  std::size_t candidate_samples = 20000;
  std::size_t cover_check_samples = 10000;
  /// Fraction of the box within which a candidate counts as covered.
  double cover_fraction = 0.8;
  double bump_sharpness = 2.0;
  /// Required <grad rho, f0> / |grad rho| on the whole box.
  double min_dominance = 0.5;
  /// Shrink charts until the local integration-by-parts margin holds (Flat domain).
  bool require_ibp_margin = false;
  double min_ibp_margin = 0.5;
  double min_radius_fraction = 1.0 / 16.0;
  /// Cover holes are patched where the bump sum falls below this.
  double min_bump_sum = 1e-6;
};

/// A finite cover of the boundary by graph charts together with a smooth partition of unity.
class ChartAtlas {
 public:
  ChartAtlas() = default;
  ChartAtlas(Domain d, std::vector<BoundaryChart> charts, double radius) : domain_(d), charts_(std::move(charts)), radius_(radius) {
    compute_neighbours();
  }

  const Domain& domain() const { return domain_; }
  const std::vector<BoundaryChart>& charts() const { return charts_; }
  double radius() const { return radius_; }
  const std::vector<int>& neighbours(int j) const { return neighbours_[j]; }
  double cover_min_weight = 0.0;

  double bump_sum(const RealPoint4& w) const {
    const RealPoint4 g = real_gradient(domain_, w);
    double s = 0.0;
    for (const auto& c : charts_) s += c.bump(w, g);
    return s;
  }

  /// psi_j(w) = b_j(w) / sum_k b_k(w) for w in the support of chart j.
  double partition_weight(int j, const RealPoint4& w) const {
    const RealPoint4 g = real_gradient(domain_, w);
    const double bj = charts_[j].bump(w, g);
    if (bj == 0.0) return 0.0;
    // Neighbour data is packed as [center, f0, f1, f2, f3, 1/h1, 1/h2, 1/h3, sharpness] (24 doubles).
    const std::vector<double>& p = packed_[j];
    double s = 0.0;
    for (std::size_t o = 0; o < p.size(); o += kPacked) {
      const double* q = p.data() + o;
      const double r0 = w[0] - q[0], r1 = w[1] - q[1], r2 = w[2] - q[2], r3 = w[3] - q[3];
      const double sheet = g[0] * q[4] + g[1] * q[5] + g[2] * q[6] + g[3] * q[7];
      const double t1 = (r0 * q[8] + r1 * q[9] + r2 * q[10] + r3 * q[11]) * q[20];
      const double t2 = (r0 * q[12] + r1 * q[13] + r2 * q[14] + r3 * q[15]) * q[21];
      const double t3 = (r0 * q[16] + r1 * q[17] + r2 * q[18] + r3 * q[19]) * q[22];
      const double a1 = 1.0 - t1 * t1, a2 = 1.0 - t2 * t2, a3 = 1.0 - t3 * t3;
      if (sheet > 0.0 && a1 > 0.0 && a2 > 0.0 && a3 > 0.0)
        s += std::exp(-q[23] * (t1 * t1 / a1 + t2 * t2 / a2 + t3 * t3 / a3));
    }
    return bj / s;
  }

 private:
  static constexpr std::size_t kPacked = 24;

  void pack_neighbours() {
    packed_.assign(charts_.size(), {});
    for (std::size_t j = 0; j < charts_.size(); ++j) {
      for (int k : neighbours_[j]) {
        const BoundaryChart& c = charts_[k];
        auto& p = packed_[j];
        for (int q = 0; q < 4; ++q) p.push_back(c.center()[q]);
        for (int f = 0; f < 4; ++f)
          for (int q = 0; q < 4; ++q) p.push_back(c.frame()[f][q]);
        for (int a = 0; a < 3; ++a) p.push_back(1.0 / c.half_widths()[a]);
        p.push_back(c.bump_sharpness);
      }
    }
  }

  /// Chart k is a neighbour of chart j if its box, dilated by the largest distance from a
  /// support point of j to the nearest point of a lattice on j, contains a lattice point of j.
  void compute_neighbours() {
    const std::size_t n = charts_.size();
    neighbours_.assign(n, {});
    constexpr int lattice = 15;
    for (std::size_t j = 0; j < n; ++j) {
      const BoundaryChart& cj = charts_[j];
      const double spacing = 2.0 * cj.radius() / (lattice - 1);
      const double margin = 0.5 * std::sqrt(3.0) * spacing / std::max(cj.dominance_margin, 0.1);
      std::vector<char> hit(n, 0);
      hit[j] = 1;
      const auto& h = cj.half_widths();
      for (int a = 0; a < lattice; ++a)
        for (int b = 0; b < lattice; ++b)
          for (int c = 0; c < lattice; ++c) {
            const std::array<double, 3> t{h[0] * (-1.0 + 2.0 * a / (lattice - 1)), h[1] * (-1.0 + 2.0 * b / (lattice - 1)),
                                          h[2] * (-1.0 + 2.0 * c / (lattice - 1))};
            const ChartSample s = cj.evaluate(domain_, t);
            if (!s.valid) continue;
            const RealPoint4 g = real_gradient(domain_, s.point);
            const double gn = norm(g);
            for (std::size_t k = 0; k < n; ++k) {
              if (hit[k]) continue;
              const BoundaryChart& ck = charts_[k];
              if (dot(g, ck.frame()[0]) < -0.5 * gn) continue;
              const auto tk = ck.coords(s.point);
              bool inside = true;
              for (int q = 0; q < 3 && inside; ++q) inside = std::abs(tk[q]) < ck.half_widths()[q] + margin;
              if (inside) hit[k] = 1;
            }
          }
      for (std::size_t k = 0; k < n; ++k)
        if (hit[k]) neighbours_[j].push_back(static_cast<int>(k));
    }
    pack_neighbours();
  }

  Domain domain_ = Domain::ball();
  std::vector<BoundaryChart> charts_;
  double radius_ = 0.0;
  std::vector<std::vector<int>> neighbours_;
  std::vector<std::vector<double>> packed_;
};

namespace detail {

template <class F>
void for_each_lattice(const BoundaryChart& c, int lattice, F&& f) {
  const auto& h = c.half_widths();
  for (int i = 0; i < lattice; ++i)
    for (int j = 0; j < lattice; ++j)
      for (int k = 0; k < lattice; ++k)
        f(std::array<double, 3>{h[0] * (-1.0 + 2.0 * i / (lattice - 1)), h[1] * (-1.0 + 2.0 * j / (lattice - 1)),
                                h[2] * (-1.0 + 2.0 * k / (lattice - 1))});
}

/// Minimum of <grad rho, f0> / |grad rho| over a lattice of the box; also records the support
/// bounding box. Returns -1 if the graph is not defined on the whole box.
inline double chart_dominance(const Domain& d, BoundaryChart& c, int lattice = 11) {
  double margin = std::numeric_limits<double>::infinity();
  std::array<double, 4> lo, hi;
  lo.fill(std::numeric_limits<double>::infinity());
  hi.fill(-std::numeric_limits<double>::infinity());
  bool ok = true;
  for_each_lattice(c, lattice, [&](const std::array<double, 3>& t) {
    if (!ok) return;
    const ChartSample s = c.evaluate(d, t);
    if (!s.valid) {
      ok = false;
      return;
    }
    const RealPoint4 g = real_gradient(d, s.point);
    margin = std::min(margin, dot(g, c.frame()[0]) / norm(g));
    for (int q = 0; q < 4; ++q) {
      lo[q] = std::min(lo[q], s.point[q]);
      hi[q] = std::max(hi[q], s.point[q]);
    }
  });
  if (!ok) return -1.0;
  // Pad by a Lipschitz bound of the graph between lattice points.
  const double pad = 4.0 * c.radius() / (lattice - 1) / std::max(margin, 0.1);
  for (int q = 0; q < 4; ++q) {
    c.support_lo[q] = lo[q] - pad;
    c.support_hi[q] = hi[q] + pad;
  }
  c.dominance_margin = margin;
  return margin;
}

}  // namespace detail

/// III(zeta) = <d rho(zeta), d w / d t_partner(zeta)>, the leading term of d Delta / d t_partner.
inline cplx ibp_leading_term(const Domain& d, const BoundaryChart& c) {
  const ChartSample s0 = c.evaluate(d, {0.0, 0.0, 0.0});
  const auto g = holomorphic_gradient(real_gradient(d, s0.point));
  const RealPoint4& t = s0.tangents[c.partner_axis()];
  return g[0] * dw(t, 0) + g[1] * dw(t, 1);
}

/// min |d Delta / d t_partner (w, z)| over sampled pairs (w, z) of chart points.
inline double chart_ibp_min_derivative(const Domain& d, const BoundaryChart& c, int lattice = 7) {
  const int axis = c.partner_axis();
  std::vector<ChartSample> pts;
  detail::for_each_lattice(c, lattice, [&](const std::array<double, 3>& t) {
    const ChartSample s = c.evaluate(d, t);
    if (s.valid) pts.push_back(s);
  });
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& w : pts)
    for (const auto& z : pts) worst = std::min(worst, std::abs(delta_chart_derivative(d, w, axis, z.point)));
  return worst;
}

/// min |d Delta / d t_partner| over the chart divided by |III(zeta)|.
inline double chart_ibp_margin(const Domain& d, const BoundaryChart& c, int lattice = 7) {
  return chart_ibp_min_derivative(d, c, lattice) / std::abs(ibp_leading_term(d, c));
}

/// Builds a chart centered at a boundary point, shrinking the radius until the dependent
/// direction dominates (and optionally the integration-by-parts margin holds) on the whole box.
inline std::optional<BoundaryChart> make_chart(const Domain& d, const RealPoint4& center, double radius,
                                               const AtlasOptions& opt) {
  const RealPoint4 n = (1.0 / norm(real_gradient(d, center))) * real_gradient(d, center);
  for (double r = radius; r >= radius * opt.min_radius_fraction; r *= 0.8) {
    BoundaryChart c;
    if (d.kind() == DomainKind::PowerM) {
      if (std::abs(center[0]) < 2.0 * r) {
        c = BoundaryChart(center, critical_frame(n), {r, r, r},
                          std::abs(center[0]) < r ? ChartKind::FirstKind : ChartKind::SecondKind);
      } else {
        c = BoundaryChart(center, unitary_frame(n), {r, r, r}, ChartKind::SecondKind);
      }
    } else {
      c = BoundaryChart(center, unitary_frame(n), {r, r, r}, ChartKind::Generic);
    }
    const double dom = detail::chart_dominance(d, c);
    if (dom < opt.min_dominance) continue;
    // Second-kind charts must stay off the critical variety.
    if (d.kind() == DomainKind::PowerM && c.kind() == ChartKind::SecondKind && c.support_lo[0] <= 0.0 &&
        c.support_hi[0] >= 0.0)
      continue;
    if (opt.require_ibp_margin) {
      const double m = chart_ibp_margin(d, c);
      c.ibp_margin = m;
      if (!(m >= opt.min_ibp_margin)) continue;
    }
    return c;
  }
  return std::nullopt;
}

/// Bump sums below this count as uncovered.
inline constexpr double kMinBumpSum = 1e-6;

/// Greedy atlas: walk a deterministic boundary sample and open a chart at every sample that is
/// not yet well inside an existing chart; then verify the cover on an independent sample.
inline ChartAtlas build_charts(const Domain& d, double radius, const AtlasOptions& opt = {}) {
  std::vector<RealPoint4> candidates;
  if (d.kind() == DomainKind::PowerM) {
    // The critical variety u1 = 0 is seeded first so that first-kind charts are centered on it.
    for (const auto& p : sample_boundary(d, opt.candidate_samples / 4, opt.seed + 101)) {
      RealPoint4 dir = p;
      dir[0] = 0.0;
      if (norm(dir) > 1e-9) candidates.push_back(radial_boundary_point(d, dir));
    }
  }
  for (int k = 0; k < 4; ++k)
    for (int s : {1, -1}) {
      RealPoint4 dir;
      dir[k] = s;
      candidates.push_back(radial_boundary_point(d, dir));
    }
  for (const auto& p : sample_boundary(d, opt.candidate_samples, opt.seed)) candidates.push_back(p);

  std::vector<BoundaryChart> charts;
  auto cover = [&](const std::vector<RealPoint4>& points, double fraction) {
    for (const auto& p : points) {
      const RealPoint4 g = real_gradient(d, p);
      bool covered = false;
      for (const auto& c : charts)
        if (c.on_sheet(g) && c.in_box(c.coords(p), fraction)) {
          covered = true;
          break;
        }
      if (covered) continue;
      auto c = make_chart(d, p, radius, opt);
      if (!c) {
        throw CoverFailure("no admissible chart at boundary point (" + std::to_string(p[0]) + ", " + std::to_string(p[1]) +
                           ", " + std::to_string(p[2]) + ", " + std::to_string(p[3]) + ")");
      }
      c->bump_sharpness = opt.bump_sharpness;
      charts.push_back(*c);
    }
  };
  cover(candidates, opt.cover_fraction);
  // Patch holes found on fresh samples; the last round is a pure verification.
  constexpr int kRounds = 4;
  for (int round = 0; round <= kRounds; ++round) {
    const auto check = sample_boundary(d, opt.cover_check_samples, opt.seed + 7919 + round);
    std::vector<RealPoint4> holes;
    double worst = std::numeric_limits<double>::infinity();
    for (const auto& p : check) {
      const RealPoint4 g = real_gradient(d, p);
      double s = 0.0;
      for (const auto& c : charts) s += c.bump(p, g);
      if (!(s > opt.min_bump_sum)) holes.push_back(p);
      worst = std::min(worst, s);
    }
    if (holes.empty()) {
      ChartAtlas atlas(d, std::move(charts), radius);
      atlas.cover_min_weight = worst;
      return atlas;
    }
    if (round == kRounds) {
      const RealPoint4& p = holes.front();
      throw CoverFailure("boundary point not covered: (" + std::to_string(p[0]) + ", " + std::to_string(p[1]) + ", " +
                         std::to_string(p[2]) + ", " + std::to_string(p[3]) + ")");
    }
    cover(holes, opt.cover_fraction);
  }
  throw CoverFailure("unreachable");
}

}  // namespace cleray

#endif  // CLERAY_CHART_HPP_
