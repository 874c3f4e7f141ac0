#ifndef CLERAY_EXPERIMENTS_HPP_
#define CLERAY_EXPERIMENTS_HPP_

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "cleray/config.hpp"
#include "cleray/estimates.hpp"
#include "cleray/probes.hpp"
#include "cleray/report.hpp"
#include "cleray/transform.hpp"

namespace cleray {

namespace detail {

/// Typed access to ExperimentConfig::params with config errors on bad values.
struct Params {
  const nlohmann::json& p;

  const nlohmann::json& at(const std::string& k) const {
    if (!p.contains(k)) throw ConfigError("missing parameter '" + k + "'");
    return p.at(k);
  }
  double num(const std::string& k) const { return config_number(at(k), k); }
  int integer(const std::string& k) const {
    if (!at(k).is_number_integer()) throw ConfigError("parameter '" + k + "' must be an integer");
    return at(k).get<int>();
  }
  std::string str(const std::string& k) const {
    if (!at(k).is_string()) throw ConfigError("parameter '" + k + "' must be a string");
    return at(k).get<std::string>();
  }
  std::vector<double> nums(const std::string& k) const { return config_numbers(at(k), k); }
  RealPoint4 point(const std::string& k) const {
    const auto v = nums(k);
    if (v.size() != 4) throw ConfigError("parameter '" + k + "' must have 4 entries");
    return {v[0], v[1], v[2], v[3]};
  }
};

inline BoundaryMethod parse_method(const std::string& s) {
  if (s == "subtracted") return BoundaryMethod::Subtracted;
  if (s == "decomposed") return BoundaryMethod::Decomposed;
  throw ConfigError("unknown boundary method '" + s + "' (expected subtracted or decomposed)");
}

inline std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

inline std::string point_text(const RealPoint4& p) {
  return "(" + fmt(p[0]) + ", " + fmt(p[1]) + ", " + fmt(p[2]) + ", " + fmt(p[3]) + ")";
}

inline double kind_code(ChartKind k) { return k == ChartKind::FirstKind ? 1.0 : k == ChartKind::SecondKind ? 2.0 : 0.0; }

/// EstimateResult -> check plus tables of its values and diagnostics.
inline void add_estimate(Report& rep, const EstimateResult& r, const std::string& detail_prefix = {}) {
  std::string detail = detail_prefix;
  for (const auto& [k, v] : r.extra) detail += (detail.empty() ? "" : "; ") + k + " = " + fmt(v);
  if (!r.witness.empty()) detail += (detail.empty() ? "" : "; ") + std::string("witness ") + r.witness;
  rep.check(r.name, r.pass, r.fitted, std::numeric_limits<double>::quiet_NaN(), detail, r.asserted);
  Table t{r.name, {"index", "value"}, {}};
  for (std::size_t i = 0; i < r.values.size(); ++i) t.rows.push_back({static_cast<double>(i), r.values[i]});
  rep.tables.push_back(std::move(t));
  if (!r.parameters.empty() || !r.extra.empty()) {
    Table e{r.name + "_diagnostics", {}, {{}}};
    for (const auto& [k, v] : r.parameters) {
      e.columns.push_back(k);
      e.rows[0].push_back(v);
    }
    for (const auto& [k, v] : r.extra) {
      e.columns.push_back(k);
      e.rows[0].push_back(v);
    }
    rep.tables.push_back(std::move(e));
  }
}

inline const std::vector<BoundaryFunction>& reproducing_monomials() {
  static const std::vector<BoundaryFunction> m{functions::monomial(0, 0), functions::monomial(1, 0), functions::monomial(0, 1),
                                               functions::monomial(1, 1), functions::monomial(0, 2)};
  return m;
}

inline const char* monomial_label(std::size_t i) {
  static const char* n[] = {"1", "w1", "w2", "w1w2", "w2^2"};
  return n[i];
}

}  // namespace detail

inline Report start_report(const ExperimentConfig& c, std::string header) {
  Report r;
  r.experiment = c.experiment;
  r.header = std::move(header);
  r.config = to_json(c);
  return r;
}

// ---------------------------------------------------------------------------------------------

inline Report run_domain_info(const ExperimentConfig& c) {
  const detail::Params P{c.params};
  const Domain d = make_domain(c);
  Report rep = start_report(c, "domain " + d.name() + ": chart atlas, boundary area, admissible eps");
  const ChartAtlas atlas = build_charts(d, c.chart_radius);
  Table charts{"charts", {"index", "kind", "u1", "v1", "u2", "v2", "h1", "h2", "h3", "dependent_component", "dominance_margin"}, {}};
  for (std::size_t j = 0; j < atlas.charts().size(); ++j) {
    const auto& ch = atlas.charts()[j];
    const auto& h = ch.half_widths();
    charts.rows.push_back({static_cast<double>(j), detail::kind_code(ch.kind()), ch.center()[0], ch.center()[1], ch.center()[2],
                           ch.center()[3], h[0], h[1], h[2], static_cast<double>(ch.dependent_component()), ch.dominance_margin});
  }
  rep.tables.push_back(std::move(charts));
  const double area = boundary_area(build_grid(atlas, c.level));
  const double em = eps_max(d, static_cast<std::size_t>(P.integer("eps_max_samples")), c.seed);
  rep.tables.push_back({"summary", {"charts", "area", "eps_max", "cover_min_weight"}, {{static_cast<double>(atlas.charts().size()), area, em, atlas.cover_min_weight}}});
  rep.check("atlas_covers_boundary", atlas.cover_min_weight >= kMinBumpSum, atlas.cover_min_weight, kMinBumpSum);
  rep.check("area_positive", std::isfinite(area) && area > 0.0, area, 0.0);
  if (d.kind() == DomainKind::Ball) {
    const double rel = std::abs(area / (2.0 * kPi * kPi) - 1.0);
    rep.check("ball_area_matches_2pi^2", rel <= P.num("ball_area_tol"), rel, P.num("ball_area_tol"));
  }
  return rep;
}

inline Report run_reproduce(const ExperimentConfig& c) {
  const detail::Params P{c.params};
  const Domain d = make_domain(c);
  Report rep = start_report(c, "reproducing property: max |C(g)(z) - g(z)| over interior points, per monomial and level");
  const int lo = P.integer("coarsest_level");
  if (lo > c.level) throw ConfigError("coarsest_level exceeds level");
  const double tol = P.num("tol");
  const auto zs = interior_points(d, static_cast<std::size_t>(P.integer("points")), P.num("min_distance"), c.seed);
  const auto& gs = detail::reproducing_monomials();
  const ChartAtlas atlas = build_charts(d, c.chart_radius);
  std::vector<std::vector<double>> err(gs.size());
  std::vector<double> hs;
  Table t{"errors", {"level", "monomial", "max_error"}, {}};
  std::vector<double> skipped;
  for (int L = lo; L <= c.level; ++L) {
    std::vector<cplx> v;
    try {
      v = cauchy_leray_interior(build_grid(atlas, L), gs, zs);
    } catch (const GuardViolation&) {
      if (L == c.level) throw;
      skipped.push_back(L);
      for (std::size_t i = 0; i < gs.size(); ++i) t.rows.push_back({static_cast<double>(L), static_cast<double>(i), std::numeric_limits<double>::quiet_NaN()});
      continue;
    }
    hs.push_back(std::ldexp(1.0, -L));
    for (std::size_t i = 0; i < gs.size(); ++i) {
      double w = 0.0;
      for (std::size_t k = 0; k < zs.size(); ++k) w = std::max(w, std::abs(v[i * zs.size() + k] - gs[i](zs[k])));
      err[i].push_back(w);
      t.rows.push_back({static_cast<double>(L), static_cast<double>(i), w});
    }
  }
  rep.tables.push_back(std::move(t));
  // levels too coarse for the direct form at these targets
  rep.tables.push_back({"skipped_levels", {"level"}, {}});
  for (double L : skipped) rep.tables.back().rows.push_back({L});
  const int plateaus = P.integer("plateaus");
  for (std::size_t i = 0; i < gs.size(); ++i) {
    const std::string g = detail::monomial_label(i);
    rep.check("error_below_tol[" + g + "]", err[i].back() < tol, err[i].back(), tol, "level " + std::to_string(c.level));
    if (err[i].size() >= 2) {
      int bumps = 0;
      for (std::size_t k = 1; k < err[i].size(); ++k)
        if (!(err[i][k] < err[i][k - 1])) ++bumps;
      rep.check("error_decreasing[" + g + "]", bumps <= plateaus, bumps, plateaus, "non-decreasing steps allowed: " + std::to_string(plateaus));
      rep.add_series("reproduce " + g, "h", "max error", hs, err[i]);
    }
  }
  if (d.kind() != DomainKind::Ball) {
    const Domain b = Domain::ball();
    const auto zb = interior_points(b, zs.size(), P.num("min_distance"), c.seed);
    const auto v = cauchy_leray_interior(build_grid(build_charts(b, c.chart_radius), c.level), gs, zb);
    double wb = 0.0, wd = 0.0;
    for (std::size_t i = 0; i < gs.size(); ++i) {
      for (std::size_t k = 0; k < zb.size(); ++k) wb = std::max(wb, std::abs(v[i * zb.size() + k] - gs[i](zb[k])));
      wd = std::max(wd, err[i].back());
    }
    rep.check("ball_control_not_worse", wb <= wd, wb, wd, "reported only", false);
  }
  return rep;
}

inline Report run_boundary_limit(const ExperimentConfig& c) {
  const detail::Params P{c.params};
  const Domain d = make_domain(c);
  Report rep = start_report(c, "boundary values C f(z_eps) along the inward normal, eps = eps0 2^-k");
  BoundaryValueOptions o;
  o.eps0 = P.num("eps0");
  o.steps = P.integer("steps");
  o.tol = P.num("tol");
  o.method = detail::parse_method(P.str("method"));
  o.focus_grading = P.num("focus_grading");
  const BoundaryFunction f = functions::bump(P.point("bump_center"), P.num("bump_radius"));
  const ChartAtlas atlas = build_charts(d, c.chart_radius);
  // the convergence claim covers Flat, Ball and PowerM with 3/2 < m < 2
  const bool claim = d.kind() != DomainKind::PowerM || d.m() > 1.5;
  const auto zs = sample_boundary(d, static_cast<std::size_t>(P.integer("targets")), c.seed);
  Table t{"values", {"target", "eps", "re", "im", "difference"}, {}};
  Table s{"targets", {"target", "u1", "v1", "u2", "v2", "re_limit", "im_limit", "rate"}, {}};
  for (std::size_t k = 0; k < zs.size(); ++k) {
    const auto r = boundary_value(atlas, c.level, f, zs[k], o);
    for (std::size_t i = 0; i < r.values.size(); ++i)
      t.rows.push_back({static_cast<double>(k), r.eps[i], r.values[i].real(), r.values[i].imag(),
                        i < r.differences.size() ? r.differences[i] : std::numeric_limits<double>::quiet_NaN()});
    s.rows.push_back({static_cast<double>(k), zs[k][0], zs[k][1], zs[k][2], zs[k][3], r.extrapolated.real(), r.extrapolated.imag(), r.rate.slope});
    const std::string tag = "[" + std::to_string(k) + "]";
    rep.check("differences_decaying" + tag, r.decaying, r.differences.empty() ? 0.0 : r.differences.back(),
              std::numeric_limits<double>::quiet_NaN(), "z = " + detail::point_text(zs[k]) + ", method " + r.method, claim);
    rep.check("converged" + tag, r.converged, r.differences.empty() ? 0.0 : r.differences.back(), o.tol, "", claim);
    std::vector<double> e(r.eps.begin(), r.eps.begin() + r.differences.size());
    rep.add_series("boundary limit target " + std::to_string(k), "eps", "|v_k - v_k+1|", e, r.differences);
  }
  rep.tables.push_back(std::move(t));
  rep.tables.push_back(std::move(s));
  return rep;
}

inline Report run_decompose(const ExperimentConfig& c) {
  const detail::Params P{c.params};
  const Domain d = make_domain(c);
  Report rep = start_report(c, "decomposition C f(z_eps) = f(z) + E(df)(z_eps) + R(f)(z_eps)");
  if (c.eps.empty()) throw ConfigError("decompose needs at least one eps");
  const ChartAtlas atlas = build_charts(d, c.chart_radius);
  const BoundaryFunction f = functions::bump(P.point("bump_center"), P.num("bump_radius"));
  const auto zs = sample_boundary(d, static_cast<std::size_t>(P.integer("targets")), c.seed);
  std::vector<GridFocus> foci;
  for (const auto& z : zs) foci.push_back({z, P.num("focus_grading")});
  const auto grid = build_grid(atlas, c.level, foci);
  const double tol = P.num("tol");
  Table t{"decomposition", {"target", "eps", "residual", "abs_E", "abs_R", "re_C", "im_C", "re_f"}, {}};
  for (double e : c.eps) {
    std::vector<PushedTarget> ts;
    for (const auto& z : zs) ts.push_back(push_target(d, z, e));
    const auto r = decompose(grid, f, ts);
    for (std::size_t k = 0; k < zs.size(); ++k) {
      const double res = std::abs(r[k].residual());
      t.rows.push_back({static_cast<double>(k), e, res, std::abs(r[k].e), std::abs(r[k].r), r[k].cauchy.real(), r[k].cauchy.imag(), r[k].fz.real()});
      rep.check("residual[" + std::to_string(k) + ", eps=" + detail::fmt(e) + "]", res < tol, res, tol, "z = " + detail::point_text(zs[k]));
    }
  }
  rep.tables.push_back(std::move(t));
  return rep;
}

/// Fixed (chart, f, z) configurations for the local integration-by-parts check.
struct IbpConfiguration {
  RealPoint4 direction;
  double radius, bump_scale, push;
};

inline std::vector<IbpConfiguration> ibp_configurations() {
  return {{{0.0, 0.0, 0.0, 1.0}, 0.5, 0.9, 0.15}, {flat_point(0.3, 0.0, 0.5), 0.4, 0.8, 0.1}, {flat_point(-0.2, 0.6, 2.0), 0.4, 0.7, 0.12}};
}

inline Report run_ibp_check(const ExperimentConfig& c) {
  const detail::Params P{c.params};
  const Domain d = make_domain(c);
  Report rep = start_report(c, "local integration by parts on a chart: direct vs IBP form");
  AtlasOptions o;
  o.require_ibp_margin = true;
  o.min_ibp_margin = P.num("min_margin");
  GridSpec spec;
  spec.level = c.level;
  const double tol = P.num("tol");
  Table t{"ibp", {"configuration", "radius", "bump_scale", "push", "re_direct", "im_direct", "re_ibp", "im_ibp", "difference", "margin"}, {}};
  const auto cfgs = ibp_configurations();
  for (std::size_t k = 0; k < cfgs.size(); ++k) {
    const auto& g = cfgs[k];
    const RealPoint4 zeta = radial_boundary_point(d, g.direction);
    auto ch = make_chart(d, zeta, g.radius, o);
    const std::string tag = "[" + std::to_string(k) + "]";
    if (!ch) {
      rep.check("ibp_matches_direct" + tag, false, std::numeric_limits<double>::quiet_NaN(), tol, "no chart with the required margin at " + detail::point_text(zeta));
      continue;
    }
    const auto f = functions::chart_bump(d, *ch, g.bump_scale);
    const RealPoint4 z = eps_push(d, zeta, g.push);
    const IbpResult ib = local_ibp_eval(d, *ch, spec, f, z, o.min_ibp_margin);
    const cplx dir = chart_direct_eval(d, *ch, spec, f, z);
    const double diff = std::abs(ib.value - dir);
    t.rows.push_back({static_cast<double>(k), ch->radius(), g.bump_scale, g.push, dir.real(), dir.imag(), ib.value.real(), ib.value.imag(), diff,
                      ib.min_derivative / ib.leading});
    rep.check("ibp_matches_direct" + tag, diff < tol, diff, tol, "chart center " + detail::point_text(zeta));
  }
  rep.tables.push_back(std::move(t));
  return rep;
}

inline Report run_estimates(const ExperimentConfig& c) {
  const detail::Params P{c.params};
  const Domain d = make_domain(c);
  Report rep = start_report(c, "pointwise inequalities and model integrals on " + d.name());
  const int fl = P.integer("i_first_level"), nl = P.integer("i_levels");
  const double itol = P.num("i_tol");
  // the model integral does not depend on the domain
  {
    const RefinementStudy s = integral_I(1.0, 0.0, 0.0, fl, nl);
    const double err = std::abs(s.value - 4.0 * kPi);
    rep.check("I_closed_form_4pi", err < P.num("closed_form_tol"), err, P.num("closed_form_tol"), "I_{1,0}(0) = " + detail::fmt(s.value));
    const RefinementStudy dv = integral_I(0.6, 0.35, 0.0, fl, nl);
    const bool flag = ratio_divergent(dv.values, P.num("divergence_ratio"));
    rep.check("I_divergent_flag(0.6,0.35,0)", flag, dv.values.back() / dv.values[dv.values.size() - 2], P.num("divergence_ratio"));
    for (auto [a, b] : {std::pair{0.6, 0.25}, std::pair{1.0, 0.45}, std::pair{0.5, 0.2}})
      detail::add_estimate(rep, check_integral_I_uniform(a, b, fl, nl, itol));
    detail::add_estimate(rep, check_model_chart_integral(0.2, {0.0, 0.05, 0.1, 0.25, 0.5, 1.0}, fl, nl, itol));
  }
  const auto samples = static_cast<std::size_t>(P.integer("samples"));
  detail::add_estimate(rep, check_strict_convexity(d, samples, c.seed));
  {
    EstimateResult r = check_eps_bounds(d, static_cast<std::size_t>(P.integer("eps_pairs")), c.eps, c.seed);
    r.pass = r.pass && r.extra.at("identity_residual") <= P.num("identity_tol");
    detail::add_estimate(rep, r);
  }
  if (d.kind() == DomainKind::Flat) {
    const EstimateResult m = check_chart_margin(d, P.nums("margin_radii"), static_cast<std::size_t>(P.integer("margin_centers")), c.seed,
                                                P.num("margin_fraction"));
    detail::add_estimate(rep, m);
    const double literal = m.extra.at("best_ratio_vs_half_gradient");
    rep.check("chart_margin_vs_half_gradient", literal >= 1.0, literal, 1.0,
              "best min|dDelta/dt| / (|grad rho| / 2) over the radius schedule; |III| itself equals |grad rho| / 2", false);
    const auto kt = flat_targets(static_cast<std::size_t>(P.integer("kernel_targets")), c.seed);
    for (const auto& r : check_kernel_power(P.nums("kernel_betas"), kt, c.level, P.num("kernel_tol"))) detail::add_estimate(rep, r);
    const ChartAtlas atlas = build_charts(d, c.chart_radius);
    const auto pt = flat_targets(static_cast<std::size_t>(P.integer("push_targets")), c.seed);
    detail::add_estimate(rep, check_push_decay(atlas, pt, P.nums("push_eps"), P.integer("push_level"), P.num("push_min_slope")));
  }
  if (d.kind() == DomainKind::PowerM) {
    const HessianProfile hp = hessian_profile(d, u1_sweep());
    detail::add_estimate(rep, check_hessian_profile(d, u1_sweep(), P.num("hessian_tol")));
    rep.add_series("hessian norm", "|u1|", "|D^2 rho|", hp.u1, hp.hessian);
    rep.add_series("density increment", "|u1|", "|lambda(u1) - lambda(2 u1)|", hp.u1, hp.increment);
  }
  return rep;
}

inline Report run_lp_probe(const ExperimentConfig& c) {
  const detail::Params P{c.params};
  const Domain d = make_domain(c);
  const bool control = d.kind() == DomainKind::Ball;
  Report rep = start_report(c, control ? "L^p probe on the control domain: R(t, p) = ||C f_t||_p(S_t) / ||f_t||_p"
                                       : "EXPLORATORY L^p probe: growth trends of R(t, p) only; no certified counterexample family");
  if (c.p_values.empty()) throw ConfigError("lp-probe needs p values");
  BumpFamily fam;
  fam.r0 = P.num("r0");
  fam.gap = P.num("gap");
  fam.outer = P.num("outer");
  const auto ts = halving_schedule(P.integer("t_count"));
  std::vector<RealPoint4> centers;
  if (d.kind() == DomainKind::Flat) {
    centers = flat_locus_centers(P.nums("flat_u1"));
  } else {
    centers.push_back(radial_boundary_point(d, {0.0, 0.0, 1.0, 0.0}));
    if (d.kind() == DomainKind::PowerM) centers.push_back(radial_boundary_point(d, {0.0, 0.6, 0.8, 0.0}));
  }
  const auto p2 = std::find(c.p_values.begin(), c.p_values.end(), 2.0);
  double homogeneity = 0.0;
  int best_run = 0;
  std::string best_at;
  for (std::size_t k = 0; k < centers.size(); ++k) {
    fam.center = centers[k];
    const auto r = lp_probe(d, fam, ts, c.p_values, c.level, P.num("homogeneity_scale"));
    homogeneity = std::max(homogeneity, r.homogeneity_residual);
    Table t{"ratios center " + std::to_string(k), {"t"}, {}};
    for (double p : c.p_values) t.columns.push_back(std::isinf(p) ? "R_inf" : "R_" + detail::fmt(p));
    for (const auto& row : r.rows) {
      std::vector<double> v{row.t};
      v.insert(v.end(), row.ratio.begin(), row.ratio.end());
      t.rows.push_back(v);
    }
    rep.tables.push_back(std::move(t));
    for (std::size_t i = 0; i < c.p_values.size(); ++i) {
      const int run = longest_increasing_run(r, i);
      if (run > best_run) {
        best_run = run;
        best_at = "center " + detail::point_text(centers[k]) + ", p = " + detail::fmt(c.p_values[i]);
      }
      std::vector<double> x, y;
      for (const auto& row : r.rows) {
        x.push_back(row.t);
        y.push_back(row.ratio[i]);
      }
      rep.add_series("R(t, " + detail::fmt(c.p_values[i]) + ") center " + std::to_string(k), "t", "R", x, y);
    }
    if (control && p2 != c.p_values.end()) {
      const std::size_t i = static_cast<std::size_t>(p2 - c.p_values.begin());
      double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
      for (const auto& row : r.rows) {
        lo = std::min(lo, row.ratio[i]);
        hi = std::max(hi, row.ratio[i]);
      }
      rep.check("ball_ratio_bounded[" + std::to_string(k) + "]", hi / lo < P.num("ball_variation"), hi / lo, P.num("ball_variation"),
                "max/min of R(t, 2) over the t schedule");
    }
  }
  if (control && p2 == c.p_values.end()) throw ConfigError("the control-domain check needs p = 2 among the p values");
  rep.check("homogeneity", homogeneity <= P.num("homogeneity_tol"), homogeneity, P.num("homogeneity_tol"),
            "relative change of R under f -> " + detail::fmt(P.num("homogeneity_scale")) + " f");
  rep.check("growth_run", best_run >= P.integer("min_increasing_run"), best_run, P.integer("min_increasing_run"),
            "longest run of consecutive t with R increasing as t decreases: " + best_at, false);
  return rep;
}

inline Report run_blowup_profile(const ExperimentConfig& c) {
  const detail::Params P{c.params};
  const Domain d = make_domain(c);
  if (d.kind() != DomainKind::PowerM) throw ConfigError("blowup-profile needs the power domain");
  Report rep = start_report(c, "|C f(z)| vs |x1| toward the critical variety {x1 = 0}");
  BoundaryValueOptions o;
  o.eps0 = P.num("eps0");
  o.steps = P.integer("steps");
  o.method = detail::parse_method(P.str("method"));
  o.focus_grading = P.num("focus_grading");
  const BoundaryFunction f = functions::bump(P.point("bump_center"), P.num("bump_radius"));
  const ChartAtlas atlas = build_charts(d, c.chart_radius);
  const auto x1 = P.nums("x1");
  const double v1 = P.num("v1");
  const BlowupProfile prof = blowup_profile(atlas, c.level, f, x1, v1, o);
  Table t{"profile", {"x1", "abs_value", "re", "im", "rate", "decaying", "last_difference"}, {}};
  std::vector<double> xs, ys;
  for (const auto& r : prof.rows) {
    const auto& v = r.value;
    t.rows.push_back({r.x1, std::abs(v.extrapolated), v.extrapolated.real(), v.extrapolated.imag(), v.rate.slope, v.decaying ? 1.0 : 0.0,
                      v.differences.empty() ? 0.0 : v.differences.back()});
    xs.push_back(std::abs(r.x1));
    ys.push_back(std::abs(v.extrapolated));
  }
  rep.tables.push_back(std::move(t));
  rep.add_series("blowup m = " + detail::fmt(d.m()), "|x1|", "|C f(z)|", xs, ys);
  const double s = prof.fit.slope, bound = d.m() - 2.0;
  if (d.m() <= 1.5) {
    const double lo = bound - P.num("slope_slack");
    rep.check("slope_within_bound", s >= lo && s <= 0.0, s, lo, "fitted slope in [" + detail::fmt(lo) + ", 0]; bound exponent " + detail::fmt(bound));
  } else {
    rep.check("slope_flat", std::abs(s) < P.num("flat_slope_tol"), s, P.num("flat_slope_tol"), "no blow-up expected for 3/2 < m < 2");
  }
  // f supported away from {u1 = 0}, target on the variety: reported only
  const BoundaryFunction g = functions::bump(radial_boundary_point(d, {0.7, 0.5, 0.5, 0.0}), 0.3);
  const RealPoint4 zv = variety_approach(d, {0.0}, v1)[0];
  const auto rv = boundary_value(atlas, c.level, g, zv, o);
  rep.check("on_variety_value", rv.converged, std::abs(rv.extrapolated), std::numeric_limits<double>::quiet_NaN(),
            "f supported off the variety, z = " + detail::point_text(zv) + "; no claim", false);
  return rep;
}

inline Report run_experiment(const ExperimentConfig& c) {
  validate(c);
  if (c.experiment == "domain-info") return run_domain_info(c);
  if (c.experiment == "reproduce") return run_reproduce(c);
  if (c.experiment == "boundary-limit") return run_boundary_limit(c);
  if (c.experiment == "decompose") return run_decompose(c);
  if (c.experiment == "ibp-check") return run_ibp_check(c);
  if (c.experiment == "estimates") return run_estimates(c);
  if (c.experiment == "lp-probe") return run_lp_probe(c);
  if (c.experiment == "blowup-profile") return run_blowup_profile(c);
  throw ConfigError("unknown experiment '" + c.experiment + "'");
}

}  // namespace cleray

#endif  // CLERAY_EXPERIMENTS_HPP_
