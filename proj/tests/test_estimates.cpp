#include <gtest/gtest.h>

#include <cmath>

#include "cleray/estimates.hpp"
#include "fixtures.hpp"

using namespace cleray;
using cleray::testing::atlas_for;

TEST(IntegralI, ClosedFormAtOrigin) {
  // int_{B^3} r^-2 dV = 4 pi
  const RefinementStudy s = integral_I(1.0, 0.0, 0.0);
  EXPECT_FALSE(s.divergent);
  EXPECT_NEAR(s.value, 4.0 * kPi, 1e-2);
  EXPECT_NEAR(s.value, 4.0 * kPi, 1e-5);
}

TEST(IntegralI, DivergentAboveHalfAlpha) {
  EXPECT_TRUE(integral_I(0.6, 0.35, 0.0).divergent);
  EXPECT_FALSE(integral_I(0.6, 0.25, 0.0).divergent);
  EXPECT_FALSE(integral_I(0.6, 0.35, 0.5).divergent);
}

TEST(IntegralI, MonteCarloOracle) {
  const RefinementStudy s = integral_I(0.6, 0.1, 0.5);
  const McEstimate mc = integral_I_monte_carlo(0.6, 0.1, 0.5, 1000000, 2024);
  const double quad_err = std::abs(s.values[s.values.size() - 1] - s.values[s.values.size() - 2]);
  EXPECT_LE(std::abs(s.value - mc.mean), 3.0 * std::hypot(mc.standard_error, quad_err));
  EXPECT_LT(mc.standard_error / mc.mean, 2e-3);
}

TEST(IntegralI, MonotoneInBetaAndSymmetric) {
  for (double x : {0.0, 0.3, -0.7, 1.0}) {
    const double i0 = integral_I(0.6, 0.0, x).value;
    for (double b : {0.1, 0.2, 0.25}) EXPECT_LE(i0, integral_I(0.6, b, x).value);
    EXPECT_NEAR(integral_I(0.6, 0.25, x).value, integral_I(0.6, 0.25, -x).value, 1e-9 * i0);
  }
}

TEST(IntegralI, UniformInX1) {
  for (auto [a, b] : {std::pair{0.6, 0.25}, std::pair{1.0, 0.45}, std::pair{0.5, 0.2}}) {
    const EstimateResult r = check_integral_I_uniform(a, b);
    EXPECT_TRUE(r.pass) << a << " " << b << " change " << r.extra.at("relative_change");
    EXPECT_TRUE(std::isfinite(r.fitted));
  }
}

TEST(IntegralI, SplitRegions) {
  const double a = 0.6, b = 0.25;
  const double at_zero = integral_I(a, b, 0.0).value;
  double prev_outer = -1.0, rmin = 1e300, rmax = 0.0;
  for (double x : {0.5, 0.25, 0.125, 0.0625}) {
    const SplitI s = integral_I_split(a, b, x);
    const double full = integral_I(a, b, x).value;
    EXPECT_NEAR(s.sum() / full, 1.0, 1e-3);
    const double ratio = s.inner / std::pow(x, a - 2.0 * b);
    rmin = std::min(rmin, ratio);
    rmax = std::max(rmax, ratio);
    EXPECT_LE(s.middle, 2.0 * std::pow(x, a - 2.0 * b) * 40.0);
    // the outer region grows toward the x1 = 0 value and stays below it
    EXPECT_GE(s.outer, prev_outer);
    EXPECT_LE(s.outer, at_zero);
    prev_outer = s.outer;
  }
  EXPECT_LT(rmax / rmin, 1.5);
  EXPECT_THROW(integral_I_split(a, b, 0.0), ConfigError);
}

TEST(ModelChartIntegral, ModelIntegralFiniteAndUniform) {
  const EstimateResult one = check_model_chart_integral(0.2, {0.5});
  EXPECT_TRUE(one.pass);
  EXPECT_GT(one.fitted, 0.0);
  const EstimateResult all = check_model_chart_integral(0.2, {0.0, 0.05, 0.1, 0.25, 0.5, 1.0});
  EXPECT_TRUE(all.pass);
  EXPECT_GE(all.fitted, one.fitted);
}

TEST(KernelPower, MonteCarloOracleAtGenericTarget) {
  const RealPoint4 z = flat_point(0.2, 0.5, 0.7);
  for (double beta : {0.0, 0.2}) {
    const double q4 = kernel_power_integral(z, {beta}, 3)[0], q5 = kernel_power_integral(z, {beta}, 4)[0];
    const McEstimate mc = kernel_power_monte_carlo(z, beta, 1000000, 99);
    EXPECT_LE(std::abs(q5 - mc.mean), 3.0 * std::hypot(mc.standard_error, q5 - q4)) << beta;
  }
}

TEST(KernelPower, AtlasGridAgrees) {
  const RealPoint4 z = flat_point(0.2, 0.5, 0.7);
  const double a = kernel_power_integrals_atlas(atlas_for(Domain::flat()), 4, {z}, {0.0})[0];
  EXPECT_NEAR(a / kernel_power_integral(z, {0.0}, 4)[0], 1.0, 5e-3);
}

TEST(KernelPower, SaturatesIncludingFlatPoints) {
  std::vector<RealPoint4> zs{flat_point(0.2, 0.5, 0.7), flat_point(0.1, 0.0, 1.0), flat_point(-0.3, 0.05, 2.0)};
  const auto rs = check_kernel_power({0.0, 0.2, 0.3}, zs, 5);
  ASSERT_EQ(rs.size(), 3u);
  EXPECT_TRUE(rs[0].pass) << rs[0].extra.at("sup_change");
  EXPECT_TRUE(rs[1].pass) << rs[1].extra.at("sup_change");
  EXPECT_TRUE(rs[0].asserted);
  EXPECT_FALSE(rs[2].asserted);
  EXPECT_GT(rs[2].fitted, rs[1].fitted);
}

TEST(StrictConvexity, DiagonalIsTight) {
  const Domain d = Domain::flat();
  for (const auto& z : sample_boundary(d, 20, 4)) {
    EXPECT_EQ(delta(d, z, z), cplx(0.0));
    EXPECT_EQ(re_delta_boundary(d, z, z), 0.0);
  }
}

TEST(StrictConvexity, FlatLiteralInequality) {
  const EstimateResult r = check_strict_convexity(Domain::flat(), 100000, 1);
  EXPECT_EQ(r.extra.at("violations"), 0.0) << r.witness;
}

TEST(StrictConvexity, FlatExactFlatConstant) {
  // On the boundary 2 Re Delta = (u1-x1)^2 + |w2-z2|^2 + (v1-y1)^2 (3 v1^2 + 2 v1 y1 + y1^2), and
  // 3 v^2 + 2 v y + y^2 >= (2 - sqrt 2)(v^2 + y^2).
  const EstimateResult r = check_strict_convexity(Domain::flat(), 100000, 1);
  EXPECT_GE(r.extra.at("best_flat_constant"), 2.0 - std::sqrt(2.0) - 1e-9);
  EXPECT_LT(r.extra.at("best_flat_constant"), 0.6);
}

TEST(StrictConvexity, PowerPositiveConstant) {
  const EstimateResult r = check_strict_convexity(Domain::power_m(1.75), 100000, 1);
  EXPECT_TRUE(r.pass);
  EXPECT_GT(r.fitted, 0.0);
}

TEST(StrictConvexity, BoundaryFormMatchesDelta) {
  for (const auto& d : {Domain::flat(), Domain::power_m(1.75), Domain::ball()}) {
    const auto a = sample_boundary(d, 200, 6), b = sample_boundary(d, 200, 7);
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(re_delta_boundary(d, a[i], b[i]), delta(d, a[i], b[i]).real(), 1e-13);
  }
}

TEST(EpsBounds, FittedConstantsPositive) {
  const std::vector<double> eps{1e-1, 1e-2, 1e-3, 1e-4, 1e-5};
  for (const auto& d : {Domain::flat(), Domain::power_m(1.75)}) {
    const EstimateResult r = check_eps_bounds(d, 20000, eps, 3);
    EXPECT_EQ(r.parameters.at("triples"), 100000.0);
    EXPECT_LE(r.extra.at("identity_residual"), 1e-12);
    EXPECT_GT(r.extra.at("c0"), 0.0);
    EXPECT_LT(r.extra.at("c0"), 1.0);
    EXPECT_GT(r.extra.at("c"), 0.0);
    EXPECT_NEAR(r.extra.at("c1"), r.extra.at("sup_pairing"), 1e-6 * r.extra.at("sup_pairing"));
    EXPECT_TRUE(r.pass) << d.name();
  }
}

TEST(EpsBounds, ZeroPushIsExact) {
  const Domain d = Domain::flat();
  const auto z = sample_boundary(d, 5, 1);
  for (const auto& w : sample_boundary(d, 5, 2))
    for (const auto& x : z) EXPECT_EQ(delta(d, w, eps_push(d, x, 0.0)), delta(d, w, x));
}

TEST(ChartMargin, ShrinkingRadiusReachesHalfLeadingTerm) {
  const EstimateResult r = check_chart_margin(Domain::flat(), {0.4, 0.2, 0.1, 0.05, 0.025}, 12, 5);
  EXPECT_TRUE(r.pass);
  EXPECT_GT(r.fitted, 0.0);
  // the ratio increases toward |III| / |grad rho| = 1/2 as the chart shrinks
  for (std::size_t k = 1; k < r.values.size(); ++k) EXPECT_GE(r.values[k], r.values[k - 1]);
  EXPECT_LT(r.values.back(), 0.5);
}

TEST(PushDecay, DecaysWithPositiveRate) {
  const auto& atlas = atlas_for(Domain::flat());
  std::vector<RealPoint4> zs{flat_point(0.2, 0.5, 0.7), flat_point(0.1, 0.0, 1.0)};
  const EstimateResult r = check_push_decay(atlas, zs, {1e-1, 1e-2, 1e-3, 1e-4, 0.0}, 4);
  EXPECT_TRUE(r.pass);
  EXPECT_GE(r.fitted, 0.15);
  EXPECT_TRUE(std::isfinite(r.extra.at("domination_constant")));
  EXPECT_EQ(r.values[4], 0.0);
  EXPECT_EQ(r.values[9], 0.0);
}

TEST(HessianProfile, SlopesMatchExponent) {
  for (double m : {1.25, 1.75}) {
    const EstimateResult r = check_hessian_profile(Domain::power_m(m), u1_sweep());
    EXPECT_TRUE(r.pass) << m;
    EXPECT_NEAR(r.extra.at("hessian_slope"), m - 2.0, 0.05);
    EXPECT_NEAR(r.extra.at("density_increment_slope"), m - 2.0, 0.05);
  }
  const HessianProfile p = hessian_profile(Domain::power_m(1.999), u1_sweep());
  EXPECT_NEAR(p.hessian_fit.slope, 0.0, 0.05);
  EXPECT_NEAR(p.density_fit.slope, 0.0, 0.05);
}
