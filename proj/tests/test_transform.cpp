#include <gtest/gtest.h>

#include <cmath>

#include "cleray/transform.hpp"
#include "fixtures.hpp"

using namespace cleray;
using cleray::testing::atlas_for;

namespace {

const std::vector<BoundaryFunction>& monomials() {
  static const std::vector<BoundaryFunction> m{functions::monomial(0, 0), functions::monomial(1, 0), functions::monomial(0, 1),
                                               functions::monomial(1, 1), functions::monomial(0, 2)};
  return m;
}

BoundaryFunction test_bump() { return functions::bump({0.0, 0.6, 0.8, 0.0}, 0.6); }

}  // namespace

TEST(BoundaryFunction, DifferentialMatchesFiniteDifferences) {
  const Domain d = Domain::flat();
  const std::vector<BoundaryFunction> fs{functions::monomial(2, 1), functions::conj_w2(), functions::re_w2(), test_bump(),
                                         functions::real_coordinate(1) * functions::monomial(0, 1)};
  for (const auto& f : fs) {
    ASSERT_TRUE(f.has_analytic_differential());
    const auto fd = f.without_gradient(1e-6);
    for (const auto& w : sample_boundary(d, 200, 31)) {
      const RealPoint4 t = (1.0 / norm(inward_normal(d, w))) * complex_structure(inward_normal(d, w));
      EXPECT_NEAR(std::abs(f.differential(w, t) - fd.differential(w, t)), 0.0, 1e-5) << f.name();
    }
  }
}

TEST(Interior, ReproducesConstantOnBall) {
  const auto grid = build_grid(atlas_for(Domain::ball()), 4);
  for (const auto& z : interior_points(Domain::ball(), 5, 0.3, 2))
    EXPECT_NEAR(std::abs(cauchy_leray_interior(grid, functions::constant(1.0), z) - 1.0), 0.0, 1e-3);
}

TEST(Interior, ReproducesMonomialsBatched) {
  const Domain d = Domain::flat();
  const auto grid = build_grid(atlas_for(d), 4);
  const auto zs = interior_points(d, 4, 0.3, 6);
  const auto v = cauchy_leray_interior(grid, monomials(), zs);
  ASSERT_EQ(v.size(), monomials().size() * zs.size());
  for (std::size_t i = 0; i < monomials().size(); ++i)
    for (std::size_t k = 0; k < zs.size(); ++k) EXPECT_NEAR(std::abs(v[i * zs.size() + k] - monomials()[i](zs[k])), 0.0, 1e-2);
}

TEST(Interior, W2AtOriginPowerDomain) {
  const auto grid = build_grid(atlas_for(Domain::power_m(1.75)), 5);
  EXPECT_LT(std::abs(cauchy_leray_interior(grid, functions::monomial(0, 1), {0, 0, 0, 0})), 1e-3);
}

TEST(Interior, ConjugateIsReproducibleAcrossLevels) {
  const Domain d = Domain::ball();
  const auto& atlas = atlas_for(d);
  const RealPoint4 z{0.2, -0.1, 0.3, 0.25};
  const cplx v4 = cauchy_leray_interior(build_grid(atlas, 4), functions::conj_w2(), z);
  const cplx v5 = cauchy_leray_interior(build_grid(atlas, 5), functions::conj_w2(), z);
  EXPECT_LT(std::abs(v4 - v5), 1e-4);
  EXPECT_GT(std::abs(v5 - std::conj(z.w2())), 0.1);
  // On the ball C(conj w2) is the constant 0 (orthogonality of conj(w2) to holomorphic kernels).
  EXPECT_LT(std::abs(v5), 1e-4);
}

TEST(Interior, HolomorphicInTarget) {
  const Domain d = Domain::flat();
  const auto grid = build_grid(atlas_for(d), 4);
  const auto f = test_bump() + functions::conj_w2();
  const double h = 1e-3;
  for (const auto& z : interior_points(d, 3, 0.35, 8)) {
    std::vector<RealPoint4> zs;
    for (int k = 0; k < 4; ++k)
      for (double s : {1.0, -1.0}) {
        RealPoint4 p = z;
        p.x[k] += s * h;
        zs.push_back(p);
      }
    const auto v = cauchy_leray_interior(grid, {f}, zs);
    for (int j = 0; j < 2; ++j) {
      const cplx dx = (v[4 * j] - v[4 * j + 1]) / (2 * h);
      const cplx dy = (v[4 * j + 2] - v[4 * j + 3]) / (2 * h);
      EXPECT_LT(std::abs(0.5 * (dx + cplx(0, 1) * dy)), 1e-3);
    }
  }
}

TEST(Interior, LinearInFunction) {
  const Domain d = Domain::power_m(1.75);
  const auto grid = build_grid(atlas_for(d), 3);
  const RealPoint4 z{0.1, 0.2, -0.1, 0.3};
  const auto f = functions::conj_w2(), g = test_bump();
  const cplx a(1.5, -0.5), b(-0.25, 2.0);
  const cplx lhs = cauchy_leray_interior(grid, f.scaled(a) + g.scaled(b), z);
  const cplx rhs = a * cauchy_leray_interior(grid, f, z) + b * cauchy_leray_interior(grid, g, z);
  EXPECT_NEAR(std::abs(lhs - rhs), 0.0, 1e-13 * (1.0 + std::abs(lhs)));
}

TEST(Interior, GuardAndPreconditions) {
  const Domain d = Domain::ball();
  const auto grid = build_grid(atlas_for(d), 3);
  const RealPoint4 z = eps_push(d, RealPoint4::from_complex(0.0, 1.0), 0.01);
  EXPECT_THROW(cauchy_leray_interior(grid, functions::constant(1.0), z), GuardViolation);
  EXPECT_THROW(cauchy_leray_interior(grid, functions::constant(1.0), {0, 0, 2, 0}), ConfigError);
  EXPECT_THROW(cauchy_leray_subtracted(grid, functions::constant(1.0), RealPoint4::from_complex(0.0, 1.0), 0.0), ConfigError);
}

TEST(Subtracted, ConstantIsExact) {
  const Domain d = Domain::flat();
  const auto grid = build_grid(atlas_for(d), 2);
  for (const auto& z : sample_boundary(d, 5, 1)) {
    const cplx v = cauchy_leray_subtracted(grid, functions::constant(cplx(2.0, -1.0)), z, 0.01);
    EXPECT_EQ(v, cplx(2.0, -1.0));
  }
}

TEST(Subtracted, AgreesWithInteriorAndReproduces) {
  const Domain d = Domain::ball();
  const auto& atlas = atlas_for(d);
  const RealPoint4 z = radial_boundary_point(d, {0.3, 0.5, -0.6, 0.2});
  const double eps = 0.05;
  GridSpec spec;
  spec.level = 5;
  spec.foci.push_back({z, 4.0});
  const QuadratureGrid grid(atlas, spec);
  const RealPoint4 ze = eps_push(d, z, eps);
  for (const auto& g : {functions::monomial(1, 1), functions::monomial(0, 2)}) {
    const cplx s = cauchy_leray_subtracted(grid, g, z, eps);
    const cplx i = cauchy_leray_interior(grid, g, ze, 0.0);
    EXPECT_LT(std::abs(s - i), 1e-3);
    EXPECT_LT(std::abs(s - g(ze)), 1e-3);
  }
}

TEST(Decompose, ConstantGivesZeroPieces) {
  const Domain d = Domain::power_m(1.75);
  const auto grid = build_grid(atlas_for(d), 2);
  const auto t = push_target(d, radial_boundary_point(d, {0.2, 0.5, 0.5, 0.1}), 0.05);
  const auto dc = decompose(grid, functions::constant(3.0), {t})[0];
  EXPECT_EQ(dc.e, cplx(0.0));
  EXPECT_EQ(dc.r, cplx(0.0));
  EXPECT_EQ(dc.cauchy, cplx(3.0));
}

TEST(Decompose, LinearInFunction) {
  const Domain d = Domain::power_m(1.75);
  const auto grid = build_grid(atlas_for(d), 2);
  const auto t = push_target(d, radial_boundary_point(d, {0.2, 0.5, 0.5, 0.1}), 0.05);
  const auto f = test_bump(), g = functions::re_w2();
  const cplx a(0.5, 1.0);
  const auto s = decompose(grid, f.scaled(a) + g, {t})[0];
  const auto df = decompose(grid, f, {t})[0], dg = decompose(grid, g, {t})[0];
  EXPECT_NEAR(std::abs(s.e - (a * df.e + dg.e)), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(s.r - (a * df.r + dg.r)), 0.0, 1e-12);
}

TEST(Decompose, ClosesOnBall) {
  const Domain d = Domain::ball();
  const auto& atlas = atlas_for(d);
  const auto f = test_bump();
  std::vector<PushedTarget> ts;
  std::vector<GridFocus> foci;
  for (const auto& z : {RealPoint4(0.0, 0.6, 0.8, 0.0), RealPoint4(0.3, 0.5, 0.7, -0.2)}) {
    const RealPoint4 zb = radial_boundary_point(d, z);
    ts.push_back(push_target(d, zb, 0.05));
    foci.push_back({zb, 4.0});
  }
  const auto r4 = decompose(build_grid(atlas, 4, foci), f, ts);
  const auto r5 = decompose(build_grid(atlas, 5, foci), f, ts);
  for (std::size_t k = 0; k < ts.size(); ++k) {
    EXPECT_LT(std::abs(r5[k].residual()), std::abs(r4[k].residual()) + 1e-4);
    EXPECT_LT(std::abs(r5[k].residual()), 1e-2);
  }
}

TEST(Decompose, RejectsNonIntegrableConfiguration) {
  const Domain d = Domain::power_m(1.25);
  const auto grid = build_grid(atlas_for(d), 2);
  const RealPoint4 z = radial_boundary_point(d, {0.01, 0.5, 0.5, 0.1});
  EXPECT_THROW(op_E(grid, test_bump(), z, 0.0), NonIntegrable);
  EXPECT_THROW(op_R(grid, test_bump(), z, 0.0), NonIntegrable);
}

TEST(Decompose, RemainderKernelBounded) {
  const Domain d = Domain::power_m(1.75);
  const auto grid = build_grid(atlas_for(d), 3);
  for (double eps : {0.1, 0.01, 0.001}) {
    const auto t = push_target(d, radial_boundary_point(d, {0.2, 0.5, 0.5, 0.1}), eps);
    const double k = r_kernel_order(grid, test_bump(), t);
    EXPECT_TRUE(std::isfinite(k));
    EXPECT_LT(k, 1e3);
  }
}

TEST(Ibp, ZeroFunctionAndAgreement) {
  const Domain d = Domain::flat();
  AtlasOptions o;
  o.require_ibp_margin = true;
  const RealPoint4 zeta = radial_boundary_point(d, {0.0, 0.0, 0.0, 1.0});
  auto c = make_chart(d, zeta, 0.5, o);
  ASSERT_TRUE(c);
  GridSpec spec;
  spec.level = 4;
  const RealPoint4 z = eps_push(d, zeta, 0.15);
  EXPECT_EQ(local_ibp_eval(d, *c, spec, functions::constant(0.0), z).value, cplx(0.0));
  const auto f = functions::chart_bump(d, *c, 0.9);
  const cplx ibp = local_ibp_eval(d, *c, spec, f, z).value;
  const cplx direct = chart_direct_eval(d, *c, spec, f, z);
  EXPECT_LT(std::abs(ibp - direct), 1e-3);
}

TEST(Ibp, MarginViolationReported) {
  const Domain d = Domain::flat();
  auto c = make_chart(d, radial_boundary_point(d, {0.0, 1.0, 0.0, 0.0}), 0.5, AtlasOptions{});
  ASSERT_TRUE(c);
  GridSpec spec;
  spec.level = 2;
  const RealPoint4 z = eps_push(d, c->center(), 0.1);
  EXPECT_THROW(local_ibp_eval(d, *c, spec, functions::chart_bump(d, *c, 0.9), z, 10.0), ChartMarginViolation);
}

TEST(BoundaryValue, HolomorphicLimitOnBall) {
  const Domain d = Domain::ball();
  const RealPoint4 z = radial_boundary_point(d, {0.3, 0.5, -0.6, 0.2});
  const auto g = functions::monomial(1, 1);
  for (auto m : {BoundaryMethod::Subtracted, BoundaryMethod::Decomposed}) {
    BoundaryValueOptions o;
    o.method = m;
    const auto rep = boundary_value(atlas_for(d), 5, g, z, o);
    ASSERT_EQ(rep.values.size(), 6u);
    EXPECT_LT(std::abs(rep.extrapolated - g(z)), 1e-3) << rep.method;
    EXPECT_TRUE(rep.decaying);
    EXPECT_NEAR(rep.rate.slope, 1.0, 0.1);
  }
}
