#include <gtest/gtest.h>

#include <cmath>

#include "cleray/chart.hpp"
#include "fixtures.hpp"

using namespace cleray;
using cleray::testing::atlas_for;

namespace {

std::vector<Domain> all_domains() { return {Domain::ball(), Domain::flat(), Domain::power_m(1.75)}; }

}  // namespace

TEST(BumpProfile, CompactSupportAndSmooth) {
  EXPECT_EQ(bump_profile(1.0, 2.0), 0.0);
  EXPECT_EQ(bump_profile(-1.2, 2.0), 0.0);
  EXPECT_EQ(bump_profile(0.0, 2.0), 1.0);
  EXPECT_LT(bump_profile(0.99, 2.0), 1e-40);
  EXPECT_NEAR(bump_profile(0.5, 2.0), std::exp(-2.0 * 0.25 / 0.75), 1e-15);
}

TEST(Frames, Orthonormal) {
  for (const RealPoint4 n : {RealPoint4(1, 0, 0, 0), RealPoint4(0.3, 0.4, -0.5, 0.7), RealPoint4(0, 0.2, 0.9, 0.1)}) {
    const RealPoint4 nn = (1.0 / norm(n)) * n;
    std::vector<std::array<RealPoint4, 4>> frames{unitary_frame(nn)};
    if (nn[0] != 1.0) frames.push_back(critical_frame(nn));
    for (const auto& f : frames) {
      for (int a = 0; a < 4; ++a)
        for (int b = 0; b < 4; ++b) EXPECT_NEAR(dot(f[a], f[b]), a == b ? 1.0 : 0.0, 1e-14);
    }
    const auto u = unitary_frame(nn);
    if (nn[0] == 1.0) continue;
    EXPECT_NEAR(distance(u[0], nn), 0.0, 1e-15);
    EXPECT_NEAR(distance(u[1], -1.0 * complex_structure(u[0])), 0.0, 1e-15);
    EXPECT_NEAR(distance(u[3], complex_structure(u[2])), 0.0, 1e-15);
    const auto c = critical_frame(nn);
    EXPECT_EQ(c[0][0], 0.0);
    EXPECT_EQ(c[1][0], 1.0);
  }
}

TEST(Chart, GraphLiesOnBoundary) {
  for (const auto& d : all_domains()) {
    const auto& atlas = atlas_for(d);
    for (std::size_t j = 0; j < atlas.charts().size(); j += 7) {
      const auto& c = atlas.charts()[j];
      detail::for_each_lattice(c, 5, [&](const std::array<double, 3>& t) {
        const ChartSample s = c.evaluate(d, t);
        ASSERT_TRUE(s.valid);
        EXPECT_LT(std::abs(rho(d, s.point)), 1e-12);
        const auto tc = c.coords(s.point);
        for (int a = 0; a < 3; ++a) EXPECT_NEAR(tc[a], t[a], 1e-12);
        const RealPoint4 g = real_gradient(d, s.point);
        for (const auto& tan : s.tangents) EXPECT_NEAR(dot(g, tan), 0.0, 1e-12 * norm(g));
      });
    }
  }
}

TEST(Chart, DependentDirectionDominates) {
  for (const auto& d : all_domains()) {
    const auto& atlas = atlas_for(d);
    for (const auto& c : atlas.charts()) EXPECT_GE(c.dominance_margin, 0.5);
  }
}

TEST(Chart, DominanceSelectionRule) {
  // At the sampled chart points the dependent component is at least half the largest component.
  for (const auto& d : all_domains()) {
    const auto& atlas = atlas_for(d);
    for (std::size_t j = 0; j < atlas.charts().size(); j += 5) {
      const auto& c = atlas.charts()[j];
      detail::for_each_lattice(c, 3, [&](const std::array<double, 3>& t) {
        const ChartSample s = c.evaluate(d, t);
        const RealPoint4 g = real_gradient(d, s.point);
        double mx = 0.0;
        for (int k = 0; k < 4; ++k) mx = std::max(mx, std::abs(g[k]));
        EXPECT_GE(dot(g, c.dependent_direction()), 0.5 * mx);
      });
    }
  }
}

TEST(Chart, KindsOnPowerDomain) {
  const Domain d = Domain::power_m(1.75);
  const auto& atlas = atlas_for(d);
  int first = 0;
  for (const auto& c : atlas.charts()) {
    EXPECT_NE(c.kind(), ChartKind::Generic);
    if (c.kind() == ChartKind::FirstKind) {
      ++first;
      EXPECT_EQ(c.dependent_direction()[0], 0.0);
      EXPECT_NE(c.dependent_component(), 0);
      EXPECT_GE(c.u1_axis(), 0);
      EXPECT_LT(std::abs(c.center()[0]), c.radius());
    } else {
      EXPECT_TRUE(c.support_lo[0] > 0.0 || c.support_hi[0] < 0.0);
    }
  }
  EXPECT_GT(first, 0);
  for (const auto& c : atlas_for(Domain::ball()).charts()) EXPECT_EQ(c.kind(), ChartKind::Generic);
}

TEST(Chart, FlatCaseOneAtUnitW2) {
  const Domain d = Domain::flat();
  auto c = make_chart(d, RealPoint4::from_complex(0.0, 1.0), 0.5, AtlasOptions{});
  ASSERT_TRUE(c);
  EXPECT_EQ(c->dependent_component(), 2);
}

TEST(Atlas, CoverAndPartitionOfUnity) {
  for (const auto& d : all_domains()) {
    const auto& atlas = atlas_for(d);
    EXPECT_GT(atlas.cover_min_weight, kMinBumpSum);
    for (const auto& w : sample_boundary(d, 1000, 4242)) {
      double s = 0.0;
      for (int j = 0; j < static_cast<int>(atlas.charts().size()); ++j) s += atlas.partition_weight(j, w);
      EXPECT_NEAR(s, 1.0, 1e-10) << d.name();
    }
  }
}

TEST(Atlas, NeighbourListsAreComplete) {
  const Domain d = Domain::flat();
  const auto& atlas = atlas_for(d);
  for (const auto& w : sample_boundary(d, 300, 99)) {
    const RealPoint4 g = real_gradient(d, w);
    for (int j = 0; j < static_cast<int>(atlas.charts().size()); ++j) {
      if (atlas.charts()[j].bump(w, g) == 0.0) continue;
      EXPECT_NEAR(atlas.partition_weight(j, w), atlas.charts()[j].bump(w, g) / atlas.bump_sum(w), 1e-12);
    }
  }
}

TEST(Atlas, Deterministic) {
  const Domain d = Domain::ball();
  const auto a = build_charts(d, 0.5), b = build_charts(d, 0.5);
  ASSERT_EQ(a.charts().size(), b.charts().size());
  for (std::size_t j = 0; j < a.charts().size(); ++j) EXPECT_EQ(a.charts()[j].center(), b.charts()[j].center());
}

TEST(Ibp, LeadingTermIsHalfGradientNorm) {
  const Domain d = Domain::flat();
  for (const auto& z : sample_boundary(d, 20, 8)) {
    auto c = make_chart(d, z, 0.2, AtlasOptions{});
    ASSERT_TRUE(c);
    const cplx iii = ibp_leading_term(d, *c);
    EXPECT_NEAR(std::abs(iii), 0.5 * norm(real_gradient(d, z)), 1e-12);
    EXPECT_NEAR(iii.real(), 0.0, 1e-12);
  }
}

TEST(Ibp, MarginChartsExist) {
  const Domain d = Domain::flat();
  AtlasOptions o;
  o.require_ibp_margin = true;
  for (const auto& z : sample_boundary(d, 5, 21)) {
    auto c = make_chart(d, z, 0.5, o);
    ASSERT_TRUE(c);
    EXPECT_GE(c->ibp_margin, 0.5);
    EXPECT_GE(chart_ibp_margin(d, *c, 9), 0.45);
  }
}
