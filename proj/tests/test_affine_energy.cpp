#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "affine/affine_energy.hpp"

using namespace affine;
using std::numbers::pi;

namespace {

const ConvexBody kHalfSegment = ConvexBody::segment(0.5, 0.5);

MaskPtr disk(double h, double r = 1.0) { return make_mask(domain::Ball{{0, 0}, r}, h); }

GridFunction cone(const MaskPtr& m, double r = 1.0) {
  return discretize(m, [r](std::span<const double> x) { return r - std::hypot(x[0], x[1]); });
}

// Nonradial smooth bump with random coefficients, vanishing on the unit circle.
GridFunction random_bump(const MaskPtr& m, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-0.6, 0.6);
  const double a = u(rng), b = u(rng), c = u(rng), e = u(rng);
  return discretize(m, [=](std::span<const double> x) {
    const double r2 = x[0] * x[0] + x[1] * x[1];
    return (1 - r2) * (1 + a * x[0] + b * x[1] + c * x[0] * x[1] + e * x[0] * x[0]);
  });
}

}  // namespace

TEST(BallProjection, SegmentPEqualsOneOracle) {
  const auto ctx = EnergyContext::with_defaults(2, kHalfSegment, 1.0);
  // Trapezoid error of the kinked integrand |cos| at 512 nodes.
  for (double g : ctx.ball_gauges()) EXPECT_NEAR(g, 2.0, 1e-4);
  EXPECT_NEAR(ctx.ball_volume(), pi / 4, 1e-4);
  EXPECT_NEAR(d_constant(ctx), 2 * pi * std::sqrt(pi / 2), 1e-3);
  const auto fine = EnergyContext(2, kHalfSegment, 1.0, build_rule(2, QuadScheme::uniform_angle, 6),
                                  build_rule(2, QuadScheme::uniform_angle, 14));
  for (double g : fine.ball_gauges()) EXPECT_NEAR(g, 2.0, 1e-7);
}

TEST(BallProjection, ScalingQ) {
  // Gauges scale by s, so d(sQ) = d(Q)/s and the energy does not see the scale of Q.
  const auto f = cone(disk(1.0 / 16));
  for (double p : {1.0, 2.0, 3.0}) {
    const auto a = EnergyContext::with_defaults(2, kHalfSegment, p);
    const auto b = EnergyContext::with_defaults(2, ConvexBody::scaled(kHalfSegment, 3.0), p);
    EXPECT_NEAR(3.0 * b.d(), a.d(), 1e-12 * a.d());
    EXPECT_NEAR(energy(b, f), energy(a, f), 1e-12 * energy(a, f));
    const auto c = EnergyContext::with_defaults(2, ConvexBody::lq_ball(2, 2), p);
    const auto e = EnergyContext::with_defaults(2, ConvexBody::scaled(ConvexBody::lq_ball(2, 2), 0.4), p);
    EXPECT_NEAR(0.4 * e.d(), c.d(), 1e-12 * c.d());
  }
}

TEST(BallProjection, RefinementStability) {
  for (const auto& Q : {kHalfSegment, ConvexBody::segment(0.25, 0.75), ConvexBody::lq_ball(2, 2)}) {
    const int nm = 2 * Q.dim();
    const auto coarse = nm == 2 ? build_rule(2, QuadScheme::uniform_angle, 8) : build_rule(4, QuadScheme::product, 3);
    const auto fine = nm == 2 ? build_rule(2, QuadScheme::uniform_angle, 9) : build_rule(4, QuadScheme::product, 4);
    const auto rn = default_rule(2);
    const EnergyContext a(2, Q, 2.0, coarse, rn), b(2, Q, 2.0, fine, rn);
    EXPECT_LE(std::abs(a.d() - b.d()) / b.d(), 1e-3) << Q.describe();
  }
}

TEST(BodyProjection, CenteredUnitSquareIsL1) {
  const auto ctx = EnergyContext::with_defaults(2, kHalfSegment, 1.0);
  const auto sq = ConvexBody::polytope({{0.5, 0.5}, {-0.5, 0.5}, {-0.5, -0.5}, {0.5, -0.5}});
  for (double a : {0.0, 0.3, 1.2, 2.5, 4.0}) {
    const double t[2] = {std::cos(a), std::sin(a)};
    EXPECT_NEAR(body_projection_gauge(ctx, sq, t), std::abs(t[0]) + std::abs(t[1]), 1e-14);
  }
}

TEST(BodyProjection, BallIsRotationInvariant) {
  const auto ctx = EnergyContext::with_defaults(2, ConvexBody::lq_ball(2, 2), 2.0);
  const auto B = ConvexBody::euclidean_ball(2);
  const double ref = body_projection_gauge(ctx, B, ctx.rule_nm().node(0));
  for (std::size_t i = 0; i < ctx.rule_nm().size(); i += 37)
    EXPECT_NEAR(body_projection_gauge(ctx, B, ctx.rule_nm().node(i)), ref, 1e-10 * ref);
}

TEST(BodyProjection, UnsupportedBody) {
  const auto ctx = EnergyContext::with_defaults(2, kHalfSegment, 2.0);
  Eigen::MatrixXd M = Eigen::Matrix2d::Identity();
  const double t[2] = {1, 0};
  try {
    (void)body_projection_gauge(ctx, ConvexBody::ellipsoid(M * 2), t);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::unsupported_body);
  }
}

TEST(PolarVolume, Examples) {
  const auto rule = build_rule(2, QuadScheme::uniform_angle, 9);
  std::vector<double> ones(rule.size(), 1.0), twos(rule.size(), 2.0), l1(rule.size());
  EXPECT_NEAR(polar_projection_volume(ones, rule), pi, 1e-12);
  EXPECT_NEAR(polar_projection_volume(twos, rule), pi / 4, 1e-12);
  const auto fine = build_rule(2, QuadScheme::uniform_angle, 12);
  l1.resize(fine.size());
  for (std::size_t i = 0; i < fine.size(); ++i) l1[i] = std::abs(fine.node(i)[0]) + std::abs(fine.node(i)[1]);
  EXPECT_NEAR(polar_projection_volume(l1, fine), 2.0, 1e-5);
  ones[3] = 0.0;
  try {
    (void)polar_projection_volume(ones, rule);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::degenerate_input);
  }
}

TEST(ProjectionGauge, SegmentIsHalfAbsoluteInnerProduct) {
  const auto ctx = EnergyContext::with_defaults(2, kHalfSegment, 3.0);
  std::mt19937_64 rng(1);
  const auto f = random_bump(disk(1.0 / 16), rng);
  const auto g = gradient(f);
  const double t[2] = {0.6, 0.8};
  double s = 0;
  for (std::size_t c = 0; c < g.size(); ++c) s += std::pow(std::abs(0.6 * g.values[2 * c] + 0.8 * g.values[2 * c + 1]) / 2, 3);
  EXPECT_NEAR(projection_gauge(ctx, f, t), std::pow(s * f.mask().cell_volume(), 1.0 / 3), 1e-13);
}

TEST(ProjectionGauge, ConeIsIsotropic) {
  const auto ctx = EnergyContext::with_defaults(2, kHalfSegment, 2.0);
  const auto f = cone(disk(1.0 / 128));
  const auto G = projection_gauges(ctx, f);
  const double expect = 0.5 * std::sqrt(pi / 2);
  for (double g : G) EXPECT_NEAR(g, expect, 2e-2 * expect);
}

TEST(ProjectionGauge, HomogeneousAndZeroRejected) {
  const auto ctx = EnergyContext::with_defaults(2, ConvexBody::segment(0.25, 0.75), 2.0);
  const auto f = cone(disk(1.0 / 32));
  const double t[2] = {0.28, -0.96};
  EXPECT_NEAR(projection_gauge(ctx, f.scaled(3.5), t), 3.5 * projection_gauge(ctx, f, t), 1e-13);
  try {
    (void)projection_gauge(ctx, f.scaled(0.0), t);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::degenerate_input);
  }
}

TEST(ProjectionGauge, QuadraticPathMatchesGeneric) {
  // The 1-d polytope [-1/2, 1/2] is evaluated through the generic support path.
  const auto seg_poly = ConvexBody::polytope({{-0.5}, {0.5}});
  const auto fast = EnergyContext::with_defaults(2, kHalfSegment, 2.0);
  const auto slow = EnergyContext::with_defaults(2, seg_poly, 2.0);
  ASSERT_TRUE(fast.quadratic());
  ASSERT_FALSE(slow.quadratic());
  std::mt19937_64 rng(3);
  const auto f = random_bump(disk(1.0 / 32), rng);
  const auto Gf = projection_gauges(fast, f), Gs = projection_gauges(slow, f);
  for (std::size_t i = 0; i < Gf.size(); ++i) EXPECT_NEAR(Gf[i], Gs[i], 1e-12 * Gs[i]);
  const auto wf = energy_flux(fast, f), ws = energy_flux(slow, f);
  for (std::size_t i = 0; i < wf.values.size(); ++i) EXPECT_NEAR(wf.values[i], ws.values[i], 1e-10);
}

TEST(Energy, TwoRoutesAgree) {
  std::mt19937_64 rng(5);
  for (const auto& Q : {kHalfSegment, ConvexBody::segment(0.25, 0.75), ConvexBody::lq_ball(2, 2)}) {
    for (double p : {1.5, 2.0, 3.0}) {
      const auto ctx = EnergyContext::with_defaults(2, Q, p);
      const auto r = energy_routes(ctx, random_bump(disk(1.0 / 16), rng));
      EXPECT_NEAR(r.integral_route, r.volume_route, 1e-12 * r.integral_route);
    }
  }
}

TEST(Energy, Homogeneous) {
  const auto ctx = EnergyContext::with_defaults(2, ConvexBody::segment(0.25, 0.75), 3.0);
  std::mt19937_64 rng(6);
  const auto f = random_bump(disk(1.0 / 16), rng);
  EXPECT_NEAR(energy(ctx, f.scaled(2.5)), 2.5 * energy(ctx, f), 1e-12 * energy(ctx, f));
}

TEST(Energy, RadialEqualsGradientNorm) {
  for (double p : {1.5, 2.0, 3.0}) {
    const auto ctx = EnergyContext::with_defaults(2, kHalfSegment, p);
    const auto f = discretize(disk(1.0 / 64), [](std::span<const double> x) {
      const double r2 = x[0] * x[0] + x[1] * x[1];
      return (1 - r2) * (1 - r2);
    });
    const double E = energy(ctx, f), N = gradient_norm(f, p);
    EXPECT_NEAR(E, N, 1e-2 * N) << p;
  }
}

TEST(Energy, BoundedByGradientNorm) {
  std::mt19937_64 rng(7);
  for (const auto& Q : {kHalfSegment, ConvexBody::segment(0.25, 0.75), ConvexBody::lq_ball(2, 2)}) {
    const auto ctx = EnergyContext::with_defaults(2, Q, 2.0);
    for (int s = 0; s < 4; ++s) {
      const auto f = random_bump(disk(1.0 / 24), rng);
      EXPECT_LE(energy(ctx, f), gradient_norm(f, 2.0) * (1 + 1e-3)) << Q.describe();
    }
  }
}

TEST(Energy, MonotoneInQ) {
  const auto small = EnergyContext::with_defaults(2, kHalfSegment, 2.0);
  const auto big = EnergyContext::with_defaults(2, ConvexBody::segment(0.75, 0.5), 2.0);
  std::mt19937_64 rng(8);
  const auto f = random_bump(disk(1.0 / 16), rng);
  const auto a = projection_gauges(small, f), b = projection_gauges(big, f);
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_LE(a[i], b[i] * (1 + 1e-14));
  EXPECT_GE(polar_projection_volume(a, small.rule_nm()), polar_projection_volume(b, big.rule_nm()));
}

TEST(Energy, ShearInvariance) {
  const auto ctx = EnergyContext::with_defaults(2, ConvexBody::segment(0.25, 0.75), 2.0);
  const double h = 1.0 / 64;
  const auto m = disk(h);
  std::mt19937_64 rng(9);
  const auto f = random_bump(m, rng);
  Eigen::Matrix2d T;
  T << 1, 0.6, 0, 1;
  const auto target = make_mask(pullback_descriptor(m->descriptor(), T), h);
  const auto g = affine_pullback(f, T, target);
  EXPECT_NEAR(energy(ctx, g), energy(ctx, f), 2e-2 * energy(ctx, f));
}

TEST(Centroid, BallIdentity) {
  for (auto [Q, p] : std::vector<std::pair<ConvexBody, double>>{
           {kHalfSegment, 2.0}, {ConvexBody::lq_ball(2, 2), 2.0}, {ConvexBody::segment(0.3, 0.9), 3.0}}) {
    const auto ctx = EnergyContext::with_defaults(2, Q, p);
    const int m = Q.dim();
    const double expect = std::pow(m / ((2 * m + p) * pi), 1 / p);
    for (int k = 0; k < 16; ++k) {
      const double v[2] = {std::cos(0.4 * k), std::sin(0.4 * k)};
      EXPECT_NEAR(centroid_support(ctx, ctx.ball_gauges(), v), expect, 1e-3 * expect) << Q.describe();
    }
  }
  EXPECT_NEAR(std::sqrt(1 / (4 * pi)), 0.28209479177, 1e-10);
}

TEST(Centroid, Homogeneous) {
  const auto ctx = EnergyContext::with_defaults(2, ConvexBody::segment(0.3, 0.9), 2.0);
  const double v[2] = {0.3, -0.7}, sv[2] = {1.2, -2.8};
  EXPECT_NEAR(centroid_support(ctx, ctx.ball_gauges(), sv), 4 * centroid_support(ctx, ctx.ball_gauges(), v), 1e-13);
}

TEST(LBody, RadialIsBall) {
  const auto ctx = EnergyContext::with_defaults(2, ConvexBody::segment(0.25, 0.75), 2.0);
  const auto f = cone(disk(1.0 / 128));
  const auto G = projection_gauges(ctx, f);
  for (int k = 0; k < 12; ++k) {
    const double z[2] = {2 * std::cos(0.5 * k), 2 * std::sin(0.5 * k)};
    EXPECT_NEAR(L_body_support(ctx, G, z), 2.0, 2e-2);
  }
  EXPECT_NEAR(L_body_factor(ctx, G), L_body_factor_volume_form(ctx, G), 1e-12 * L_body_factor(ctx, G));
}

TEST(LBody, ScaleInvariant) {
  const auto ctx = EnergyContext::with_defaults(2, kHalfSegment, 3.0);
  std::mt19937_64 rng(12);
  const auto f = random_bump(disk(1.0 / 16), rng);
  const double z[2] = {0.4, 1.1};
  EXPECT_NEAR(L_body_support(ctx, f.scaled(7.0), z), L_body_support(ctx, f, z), 1e-12);
}

TEST(LBody, SLnEquivariance) {
  const auto ctx = EnergyContext::with_defaults(2, kHalfSegment, 2.0);
  const double h = 1.0 / 96;
  const auto m = disk(h);
  std::mt19937_64 rng(13);
  const auto f = random_bump(m, rng);
  Eigen::Matrix2d A;
  A << 1.3, 0.4, 0.2, (1 + 0.4 * 0.2) / 1.3;
  const auto target = make_mask(pullback_descriptor(m->descriptor(), A), h);
  const auto fa = affine_pullback(f, A, target);
  const Eigen::Matrix2d At_inv = A.transpose().inverse();
  for (int k = 0; k < 8; ++k) {
    const Eigen::Vector2d z(std::cos(0.8 * k), std::sin(0.8 * k));
    const Eigen::Vector2d w = At_inv * z;
    const double lhs = L_body_support(ctx, fa, std::span<const double>(z.data(), 2));
    const double rhs = L_body_support(ctx, f, std::span<const double>(w.data(), 2));
    EXPECT_NEAR(lhs, rhs, 2e-2 * rhs);
  }
}

TEST(Flux, EulerIdentity) {
  std::mt19937_64 rng(14);
  for (const auto& Q : {kHalfSegment, ConvexBody::segment(0.25, 0.75), ConvexBody::lq_ball(2, 2)}) {
    for (double p : {1.5, 2.0, 3.0}) {
      const auto ctx = EnergyContext::with_defaults(2, Q, p);
      const auto f = random_bump(disk(1.0 / 16), rng);
      const auto g = gradient(f);
      const auto w = energy_flux(ctx, f);
      double s = 0;
      for (std::size_t i = 0; i < g.values.size(); ++i) s += g.values[i] * w.values[i];
      s *= f.mask().cell_volume();
      const double Ep = std::pow(energy(ctx, f), p);
      EXPECT_NEAR(s, Ep, 1e-10 * Ep);
    }
  }
}

TEST(Flux, DirectionalDerivative) {
  std::mt19937_64 rng(15);
  std::normal_distribution<double> nd;
  for (const auto& Q : {kHalfSegment, ConvexBody::segment(0.25, 0.75), ConvexBody::lq_ball(2, 2)}) {
    for (double p : {2.0, 3.0}) {
      const auto ctx = EnergyContext::with_defaults(2, Q, p);
      const auto m = disk(1.0 / 12);
      const auto f = random_bump(m, rng);
      const auto w = energy_flux(ctx, f);
      CellField hw{w.mask, w.values};
      for (double& x : hw.values) x *= m->cell_volume();
      const auto grad = gradient_adjoint(hw);
      auto F = [&](const GridFunction& u) { return std::pow(energy(ctx, u), p) / p; };
      for (int s = 0; s < 3; ++s) {
        const auto phi = discretize(m, [&](auto) { return nd(rng); });
        double dot = 0;
        for (std::size_t i = 0; i < phi.values().size(); ++i) dot += grad[i] * phi[i];
        const double e = 1e-4;
        auto plus = f, minus = f;
        for (std::size_t i = 0; i < phi.values().size(); ++i) {
          plus.mutable_values()[i] += e * phi[i];
          minus.mutable_values()[i] -= e * phi[i];
        }
        const double fd = (F(plus) - F(minus)) / (2 * e);
        EXPECT_NEAR(dot, fd, 1e-5 * (std::abs(fd) + F(f))) << Q.describe() << " p=" << p;
      }
    }
  }
}

TEST(Flux, RadialMatchesPLaplacianFlux) {
  const double p = 3.0;
  const auto ctx = EnergyContext::with_defaults(2, kHalfSegment, p);
  const auto f = cone(disk(1.0 / 96));
  const auto g = gradient(f);
  const auto w = energy_flux(ctx, f);
  double err = 0, ref = 0;
  for (std::size_t c = 0; c < g.size(); ++c) {
    const double gx = g.values[2 * c], gy = g.values[2 * c + 1];
    const double r = std::pow(std::hypot(gx, gy), p - 2);
    err += std::pow(std::hypot(w.values[2 * c] - r * gx, w.values[2 * c + 1] - r * gy), 2);
    ref += std::pow(r * std::hypot(gx, gy), 2);
  }
  EXPECT_LE(std::sqrt(err / ref), 3e-2);
}

TEST(BusemannPetty, BallMinimizesRatio) {
  const auto ctx = EnergyContext::with_defaults(2, ConvexBody::segment(0.25, 0.75), 2.0);
  const double base = busemann_petty_ratio(ctx, ctx.ball_gauges());
  const auto radial = projection_gauges(ctx, cone(disk(1.0 / 96)));
  EXPECT_NEAR(busemann_petty_ratio(ctx, radial), base, 2e-2 * base);
  std::mt19937_64 rng(21);
  for (int s = 0; s < 5; ++s) {
    const auto G = projection_gauges(ctx, random_bump(disk(1.0 / 24), rng));
    EXPECT_GE(busemann_petty_ratio(ctx, G), base * (1 - 1e-3));
  }
}
