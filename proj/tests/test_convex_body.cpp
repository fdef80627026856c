#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "affine/convex_body.hpp"

using namespace affine;

namespace {

const std::vector<std::vector<double>> kTriangle{{1, 0}, {0, 1}, {-1, -1}};

std::vector<ConvexBody> sample_bodies() {
  Eigen::MatrixXd M(2, 2);
  M << 4, 1, 1, 2;
  return {ConvexBody::lq_ball(2, 2), ConvexBody::lq_ball(2, 1), ConvexBody::lq_ball(2, 3.5),
          ConvexBody::lq_ball(2, std::numeric_limits<double>::infinity()), ConvexBody::polytope(kTriangle),
          ConvexBody::ellipsoid(M), ConvexBody::scaled(ConvexBody::lq_ball(3, 2), 2.5),
          ConvexBody::mollified_polytope(kTriangle, 0.1)};
}

std::vector<double> random_vector(std::mt19937_64& rng, int dim) {
  std::normal_distribution<double> g;
  std::vector<double> v(dim);
  for (double& x : v) x = g(rng);
  return v;
}

}  // namespace

TEST(Support, SpecExamples) {
  EXPECT_DOUBLE_EQ(ConvexBody::segment(0.5, 0.5).support({2.0}), 1.0);
  EXPECT_DOUBLE_EQ(ConvexBody::polytope(kTriangle).support({1, 1}), 1.0);
  EXPECT_DOUBLE_EQ(ConvexBody::lq_ball(2, 2).support({3, 4}), 5.0);
}

TEST(Support, SegmentIsHalfAbsoluteValue) {
  const auto q = ConvexBody::segment(0.5, 0.5);
  for (double t : {-3.0, -0.25, 0.0, 0.7, 5.0}) EXPECT_DOUBLE_EQ(q.support({t}), std::abs(t) / 2);
}

TEST(Support, AsymmetricSegment) {
  const auto q = ConvexBody::segment(0.25, 0.75);
  EXPECT_DOUBLE_EQ(q.support({2.0}), 1.5);
  EXPECT_DOUBLE_EQ(q.support({-2.0}), 0.5);
}

TEST(Support, LqDualNorm) {
  // h of the l^q ball is the l^{q'} norm.
  const auto b = ConvexBody::lq_ball(2, 3.0);
  const double qp = 1.5;
  const double expect = std::pow(std::pow(1.0, qp) + std::pow(2.0, qp), 1 / qp);
  EXPECT_NEAR(b.support({1, -2}), expect, 1e-14);
  EXPECT_DOUBLE_EQ(ConvexBody::lq_ball(2, 1).support({1, -2}), 2.0);
  EXPECT_DOUBLE_EQ(ConvexBody::lq_ball(2, std::numeric_limits<double>::infinity()).support({1, -2}), 3.0);
}

TEST(Support, DimensionMismatchIsInvalidArgument) {
  try {
    (void)ConvexBody::lq_ball(2, 2).support({1, 2, 3});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::invalid_argument);
  }
}

TEST(Support, HomogeneousAndSublinear) {
  std::mt19937_64 rng(3);
  for (const auto& b : sample_bodies()) {
    for (int s = 0; s < 200; ++s) {
      const auto u = random_vector(rng, b.dim());
      const auto v = random_vector(rng, b.dim());
      std::vector<double> tu(u), uv(u);
      for (std::size_t k = 0; k < u.size(); ++k) tu[k] *= 3.7, uv[k] += v[k];
      EXPECT_NEAR(b.support(tu), 3.7 * b.support(u), 1e-12 * (1 + b.support(tu))) << b.describe();
      EXPECT_LE(b.support(uv), b.support(u) + b.support(v) + 1e-12) << b.describe();
    }
  }
}

TEST(SupportPoint, SpecExamples) {
  const auto p = ConvexBody::lq_ball(2, 2).support_point({0, 2});
  EXPECT_DOUBLE_EQ(p[0], 0.0);
  EXPECT_DOUBLE_EQ(p[1], 1.0);
  EXPECT_DOUBLE_EQ(ConvexBody::segment(1, 1).support_point({-3})[0], -1.0);
  const auto v = ConvexBody::polytope(kTriangle).support_point({1, 1});
  EXPECT_DOUBLE_EQ(v[0], 1.0);
  EXPECT_DOUBLE_EQ(v[1], 0.0);
}

TEST(SupportPoint, ZeroDirectionRejected) {
  EXPECT_THROW((void)ConvexBody::lq_ball(2, 2).support_point({0, 0}), Error);
}

TEST(SupportPoint, EulerIdentity) {
  std::mt19937_64 rng(5);
  for (const auto& b : sample_bodies()) {
    for (int s = 0; s < 200; ++s) {
      const auto u = random_vector(rng, b.dim());
      const auto g = b.support_point(std::span<const double>(u));
      const double h = b.support(u);
      double dot = 0.0;
      for (int k = 0; k < b.dim(); ++k) dot += g[k] * u[k];
      EXPECT_LE(std::abs(dot - h), 1e-12 * (1 + std::abs(h))) << b.describe();
    }
  }
}

TEST(Gauge, SpecExamples) {
  EXPECT_DOUBLE_EQ(ConvexBody::lq_ball(3, 2).gauge({0, 0, 2}), 2.0);
  Eigen::MatrixXd M = Eigen::Vector2d(4, 1).asDiagonal();
  EXPECT_NEAR(ConvexBody::ellipsoid(M).gauge({2, 0}), 1.0, 1e-15);
  EXPECT_DOUBLE_EQ(ConvexBody::segment(1, 2).gauge({-0.5}), 0.5);
}

TEST(Gauge, OriginOnBoundaryIsUnsupported) {
  const auto p = ConvexBody::polytope({{0, 0}, {1, 0}, {0, 1}});
  try {
    (void)p.gauge({0.1, 0.1});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::unsupported_body);
  }
}

TEST(Gauge, PolarityConsistency) {
  // gauge(x) = sup_u <x,u>/h(u), sampled over a fine circle.
  Eigen::MatrixXd M(2, 2);
  M << 3, 0.5, 0.5, 1;
  const std::vector<ConvexBody> bodies{ConvexBody::lq_ball(2, 2), ConvexBody::ellipsoid(M), ConvexBody::lq_ball(2, 4)};
  std::mt19937_64 rng(9);
  for (const auto& b : bodies) {
    for (int s = 0; s < 20; ++s) {
      const auto x = random_vector(rng, 2);
      double sup = 0.0;
      for (int k = 0; k < 20000; ++k) {
        const double a = 2 * std::numbers::pi * k / 20000;
        const double u[2] = {std::cos(a), std::sin(a)};
        sup = std::max(sup, (x[0] * u[0] + x[1] * u[1]) / b.support(u));
      }
      EXPECT_NEAR(b.gauge(x), sup, 1e-6 * (1 + sup)) << b.describe();
    }
  }
  for (double x : {-2.0, -0.3, 0.4, 3.0}) {
    const auto s = ConvexBody::segment(1, 2);
    const double sup = std::max(x / s.support({1.0}), -x / s.support({-1.0}));
    EXPECT_DOUBLE_EQ(s.gauge({x}), sup);
  }
  // Polytope: the sup is attained at the facet normals.
  const auto tri = ConvexBody::polytope(kTriangle);
  const auto& facets = std::get<body::Polytope>(tri.kind());
  for (int s = 0; s < 20; ++s) {
    const auto x = random_vector(rng, 2);
    double sup = 0.0;
    for (std::size_t k = 0; k < facets.facet_offsets.size(); ++k) {
      const double u[2] = {facets.facet_normals[2 * k], facets.facet_normals[2 * k + 1]};
      sup = std::max(sup, (x[0] * u[0] + x[1] * u[1]) / tri.support(u));
    }
    EXPECT_NEAR(tri.gauge(x), sup, 1e-12 * (1 + sup));
  }
}

TEST(EnclosingRadius, SpecExamples) {
  EXPECT_DOUBLE_EQ(ConvexBody::segment(0.5, 0.5).enclosing_radius(), 0.5);
  EXPECT_DOUBLE_EQ(ConvexBody::polytope(kTriangle).enclosing_radius(), std::sqrt(2.0));
  EXPECT_DOUBLE_EQ(ConvexBody::lq_ball(3, 2).enclosing_radius(), 1.0);
}

TEST(EnclosingRadius, BoundsSupportOnSphere) {
  std::mt19937_64 rng(11);
  for (const auto& b : sample_bodies()) {
    const double R = b.enclosing_radius();
    for (int s = 0; s < 500; ++s) {
      auto u = random_vector(rng, b.dim());
      double r = 0;
      for (double x : u) r += x * x;
      for (double& x : u) x /= std::sqrt(r);
      EXPECT_LE(b.support(u), R * (1 + 1e-12)) << b.describe();
    }
  }
}

TEST(VolumeFromGauge, UnitDisk) {
  const auto rule = build_rule(2, QuadScheme::uniform_angle, 9);
  EXPECT_NEAR(volume_from_gauge(ConvexBody::lq_ball(2, 2), rule), std::numbers::pi, 1e-10);
}

TEST(VolumeFromGauge, EllipseAreaOracle) {
  Eigen::MatrixXd M = Eigen::Vector2d(4, 0.25).asDiagonal();  // semi-axes 2, 1/2
  const auto rule = build_rule(2, QuadScheme::uniform_angle, 9);
  EXPECT_NEAR(volume_from_gauge(ConvexBody::ellipsoid(M), rule), std::numbers::pi * 2 * 0.5, 1e-8);
}

TEST(VolumeFromGauge, FourBallMonteCarlo) {
  const auto rule = build_monte_carlo(4, 1, 100000);
  const double est = volume_from_gauge(ConvexBody::lq_ball(4, 2), rule);
  // gauge is identically 1 on the sphere so the estimator is exact.
  EXPECT_NEAR(est, std::numbers::pi * std::numbers::pi / 2, 1e-10);
}

TEST(VolumeFromGauge, PolygonShoelace) {
  const std::vector<std::vector<double>> pts{{1, 0}, {0.5, 1}, {-1, 0.5}, {-0.5, -1}, {0.8, -0.6}};
  double area = 0.0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const auto& a = pts[i];
    const auto& b = pts[(i + 1) % pts.size()];
    area += a[0] * b[1] - b[0] * a[1];
  }
  area = std::abs(area) / 2;
  const auto rule = build_rule(2, QuadScheme::uniform_angle, 14);
  EXPECT_NEAR(volume_from_gauge(ConvexBody::polytope(pts), rule), area, 1e-5);
}

namespace {

// h_Q(y^t xi) with y stored column-major as m vectors in R^n.
double kernel(const ConvexBody& Q, const std::vector<double>& y, const std::vector<double>& xi) {
  const int n = static_cast<int>(xi.size());
  const int m = Q.dim();
  std::vector<double> z(m);
  for (int i = 0; i < m; ++i) {
    z[i] = 0;
    for (int k = 0; k < n; ++k) z[i] += y[i * n + k] * xi[k];
  }
  return Q.support(z);
}

double norm(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace

TEST(KernelBounds, GrowthAndLipschitz) {
  std::mt19937_64 rng(17);
  const int n = 2;
  for (const auto& Q : {ConvexBody::segment(0.5, 0.5), ConvexBody::segment(0.25, 0.75), ConvexBody::lq_ball(2, 2)}) {
    const double R = Q.enclosing_radius();
    const int m = Q.dim();
    for (const double p : {1.0, 2.0, 3.0}) {
      for (int s = 0; s < 2000; ++s) {
        const auto y = random_vector(rng, n * m);
        const auto xi = random_vector(rng, n);
        const auto eta = random_vector(rng, n);
        const double a = kernel(Q, y, xi), b = kernel(Q, y, eta);
        std::vector<double> d(n);
        for (int k = 0; k < n; ++k) d[k] = xi[k] - eta[k];
        EXPECT_LE(a, R * norm(y) * norm(xi) + 1e-10);
        EXPECT_LE(std::abs(std::pow(a, p) - std::pow(b, p)),
                  p * R * std::pow(std::max(a, b), p - 1) * norm(y) * norm(d) + 1e-10);
      }
    }
  }
}
