#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "affine/inequalities.hpp"

using namespace affine;
using std::numbers::pi;

namespace {

const ConvexBody kHalfSegment = ConvexBody::segment(0.5, 0.5);

EnergyContext ctx2(double p = 2.0) { return EnergyContext::with_defaults(2, kHalfSegment, p); }

MaskPtr disk(double h) { return make_mask(domain::Ball{{0, 0}, 1.0}, h); }

double bump(double r2) { return r2 < 1 ? (1 - r2) * (1 - r2) : 0.0; }

}  // namespace

TEST(Record, Semantics) {
  EXPECT_TRUE(make_record("", "", 1.0, 1.0, Relation::le, 0.0).pass);
  EXPECT_FALSE(make_record("", "", 1.01, 1.0, Relation::le, 0.0).pass);
  EXPECT_TRUE(make_record("", "", 1.01, 1.0, Relation::le, 0.02).pass);
  EXPECT_TRUE(make_record("", "", 0.99, 1.0, Relation::ge, 0.02).pass);
  EXPECT_FALSE(make_record("", "", 0.97, 1.0, Relation::ge, 0.02).pass);
  EXPECT_FALSE(make_record("", "", 1.05, 1.0, Relation::eq, 0.03).pass);
  EXPECT_NEAR(make_record("", "", 0.5, 1.0, Relation::le, 0.0).margin, 0.5, 1e-15);
  EXPECT_FALSE(make_record("", "", std::nan(""), 1.0, Relation::le, 1.0).pass);
}

TEST(Report, AggregateAndDigest) {
  InequalityReport a;
  a.check = "x";
  a.add(make_record("s", "d", 1, 2, Relation::le, 0));
  EXPECT_TRUE(a.pass);
  auto b = a;
  EXPECT_EQ(a.digest(), b.digest());
  b.add(make_record("s", "d", 3, 2, Relation::le, 0));
  EXPECT_FALSE(b.pass);
  EXPECT_NE(a.digest(), b.digest());
}

TEST(FaberKrahn, SquareAboveDisk) {
  const double s = std::sqrt(pi);
  const auto sq = make_mask(domain::Box{{-s / 2, -s / 2}, {s / 2, s / 2}}, 1.0 / 32);
  const auto out = check_faber_krahn(ctx2(), sq);
  EXPECT_TRUE(out.report.pass);
  EXPECT_GT(out.omega.lambda, out.disk.lambda);
  EXPECT_EQ(out.report.samples.size(), 1u);
}

TEST(FaberKrahn, DiskFixedPointEllipseEquality) {
  const auto self = check_faber_krahn(ctx2(), disk(1.0 / 32));
  EXPECT_TRUE(self.report.pass);
  EXPECT_NEAR(self.omega.lambda / self.disk.lambda, 1.0, 1e-2);
  Eigen::MatrixXd M = Eigen::Vector2d(4, 0.25).asDiagonal();
  const auto ell = check_faber_krahn(ctx2(), make_mask(domain::Ellipsoid{{0, 0}, M}, 1.0 / 48));
  EXPECT_TRUE(ell.report.pass);
  ASSERT_EQ(ell.report.samples.size(), 2u);
  EXPECT_EQ(ell.report.samples[1].relation, Relation::eq);
}

TEST(FaberKrahn, PolygonFamily) {
  const auto ctx = EnergyContext::with_defaults(2, kHalfSegment, 1.0);
  FamilySpec spec;
  spec.samples = 32;
  const auto r = check_faber_krahn_polygon(ctx, axis_box(0, 0, 1, 1), spec);
  EXPECT_TRUE(r.pass);
  EXPECT_GT(r.worst_margin(), 0.0);
}

TEST(Talenti, BallEigenfunction3D) {
  const auto ctx = EnergyContext::with_defaults(3, kHalfSegment, 2.0);
  const auto res = minimize_affine(ctx, make_mask(domain::Ball{{0, 0, 0}, 1.0}, 2.0 / 32));
  const auto rep = check_talenti(res);
  EXPECT_TRUE(rep.pass) << rep.worst_margin();
  EXPECT_FALSE(rep.inconclusive);
  EXPECT_GT(rep.samples.size(), 32u);
  // Levels above max f are unresolvable and contribute nothing.
  TalentiOptions beyond;
  beyond.lo = 1.05;
  beyond.hi = 1.5;
  const auto empty = check_talenti(res, beyond);
  EXPECT_TRUE(empty.pass);
  EXPECT_TRUE(empty.inconclusive);
}

TEST(Talenti, NodeCountingIsCoarser) {
  // The ball is the equality case; raw node counts put lattice-shell noise into mu'.
  const auto ctx = EnergyContext::with_defaults(3, kHalfSegment, 2.0);
  const auto res = minimize_affine(ctx, make_mask(domain::Ball{{0, 0, 0}, 1.0}, 2.0 / 16));
  TalentiOptions nodes;
  nodes.subsamples = 1;
  auto spread = [](const InequalityReport& r) {
    double worst = 0.0;
    for (const auto& s : r.samples) worst = std::max(worst, std::abs(std::log(s.lhs / s.rhs)));
    return worst;
  };
  EXPECT_GT(spread(check_talenti(res, nodes)), spread(check_talenti(res)));
}

TEST(Talenti, RequiresPBelowDimension) {
  EigenResult r = minimize_euclidean(disk(0.25), 2.0);
  EXPECT_THROW((void)check_talenti(r), Error);
}

TEST(PolyaSzego, ShearedBumpsAndEqualityClass) {
  const auto ctx = ctx2();
  const auto box = make_mask(domain::Box{{-2, -2}, {2, 2}}, 1.0 / 32);
  Eigen::Matrix2d S;
  S << 1, 0.8, 0, 1;
  const auto sheared = discretize(box, [&](std::span<const double> x) {
    const Eigen::Vector2d y = S * Eigen::Vector2d(x[0] - 0.2, x[1] + 0.1) * 1.2;
    return bump(y.squaredNorm()) * (1 + 0.3 * y[0] * y[0]);
  });
  EXPECT_TRUE(check_polya_szego(ctx, sheared).pass);
  const auto pulled = discretize(box, [&](std::span<const double> x) {
    const Eigen::Vector2d y = S * Eigen::Vector2d(x[0], x[1]);
    return bump(y.squaredNorm());
  });
  const auto rep = check_polya_szego(ctx, pulled, true);
  EXPECT_TRUE(rep.pass) << rep.samples.back().margin;
}

TEST(Sobolev, PolygonEqualityAndMargin) {
  const auto ctx = EnergyContext::with_defaults(2, kHalfSegment, 1.0);
  EXPECT_TRUE(check_sobolev_polygon(ctx, regular_ngon(64), true).pass);
  const auto sq = check_sobolev_polygon(ctx, axis_box(0, 0, 1, 1));
  EXPECT_TRUE(sq.pass);
  EXPECT_GT(sq.worst_margin(), 0.05);
  EXPECT_FALSE(check_sobolev_polygon(ctx, axis_box(0, 0, 1, 1), true).pass);
}

TEST(Sobolev, GridPBetweenOneAndTwo) {
  const auto ctx = ctx2(1.5);
  const auto f = discretize(disk(1.0 / 32), [](std::span<const double> x) {
    return bump(x[0] * x[0] + x[1] * x[1]) * (1.0 + 0.5 * x[0]);
  });
  const auto rep = check_sobolev(ctx, f);
  EXPECT_TRUE(rep.pass);
  EXPECT_NEAR(std::stod(rep.metadata[1].second), sobolev_constant(2, 1.5), 1e-12);
}

TEST(Relations, SquareDiskShearedDisk) {
  const auto ctx = ctx2();
  const auto sq = check_relations(ctx, make_mask(domain::Box{{0, 0}, {1, 1}}, 1.0 / 32));
  EXPECT_TRUE(sq.report.pass);
  EXPECT_GT(sq.report.samples[0].margin, 0.0);
  const auto dk = check_relations(ctx, disk(1.0 / 32));
  EXPECT_TRUE(dk.report.pass);
  EXPECT_NEAR(dk.euclidean.lambda, dk.affine.lambda, 1e-2 * dk.euclidean.lambda);
  Eigen::MatrixXd M(2, 2);
  M << 2, 1, 1, 1;  // det 1: an SL(2) image of the disk
  const auto sh = check_relations(ctx, make_mask(domain::Ellipsoid{{0, 0}, M}, 1.0 / 32));
  EXPECT_TRUE(sh.report.pass);
  EXPECT_GT(sh.report.samples[0].margin, 0.05);
}

TEST(KernelBounds, NoViolations) {
  for (const auto& Q : {kHalfSegment, ConvexBody::segment(0.25, 0.75), ConvexBody::lq_ball(2, 2),
                        ConvexBody::lq_ball(3, 4), ConvexBody::polytope({{1, 0}, {0, 2}, {-1, -1}})}) {
    for (double p : {1.0, 1.5, 2.0, 3.0}) {
      const auto rep = check_kernel_bounds(Q, 2, p, 2000, 9);
      EXPECT_TRUE(rep.pass) << Q.describe() << " p=" << p;
      ASSERT_EQ(rep.samples.size(), 3u);
      for (const auto& s : rep.samples) EXPECT_EQ(s.count, 2000);
    }
  }
}

TEST(KernelBounds, GrowthBoundIsSharpForSegments) {
  // h(t) = |t|/2 with R = 1/2: (b) is attained when y and xi align (n = 1).
  const auto rep = check_kernel_bounds(kHalfSegment, 1, 2.0, 500, 2);
  EXPECT_TRUE(rep.pass);
  EXPECT_NEAR(rep.samples[1].margin, 0.0, 1e-12);
}

TEST(CheegerReport, AffineSearch) {
  const auto ctx = EnergyContext::with_defaults(2, kHalfSegment, 1.0);
  FamilySpec spec;
  spec.family = Family::inscribed_ellipses;
  spec.samples = 36;
  spec.arc_segments = 96;
  const auto rep = cheeger_report(search_cheeger(&ctx, axis_box(0, 0, 1, 1), spec), spec);
  EXPECT_TRUE(rep.pass);
  EXPECT_EQ(rep.samples.size(), 3u);
}
