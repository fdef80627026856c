#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "affine/grid_function.hpp"

using namespace affine;

namespace {

MaskPtr unit_disk(double h) { return make_mask(domain::Ball{{0, 0}, 1.0}, h); }

double cone(std::span<const double> x) { return 1.0 - std::hypot(x[0], x[1]); }

}  // namespace

TEST(DomainMask, MeasureConvergesToClosedForms) {
  for (double h : {1.0 / 32, 1.0 / 128}) {
    EXPECT_NEAR(unit_disk(h)->measure(), std::numbers::pi, 8 * h);
    EXPECT_NEAR(make_mask(domain::Box{{0, 0}, {2, 1}}, h)->measure(), 2.0, 8 * h);
    Eigen::MatrixXd M = Eigen::Vector2d(4, 0.25).asDiagonal();
    EXPECT_NEAR(make_mask(domain::Ellipsoid{{0, 0}, M}, h)->measure(), std::numbers::pi, 10 * h);
  }
  EXPECT_NEAR(make_mask(domain::Ball{{0, 0, 0}, 1.0}, 1.0 / 24)->measure(), 4 * std::numbers::pi / 3, 0.1);
}

TEST(DomainMask, BoxExcludesBoundaryNodes) {
  const double h = std::numbers::pi / 128;
  const auto m = make_mask(domain::Box{{0, 0}, {std::numbers::pi, std::numbers::pi}}, h);
  EXPECT_EQ(m->inside_count(), 127u * 127u);
}

TEST(DomainMask, PolygonMatchesBox) {
  const auto a = make_mask(domain::Box{{-1, -1}, {1, 1}}, 1.0 / 16);
  const auto b = make_mask(domain::Polygon{{{-1, -1}, {1, -1}, {1, 1}, {-1, 1}}}, 1.0 / 16);
  EXPECT_EQ(a->inside_count(), b->inside_count());
}

TEST(DomainMask, EmptyMaskRejected) {
  EXPECT_THROW((void)make_mask(domain::Ball{{0.5, 0.5}, 0.1}, 1.0), Error);
}

TEST(Discretize, Examples) {
  const auto m = unit_disk(1.0 / 32);
  const auto f = discretize(m, [](std::span<const double> x) { return 1 - x[0] * x[0] - x[1] * x[1]; });
  for (std::size_t i = 0; i < m->node_count(); ++i) {
    if (m->inside(i)) EXPECT_GT(f[i], 0.0);
    else EXPECT_EQ(f[i], 0.0);
  }
  const auto z = discretize(make_mask(domain::Box{{0, 0}, {1, 1}}, 0.1), [](auto) { return 0.0; });
  EXPECT_TRUE(z.is_zero());
  EXPECT_EQ(lp_norm(z, 2), 0.0);
  try {
    (void)discretize(m, [](auto) { return std::nan(""); });
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::numeric_failure);
  }
}

TEST(Norms, ConeOnDisk) {
  double prev = 1.0;
  for (double h : {1.0 / 32, 1.0 / 64, 1.0 / 128}) {
    const auto f = discretize(unit_disk(h), cone);
    const double err = std::abs(lp_norm(f, 1) - std::numbers::pi / 3);
    EXPECT_LE(err, 4 * h);
    EXPECT_LE(err, prev);
    prev = err;
    // L^1 of |grad f| -> pi
    EXPECT_NEAR(field_lp_norm(gradient(f), 1), std::numbers::pi, 6 * h);
  }
}

TEST(Norms, CharacteristicOfUnitSquare) {
  const double h = 1.0 / 100;
  const auto f = discretize(make_mask(domain::Box{{0, 0}, {1, 1}}, h), [](auto) { return 1.0; });
  EXPECT_NEAR(lp_norm(f, 1), 1.0, 2 * h);
}

TEST(Norms, DenseSumOracle) {
  const auto m = unit_disk(1.0 / 16);
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-1, 1);
  const auto f = discretize(m, [&](auto) { return u(rng); });
  double s = 0;
  for (double v : f.values()) s += v * v;
  EXPECT_NEAR(lp_norm(f, 2), std::sqrt(s * m->cell_volume()), 1e-14);
}

TEST(Gradient, ExactOnAffineAwayFromBoundary) {
  const auto m = make_mask(domain::Box{{-1, -1}, {1, 1}}, 1.0 / 16);
  const auto f = discretize(m, [](std::span<const double> x) { return 0.3 * x[0] - 1.7 * x[1] + 2; });
  const auto g = gradient(f);
  const auto& cells = m->active_cells();
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const std::size_t i = cells[c];
    if (!m->inside(i) || !m->inside(i + m->strides()[0]) || !m->inside(i + m->strides()[1])) continue;
    EXPECT_NEAR(g.values[2 * c], 0.3, 1e-12);
    EXPECT_NEAR(g.values[2 * c + 1], -1.7, 1e-12);
  }
}

TEST(Gradient, ConstantCarriesBoundaryDrop) {
  const double h = 0.1;
  const auto m = make_mask(domain::Box{{0, 0}, {1, 1}}, h);
  const auto g = gradient(discretize(m, [](auto) { return 1.0; }));
  double interior = 0, boundary = 0;
  const auto& cells = m->active_cells();
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const double mag = std::hypot(g.values[2 * c], g.values[2 * c + 1]);
    const std::size_t i = cells[c];
    if (m->inside(i) && m->inside(i + 1) && m->inside(i + m->strides()[1])) interior += mag;
    else boundary += mag;
  }
  EXPECT_EQ(interior, 0.0);
  EXPECT_GT(boundary, 0.0);
}

TEST(Gradient, AdjointIdentity) {
  const auto m = make_mask(domain::Ball{{0.1, 0}, 0.9}, 1.0 / 20);
  std::mt19937_64 rng(8);
  std::normal_distribution<double> g;
  const auto f = discretize(m, [&](auto) { return g(rng); });
  CellField w{m, std::vector<double>(m->active_cells().size() * 2)};
  for (double& x : w.values) x = g(rng);
  const auto Df = gradient(f);
  const auto Dtw = gradient_adjoint(w);
  double lhs = 0, rhs = 0;
  for (std::size_t i = 0; i < Df.values.size(); ++i) lhs += Df.values[i] * w.values[i];
  for (std::size_t i = 0; i < f.values().size(); ++i) rhs += f[i] * Dtw[i];
  EXPECT_NEAR(lhs, rhs, 1e-10 * (std::abs(lhs) + 1));
}

TEST(Distribution, Examples) {
  const double h = 1.0 / 128;
  const auto f = discretize(unit_disk(h), cone);
  EXPECT_NEAR(distribution_function(f, 0.5), std::numbers::pi / 4, 4 * h);
  EXPECT_EQ(distribution_function(f, 1.5), 0.0);
  const auto chi = discretize(make_mask(domain::Box{{0, 0}, {1, 2}}, 0.05), [](auto) { return 1.0; });
  EXPECT_DOUBLE_EQ(distribution_function(chi, 0.5), chi.mask().measure());
  double prev = 1e300;
  for (double t = 0.01; t < 1; t += 0.01) {
    const double mu = distribution_function(f, t);
    EXPECT_LE(mu, prev);
    prev = mu;
  }
}

TEST(Rearrangement, PreservesNormsAndDistribution) {
  const double h = 1.0 / 64;
  const auto m = make_mask(domain::Ball{{0.3, -0.2}, 0.7}, h);
  const auto f = discretize(m, [](std::span<const double> x) {
    return std::max(0.0, 0.7 - std::hypot(x[0] - 0.3, x[1] + 0.2)) * (1 + 0.5 * x[0]);
  });
  const auto fs = symmetric_rearrangement(f);
  for (double p : {1.0, 2.0, 3.0}) EXPECT_NEAR(lp_norm(fs, p), lp_norm(f, p), 1e-12);
  for (double t = 0.05; t < 1; t += 0.05) EXPECT_DOUBLE_EQ(distribution_function(fs, t), distribution_function(f, t));
  // Radially nonincreasing.
  const auto& tm = fs.mask();
  std::vector<std::pair<double, double>> rv;
  for (std::size_t i : tm.inside_nodes()) {
    const auto x = tm.coords(i);
    rv.emplace_back(x[0] * x[0] + x[1] * x[1], fs[i]);
  }
  std::sort(rv.begin(), rv.end());
  for (std::size_t k = 1; k < rv.size(); ++k)
    if (rv[k].first > rv[k - 1].first + 1e-12) EXPECT_LE(rv[k].second, rv[k - 1].second + 1e-15);
}

TEST(Rearrangement, SquareBecomesDisk) {
  const double h = 1.0 / 64;
  const double s = std::sqrt(std::numbers::pi);
  const auto chi = discretize(make_mask(domain::Box{{0, 0}, {s, s}}, h), [](auto) { return 1.0; });
  const auto star = symmetric_rearrangement(chi);
  const auto disk = unit_disk(h);
  // Same node count up to the square's discretization error, support within one shell of the unit circle.
  for (std::size_t i : star.mask().inside_nodes()) {
    const auto x = star.mask().coords(i);
    EXPECT_LE(std::hypot(x[0], x[1]), 1.0 + 3 * h);
  }
  EXPECT_NEAR(star.mask().measure(), disk->measure(), 8 * h);
}

TEST(Rearrangement, RadialIsFixedPoint) {
  const double h = 1.0 / 64;
  const auto f = discretize(unit_disk(h), cone);
  const auto fs = symmetric_rearrangement(f);
  double maxdiff = 0;
  for (std::size_t i : fs.mask().inside_nodes()) {
    const auto x = fs.mask().coords(i);
    maxdiff = std::max(maxdiff, std::abs(fs[i] - interpolate(f, std::span<const double>(x.data(), 2))));
  }
  EXPECT_LE(maxdiff, 2 * h);
}

TEST(Rearrangement, NegativeInputRejected) {
  const auto f = discretize(unit_disk(0.1), [](auto) { return -1.0; });
  try {
    (void)symmetric_rearrangement(f);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::invalid_argument);
  }
}

TEST(Pullback, IdentityRotationAndShear) {
  const double h = 1.0 / 64;
  const auto m = unit_disk(h);
  const auto f = discretize(m, cone);
  const auto same = affine_pullback(f, Eigen::Matrix2d::Identity(), m);
  for (std::size_t i = 0; i < f.values().size(); ++i) EXPECT_NEAR(same[i], f[i], 1e-14);

  const double a = 0.7;
  Eigen::Matrix2d R;
  R << std::cos(a), -std::sin(a), std::sin(a), std::cos(a);
  const auto rot = affine_pullback(f, R, m);
  for (std::size_t i : m->inside_nodes()) EXPECT_NEAR(rot[i], f[i], 2 * h);

  Eigen::Matrix2d T = Eigen::Vector2d(2, 0.5).asDiagonal();
  const auto target = make_mask(pullback_descriptor(m->descriptor(), T), h);
  const auto g = affine_pullback(f, T, target);
  EXPECT_NEAR(lp_norm(g, 1), lp_norm(f, 1), 4 * h);
  EXPECT_NEAR(target->measure(), std::numbers::pi, 10 * h);
}

TEST(Pullback, SingularRejected) {
  const auto m = unit_disk(0.1);
  const auto f = discretize(m, cone);
  Eigen::Matrix2d T;
  T << 1, 2, 2, 4;
  try {
    (void)affine_pullback(f, T, m);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::invalid_argument);
  }
}

TEST(GridCsv, RoundTrip) {
  const auto f = discretize(make_mask(domain::Ball{{0.2, 0}, 0.5}, 0.1), cone);
  std::stringstream ss;
  write_grid_csv(ss, f);
  const auto g = read_grid_csv(ss);
  ASSERT_EQ(g.values().size(), f.values().size());
  EXPECT_EQ(g.mask().inside_count(), f.mask().inside_count());
  for (std::size_t i = 0; i < f.values().size(); ++i) EXPECT_DOUBLE_EQ(g[i], f[i]);
  EXPECT_DOUBLE_EQ(g.mask().coords(7)[0], f.mask().coords(7)[0]);
}

TEST(DistanceBump, PositiveInside) {
  const auto m = make_mask(domain::Polygon{{{0, 0}, {2, 0}, {2, 1}, {1, 1}, {1, 2}, {0, 2}}}, 0.1);
  const auto f = distance_bump(m);
  for (std::size_t i : m->inside_nodes()) EXPECT_GT(f[i], 0.0);
}
