#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "logconvex/bodies.hpp"
#include "oracles.hpp"

using namespace logconvex;

namespace {

Vec v2(double x, double y)
{
  Vec v(2);
  v << x, y;
  return v;
}

Vec v3(double x, double y, double z)
{
  Vec v(3);
  v << x, y, z;
  return v;
}

ConvexBody cube(int n, double h) { return ConvexBody::box(-h * Vec::Ones(n), h * Vec::Ones(n)); }

std::vector<Vec> equality_simplex() { return {v2(1, 0), v2(0, 1), v2(-1, -1)}; }

}  // namespace

TEST(Gauge, Examples)
{
  EXPECT_NEAR(gauge(cube(2, 1.0), v2(3, 0)), 3.0, 1e-12);
  const auto cross = ConvexBody::from_vertices({v2(1, 0), v2(0, 1), v2(-1, 0), v2(0, -1)});
  EXPECT_NEAR(gauge(cross, v2(0.5, 0.5)), 1.0, 1e-12);
  EXPECT_NEAR(gauge(ConvexBody::from_vertices(equality_simplex()), v2(1, 1)), 2.0, 1e-12);
}

TEST(Gauge, MatchesBarycentricOracle)
{
  std::mt19937_64 rng(1);
  std::normal_distribution<double> normal;
  for (int trial = 0; trial < 10; ++trial) {
    const auto tri = oracle::random_triangle(rng);
    const auto k = ConvexBody::from_vertices(tri);
    for (int s = 0; s < 20; ++s) {
      const Vec x = v2(normal(rng), normal(rng));
      EXPECT_NEAR(gauge(k, x), oracle::simplex_gauge(tri, x), 1e-10);
    }
  }
}

TEST(Gauge, OriginOnBoundaryAndOutside)
{
  const auto corner = ConvexBody::box(Vec::Zero(2), Vec::Ones(2));
  EXPECT_TRUE(std::isinf(gauge(corner, v2(-1, 0.5))));
  EXPECT_NEAR(gauge(corner, v2(0.5, 0.25)), 0.5, 1e-12);
  const auto away = ConvexBody::box(Vec::Ones(2), 2 * Vec::Ones(2));
  EXPECT_THROW(gauge(away, v2(1, 1)), DomainError);
}

TEST(Gauge, HomogeneousAndSubadditive)
{
  std::mt19937_64 rng(2);
  std::normal_distribution<double> normal;
  const auto k = ConvexBody::from_vertices(oracle::random_polygon(7, rng));
  const auto e = ConvexBody::ellipsoid(v3(0.1, 0, -0.1), Mat::Identity(3, 3) * 2.0);
  for (int s = 0; s < 50; ++s) {
    const Vec x = v2(normal(rng), normal(rng));
    const Vec y = v2(normal(rng), normal(rng));
    const double t = std::exp(normal(rng));
    EXPECT_NEAR(gauge(k, t * x), t * gauge(k, x), 1e-12 * (1.0 + t * gauge(k, x)));
    EXPECT_LE(gauge(k, x + y), gauge(k, x) + gauge(k, y) + 1e-9);
    const Vec p = v3(normal(rng), normal(rng), normal(rng));
    const Vec q = v3(normal(rng), normal(rng), normal(rng));
    EXPECT_NEAR(gauge(e, t * p), t * gauge(e, p), 1e-12 * (1.0 + t * gauge(e, p)));
    EXPECT_LE(gauge(e, p + q), gauge(e, p) + gauge(e, q) + 1e-9);
  }
}

TEST(Radial, Examples)
{
  const auto disk = ConvexBody::ball(Vec::Zero(2), 1.0);
  EXPECT_NEAR(radial(disk, v2(0.6, 0.8)), 1.0, 1e-12);
  EXPECT_NEAR(radial(cube(2, 1.0), v2(1, 1) / std::sqrt(2.0)), std::sqrt(2.0), 1e-12);
  EXPECT_THROW(radial(ConvexBody::box(Vec::Zero(2), Vec::Ones(2)), v2(1, 0)), DomainError);
}

TEST(Radial, ReciprocalOfGaugeOnHPolytope)
{
  std::vector<Halfspace> hs;
  for (int k = 0; k < 7; ++k) {
    const double th = 2.0 * std::numbers::pi * k / 7.0 + 0.3;
    hs.push_back({v2(std::cos(th), std::sin(th)), 1.0 + 0.1 * k});
  }
  const auto k = ConvexBody::from_halfspaces(2, hs);
  const SphereGrid grid = sphere_grid(2, 360, Seed{});
  for (const Vec& u : grid.nodes) {
    EXPECT_NEAR(radial(k, u) * gauge(k, u), 1.0, 1e-10);
  }
}

TEST(Volume, Examples)
{
  EXPECT_NEAR(volume(ConvexBody::box(Vec::Zero(3), Vec::Ones(3))), 1.0, 1e-12);
  EXPECT_NEAR(volume(ConvexBody::from_vertices({v2(0, 0), v2(1, 0), v2(0, 1)})), 0.5, 1e-12);
  EXPECT_NEAR(volume(ConvexBody::ball(Vec::Zero(3), 2.0)), 32.0 * std::numbers::pi / 3.0, 1e-12);
  EXPECT_NEAR(volume(cube(4, 0.5)), 1.0, 1e-12);
}

TEST(Volume, PolygonMatchesShoelaceOracle)
{
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const auto pts = oracle::random_polygon(3 + trial % 8, rng);
    EXPECT_NEAR(volume(ConvexBody::from_vertices(pts)), oracle::polygon_area(pts), 1e-12);
  }
}

TEST(Volume, RandomPolytopeMatchesMonteCarlo)
{
  std::mt19937_64 rng(4);
  std::normal_distribution<double> normal;
  std::vector<Vec> pts;
  for (int i = 0; i < 12; ++i) {
    pts.push_back(v3(normal(rng), normal(rng), normal(rng)));
  }
  const auto k = ConvexBody::from_vertices(pts);
  Vec lo = pts.front();
  Vec hi = pts.front();
  for (const Vec& p : pts) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  // membership from the raw points: y is in the hull iff no facet plane through 3 input
  // points separates it from all of them
  auto inside = [&](const Vec& y) {
    for (std::size_t a = 0; a < pts.size(); ++a) {
      for (std::size_t b = a + 1; b < pts.size(); ++b) {
        for (std::size_t c = b + 1; c < pts.size(); ++c) {
          const Eigen::Vector3d n =
              Eigen::Vector3d(pts[b] - pts[a]).cross(Eigen::Vector3d(pts[c] - pts[a]));
          double lo_s = INFINITY;
          double hi_s = -INFINITY;
          for (const Vec& p : pts) {
            const double s = n.dot(Eigen::Vector3d(p - pts[a]));
            lo_s = std::min(lo_s, s);
            hi_s = std::max(hi_s, s);
          }
          const double sy = n.dot(Eigen::Vector3d(y - pts[a]));
          if (lo_s >= -1e-12 && sy < -1e-12) return false;
          if (hi_s <= 1e-12 && sy > 1e-12) return false;
        }
      }
    }
    return true;
  };
  const auto mc = oracle::mc_volume(inside, lo, hi, 20000, 77);
  EXPECT_NEAR(volume(k), mc.mean, 3.0 * mc.stderr_ + 1e-9);
}

TEST(Intersect, Examples)
{
  const auto unit = ConvexBody::box(Vec::Zero(2), Vec::Ones(2));
  const auto both = intersect(unit, translate(unit, v2(0.5, 0)));
  EXPECT_NEAR(volume(both), 0.5, 1e-12);
  EXPECT_NEAR(volume(intersect(unit, unit)), 1.0, 1e-12);
  EXPECT_TRUE(intersect(unit, translate(unit, v2(3, 0))).is_empty());
  EXPECT_EQ(volume(intersect(unit, translate(unit, v2(3, 0)))), 0.0);
}

TEST(Intersect, ShiftedSimplexMatchesMonteCarlo)
{
  const auto tri = equality_simplex();
  const auto k = ConvexBody::from_vertices(tri);
  const Vec shift = v2(0.3, -0.2);
  std::vector<Vec> moved;
  for (const Vec& p : tri) {
    moved.push_back(p + shift);
  }
  const auto mc = oracle::mc_volume(
      [&](const Vec& y) { return oracle::in_polygon(tri, y) && oracle::in_polygon(moved, y); },
      v2(-1.5, -1.5), v2(1.5, 1.5), 200000, 5);
  EXPECT_NEAR(volume(intersect(k, translate(k, shift))), mc.mean, 3.0 * mc.stderr_);
  EXPECT_NEAR(overlap_volume(k, shift), mc.mean, 3.0 * mc.stderr_);
}

TEST(Intersect, RejectsNonPolytopes)
{
  const auto disk = ConvexBody::ball(Vec::Zero(2), 1.0);
  EXPECT_THROW(intersect(disk, disk), UnsupportedKindError);
}

TEST(Overlap, FastPathsMatchGenericIntersection)
{
  std::mt19937_64 rng(6);
  std::normal_distribution<double> normal;
  const auto poly = ConvexBody::from_vertices(oracle::random_polygon(6, rng));
  std::vector<Vec> pts;
  for (int i = 0; i < 10; ++i) {
    pts.push_back(v3(normal(rng), normal(rng), normal(rng)));
  }
  const auto solid = ConvexBody::from_vertices(pts);
  for (int s = 0; s < 20; ++s) {
    const Vec y2 = 0.7 * v2(normal(rng), normal(rng));
    const Vec y3 = 0.7 * v3(normal(rng), normal(rng), normal(rng));
    EXPECT_NEAR(overlap_volume(poly, y2), volume(intersect(poly, translate(poly, y2))), 1e-10);
    EXPECT_NEAR(overlap_volume(solid, y3), volume(intersect(solid, translate(solid, y3))), 1e-10);
  }
}

TEST(Overlap, BoxesAndBallsHaveClosedForms)
{
  const auto b = ConvexBody::box(Vec::Zero(3), v3(1, 2, 3));
  EXPECT_NEAR(overlap_volume(b, v3(0.5, -1, 2)), 0.5 * 1.0 * 1.0, 1e-12);
  const auto disk = ConvexBody::ball(Vec::Zero(2), 1.0);
  const double d = 0.8;
  const double lens = 2.0 * std::acos(d / 2.0) - 0.5 * d * std::sqrt(4.0 - d * d);
  EXPECT_NEAR(overlap_volume(disk, v2(0, d)), lens, 1e-12);
  const auto ball4 = ConvexBody::ball(Vec::Zero(4), 1.0);
  Vec y = Vec::Zero(4);
  EXPECT_NEAR(overlap_volume(ball4, y), oracle::ball_volume(4), 1e-12);
}

TEST(Overlap, EvenAndLogConcaveAlongSegments)
{
  std::mt19937_64 rng(7);
  std::normal_distribution<double> normal;
  const auto k = ConvexBody::from_vertices(oracle::random_polygon(5, rng));
  for (int s = 0; s < 30; ++s) {
    const Vec x = 0.5 * v2(normal(rng), normal(rng));
    const Vec y = 0.5 * v2(normal(rng), normal(rng));
    EXPECT_NEAR(overlap_volume(k, x), overlap_volume(k, -x), 1e-12);
    const double mid = overlap_volume(k, 0.5 * (x + y));
    EXPECT_GE(mid * mid, overlap_volume(k, x) * overlap_volume(k, y) - 1e-12);
  }
}

TEST(AffineMaps, Examples)
{
  const auto unit = ConvexBody::box(Vec::Zero(2), Vec::Ones(2));
  const auto moved = translate(unit, v2(1, 1));
  EXPECT_TRUE(contains(moved, v2(1.5, 1.5)));
  EXPECT_TRUE(contains(moved, v2(2, 2)));
  EXPECT_FALSE(contains(moved, v2(0.9, 1.5)));
  Mat diag = Mat::Identity(2, 2);
  diag(0, 0) = 2.0;
  EXPECT_NEAR(volume(linear_image(ConvexBody::ball(Vec::Zero(2), 1.0), diag)), 2.0 * std::numbers::pi,
              1e-9);
  EXPECT_THROW(linear_image(unit, Mat::Zero(2, 2)), DomainError);
}

TEST(AffineMaps, VolumeScalesByDeterminant)
{
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 10; ++trial) {
    const Mat a = oracle::random_invertible(3, rng);
    const auto k = cube(3, 0.5);
    EXPECT_NEAR(volume(linear_image(k, a)) / std::abs(a.determinant()), 1.0, 1e-8);
    const auto hk = ConvexBody::from_halfspaces(3, k.halfspaces());
    EXPECT_NEAR(volume(linear_image(hk, a)) / std::abs(a.determinant()), 1.0, 1e-8);
  }
}

TEST(DifferenceBody, Examples)
{
  EXPECT_NEAR(volume(difference_body(cube(2, 1.0))), 16.0, 1e-12);
  const auto tri = ConvexBody::from_vertices({v2(0, 0), v2(1, 0), v2(0, 1)});
  const auto hex = difference_body(tri);
  EXPECT_EQ(hex.vertices().size(), 6u);
  EXPECT_NEAR(volume(hex), 3.0, 1e-12);
  std::mt19937_64 rng(10);
  const auto sym = linear_image(cube(3, 1.0), oracle::random_invertible(3, rng));
  EXPECT_NEAR(volume(difference_body(sym)) / volume(sym), 8.0, 1e-10);
  EXPECT_NEAR(volume(difference_body(ConvexBody::ball(Vec::Zero(2), 1.0))), 4.0 * std::numbers::pi,
              1e-12);
}

TEST(Shadow, Examples)
{
  const auto k = cube(3, 1.0);
  EXPECT_NEAR(volume(shadow(k, v3(0, 0, 1))), 4.0, 1e-12);
  EXPECT_NEAR(shadow_volume(k, v3(1, 1, 1) / std::sqrt(3.0)), 4.0 * std::sqrt(3.0), 1e-12);
  EXPECT_EQ(shadow(k, v3(1, 1, 1) / std::sqrt(3.0)).vertices().size(), 6u);
  EXPECT_NEAR(shadow_volume(ConvexBody::ball(Vec::Zero(3), 1.0), v3(0.6, 0, 0.8)), std::numbers::pi,
              1e-12);
}

TEST(Shadow, CubeOracleAndTranslationInvariance)
{
  std::mt19937_64 rng(11);
  std::normal_distribution<double> normal;
  const auto k = cube(3, 1.0);
  for (int s = 0; s < 20; ++s) {
    Vec u = v3(normal(rng), normal(rng), normal(rng));
    u.normalize();
    EXPECT_NEAR(shadow_volume(k, u), 4.0 * u.cwiseAbs().sum(), 1e-10);
    const Vec shift = v3(normal(rng), normal(rng), normal(rng));
    EXPECT_NEAR(shadow_volume(translate(k, shift), u), shadow_volume(k, u), 1e-12);
  }
}

TEST(Shadow, PolygonWidthMatchesCauchyFormula)
{
  std::mt19937_64 rng(12);
  const auto pts = oracle::random_polygon(7, rng);
  const auto k = ConvexBody::from_vertices(pts);
  const SphereGrid grid = sphere_grid(2, 64, Seed{});
  for (const Vec& u : grid.nodes) {
    EXPECT_NEAR(shadow_volume(k, u), oracle::polygon_shadow(pts, u), 1e-12);
  }
}

TEST(ConvexHull, Examples)
{
  const auto sq = ConvexBody::from_vertices({v2(0, 0), v2(1, 0), v2(1, 1), v2(0, 1), v2(0.5, 0.5)});
  EXPECT_EQ(sq.vertices().size(), 4u);
  std::vector<Vec> corners;
  for (int i = 0; i < 8; ++i) {
    corners.push_back(v3(i & 1, (i >> 1) & 1, (i >> 2) & 1));
  }
  const HullResult h = convex_hull(corners);
  EXPECT_EQ(h.vertices.size(), 8u);
  EXPECT_EQ(h.halfspaces.size(), 6u);
}

TEST(ConvexHull, RandomDiskPoints)
{
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  std::vector<Vec> pts;
  while (pts.size() < 100) {
    const Vec p = v2(uni(rng), uni(rng));
    if (p.norm() <= 1.0) {
      pts.push_back(p);
    }
  }
  const auto k = ConvexBody::from_vertices(pts);
  for (const Vec& p : pts) {
    EXPECT_TRUE(contains(k, p));
  }
  EXPECT_LE(volume(k), std::numbers::pi);
}

TEST(ConvexHull, RejectsDegenerateInput)
{
  EXPECT_THROW(ConvexBody::from_vertices({v2(0, 0), v2(1, 1), v2(2, 2)}), DegenerateBodyError);
  EXPECT_THROW(ConvexBody::from_vertices({v3(0, 0, 0), v3(1, 0, 0), v3(0, 1, 0), v3(1, 1, 0)}),
               DegenerateBodyError);
}

TEST(HRep, VertexEnumerationAgreesWithVRep)
{
  std::mt19937_64 rng(14);
  const auto k = ConvexBody::from_vertices(oracle::random_polygon(8, rng));
  const auto h = ConvexBody::from_halfspaces(2, k.halfspaces());
  EXPECT_NEAR(volume(h), volume(k), 1e-12);
  EXPECT_EQ(h.vertices().size(), k.vertices().size());
  for (const Vec& v : k.vertices()) {
    for (const Halfspace& s : k.halfspaces()) {
      EXPECT_LE(s.a.dot(v), s.b + 1e-9);
    }
  }
}

TEST(HRep, UnboundedSystemRejected)
{
  std::vector<Halfspace> hs{{v2(1, 0), 1.0}, {v2(0, 1), 1.0}, {v2(-1, 0), 1.0}};
  EXPECT_THROW(ConvexBody::from_halfspaces(2, hs), DegenerateBodyError);
}

TEST(Support, PolytopeAndBall)
{
  EXPECT_NEAR(support(cube(2, 1.0), v2(1, 1) / std::sqrt(2.0)), std::sqrt(2.0), 1e-12);
  EXPECT_NEAR(support(ConvexBody::ball(v2(1, 0), 2.0), v2(1, 0)), 3.0, 1e-12);
}

TEST(RogersShephard, PolygonsObeyBound)
{
  std::mt19937_64 rng(15);
  for (int trial = 0; trial < 10; ++trial) {
    const auto k = ConvexBody::from_vertices(oracle::random_polygon(4 + trial % 5, rng));
    EXPECT_LT(volume(difference_body(k)), 6.0 * volume(k));
  }
  for (int trial = 0; trial < 5; ++trial) {
    const auto k = ConvexBody::from_vertices(oracle::random_triangle(rng));
    EXPECT_NEAR(volume(difference_body(k)) / volume(k), 6.0, 1e-9);
  }
}
