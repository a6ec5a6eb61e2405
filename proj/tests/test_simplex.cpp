#include "flatness/simplex.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace flatness;

TEST(CayleyMenger, AgreesWithGramDeterminant) {
  std::mt19937_64 rng(79);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 1 + trial % 4;
    const int d = n + (trial / 4) % (7 - n);
    std::vector<Point> v;
    for (int k = 0; k <= n; ++k) {
      Point p(d);
      for (int j = 0; j < d; ++j) p(j) = g(rng);
      v.push_back(p);
    }
    const double expect = oracle::gram_volume(v);
    EXPECT_NEAR(cayley_menger_volume(v), expect, 1e-9 * expect);
    EXPECT_NEAR(gram_volume(v), expect, 1e-9 * expect);
  }
}

TEST(CayleyMenger, KnownVolumes) {
  std::vector<Point> tri(3, Point::Zero(2));
  tri[1] << 1, 0;
  tri[2] << 0, 1;
  EXPECT_NEAR(cayley_menger_volume(tri), 0.5, 1e-15);
  std::vector<Point> seg{Point::Zero(3), Point::Constant(3, 1.0)};
  EXPECT_NEAR(cayley_menger_volume(seg), std::sqrt(3.0), 1e-15);
}

TEST(CayleyMenger, DegenerateIsZeroAndInconsistentThrows) {
  std::vector<Point> col(3, Point::Zero(2));
  col[1] << 1, 0;
  col[2] << 2, 0;
  EXPECT_NEAR(cayley_menger_volume(col), 0.0, 1e-7);
  Eigen::MatrixXd sq(3, 3);
  sq << 0, 1, 16, 1, 0, 1, 16, 1, 0;  // sides 1, 1, 4 violate the triangle inequality
  EXPECT_THROW(cayley_menger_volume_squared_distances(sq), Error);
}

TEST(CayleyMenger, ScalesAsPowerOfEdgeLength) {
  std::mt19937_64 rng(83);
  std::normal_distribution<double> g;
  for (int n = 1; n <= 4; ++n) {
    std::vector<Point> v;
    for (int k = 0; k <= n; ++k) {
      Point p(5);
      for (int j = 0; j < 5; ++j) p(j) = g(rng);
      v.push_back(p);
    }
    std::vector<Point> w;
    for (const auto& p : v) w.push_back(3.0 * p);
    EXPECT_NEAR(cayley_menger_volume(w), std::pow(3.0, n) * cayley_menger_volume(v),
                1e-9 * std::pow(3.0, n) * cayley_menger_volume(v));
  }
}

TEST(MaxSimplex, ExactMatchesEnumerationOracle) {
  std::mt19937_64 rng(89);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int trial = 0; trial < 10; ++trial) {
    const int n = 1 + trial % 2;
    std::vector<Point> pts;
    while (pts.size() < 14) {
      Point p(3);
      p << u(rng), u(rng), 0.2 * u(rng);
      if (p.norm() <= 1.0) pts.push_back(p);
    }
    const PointCloud c(pts);
    const SimplexSearchResult r = max_simplex_volume(c, Point::Zero(3), 1.0, n);
    EXPECT_FALSE(r.heuristic);
    EXPECT_NEAR(r.normalized_volume, oracle::max_volume_by_enumeration(pts, n, 1.0), 1e-9);
    const SimplexSearchResult h = max_simplex_volume_heuristic(pts, n);
    EXPECT_LE(h.normalized_volume, r.normalized_volume + 1e-12);
    EXPECT_GE(h.normalized_volume, 0.5 * r.normalized_volume);
  }
}

TEST(MaxSimplex, SegmentHasLengthButNoArea) {
  std::vector<Point> line;
  for (int k = -20; k <= 20; ++k) {
    Point p(2);
    p << k / 20.0, 0;
    line.push_back(p);
  }
  const SimplexSearchResult r = max_simplex_volume(PointCloud(line), Point::Zero(2), 1.0, 2);
  EXPECT_EQ(r.normalized_volume, 0.0);
  const SimplexSearchResult r1 = max_simplex_volume(PointCloud(line), Point::Zero(2), 1.0, 1);
  EXPECT_NEAR(r1.normalized_volume, 2.0, 1e-12);
}
