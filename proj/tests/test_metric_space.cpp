#include "flatness/metric_space.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace flatness;

namespace {

Eigen::MatrixXd two_point(double d) {
  Eigen::MatrixXd m(2, 2);
  m << 0, d, d, 0;
  return m;
}

}  // namespace

TEST(FiniteMetricSpace, ValidatesAxioms) {
  Eigen::MatrixXd asym(2, 2);
  asym << 0, 1, 2, 0;
  EXPECT_THROW(FiniteMetricSpace{asym}, Error);
  Eigen::MatrixXd diag(2, 2);
  diag << 1, 1, 1, 0;
  EXPECT_THROW(FiniteMetricSpace{diag}, Error);
  Eigen::MatrixXd tri(3, 3);
  tri << 0, 1, 5, 1, 0, 1, 5, 1, 0;
  EXPECT_THROW(FiniteMetricSpace{tri}, Error);
  Eigen::MatrixXd neg(2, 2);
  neg << 0, -1, -1, 0;
  EXPECT_THROW(FiniteMetricSpace{neg}, Error);
  EXPECT_NO_THROW(FiniteMetricSpace{two_point(3.0)});
}

TEST(FiniteMetricSpace, EuclideanSubspaceAndDiameter) {
  std::vector<Point> pts(3, Point::Zero(2));
  pts[1] << 3, 0;
  pts[2] << 0, 4;
  const FiniteMetricSpace s = FiniteMetricSpace::euclidean(pts);
  EXPECT_DOUBLE_EQ(s(1, 2), 5.0);
  EXPECT_DOUBLE_EQ(s.diameter(), 5.0);
  const FiniteMetricSpace sub = s.subspace({0, 2});
  EXPECT_EQ(sub.size(), 2u);
  EXPECT_DOUBLE_EQ(sub(0, 1), 4.0);
}

TEST(RestrictMetric, KeepsBallPointsWithLabels) {
  std::vector<Point> pts;
  for (int k = 0; k < 10; ++k) {
    Point p(1);
    p << k;
    pts.push_back(p);
  }
  const PointCloud c(pts);
  Point x(1);
  x << 4;
  const FiniteMetricSpace s = restrict_metric(c, x, 2.0);
  EXPECT_EQ(s.labels(), (std::vector<std::size_t>{2, 3, 4, 5, 6}));
  EXPECT_DOUBLE_EQ(s.diameter(), 4.0);
}

TEST(MapMeasures, HandComputedValues) {
  const FiniteMetricSpace x{two_point(1.0)};
  Eigen::MatrixXd dy(3, 3);
  dy << 0, 1.5, 1, 1.5, 0, 1, 1, 1, 0;
  const FiniteMetricSpace y{dy};
  const PointMap f{0, 1};
  EXPECT_DOUBLE_EQ(distortion(f, x, y), 0.5);
  EXPECT_DOUBLE_EQ(codensity(f, x, y), 1.0);
  EXPECT_DOUBLE_EQ(gh_upper_via_map(f, x, y), 2.0);
  EXPECT_THROW(distortion(PointMap{0, kUnmapped}, x, y), Error);
}

TEST(GromovHausdorff, TwoPointSpacesAreExact) {
  std::mt19937_64 rng(53);
  std::uniform_real_distribution<double> u(0.01, 5.0);
  for (int k = 0; k < 50; ++k) {
    const double a = u(rng);
    const double b = u(rng);
    const CorrespondenceBound g = gh_bruteforce(FiniteMetricSpace{two_point(a)}, FiniteMetricSpace{two_point(b)});
    EXPECT_EQ(g.lower, std::abs(a - b) / 2);
    EXPECT_EQ(g.upper, std::abs(a - b) / 2);
    EXPECT_EQ(g.method, BoundMethod::ExactEnumeration);
  }
}

TEST(GromovHausdorff, MatchesRelationEnumeration) {
  std::mt19937_64 rng(59);
  for (int trial = 0; trial < 60; ++trial) {
    const int nx = 1 + trial % 4;
    const int ny = 1 + (trial / 4) % 4;
    const Eigen::MatrixXd dx = oracle::random_metric(rng, nx);
    const Eigen::MatrixXd dy = oracle::random_metric(rng, ny);
    const CorrespondenceBound g = gh_bruteforce(FiniteMetricSpace{dx}, FiniteMetricSpace{dy});
    EXPECT_NEAR(g.lower, oracle::gh_by_relations(dx, dy), 1e-12);
    EXPECT_NEAR(g.upper, g.lower, 1e-12);
  }
}

TEST(GromovHausdorff, MapUpperAndDiameterLowerBracketTheExactValue) {
  std::mt19937_64 rng(61);
  std::uniform_int_distribution<int> size(2, 6);
  for (int trial = 0; trial < 100; ++trial) {
    const int nx = size(rng);
    const int ny = size(rng);
    const FiniteMetricSpace x{oracle::random_metric(rng, nx)};
    const FiniteMetricSpace y{oracle::random_metric(rng, ny)};
    const CorrespondenceBound exact = gh_bruteforce(x, y);
    PointMap f(static_cast<std::size_t>(nx));
    std::uniform_int_distribution<std::size_t> pick(0, static_cast<std::size_t>(ny) - 1);
    for (auto& v : f) v = pick(rng);
    EXPECT_GE(gh_upper_via_map(f, x, y), exact.lower - 1e-12);
    EXPECT_LE(gh_diameter_lower_bound(x, y), exact.upper + 1e-12);
  }
}

TEST(GromovHausdorff, RejectsOversizedInputs) {
  std::mt19937_64 rng(67);
  const FiniteMetricSpace big{oracle::random_metric(rng, 8)};
  const FiniteMetricSpace small{oracle::random_metric(rng, 3)};
  EXPECT_THROW(gh_bruteforce(big, small), Error);
}

TEST(MinDistortion, MatchesEnumerationOfAllMaps) {
  std::mt19937_64 rng(71);
  for (int trial = 0; trial < 40; ++trial) {
    const int nx = 2 + trial % 4;
    const int ny = 2 + (trial / 4) % 5;
    const Eigen::MatrixXd dx = oracle::random_metric(rng, nx);
    const Eigen::MatrixXd dy = oracle::random_metric(rng, ny);
    const MinDistortionResult r = min_distortion_map(FiniteMetricSpace{dx}, FiniteMetricSpace{dy});
    EXPECT_TRUE(r.exact);
    EXPECT_NEAR(r.value, oracle::min_distortion_by_enumeration(dx, dy), 1e-12);
    EXPECT_NEAR(distortion(r.map, FiniteMetricSpace{dx}, FiniteMetricSpace{dy}), r.value, 1e-12);
  }
}

TEST(BallNet, CoveringRadiusProperty) {
  std::mt19937_64 rng(73);
  for (std::size_t n : {1u, 2u, 3u}) {
    const double r = 1.3;
    const double h = 0.1;
    const std::vector<Point> net = euclidean_ball_net_points(n, r, h);
    for (const auto& p : net) EXPECT_LE(p.norm(), r + 1e-12);
    std::normal_distribution<double> g;
    std::uniform_real_distribution<double> u(0, 1);
    for (int k = 0; k < 500; ++k) {
      Point q(static_cast<Eigen::Index>(n));
      for (std::size_t j = 0; j < n; ++j) q(static_cast<Eigen::Index>(j)) = g(rng);
      q *= r * std::pow(u(rng), 1.0 / static_cast<double>(n)) / q.norm();
      double best = 1e9;
      for (const auto& p : net) best = std::min(best, (p - q).norm());
      EXPECT_LE(best, h + 1e-12);
    }
  }
  EXPECT_THROW(euclidean_ball_net_points(3, 1.0, 1e-3, 1000), Error);
}
