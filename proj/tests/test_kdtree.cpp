#include "flatness/kdtree.hpp"

#include <gtest/gtest.h>

#include <limits>
#include <random>

using namespace flatness;

namespace {

std::vector<Eigen::VectorXd> random_points(std::mt19937_64& rng, int count, int dim) {
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<Eigen::VectorXd> pts;
  for (int k = 0; k < count; ++k) {
    Eigen::VectorXd p(dim);
    for (int j = 0; j < dim; ++j) p(j) = u(rng);
    pts.push_back(p);
  }
  return pts;
}

}  // namespace

TEST(KdTree, NearestMatchesLinearScan) {
  std::mt19937_64 rng(3);
  for (int dim : {1, 2, 3, 5}) {
    const auto pts = random_points(rng, 700, dim);
    const KdTree tree(pts);
    for (const auto& q : random_points(rng, 200, dim)) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& p : pts) best = std::min(best, (p - q).norm());
      const KdTree::Hit hit = tree.nearest(q);
      EXPECT_DOUBLE_EQ(hit.distance, best);
      EXPECT_DOUBLE_EQ((pts[hit.index] - q).norm(), best);
    }
  }
}

TEST(KdTree, NearestExcludingSkipsTheQueryPoint) {
  std::mt19937_64 rng(4);
  const auto pts = random_points(rng, 300, 2);
  const KdTree tree(pts);
  for (std::size_t k = 0; k < pts.size(); k += 7) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < pts.size(); ++j) {
      if (j != k) best = std::min(best, (pts[j] - pts[k]).norm());
    }
    EXPECT_DOUBLE_EQ(tree.nearest_excluding(pts[k], k).distance, best);
  }
}

TEST(KdTree, WithinMatchesLinearScan) {
  std::mt19937_64 rng(5);
  const auto pts = random_points(rng, 800, 3);
  const KdTree tree(pts);
  for (const auto& q : random_points(rng, 50, 3)) {
    std::vector<std::size_t> expect;
    for (std::size_t j = 0; j < pts.size(); ++j) {
      if ((pts[j] - q).norm() <= 0.4) expect.push_back(j);
    }
    EXPECT_EQ(tree.within(q, 0.4), expect);
  }
}

TEST(FarthestPointSample, CoveringRadiusIsAttained) {
  std::mt19937_64 rng(6);
  const auto pts = random_points(rng, 400, 2);
  const FarthestPointSample s = farthest_point_sample(pts, 0, 25);
  ASSERT_EQ(s.indices.size(), 25u);
  EXPECT_EQ(s.indices.front(), 0u);
  double cover = 0.0;
  for (const auto& p : pts) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t k : s.indices) best = std::min(best, (pts[k] - p).norm());
    cover = std::max(cover, best);
  }
  EXPECT_NEAR(s.covering_radius, cover, 1e-12);
}

TEST(FarthestPointSample, StopsAtMinRadius) {
  std::mt19937_64 rng(7);
  const auto pts = random_points(rng, 400, 2);
  const FarthestPointSample s = farthest_point_sample(pts, 0, 400, 0.3);
  EXPECT_LE(s.covering_radius, 0.3);
  EXPECT_LT(s.indices.size(), 400u);
}
