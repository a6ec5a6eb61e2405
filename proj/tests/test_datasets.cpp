#include "flatness/datasets.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace flatness;

namespace {

bool same_points(const PointCloud& a, const PointCloud& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (a[k] != b[k]) return false;
  }
  return true;
}

}  // namespace

TEST(ThinTriangle, PointsLieOnTheTwoArms) {
  const double eps = 0.1;
  const GeneratedSet set = thin_triangle(eps, 2000);
  EXPECT_EQ(set.cloud.size(), 2000u);
  EXPECT_EQ(set.cloud.dim(), 2u);
  EXPECT_EQ(set.cloud.nearest(Point::Zero(2)), 0u);
  EXPECT_EQ(set.cloud[0], Point::Zero(2));
  const double c = std::sqrt(1 - eps * eps);
  bool saw_p = false;
  bool saw_q = false;
  for (const auto& p : set.cloud.points()) {
    EXPECT_LE(p.norm(), 1.0 + 1e-12);
    EXPECT_NEAR(std::abs(p(0)) * eps, p(1) * c, 1e-12);
    saw_p = saw_p || (p - Eigen::Vector2d(c, eps)).norm() < 1e-12;
    saw_q = saw_q || (p - Eigen::Vector2d(-c, eps)).norm() < 1e-12;
  }
  EXPECT_TRUE(saw_p);
  EXPECT_TRUE(saw_q);
}

TEST(ThinTriangle, ParameterErrorsNameTheParameter) {
  try {
    thin_triangle(0.7, 2000);
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("eps"), std::string::npos);
  }
  try {
    thin_triangle(0.1, 5);
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("m"), std::string::npos);
  }
}

TEST(GappedSegment, HasTheGap) {
  const GeneratedSet set = gapped_segment(0.05, 1000);
  for (const auto& p : set.cloud.points()) {
    EXPECT_GE(std::abs(p(0)), 0.05 - 1e-12);
    EXPECT_LE(std::abs(p(0)), 1.0 + 1e-12);
    EXPECT_EQ(p(1), 0.0);
  }
  EXPECT_THROW(gapped_segment(0.3, 1000), Error);
}

TEST(LipschitzGraph, ZeroAmplitudeIsFlatAndAmplitudeIsBounded) {
  const GeneratedSet flat = lipschitz_graph(0.0, 4, 500);
  for (const auto& p : flat.cloud.points()) EXPECT_EQ(p(1), 0.0);
  const GeneratedSet wavy = lipschitz_graph(0.01, 4, 500);
  for (const auto& p : wavy.cloud.points()) EXPECT_LE(std::abs(p(1)), 0.01 + 1e-15);
  EXPECT_THROW(lipschitz_graph(0.2, 4, 500), Error);
  EXPECT_THROW(lipschitz_graph(0.01, 4, 500, 2, 2), Error);
  const GeneratedSet surface = lipschitz_graph(0.01, 2, 900, 2, 3);
  EXPECT_EQ(surface.cloud.dim(), 3u);
}

TEST(Snowflake, HeightsFollowTheLacunarySum) {
  const double gamma = 0.5;
  const GeneratedSet set = dyadic_snowflake(gamma, 12, 4001);
  double bound = 0.0;
  for (int l = 1; l <= 12; ++l) bound += 0.01 * std::pow(2.0, -(1 + gamma) * l);
  for (const auto& p : set.cloud.points()) EXPECT_LE(std::abs(p(1)), bound + 1e-15);
  EXPECT_THROW(dyadic_snowflake(1.5, 12, 1000), Error);
}

TEST(CircleArc, PointsOnTheCircle) {
  const double kappa = 0.5;
  const GeneratedSet set = circle_arc(kappa, 1001);
  const Eigen::Vector2d center(0, 1 / kappa);
  for (const auto& p : set.cloud.points()) EXPECT_NEAR((p - center).norm(), 1 / kappa, 1e-12);
  EXPECT_THROW(circle_arc(0.0, 100), Error);
}

TEST(FlatDisk, LiesInTheCoordinatePlane) {
  const GeneratedSet set = flat_disk(2, 3, 2000);
  for (const auto& p : set.cloud.points()) {
    EXPECT_EQ(p(2), 0.0);
    EXPECT_LE(p.head(2).norm(), 2.0 + 1e-12);
  }
}

TEST(Generate, DeterministicPerSeedAndValidatesNames) {
  const std::map<std::string, double> params{{"amplitude", 0.01}, {"m", 500}};
  EXPECT_TRUE(same_points(generate("lipschitz_graph", params, 5).cloud, generate("lipschitz_graph", params, 5).cloud));
  EXPECT_FALSE(same_points(generate("lipschitz_graph", params, 5).cloud, generate("lipschitz_graph", params, 6).cloud));
  EXPECT_THROW(generate("no_such_family", params, 1), Error);
  try {
    generate("thin_triangle", {{"eps", 0.1}, {"bogus", 1}}, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("bogus"), std::string::npos);
  }
  EXPECT_EQ(generate("thin_triangle", {{"eps", 0.1}, {"m", 2000}}, 0).cloud.size(), 2000u);
}
