#include "flatness/datasets.hpp"
#include "flatness/extrinsic.hpp"
#include "flatness/intrinsic.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace flatness;

namespace {

/// sup over pairs of | |Πy - Πz| - |y - z| | for the projection onto the x-axis.
double horizontal_projection_distortion(const PointCloud& c, double r) {
  std::vector<Point> ball;
  for (const auto& p : c.points()) {
    if (p.norm() <= r) ball.push_back(p);
  }
  double worst = 0.0;
  for (std::size_t i = 0; i < ball.size(); ++i) {
    for (std::size_t j = i + 1; j < ball.size(); ++j) {
      worst = std::max(worst, std::abs(std::abs(ball[i](0) - ball[j](0)) - (ball[i] - ball[j]).norm()));
    }
  }
  return worst;
}

}  // namespace

TEST(ProjectionIsometry, ThinTriangleDistortionMatchesBruteForce) {
  for (double eps : {0.02, 0.1}) {
    const GeneratedSet set = thin_triangle(eps, 1000);
    const ProjectionIsometry pi = projection_isometry(set.cloud, Point::Zero(2), 1.0, 1);
    const double brute = horizontal_projection_distortion(set.cloud, 1.0);
    EXPECT_NEAR(pi.measured_distortion, brute, 1e-9);
    EXPECT_NEAR(brute, 1.0 - std::sqrt(1.0 - eps * eps), 1e-12);
    EXPECT_LE(pi.measured_distortion, 4 * eps * eps);
    EXPECT_EQ(pi.image.size(), pi.domain.size());
    for (const auto& y : pi.image) EXPECT_LE(y.norm(), 1.0 + 1e-12);
  }
}

TEST(ProjectionIsometry, CertificateStructure) {
  const GeneratedSet set = thin_triangle(0.05, 1000);
  IntrinsicOptions one;
  one.theta_constant = 1.0;
  IntrinsicOptions two;
  two.theta_constant = 2.0;
  const ProjectionIsometry a = projection_isometry(set.cloud, Point::Zero(2), 1.0, 1, one);
  const ProjectionIsometry b = projection_isometry(set.cloud, Point::Zero(2), 1.0, 1, two);
  EXPECT_NEAR(b.certificate.theta, 4.0 * a.certificate.theta, 1e-12 * b.certificate.theta);
  EXPECT_GE(a.certificate.theta_prime, a.certificate.theta);
  EXPECT_GE(a.certificate.beta_inputs.size(), 3u);
  // The arms meet at O with angle close to pi, so the gate at r fails.
  EXPECT_FALSE(a.gate_met);
  IntrinsicOptions strict;
  strict.enforce_gate = true;
  EXPECT_THROW(projection_isometry(set.cloud, Point::Zero(2), 1.0, 1, strict), Error);
}

TEST(Intrinsic, ThinTriangleBrackets) {
  const double eps = 0.1;
  const GeneratedSet set = thin_triangle(eps, 2000);
  DyadicConfig cfg;
  cfg.ball_point_cap = 4000;
  const IntrinsicEstimate e = estimate_intrinsic(set.cloud, Point::Zero(2), 1.0, 1, cfg);
  const double expect = 1.0 - std::sqrt(1.0 - eps * eps);
  EXPECT_LE(e.a.lo, e.a.hi);
  EXPECT_LE(e.b.lo, e.b.hi);
  EXPECT_EQ(e.coarsening, 0.0);
  EXPECT_NEAR(e.lo_diameter, expect, 1e-9);
  EXPECT_GE(e.a.lo, expect - 1e-9);
  EXPECT_NEAR(e.map_distortion, expect, 1e-9);
  EXPECT_LE(e.b.hi, 2.0 * 0.1 + 1e-12);
  const ExtrinsicEstimate x = estimate_extrinsic(set.cloud, Point::Zero(2), 1.0, 1, {}, true);
  EXPECT_LE(e.a.lo, x.alpha->hi);
  EXPECT_LE(e.b.lo, 2.0 * x.beta.hi);
}

TEST(Intrinsic, FlatSegmentIsNearlyIsometric) {
  std::vector<Point> pts;
  for (int k = -1000; k <= 1000; ++k) {
    Point p(2);
    p << k / 500.0, 0.0;
    pts.push_back(p);
  }
  const PointCloud c(pts);
  const IntrinsicEstimate e = estimate_intrinsic(c, Point::Zero(2), 1.0, 1, {});
  EXPECT_LT(e.b.hi, 1e-12);
  EXPECT_LT(e.a.hi, 4 * std::max(c.spacing(), 1.0 / 200.0));
  EXPECT_LT(e.a.lo, 1e-12);
}

TEST(Intrinsic, GappedSegmentHasPositiveLowerBound) {
  const GeneratedSet set = gapped_segment(0.05, 2000);
  const Point x = set.cloud[set.cloud.nearest(Point::Zero(2))];
  const IntrinsicEstimate e = estimate_intrinsic(set.cloud, x, 1.0, 1, {});
  EXPECT_GT(e.a.lo, 0.0);
  EXPECT_LE(e.a.lo, e.a.hi);
  const ExtrinsicEstimate ext = estimate_extrinsic(set.cloud, x, 1.0, 1, {}, true);
  EXPECT_LE(e.a.lo, ext.alpha->hi);
}

TEST(Intrinsic, RigidMotionAndScalingWithinNetTolerance) {
  const GeneratedSet set = thin_triangle(0.1, 1000);
  const IntrinsicEstimate base = estimate_intrinsic(set.cloud, Point::Zero(2), 1.0, 1, {});
  std::mt19937_64 rng(97);
  for (double lambda : {0.5, 2.0}) {
    const Eigen::MatrixXd q = oracle::random_rotation(rng, 2);
    Point shift(2);
    shift << -0.4, 2.5;
    std::vector<Point> moved;
    for (const auto& p : set.cloud.points()) moved.push_back(lambda * (q * p) + shift);
    const PointCloud c(moved);
    const IntrinsicEstimate e = estimate_intrinsic(c, shift, lambda, 1, {});
    const double tol = 2.0 * base.net_resolution + 1e-9;
    EXPECT_NEAR(e.a.hi, base.a.hi, tol);
    EXPECT_NEAR(e.a.lo, base.a.lo, tol);
    EXPECT_NEAR(e.b.hi, base.b.hi, tol);
    EXPECT_NEAR(e.b.lo, base.b.lo, tol);
  }
}

TEST(Intrinsic, ProfileHasIntrinsicScalesOnly) {
  const GeneratedSet set = lipschitz_graph(0.01, 4, 800);
  DyadicConfig cfg;
  cfg.i_min = 3;
  cfg.i_max = 4;
  cfg.center_sample_cap = 2;
  const FlatnessProfile p = dyadic_profile_intrinsic(set.cloud, cfg);
  ASSERT_EQ(p.scales.size(), 2u);
  for (const auto& s : p.scales) {
    ASSERT_TRUE(s.a && s.b);
    EXPECT_LE(s.a->lo, s.a->hi);
    EXPECT_FALSE(s.alpha.has_value());
  }
}

TEST(Intrinsic, RejectsBadDimensions) {
  const GeneratedSet set = thin_triangle(0.1, 200);
  EXPECT_THROW(estimate_intrinsic(set.cloud, Point::Zero(3), 1.0, 1, {}), Error);
  EXPECT_THROW(estimate_intrinsic(set.cloud, Point::Zero(2), 1.0, 2, {}), Error);
}
