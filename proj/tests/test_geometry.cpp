#include "flatness/geometry.hpp"
#include "flatness/parallel.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <atomic>
#include <random>

using namespace flatness;

namespace {

Point vec(std::initializer_list<double> v) {
  Point p(static_cast<Eigen::Index>(v.size()));
  Eigen::Index k = 0;
  for (double x : v) p(k++) = x;
  return p;
}

AffinePlane random_plane(std::mt19937_64& rng, int d, int n, double base_scale = 1.0) {
  std::normal_distribution<double> g;
  Point b(d);
  for (int k = 0; k < d; ++k) b(k) = base_scale * g(rng);
  return AffinePlane(b, oracle::random_frame(rng, d, n));
}

}  // namespace

TEST(PointCloud, RejectsMixedDimensionsAndNonFinite) {
  EXPECT_THROW(PointCloud({vec({0, 0}), vec({1, 0, 0})}), Error);
  EXPECT_THROW(PointCloud({vec({0, std::nan("")})}), Error);
  EXPECT_THROW(PointCloud(std::vector<Point>{}), Error);
}

TEST(PointCloud, SpacingIsLargestNearestNeighbourGap) {
  PointCloud c({vec({0, 0}), vec({0.1, 0}), vec({0.5, 0}), vec({0.6, 0})});
  EXPECT_NEAR(c.spacing(), 0.1, 1e-15);
  PointCloud gap({vec({0, 0}), vec({1, 0})});
  EXPECT_NEAR(gap.spacing(), 1.0, 1e-15);
}

TEST(PointCloud, BallIndicesMatchBruteForce) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<Point> pts;
  for (int k = 0; k < 500; ++k) pts.push_back(vec({u(rng), u(rng), u(rng)}));
  PointCloud c(pts);
  const Point x = vec({0.1, -0.2, 0.3});
  std::vector<std::size_t> expect;
  for (std::size_t k = 0; k < pts.size(); ++k) {
    if ((pts[k] - x).norm() <= 0.5) expect.push_back(k);
  }
  EXPECT_EQ(c.ball_indices(x, 0.5), expect);
}

TEST(GramSchmidt, OrthonormalAndSpanPreserving) {
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  Eigen::MatrixXd a(5, 3);
  for (int i = 0; i < 5; ++i)
    for (int j = 0; j < 3; ++j) a(i, j) = g(rng);
  const Eigen::MatrixXd q = gram_schmidt(a);
  EXPECT_LT((q.transpose() * q - Eigen::MatrixXd::Identity(3, 3)).norm(), 1e-13);
  EXPECT_LT((a - q * (q.transpose() * a)).norm(), 1e-12);
}

TEST(GramSchmidt, ThrowsOnDependentColumns) {
  Eigen::MatrixXd a(3, 2);
  a << 1, 2, 0, 0, 0, 0;
  EXPECT_THROW(gram_schmidt(a), Error);
  EXPECT_THROW(AffinePlane(vec({0, 0, 0}), a), Error);
}

TEST(PlaneDistance, MatchesSampledHausdorffOfUnitDiscs) {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 40; ++trial) {
    const int d = 2 + trial % 3;
    const int n = 1 + trial % (d - 1);
    const AffinePlane g1 = random_plane(rng, d, n);
    const AffinePlane g2 = random_plane(rng, d, n);
    const double value = plane_distance(g1, g2);
    const double sampled = oracle::sampled_disc_hausdorff(g1.frame(), g2.frame(), 4000, rng);
    EXPECT_GE(value, sampled - 1e-12);
    EXPECT_LE(value, sampled + 0.05);
  }
}

TEST(PlaneDistance, BasicValues) {
  Eigen::MatrixXd e1(2, 1), e2(2, 1), diag(2, 1);
  e1 << 1, 0;
  e2 << 0, 1;
  diag << 1, 1;
  const AffinePlane x_axis(vec({0, 0}), e1);
  EXPECT_DOUBLE_EQ(plane_distance(x_axis, x_axis), 0.0);
  EXPECT_NEAR(plane_distance(x_axis, AffinePlane(vec({0, 0}), e2)), 1.0, 1e-15);
  EXPECT_NEAR(plane_distance(x_axis, AffinePlane(vec({3, 1}), diag)), std::sqrt(0.5), 1e-15);
}

TEST(PlaneDistance, SmallAnglesKeepRelativeAccuracy) {
  Eigen::MatrixXd a(2, 1), b(2, 1);
  const double t = 1e-10;
  a << 1, 0;
  b << std::cos(t), std::sin(t);
  EXPECT_NEAR(plane_distance(AffinePlane(vec({0, 0}), a), AffinePlane(vec({0, 0}), b)) / t, 1.0, 1e-6);
}

TEST(PlaneDistance, SymmetricAndBoundedProperty) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const int d = 2 + trial % 4;
    const int n = 1 + trial % (d - 1);
    const AffinePlane g1 = random_plane(rng, d, n);
    const AffinePlane g2 = random_plane(rng, d, n);
    const double v = plane_distance(g1, g2);
    EXPECT_NEAR(v, plane_distance(g2, g1), 1e-12);
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
    const Eigen::VectorXd cosines = principal_cosines(g1.frame(), g2.frame());
    EXPECT_NEAR(v, std::sqrt(std::max(0.0, 1.0 - cosines.minCoeff() * cosines.minCoeff())), 1e-7);
  }
}

TEST(Pitagora, ResidualNonNegativeOnRandomInstances) {
  std::mt19937_64 rng(13);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 3000; ++trial) {
    const int d = 2 + trial % 3;
    const int n = 1 + trial % (d - 1);
    const AffinePlane g1 = random_plane(rng, d, n);
    const AffinePlane g2 = random_plane(rng, d, n);
    Eigen::VectorXd c(n);
    for (int k = 0; k < n; ++k) c(k) = g(rng);
    const Point x = g1.at(c);
    Point y(d);
    for (int k = 0; k < d; ++k) y(k) = x(k) + g(rng);
    EXPECT_GE(pitagora_residual(g1, g2, x, y), -1e-12);
  }
}

TEST(Pitagora, RejectsPointOffPlaneAndCoincidentPoints) {
  Eigen::MatrixXd e1(2, 1);
  e1 << 1, 0;
  const AffinePlane g(vec({0, 0}), e1);
  EXPECT_THROW(pitagora_residual(g, g, vec({0, 1}), vec({1, 1})), Error);
  EXPECT_THROW(pitagora_residual(g, g, vec({1, 0}), vec({1, 0})), Error);
}

TEST(LiftToPlane, ProjectsBackToTheInput) {
  std::mt19937_64 rng(17);
  std::normal_distribution<double> g;
  for (int trial = 0; trial < 100; ++trial) {
    const AffinePlane s = random_plane(rng, 4, 2);
    const AffinePlane t = random_plane(rng, 4, 2);
    if (plane_distance(s, t) > 0.95) continue;
    Eigen::VectorXd c(2);
    c << g(rng), g(rng);
    const Point p = s.at(c);
    const Point q = lift_to_plane(s, t, p);
    EXPECT_LT(point_plane_distance(q, t), 1e-9 * std::max(1.0, q.norm()));
    EXPECT_LT((project(s, q) - p).norm(), 1e-8 * std::max(1.0, q.norm()));
  }
}

TEST(Hausdorff, MatchesDefinitionOnSmallSets) {
  std::vector<Point> a{vec({0, 0}), vec({1, 0})};
  std::vector<Point> b{vec({0, 0.5}), vec({3, 0})};
  EXPECT_NEAR(hausdorff_distance(a, b), 2.0, 1e-15);
  EXPECT_NEAR(hausdorff_distance(b, a), 2.0, 1e-15);
}

TEST(PlaneBallHausdorff, AgreesWithPlaneDistanceThroughOrigin) {
  std::mt19937_64 rng(19);
  for (int trial = 0; trial < 20; ++trial) {
    const Eigen::MatrixXd f1 = oracle::random_frame(rng, 3, 1);
    const Eigen::MatrixXd f2 = oracle::random_frame(rng, 3, 1);
    const AffinePlane g1(vec({0, 0, 0}), f1);
    const AffinePlane g2(vec({0, 0, 0}), f2);
    EXPECT_NEAR(plane_ball_hausdorff(g1, g2, 2.0), 2.0 * plane_distance(g1, g2), 1e-9);
  }
}

TEST(FitPlane, RecoversExactPlane) {
  std::mt19937_64 rng(23);
  const AffinePlane truth = random_plane(rng, 3, 2);
  std::normal_distribution<double> g;
  std::vector<Point> pts;
  for (int k = 0; k < 30; ++k) {
    Eigen::VectorXd c(2);
    c << g(rng), g(rng);
    pts.push_back(truth.at(c));
  }
  const AffinePlane fit = fit_plane(pts, 2);
  EXPECT_LT(plane_distance(fit, truth), 1e-10);
  EXPECT_LT(point_plane_distance(fit.base(), truth), 1e-10);
}

TEST(FrameClose, ReconstructsPlaneWithinBound) {
  Eigen::MatrixXd e(3, 2);
  e << 1, 0, 0, 1, 0, 0;
  const AffinePlane g1(vec({0, 0, 0}), e);
  const double eps = 0.005;
  std::vector<Point> w{vec({0, 0, eps}), vec({1, 0.02, -eps}), vec({0.01, 1, eps})};
  const FrameCloseReport rep = verify_frame_close(g1, w, eps);
  EXPECT_GT(rep.dH, 0.0);
  EXPECT_TRUE(std::isfinite(rep.ratio));
  for (const auto& p : w) EXPECT_LT(point_plane_distance(p, rep.reconstructed), 1e-12);
}

TEST(FrameClose, RejectsBadWitnesses) {
  Eigen::MatrixXd e(3, 2);
  e << 1, 0, 0, 1, 0, 0;
  const AffinePlane g1(vec({0, 0, 0}), e);
  std::vector<Point> far{vec({0, 0, 0}), vec({1.5, 0, 0}), vec({0, 1, 0})};
  EXPECT_THROW(verify_frame_close(g1, far, 0.005), Error);
  std::vector<Point> two{vec({0, 0, 0}), vec({1, 0, 0})};
  EXPECT_THROW(verify_frame_close(g1, two, 0.005), Error);
  std::vector<Point> ok{vec({0, 0, 0}), vec({1, 0, 0}), vec({0, 1, 0})};
  EXPECT_THROW(verify_frame_close(g1, ok, 0.5), Error);
}

TEST(FitIsometry, RecoversRigidEmbedding) {
  std::mt19937_64 rng(29);
  const Eigen::MatrixXd rot = oracle::random_frame(rng, 3, 2);
  const Point offset = vec({0.3, -0.1, 0.2});
  std::normal_distribution<double> g;
  std::vector<IsometrySample> samples;
  for (int k = 0; k < 20; ++k) {
    Eigen::VectorXd u(2);
    u << g(rng), g(rng);
    samples.push_back({u, offset + rot * u});
  }
  const IsometryFit fit = fit_isometry(samples, 1.0);
  EXPECT_LT(fit.deviation, 1e-10);
}

TEST(Parallel, VisitsEveryIndexOnceAndRethrows) {
  std::vector<std::atomic<int>> hits(1000);
  parallel_for(hits.size(), [&](std::size_t k) { hits[k]++; });
  for (auto& h : hits) EXPECT_EQ(h.load(), 1);
  EXPECT_THROW(parallel_for(10, [](std::size_t k) {
                 if (k == 3) throw Error(ErrorKind::InvalidArgument, "boom");
               }),
               Error);
}
