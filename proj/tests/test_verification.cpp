#include "flatness/datasets.hpp"
#include "flatness/verification.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace flatness;

namespace {

/// A profile with prescribed brackets: alpha_i = beta_i = q^i, a_i = b_i = q^{2i}.
FlatnessProfile synthetic_profile(double q, int i_min, int i_max) {
  FlatnessProfile p;
  p.config.i_min = i_min;
  p.config.i_max = i_max;
  p.config.eps_margin = 0.25;
  for (int i = i_min - 2; i <= i_max; ++i) {
    ScaleRecord s;
    s.i = i;
    s.r = std::ldexp(1.0, -i);
    const double e = std::pow(q, i);
    s.alpha = Bracket{e, e, true};
    s.beta = Bracket{e, e, true};
    if (i >= i_min) {
      s.a = Bracket{e * e, e * e, true};
      s.b = Bracket{e * e, e * e, true};
    }
    p.scales.push_back(s);
  }
  return p;
}

}  // namespace

TEST(Statements, NamesRoundTrip) {
  for (Statement s : {Statement::PreciseA, Statement::PreciseB, Statement::SumA, Statement::SumB,
                      Statement::ConverseAlpha, Statement::ConverseBeta}) {
    EXPECT_EQ(statement_from_string(to_string(s)), s);
  }
  EXPECT_THROW(statement_from_string("theorem_z"), Error);
}

TEST(SumStatements, MatchHandComputedSeries) {
  const double q = 0.5;
  const FlatnessProfile p = synthetic_profile(q, 3, 8);
  const VerificationRecord a = verify_sum_A(p, 1.0, 1.0);
  double lhs = 0.0;
  double rhs = 0.0;
  for (int i = 3; i <= 8; ++i) lhs += std::pow(q, 2 * i);
  for (int i = 1; i <= 8; ++i) rhs += std::pow(q, 2 * i);
  EXPECT_NEAR(a.lhs.hi, lhs, 1e-15);
  EXPECT_NEAR(a.rhs.lo, rhs, 1e-15);
  EXPECT_NEAR(a.ratio, lhs / rhs, 1e-12);
  EXPECT_TRUE(a.truncated);
  // Terms shrink by q^2 per scale, so the tail is the geometric remainder.
  EXPECT_NEAR(a.tail, std::pow(q, 16) * 0.25 / 0.75, 1e-15);
  ASSERT_EQ(a.partial_sums.size(), 6u);
  for (std::size_t k = 1; k < a.partial_sums.size(); ++k) {
    EXPECT_GE(a.partial_sums[k].second, a.partial_sums[k - 1].second);
  }
  EXPECT_TRUE(a.hypotheses_met);
  EXPECT_FALSE(verify_sum_A(p, 1.0, 0.1).hypotheses_met);
  const VerificationRecord b = verify_sum_B(p, 0.5, 1.0);
  EXPECT_EQ(b.statement, Statement::SumB);
  EXPECT_TRUE(std::isfinite(b.ratio));
}

TEST(SumStatements, RejectsBadInputs) {
  FlatnessProfile p = synthetic_profile(0.5, 3, 5);
  EXPECT_THROW(verify_sum_A(p, 0.0), Error);
  p.scales.erase(p.scales.begin());
  EXPECT_THROW(verify_sum_A(p, 1.0), Error);
}

TEST(Precise, RecordsAreFiniteOnALipschitzGraph) {
  const GeneratedSet set = lipschitz_graph(0.01, 4, 2000);
  DyadicConfig cfg;
  cfg.center_sample_cap = 2;
  const Point x = set.cloud[set.cloud.nearest(Point::Zero(2))];
  PreciseOptions opts;
  opts.max_halvings = 3;
  for (int i : {3, 4}) {
    const VerificationRecord a = verify_precise_A(set.cloud, x, i, cfg, opts);
    EXPECT_TRUE(std::isfinite(a.ratio));
    EXPECT_GE(a.rhs.hi, opts.C * a.diagnostics.at("alpha_i_hi") * a.diagnostics.at("alpha_i_hi") - 1e-15);
    const VerificationRecord b = verify_precise_B(set.cloud, x, i, cfg, opts);
    EXPECT_TRUE(std::isfinite(b.ratio));
    EXPECT_LE(b.lhs.lo, b.lhs.hi);
  }
}

TEST(Precise, RejectsCentersOutsideTheShrunkenBall) {
  const GeneratedSet set = lipschitz_graph(0.01, 4, 2000);
  const Point x = set.cloud[set.cloud.nearest(Eigen::Vector2d(0.95, 0.0))];
  try {
    verify_precise_A(set.cloud, x, 3, DyadicConfig{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::Hypothesis);
  }
}

TEST(Converse, AlphaOnThinTriangle) {
  const GeneratedSet set = thin_triangle(0.1, 2000);
  const VerificationRecord r = verify_converse_alpha(set.cloud, Point::Zero(2), 1.0, 1);
  EXPECT_TRUE(std::isfinite(r.ratio));
  EXPECT_GE(r.diagnostics.at("alpha_lo"), 0.1 - 4.0 / 2000);
  EXPECT_LE(r.diagnostics.at("a_lo"), r.diagnostics.at("alpha_hi"));
  EXPECT_NEAR(r.lhs.lo, r.diagnostics.at("alpha_lo") * r.diagnostics.at("alpha_lo"), 1e-15);
}

TEST(Converse, BetaVacuousWhenTheBallIsLowerDimensional) {
  std::vector<Point> pts;
  for (int k = -200; k <= 200; ++k) {
    Point p = Point::Zero(3);
    p(0) = k / 100.0;
    pts.push_back(p);
  }
  // Every plane through the line is optimal, so branch-and-bound cannot prune; keep the budget small.
  GrassmannSearchConfig search;
  search.max_cells = 200;
  search.alpha_net_fraction = 1.0 / 32.0;
  const VerificationRecord r = verify_converse_beta(PointCloud(pts), Point::Zero(3), 1.0, 2, {}, search);
  EXPECT_TRUE(r.vacuous);
  EXPECT_EQ(r.diagnostics.at("V_n"), 0.0);
}

TEST(Converse, BetaOnCircleArc) {
  const GeneratedSet set = circle_arc(0.5, 2001);
  const VerificationRecord r = verify_converse_beta(set.cloud, Point::Zero(2), 0.5, 1);
  EXPECT_FALSE(r.vacuous);
  EXPECT_GT(r.diagnostics.at("V_n"), 1.9);
  EXPECT_TRUE(std::isfinite(r.ratio));
}

TEST(SlopeAnalysis, ExactPowerLaw) {
  std::vector<std::pair<double, double>> pairs;
  for (double x : {0.01, 0.02, 0.05, 0.1}) pairs.emplace_back(x, 3.0 * x * x);
  const SlopeFit fit = slope_analysis(pairs);
  EXPECT_NEAR(fit.slope, 2.0, 1e-12);
  EXPECT_NEAR(std::exp(fit.intercept), 3.0, 1e-10);
  EXPECT_NEAR(fit.r_squared, 1.0, 1e-12);
  EXPECT_THROW(slope_analysis({{1, 1}, {2, 2}}), Error);
  EXPECT_THROW(slope_analysis({{1, 1}, {1, 2}, {1, 3}}), Error);
  EXPECT_THROW(slope_analysis({{1, 1}, {2, 0}, {3, 3}}), Error);
}
