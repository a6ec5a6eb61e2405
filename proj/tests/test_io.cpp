#include "flatness/io.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

using namespace flatness;

namespace {

FlatnessProfile small_profile() {
  FlatnessProfile p;
  p.config.i_min = 3;
  p.config.i_max = 4;
  p.cloud_size = 10;
  p.dim = 2;
  p.spacing = 0.01;
  for (int i = 1; i <= 4; ++i) {
    ScaleRecord s;
    s.i = i;
    s.r = std::ldexp(1.0, -i);
    s.alpha = Bracket{0.1 / i, 0.1 / i + 1e-3, true};
    s.beta = Bracket{0.05 / i, 0.05 / i, i % 2 == 0};
    if (i >= 3) {
      s.a = Bracket{0.0, 0.02 / 3.0, false};
      s.b = Bracket{1e-17, 0.3, false};
    }
    s.below_floor = i == 4;
    s.notes.push_back("note " + std::to_string(i));
    p.scales.push_back(s);
  }
  return p;
}

VerificationRecord sample_record() {
  VerificationRecord r;
  r.statement = Statement::SumA;
  r.lhs = Bracket{0.1, 0.2, true};
  r.rhs = Bracket{0.3, 0.4, false};
  r.ratio = 2.0 / 3.0;
  r.optimistic_ratio = 0.25;
  r.lambda = 1.0;
  r.i = 3;
  r.r = 0.125;
  r.center = {0.5, -1.0 / 3.0};
  r.truncated = true;
  r.tail = std::numeric_limits<double>::infinity();
  r.partial_sums = {{3, 0.1}, {4, 0.15}};
  r.diagnostics = {{"alpha_i_hi", 0.01}, {"nan_value", std::numeric_limits<double>::quiet_NaN()}};
  r.notes = {"tail extrapolated"};
  return r;
}

std::string first_line(const std::string& s) { return s.substr(0, s.find('\n')); }

}  // namespace

TEST(FormatDouble, RoundTripsAndNamesNonFinite) {
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> u(-1e3, 1e3);
  for (int k = 0; k < 2000; ++k) {
    const double v = u(rng) * std::pow(10.0, k % 40 - 20);
    EXPECT_EQ(std::stod(format_double(v)), v);
  }
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(std::numeric_limits<double>::infinity()), "inf");
  EXPECT_EQ(format_double(-std::numeric_limits<double>::infinity()), "-inf");
  EXPECT_EQ(format_double(std::nan("")), "nan");
}

TEST(CloudCsv, ParsesCommentsAndRoundTrips) {
  std::istringstream in("dim=2\n# comment\n0.5,1\n\n-2,3.25\n");
  const PointCloud c = parse_cloud_csv(in, "pts.csv");
  ASSERT_EQ(c.size(), 2u);
  EXPECT_EQ(c[1](1), 3.25);
  std::istringstream again(format_cloud_csv(c));
  const PointCloud d = parse_cloud_csv(again);
  ASSERT_EQ(d.size(), 2u);
  for (std::size_t k = 0; k < 2; ++k) EXPECT_EQ(c[k], d[k]);
}

TEST(CloudCsv, ErrorsNameSourceAndLine) {
  const std::vector<std::pair<std::string, std::string>> cases = {
      {"dim=2\n0,0\n1,x\n", "pts.csv:3"},
      {"dim=2\n0,0\n1,2,3\n", "pts.csv:3"},
      {"0,0\n", "pts.csv:1"},
      {"dim=2\n0,0\n1,inf\n", "pts.csv:3"}};
  for (const auto& [text, where] : cases) {
    std::istringstream in(text);
    try {
      parse_cloud_csv(in, "pts.csv");
      FAIL() << text;
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::Parse);
      EXPECT_NE(std::string(e.what()).find(where), std::string::npos) << e.what();
    }
  }
}

TEST(CloudJson, RoundTripsExactly) {
  std::mt19937_64 rng(103);
  std::normal_distribution<double> g;
  std::vector<Point> pts;
  for (int k = 0; k < 50; ++k) pts.push_back(Eigen::Vector3d(g(rng), g(rng), g(rng)));
  const PointCloud c(pts);
  const PointCloud d = parse_cloud_json(format_cloud_json(c));
  ASSERT_EQ(d.size(), c.size());
  for (std::size_t k = 0; k < c.size(); ++k) EXPECT_EQ(c[k], d[k]);
  EXPECT_THROW(parse_cloud_json("{\"dim\": 2, \"points\": [[1]]}"), Error);
  EXPECT_THROW(parse_cloud_json("not json"), Error);
}

TEST(ProfileJson, RoundTripIsAFixedPoint) {
  ProfileDocument doc;
  doc.profile = small_profile();
  doc.cloud_path = "cloud.csv";
  doc.tool_version = "1.2.3";
  doc.scale_errors[4] = "scale floor";
  doc.timing["extrinsic_seconds"] = 1.5;
  const std::string text = profile_to_json(doc);
  const ProfileDocument back = profile_from_json(text);
  EXPECT_EQ(profile_to_json(back), text);
  ASSERT_EQ(back.profile.scales.size(), 4u);
  EXPECT_EQ(back.profile.scales[2].a->hi, 0.02 / 3.0);
  EXPECT_EQ(back.profile.scales[3].below_floor, true);
  EXPECT_FALSE(back.profile.scales[0].a.has_value());
  EXPECT_EQ(back.scale_errors.at(4), "scale floor");
  EXPECT_EQ(document_kind(text), "profile");
  EXPECT_FALSE(is_report_json(text));
}

TEST(ReportJson, RoundTripKeepsNonFiniteValuesAndSummary) {
  ReportDocument doc;
  doc.records = {sample_record()};
  doc.provenance = {{"seed", "1"}};
  doc.errors = {"precise_A i=3: scale floor"};
  doc.summary = {{"converse_alpha_slope", 1.93}};
  const std::string text = report_to_json(doc);
  const ReportDocument back = report_from_json(text);
  EXPECT_EQ(report_to_json(back), text);
  ASSERT_EQ(back.records.size(), 1u);
  EXPECT_TRUE(std::isinf(back.records[0].tail));
  EXPECT_TRUE(std::isnan(back.records[0].diagnostics.at("nan_value")));
  EXPECT_EQ(back.records[0].partial_sums.size(), 2u);
  EXPECT_EQ(back.summary.at("converse_alpha_slope"), 1.93);
  EXPECT_EQ(document_kind(text), "report");
  EXPECT_TRUE(is_report_json(text));
}

TEST(Tables, ExactColumns) {
  EXPECT_EQ(first_line(scale_table_csv(small_profile())),
            "i,r,below_floor,alpha_lo,alpha_hi,alpha_certified,beta_lo,beta_hi,beta_certified,a_lo,a_hi,b_lo,b_hi,"
            "a_over_alpha_sq,b_over_beta_sq");
  EXPECT_EQ(first_line(record_table_csv({sample_record()})),
            "statement,i,r,lambda,lhs_lo,lhs_hi,rhs_lo,rhs_hi,ratio,optimistic_ratio,hypotheses_met,truncated,tail,"
            "vacuous");
  const std::string table = scale_table_csv(small_profile());
  EXPECT_EQ(std::count(table.begin(), table.end(), '\n'), 5);
  std::istringstream rows(table);
  std::string line;
  while (std::getline(rows, line)) {
    EXPECT_EQ(static_cast<std::size_t>(std::count(line.begin(), line.end(), ',')), kScaleTableColumns.size() - 1);
  }
}

TEST(DocumentKind, EmptyForCloudsAndText) {
  EXPECT_EQ(document_kind(format_cloud_json(PointCloud({Eigen::Vector2d(0, 0)}))), "");
  EXPECT_EQ(document_kind("dim=2\n0,0\n"), "");
  EXPECT_EQ(document_kind(""), "");
}
