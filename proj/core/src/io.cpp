#include "flatness/io.hpp"

#include <json.hpp>

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

namespace flatness {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

[[noreturn]] void parse_error(const std::string& source, std::size_t line, const std::string& what) {
  throw Error(ErrorKind::Parse, source + ":" + std::to_string(line) + ": " + what);
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool parse_number(const std::string& text, double& out) {
  const std::string t = trim(text);
  if (t.empty()) return false;
  const auto res = std::from_chars(t.data(), t.data() + t.size(), out);
  return res.ec == std::errc() && res.ptr == t.data() + t.size();
}

ordered_json num(double v) {
  if (std::isfinite(v)) return v;
  return format_double(v);
}

double get_num(const json& j) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const std::string s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
    if (s == "nan") return std::numeric_limits<double>::quiet_NaN();
  }
  throw Error(ErrorKind::Parse, "expected a number, got " + j.dump());
}

ordered_json bracket_json(const std::optional<Bracket>& b) {
  if (!b) return nullptr;
  return ordered_json{{"lo", num(b->lo)}, {"hi", num(b->hi)}, {"certified", b->certified}};
}

std::optional<Bracket> bracket_from(const json& j) {
  if (j.is_null()) return std::nullopt;
  return Bracket{get_num(j.at("lo")), get_num(j.at("hi")), j.at("certified").get<bool>()};
}

ordered_json config_json(const DyadicConfig& c) {
  return ordered_json{{"eps_margin", num(c.eps_margin)},
                      {"i_min", c.i_min},
                      {"i_max", c.i_max},
                      {"n", c.n},
                      {"center_sample_cap", c.center_sample_cap},
                      {"net_resolution", num(c.net_resolution)},
                      {"ball_point_cap", c.ball_point_cap},
                      {"theta_constant", num(c.theta_constant)},
                      {"hypothesis_threshold", num(c.hypothesis_threshold)},
                      {"scale_floor_factor", num(c.scale_floor_factor)},
                      {"seed", c.seed}};
}

DyadicConfig config_from(const json& j) {
  DyadicConfig c;
  c.eps_margin = get_num(j.at("eps_margin"));
  c.i_min = j.at("i_min").get<int>();
  c.i_max = j.at("i_max").get<int>();
  c.n = j.at("n").get<std::size_t>();
  c.center_sample_cap = j.at("center_sample_cap").get<std::size_t>();
  c.net_resolution = get_num(j.at("net_resolution"));
  c.ball_point_cap = j.at("ball_point_cap").get<std::size_t>();
  c.theta_constant = get_num(j.at("theta_constant"));
  c.hypothesis_threshold = get_num(j.at("hypothesis_threshold"));
  c.scale_floor_factor = get_num(j.at("scale_floor_factor"));
  c.seed = j.at("seed").get<std::uint64_t>();
  return c;
}

ordered_json search_json(const GrassmannSearchConfig& s) {
  return ordered_json{{"restarts", s.restarts},
                      {"grid_resolution", num(s.grid_resolution)},
                      {"max_iterations", s.max_iterations},
                      {"certify_max_n", s.certify_max_n},
                      {"certify_max_d", s.certify_max_d},
                      {"convergence_slack", num(s.convergence_slack)},
                      {"max_cells", s.max_cells},
                      {"alpha_net_fraction", num(s.alpha_net_fraction)},
                      {"seed", s.seed}};
}

GrassmannSearchConfig search_from(const json& j) {
  GrassmannSearchConfig s;
  s.restarts = j.at("restarts").get<std::size_t>();
  s.grid_resolution = get_num(j.at("grid_resolution"));
  s.max_iterations = j.at("max_iterations").get<std::size_t>();
  s.certify_max_n = j.at("certify_max_n").get<std::size_t>();
  s.certify_max_d = j.at("certify_max_d").get<std::size_t>();
  s.convergence_slack = get_num(j.at("convergence_slack"));
  s.max_cells = j.at("max_cells").get<std::size_t>();
  s.alpha_net_fraction = get_num(j.at("alpha_net_fraction"));
  s.seed = j.at("seed").get<std::uint64_t>();
  return s;
}

ordered_json record_json(const VerificationRecord& r) {
  ordered_json diag = ordered_json::object();
  for (const auto& [k, v] : r.diagnostics) diag[k] = num(v);
  ordered_json partial = ordered_json::array();
  for (const auto& [i, v] : r.partial_sums) partial.push_back(ordered_json{{"i", i}, {"sum", num(v)}});
  return ordered_json{{"statement", to_string(r.statement)},
                      {"lhs", bracket_json(r.lhs)},
                      {"rhs", bracket_json(r.rhs)},
                      {"ratio", num(r.ratio)},
                      {"optimistic_ratio", num(r.optimistic_ratio)},
                      {"ratio_floor", VerificationRecord::kRatioFloor},
                      {"hypotheses_met", r.hypotheses_met},
                      {"lambda", num(r.lambda)},
                      {"i", r.i},
                      {"r", num(r.r)},
                      {"center", r.center},
                      {"truncated", r.truncated},
                      {"tail", num(r.tail)},
                      {"vacuous", r.vacuous},
                      {"partial_sums", partial},
                      {"diagnostics", diag},
                      {"notes", r.notes}};
}

VerificationRecord record_from(const json& j) {
  VerificationRecord r;
  r.statement = statement_from_string(j.at("statement").get<std::string>());
  r.lhs = *bracket_from(j.at("lhs"));
  r.rhs = *bracket_from(j.at("rhs"));
  r.ratio = get_num(j.at("ratio"));
  r.optimistic_ratio = get_num(j.at("optimistic_ratio"));
  r.hypotheses_met = j.at("hypotheses_met").get<bool>();
  r.lambda = get_num(j.at("lambda"));
  r.i = j.at("i").get<int>();
  r.r = get_num(j.at("r"));
  r.center = j.at("center").get<std::vector<double>>();
  r.truncated = j.at("truncated").get<bool>();
  r.tail = get_num(j.at("tail"));
  r.vacuous = j.at("vacuous").get<bool>();
  for (const auto& p : j.at("partial_sums")) r.partial_sums.emplace_back(p.at("i").get<int>(), get_num(p.at("sum")));
  for (const auto& [k, v] : j.at("diagnostics").items()) r.diagnostics[k] = get_num(v);
  r.notes = j.at("notes").get<std::vector<std::string>>();
  return r;
}

std::string cell(const std::optional<double>& v) { return v ? format_double(*v) : ""; }

}  // namespace

PointCloud parse_cloud_csv(std::istream& in, const std::string& source) {
  std::string line;
  std::size_t line_no = 0;
  std::size_t dim = 0;
  std::vector<Point> pts;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    if (dim == 0) {
      if (t.rfind("dim=", 0) != 0) parse_error(source, line_no, "expected header 'dim=<d>'");
      double d = 0;
      if (!parse_number(t.substr(4), d) || d < 1 || d != std::floor(d)) {
        parse_error(source, line_no, "invalid dimension in header");
      }
      dim = static_cast<std::size_t>(d);
      continue;
    }
    Point p(static_cast<Eigen::Index>(dim));
    std::stringstream fields(t);
    std::string field;
    std::size_t k = 0;
    while (std::getline(fields, field, ',')) {
      if (k >= dim) parse_error(source, line_no, "more than " + std::to_string(dim) + " coordinates");
      double v = 0;
      if (!parse_number(field, v)) parse_error(source, line_no, "invalid number '" + trim(field) + "'");
      if (!std::isfinite(v)) parse_error(source, line_no, "non-finite coordinate");
      p[static_cast<Eigen::Index>(k++)] = v;
    }
    if (k != dim) parse_error(source, line_no, "expected " + std::to_string(dim) + " coordinates, got " + std::to_string(k));
    pts.push_back(std::move(p));
  }
  if (dim == 0) parse_error(source, line_no, "missing header 'dim=<d>'");
  if (pts.empty()) throw Error(ErrorKind::EmptyInput, source + ": no points");
  return PointCloud(std::move(pts));
}

PointCloud parse_cloud_json(const std::string& text, const std::string& source) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    // Translate the byte offset into a line number.
    const std::size_t upto = std::min<std::size_t>(e.byte, text.size());
    const auto line = 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + upto, '\n'));
    parse_error(source, line, e.what());
  }
  try {
    const int version = j.at("schema_version").get<int>();
    if (version != kCloudSchemaVersion) {
      throw Error(ErrorKind::Parse, source + ": unsupported schema_version " + std::to_string(version));
    }
    const auto dim = j.at("dim").get<std::size_t>();
    std::vector<Point> pts;
    for (const auto& row : j.at("points")) {
      const auto v = row.get<std::vector<double>>();
      if (v.size() != dim) {
        throw Error(ErrorKind::Parse, source + ": point " + std::to_string(pts.size()) + " has " +
                                          std::to_string(v.size()) + " coordinates, expected " + std::to_string(dim));
      }
      pts.push_back(Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(dim)));
    }
    if (pts.empty()) throw Error(ErrorKind::EmptyInput, source + ": no points");
    return PointCloud(std::move(pts));
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Parse, source + ": " + e.what());
  }
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open '" + path + "' for reading");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::Io, "cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw Error(ErrorKind::Io, "failed writing '" + path + "'");
}

PointCloud read_cloud(const std::string& path) {
  const std::string text = read_text(path);
  const bool is_json = (path.size() >= 5 && path.substr(path.size() - 5) == ".json") ||
                       trim(text.substr(0, std::min<std::size_t>(text.size(), 64))).rfind('{', 0) == 0;
  if (is_json) return parse_cloud_json(text, path);
  std::istringstream in(text);
  return parse_cloud_csv(in, path);
}

std::string format_cloud_csv(const PointCloud& cloud) {
  std::string out = "dim=" + std::to_string(cloud.dim()) + "\n";
  for (const auto& p : cloud.points()) {
    for (Eigen::Index k = 0; k < p.size(); ++k) {
      if (k) out += ',';
      out += format_double(p[k]);
    }
    out += '\n';
  }
  return out;
}

std::string format_cloud_json(const PointCloud& cloud) {
  ordered_json pts = ordered_json::array();
  for (const auto& p : cloud.points()) pts.push_back(std::vector<double>(p.data(), p.data() + p.size()));
  ordered_json j{{"schema_version", kCloudSchemaVersion}, {"dim", cloud.dim()}, {"points", pts}};
  return j.dump() + "\n";
}

std::string metadata_json(const GeneratedSet& set, const std::string& tool_version) {
  ordered_json params = ordered_json::object();
  for (const auto& [k, v] : set.params) params[k] = num(v);
  ordered_json expected = ordered_json::object();
  for (const auto& [k, v] : set.expected) expected[k] = num(v);
  ordered_json j{{"schema_version", kCloudSchemaVersion},
                 {"tool_version", tool_version},
                 {"family", to_string(set.family)},
                 {"params", params},
                 {"seed", set.seed},
                 {"size", set.cloud.size()},
                 {"dim", set.cloud.dim()},
                 {"spacing", num(set.cloud.spacing())},
                 {"expected", expected}};
  return j.dump(2) + "\n";
}

std::string profile_to_json(const ProfileDocument& doc) {
  const FlatnessProfile& p = doc.profile;
  ordered_json scales = ordered_json::array();
  for (const auto& s : p.scales) {
    ordered_json rec{{"i", s.i},
                     {"r", num(s.r)},
                     {"below_floor", s.below_floor},
                     {"alpha", bracket_json(s.alpha)},
                     {"beta", bracket_json(s.beta)},
                     {"a", bracket_json(s.a)},
                     {"b", bracket_json(s.b)},
                     {"extrinsic_centers", s.extrinsic_centers},
                     {"intrinsic_centers", s.intrinsic_centers},
                     {"notes", s.notes}};
    scales.push_back(rec);
  }
  ordered_json errors = ordered_json::object();
  for (const auto& [i, msg] : doc.scale_errors) errors[std::to_string(i)] = msg;
  ordered_json timing = ordered_json::object();
  for (const auto& [k, v] : doc.timing) timing[k] = num(v);
  ordered_json j{{"schema_version", kProfileSchemaVersion},
                 {"kind", "profile"},
                 {"tool_version", doc.tool_version},
                 {"cloud", {{"path", doc.cloud_path}, {"size", p.cloud_size}, {"dim", p.dim}, {"spacing", num(p.spacing)}}},
                 {"config", config_json(p.config)},
                 {"search", search_json(doc.search)},
                 {"scales", scales},
                 {"scale_errors", errors},
                 {"timing", timing}};
  return j.dump(2) + "\n";
}

ProfileDocument profile_from_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    if (j.at("kind").get<std::string>() != "profile") throw Error(ErrorKind::Parse, "not a profile document");
    if (j.at("schema_version").get<int>() != kProfileSchemaVersion) {
      throw Error(ErrorKind::Parse, "unsupported profile schema_version");
    }
    ProfileDocument doc;
    doc.tool_version = j.at("tool_version").get<std::string>();
    doc.cloud_path = j.at("cloud").at("path").get<std::string>();
    doc.profile.cloud_size = j.at("cloud").at("size").get<std::size_t>();
    doc.profile.dim = j.at("cloud").at("dim").get<std::size_t>();
    doc.profile.spacing = get_num(j.at("cloud").at("spacing"));
    doc.profile.config = config_from(j.at("config"));
    doc.search = search_from(j.at("search"));
    for (const auto& s : j.at("scales")) {
      ScaleRecord rec;
      rec.i = s.at("i").get<int>();
      rec.r = get_num(s.at("r"));
      rec.below_floor = s.at("below_floor").get<bool>();
      rec.alpha = bracket_from(s.at("alpha"));
      rec.beta = bracket_from(s.at("beta"));
      rec.a = bracket_from(s.at("a"));
      rec.b = bracket_from(s.at("b"));
      rec.extrinsic_centers = s.at("extrinsic_centers").get<std::size_t>();
      rec.intrinsic_centers = s.at("intrinsic_centers").get<std::size_t>();
      rec.notes = s.at("notes").get<std::vector<std::string>>();
      doc.profile.scales.push_back(std::move(rec));
    }
    for (const auto& [k, v] : j.at("scale_errors").items()) doc.scale_errors[std::stoi(k)] = v.get<std::string>();
    for (const auto& [k, v] : j.at("timing").items()) doc.timing[k] = get_num(v);
    return doc;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Parse, std::string("profile: ") + e.what());
  }
}

std::string report_to_json(const ReportDocument& doc) {
  ordered_json records = ordered_json::array();
  for (const auto& r : doc.records) records.push_back(record_json(r));
  ordered_json prov = ordered_json::object();
  for (const auto& [k, v] : doc.provenance) prov[k] = v;
  ordered_json summary = ordered_json::object();
  for (const auto& [k, v] : doc.summary) summary[k] = num(v);
  ordered_json timing = ordered_json::object();
  for (const auto& [k, v] : doc.timing) timing[k] = num(v);
  ordered_json j{{"schema_version", kReportSchemaVersion},
                 {"kind", "report"},
                 {"provenance", prov},
                 {"records", records},
                 {"errors", doc.errors},
                 {"summary", summary},
                 {"timing", timing}};
  return j.dump(2) + "\n";
}

ReportDocument report_from_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    if (j.at("kind").get<std::string>() != "report") throw Error(ErrorKind::Parse, "not a report document");
    ReportDocument doc;
    for (const auto& r : j.at("records")) doc.records.push_back(record_from(r));
    for (const auto& [k, v] : j.at("provenance").items()) doc.provenance[k] = v.get<std::string>();
    doc.errors = j.at("errors").get<std::vector<std::string>>();
    for (const auto& [k, v] : j.at("summary").items()) doc.summary[k] = get_num(v);
    for (const auto& [k, v] : j.at("timing").items()) doc.timing[k] = get_num(v);
    return doc;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Parse, std::string("report: ") + e.what());
  }
}

bool is_report_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    return j.is_object() && j.value("kind", "") == "report";
  } catch (const json::exception&) {
    return false;
  }
}

std::string document_kind(const std::string& text) {
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first == std::string::npos || text[first] != '{') return "";
  try {
    const json j = json::parse(text);
    const auto it = j.find("kind");
    return it != j.end() && it->is_string() ? it->get<std::string>() : "";
  } catch (const json::exception&) {
    return "";
  }
}

const std::vector<std::string> kScaleTableColumns = {
    "i",         "r",    "below_floor", "alpha_lo", "alpha_hi", "alpha_certified", "beta_lo",        "beta_hi",
    "beta_certified", "a_lo", "a_hi", "b_lo",     "b_hi",     "a_over_alpha_sq", "b_over_beta_sq"};

const std::vector<std::string> kRecordTableColumns = {
    "statement", "i",        "r",      "lambda", "lhs_lo",         "lhs_hi",    "rhs_lo",
    "rhs_hi",    "ratio",    "optimistic_ratio", "hypotheses_met", "truncated", "tail",   "vacuous"};

namespace {

std::string header(const std::vector<std::string>& cols) {
  std::string out;
  for (std::size_t k = 0; k < cols.size(); ++k) out += (k ? "," : "") + cols[k];
  return out + "\n";
}

std::string row(const std::vector<std::string>& cells) {
  std::string out;
  for (std::size_t k = 0; k < cells.size(); ++k) out += (k ? "," : "") + cells[k];
  return out + "\n";
}

}  // namespace

std::string scale_table_csv(const FlatnessProfile& profile) {
  std::string out = header(kScaleTableColumns);
  auto lo = [](const std::optional<Bracket>& b) { return b ? std::optional<double>(b->lo) : std::nullopt; };
  auto hi = [](const std::optional<Bracket>& b) { return b ? std::optional<double>(b->hi) : std::nullopt; };
  auto cert = [](const std::optional<Bracket>& b) { return b ? std::string(b->certified ? "1" : "0") : std::string(); };
  auto over_sq = [](const std::optional<Bracket>& num_b, const std::optional<Bracket>& den) -> std::optional<double> {
    if (!num_b || !den) return std::nullopt;
    return num_b->hi / std::max(den->lo * den->lo, VerificationRecord::kRatioFloor);
  };
  for (const auto& s : profile.scales) {
    out += row({std::to_string(s.i), format_double(s.r), s.below_floor ? "1" : "0", cell(lo(s.alpha)), cell(hi(s.alpha)),
                cert(s.alpha), cell(lo(s.beta)), cell(hi(s.beta)), cert(s.beta), cell(lo(s.a)), cell(hi(s.a)),
                cell(lo(s.b)), cell(hi(s.b)), cell(over_sq(s.a, s.alpha)), cell(over_sq(s.b, s.beta))});
  }
  return out;
}

std::string record_table_csv(const std::vector<VerificationRecord>& records) {
  std::string out = header(kRecordTableColumns);
  for (const auto& r : records) {
    out += row({to_string(r.statement), std::to_string(r.i), std::isnan(r.r) ? "" : format_double(r.r),
                std::isnan(r.lambda) ? "" : format_double(r.lambda), format_double(r.lhs.lo), format_double(r.lhs.hi),
                format_double(r.rhs.lo), format_double(r.rhs.hi), format_double(r.ratio),
                format_double(r.optimistic_ratio), r.hypotheses_met ? "1" : "0", r.truncated ? "1" : "0",
                format_double(r.tail), r.vacuous ? "1" : "0"});
  }
  return out;
}

}  // namespace flatness
