#pragma once

#include "flatness/datasets.hpp"
#include "flatness/geometry.hpp"
#include "flatness/grassmann_search.hpp"
#include "flatness/profile.hpp"
#include "flatness/verification.hpp"

#include <istream>
#include <map>
#include <string>
#include <vector>

namespace flatness {

inline constexpr int kCloudSchemaVersion = 1;
inline constexpr int kProfileSchemaVersion = 1;
inline constexpr int kReportSchemaVersion = 1;

enum class CloudFormat { Csv, Json };

/// Shortest decimal form that reads back to the same double; "inf", "-inf"
/// and "nan" for non-finite values.
std::string format_double(double v);

/// CSV: first line `dim=<d>`, then one point per line with d comma-separated
/// coordinates. Blank lines and lines starting with '#' are skipped. Errors
/// name the source and line.
PointCloud parse_cloud_csv(std::istream& in, const std::string& source = "<input>");
/// JSON: {"schema_version": 1, "dim": d, "points": [[...], ...]}.
PointCloud parse_cloud_json(const std::string& text, const std::string& source = "<input>");
/// Chooses the parser from the extension (.json) or the first character.
PointCloud read_cloud(const std::string& path);

std::string format_cloud_csv(const PointCloud& cloud);
std::string format_cloud_json(const PointCloud& cloud);
void write_text(const std::string& path, const std::string& text);
std::string read_text(const std::string& path);

/// Sidecar metadata for a generated cloud.
std::string metadata_json(const GeneratedSet& set, const std::string& tool_version);

/// A profile with the provenance needed to reproduce it.
struct ProfileDocument {
  FlatnessProfile profile;
  GrassmannSearchConfig search;
  std::string cloud_path;
  std::string tool_version;
  /// Scales that failed, with the error message; the run continues past them.
  std::map<int, std::string> scale_errors;
  /// Wall-clock seconds per phase, kept under a separate "timing" key.
  std::map<std::string, double> timing;
};

std::string profile_to_json(const ProfileDocument& doc);
ProfileDocument profile_from_json(const std::string& text);

struct ReportDocument {
  std::vector<VerificationRecord> records;
  std::map<std::string, std::string> provenance;
  std::vector<std::string> errors;
  /// Aggregate results such as regression slopes.
  std::map<std::string, double> summary;
  std::map<std::string, double> timing;
};

std::string report_to_json(const ReportDocument& doc);
ReportDocument report_from_json(const std::string& text);

/// Per-scale table; the columns are listed in kScaleTableColumns.
std::string scale_table_csv(const FlatnessProfile& profile);
extern const std::vector<std::string> kScaleTableColumns;

/// One row per record; the columns are listed in kRecordTableColumns.
std::string record_table_csv(const std::vector<VerificationRecord>& records);
extern const std::vector<std::string> kRecordTableColumns;

/// True when the JSON text is a verification report rather than a profile.
bool is_report_json(const std::string& text);
/// The "kind" field of a JSON document ("profile", "report"), or an empty
/// string for anything else, including point clouds and non-JSON text.
std::string document_kind(const std::string& text);

}  // namespace flatness
