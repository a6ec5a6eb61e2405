#include "commands.hpp"

#include "flatness/datasets.hpp"
#include "flatness/extrinsic.hpp"
#include "flatness/intrinsic.hpp"
#include "flatness/io.hpp"
#include "flatness/verification.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#ifndef FLATNESS_VERSION
#define FLATNESS_VERSION "0.0.0"
#endif

namespace flatness::cli {

const char* tool_version() { return FLATNESS_VERSION; }

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct SharedOptions {
  DyadicConfig cfg;
  GrassmannSearchConfig search;
};

void add_config_options(CLI::App* cmd, SharedOptions& o) {
  cmd->add_option("--n", o.cfg.n, "Dimension of the approximating planes")->capture_default_str();
  cmd->add_option("--eps-margin", o.cfg.eps_margin, "Margin: intrinsic centers lie in B_{1-eps}(0)")
      ->capture_default_str();
  cmd->add_option("--i-min", o.cfg.i_min, "First scale index of the intrinsic numbers")->capture_default_str();
  cmd->add_option("--i-max", o.cfg.i_max, "Last scale index")->capture_default_str();
  cmd->add_option("--centers", o.cfg.center_sample_cap, "Max centers per scale")->capture_default_str();
  cmd->add_option("--ball-cap", o.cfg.ball_point_cap, "Ball size above which intrinsic numbers coarsen")
      ->capture_default_str();
  cmd->add_option("--net-resolution", o.cfg.net_resolution, "Ball net resolution; <= 0 picks max(spacing, r/200)")
      ->capture_default_str();
  cmd->add_option("--floor-factor", o.cfg.scale_floor_factor, "Smallest radius in units of sample spacing")
      ->capture_default_str();
  cmd->add_option("--threshold", o.cfg.hypothesis_threshold, "Smallness threshold for the alpha/beta gates")
      ->capture_default_str();
  cmd->add_option("--theta-constant", o.cfg.theta_constant, "Constant C of the theta certificate")
      ->capture_default_str();
  cmd->add_option("--seed", o.cfg.seed, "Seed for every randomized step")->capture_default_str();
  cmd->add_option("--restarts", o.search.restarts, "Local-search restarts for uncertified dimensions")
      ->capture_default_str();
  cmd->add_option("--alpha-net-fraction", o.search.alpha_net_fraction, "Plane-ball net resolution relative to r")
      ->capture_default_str();
}

PointCloud nonempty(const PointCloud& cloud) {
  if (cloud.size() == 0) throw Error(ErrorKind::EmptyInput, "point cloud is empty");
  return cloud;
}

Point nearest_to_origin(const PointCloud& cloud) {
  return cloud[cloud.nearest(Point::Zero(static_cast<Eigen::Index>(cloud.dim())))];
}

/// Profile over all scales; a failing scale is recorded and the run continues.
ProfileDocument analyze_cloud(const PointCloud& cloud, const SharedOptions& o, const std::string& path) {
  o.cfg.validate();
  o.search.validate();
  ProfileDocument doc;
  doc.cloud_path = path;
  doc.tool_version = tool_version();
  doc.search = o.search;

  auto fail = [&](int i, const std::string& what, const std::exception& e) {
    std::string& slot = doc.scale_errors[i];
    if (!slot.empty()) slot += "; ";
    slot += what + ": " + e.what();
  };
  auto empty_record = [&](int i) {
    ScaleRecord rec;
    rec.i = i;
    rec.r = o.cfg.scale(i);
    return rec;
  };

  FlatnessProfile ext;
  ext.config = o.cfg;
  ext.cloud_size = cloud.size();
  ext.dim = cloud.dim();
  ext.spacing = cloud.spacing();
  FlatnessProfile intr = ext;

  auto t0 = Clock::now();
  const std::vector<std::size_t> ext_centers = extrinsic_centers(cloud, o.cfg);
  for (int i = o.cfg.i_min - 2; i <= o.cfg.i_max; ++i) {
    try {
      ext.scales.push_back(extrinsic_scale_record(cloud, o.cfg, i, ext_centers, o.search));
    } catch (const Error& e) {
      fail(i, "extrinsic", e);
      ext.scales.push_back(empty_record(i));
    }
  }
  doc.timing["extrinsic_seconds"] = seconds_since(t0);

  t0 = Clock::now();
  const std::vector<std::size_t> int_centers = intrinsic_centers(cloud, o.cfg);
  for (int i = o.cfg.i_min; i <= o.cfg.i_max; ++i) {
    try {
      intr.scales.push_back(intrinsic_scale_record(cloud, o.cfg, i, int_centers, o.search));
    } catch (const Error& e) {
      fail(i, "intrinsic", e);
      intr.scales.push_back(empty_record(i));
    }
  }
  doc.timing["intrinsic_seconds"] = seconds_since(t0);
  doc.profile = merge_profiles(ext, intr);
  return doc;
}

std::map<std::string, double> parse_params(const std::vector<std::string>& raw) {
  std::map<std::string, double> out;
  for (const auto& kv : raw) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw Error(ErrorKind::InvalidArgument, "parameter '" + kv + "': expected key=value");
    }
    const std::string key = kv.substr(0, eq);
    const std::string value = kv.substr(eq + 1);
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(value, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != value.size()) {
      throw Error(ErrorKind::InvalidArgument, "parameter " + key + ": '" + value + "' is not a number");
    }
    out[key] = v;
  }
  return out;
}

bool wants_json(const std::string& format, const std::string& path) {
  if (format == "json") return true;
  if (format == "csv") return false;
  return std::filesystem::path(path).extension() == ".json";
}

std::string stem_of(const std::string& out_path) {
  std::filesystem::path p(out_path);
  return (p.parent_path() / p.stem()).string();
}

// ---------------------------------------------------------------------------

struct GenerateArgs {
  std::string family;
  std::vector<std::string> params;
  std::string out;
  std::uint64_t seed = 0;
  std::string format = "auto";
};

int cmd_generate(const GenerateArgs& a, std::ostream& out) {
  const GeneratedSet set = generate(a.family, parse_params(a.params), a.seed);
  const bool json = wants_json(a.format, a.out);
  write_text(a.out, json ? format_cloud_json(set.cloud) : format_cloud_csv(set.cloud));
  write_text(a.out + ".meta.json", metadata_json(set, tool_version()));
  out << "wrote " << set.cloud.size() << " points to " << a.out << "\n";
  return kExitOk;
}

struct AnalyzeArgs {
  std::string in;
  std::string out;
  SharedOptions opts;
};

int cmd_analyze(const AnalyzeArgs& a, std::ostream& out, std::ostream& err) {
  const PointCloud cloud = nonempty(read_cloud(a.in));
  const ProfileDocument doc = analyze_cloud(cloud, a.opts, a.in);
  write_text(a.out, profile_to_json(doc));
  for (const auto& [i, msg] : doc.scale_errors) err << "scale " << i << ": " << msg << "\n";
  out << "wrote profile with " << doc.profile.scales.size() << " scales to " << a.out << "\n";
  return doc.scale_errors.empty() ? kExitOk : kExitErrors;
}

struct VerifyArgs {
  std::vector<std::string> inputs;
  std::vector<std::string> statements;
  std::vector<double> lambdas{1.0};
  std::string out;
  double radius = 1.0;
  SharedOptions opts;
};

int cmd_verify(const VerifyArgs& a, std::ostream& out, std::ostream& err) {
  std::vector<Statement> statements;
  for (const auto& s : a.statements) {
    if (!s.empty()) statements.push_back(statement_from_string(s));
  }
  if (statements.empty()) {
    err << "usage error: --statements needs at least one statement\n";
    return kExitUsage;
  }
  a.opts.cfg.validate();
  a.opts.search.validate();
  if (!(a.radius > 0)) throw Error(ErrorKind::InvalidArgument, "--radius must be positive");
  for (double l : a.lambdas) {
    if (!(l > 0)) throw Error(ErrorKind::InvalidArgument, "--lambda must be positive");
  }

  ReportDocument report;
  report.provenance["tool_version"] = tool_version();
  std::string names;
  for (Statement s : statements) names += (names.empty() ? "" : ",") + std::string(to_string(s));
  report.provenance["statements"] = names;
  std::string lambdas;
  for (double l : a.lambdas) lambdas += (lambdas.empty() ? "" : ",") + format_double(l);
  report.provenance["lambdas"] = lambdas;
  const DyadicConfig& cfg = a.opts.cfg;
  report.provenance["n"] = std::to_string(cfg.n);
  report.provenance["eps_margin"] = format_double(cfg.eps_margin);
  report.provenance["i_min"] = std::to_string(cfg.i_min);
  report.provenance["i_max"] = std::to_string(cfg.i_max);
  report.provenance["centers"] = std::to_string(cfg.center_sample_cap);
  report.provenance["ball_cap"] = std::to_string(cfg.ball_point_cap);
  report.provenance["net_resolution"] = format_double(cfg.net_resolution);
  report.provenance["floor_factor"] = format_double(cfg.scale_floor_factor);
  report.provenance["threshold"] = format_double(cfg.hypothesis_threshold);
  report.provenance["theta_constant"] = format_double(cfg.theta_constant);
  report.provenance["seed"] = std::to_string(cfg.seed);
  report.provenance["radius"] = format_double(a.radius);

  std::vector<FlatnessProfile> profiles;
  const auto t0 = Clock::now();
  for (std::size_t k = 0; k < a.inputs.size(); ++k) {
    const std::string& path = a.inputs[k];
    report.provenance["input." + std::to_string(k)] = path;
    const std::string tag = path + ": ";
    std::optional<PointCloud> cloud;
    std::optional<FlatnessProfile> profile;
    try {
      const std::string text = read_text(path);
      const std::string kind = document_kind(text);
      if (kind == "report") throw Error(ErrorKind::InvalidArgument, "expected a point cloud or a profile, got a report");
      if (kind == "profile") {
        ProfileDocument doc = profile_from_json(text);
        for (const auto& [i, msg] : doc.scale_errors) {
          report.errors.push_back(tag + "scale " + std::to_string(i) + ": " + msg);
        }
        profile = std::move(doc.profile);
      } else {
        cloud = nonempty(read_cloud(path));
      }
    } catch (const Error& e) {
      report.errors.push_back(tag + e.what());
      continue;
    }

    auto need_profile = [&]() -> const FlatnessProfile& {
      if (!profile) {
        ProfileDocument doc = analyze_cloud(*cloud, a.opts, path);
        for (const auto& [i, msg] : doc.scale_errors) {
          report.errors.push_back(tag + "scale " + std::to_string(i) + ": " + msg);
        }
        profile = std::move(doc.profile);
      }
      return *profile;
    };
    auto push = [&](VerificationRecord rec) {
      rec.diagnostics["input_index"] = static_cast<double>(k);
      report.records.push_back(std::move(rec));
    };

    for (Statement s : statements) {
      const std::string where = tag + to_string(s) + ": ";
      try {
        const bool sum = s == Statement::SumA || s == Statement::SumB;
        if (!sum && !cloud) throw Error(ErrorKind::InvalidArgument, "needs a point cloud input, got a profile");
        switch (s) {
          case Statement::SumA:
          case Statement::SumB:
            for (double l : a.lambdas) {
              push(s == Statement::SumA ? verify_sum_A(need_profile(), l, cfg.hypothesis_threshold)
                                        : verify_sum_B(need_profile(), l, cfg.hypothesis_threshold));
            }
            break;
          case Statement::PreciseA:
          case Statement::PreciseB: {
            const Point x = nearest_to_origin(*cloud);
            PreciseOptions po;
            po.C = cfg.theta_constant;
            po.gate = cfg.hypothesis_threshold;
            for (int i = cfg.i_min; i <= cfg.i_max; ++i) {
              try {
                push(s == Statement::PreciseA ? verify_precise_A(*cloud, x, i, cfg, po, a.opts.search)
                                              : verify_precise_B(*cloud, x, i, cfg, po, a.opts.search));
              } catch (const Error& e) {
                report.errors.push_back(where + "scale " + std::to_string(i) + ": " + e.what());
              }
            }
            break;
          }
          case Statement::ConverseAlpha:
            push(verify_converse_alpha(*cloud, nearest_to_origin(*cloud), a.radius, cfg.n, cfg, a.opts.search));
            break;
          case Statement::ConverseBeta:
            push(verify_converse_beta(*cloud, nearest_to_origin(*cloud), a.radius, cfg.n, cfg, a.opts.search));
            break;
        }
      } catch (const Error& e) {
        report.errors.push_back(where + e.what());
      }
    }
    if (profile) profiles.push_back(*profile);
  }
  report.timing["verify_seconds"] = seconds_since(t0);

  std::vector<std::pair<double, double>> pairs;
  for (const auto& r : report.records) {
    if (r.statement == Statement::ConverseAlpha) pairs.emplace_back(r.diagnostics.at("alpha_lo"), r.diagnostics.at("a_hi"));
  }
  if (pairs.size() >= 3) {
    try {
      const SlopeFit fit = slope_analysis(pairs);
      report.summary["converse_alpha_slope"] = fit.slope;
      report.summary["converse_alpha_intercept"] = fit.intercept;
      report.summary["converse_alpha_r_squared"] = fit.r_squared;
    } catch (const Error& e) {
      report.errors.push_back(std::string("converse_alpha slope: ") + e.what());
    }
  }

  write_text(a.out, report_to_json(report));
  const std::string stem = stem_of(a.out);
  write_text(stem + ".records.csv", record_table_csv(report.records));
  for (std::size_t k = 0; k < profiles.size(); ++k) {
    const std::string name = profiles.size() == 1 ? stem + ".scales.csv" : stem + ".scales." + std::to_string(k) + ".csv";
    write_text(name, scale_table_csv(profiles[k]));
  }
  for (const auto& e : report.errors) err << e << "\n";
  if (report.summary.count("converse_alpha_slope")) {
    out << "converse_alpha slope " << format_double(report.summary.at("converse_alpha_slope")) << "\n";
  }
  out << "wrote " << report.records.size() << " records to " << a.out << "\n";
  return report.errors.empty() ? kExitOk : kExitErrors;
}

struct ReportArgs {
  std::string in;
  std::string format = "json";
  std::string out;
};

int cmd_report(const ReportArgs& a, std::ostream& out) {
  const std::string text = read_text(a.in);
  std::string rendered;
  bool had_errors = false;
  if (is_report_json(text)) {
    const ReportDocument doc = report_from_json(text);
    had_errors = !doc.errors.empty();
    rendered = a.format == "csv" ? record_table_csv(doc.records) : report_to_json(doc);
  } else {
    const ProfileDocument doc = profile_from_json(text);
    had_errors = !doc.scale_errors.empty();
    rendered = a.format == "csv" ? scale_table_csv(doc.profile) : profile_to_json(doc);
  }
  if (a.out.empty()) {
    out << rendered;
  } else {
    write_text(a.out, rendered);
  }
  return had_errors ? kExitErrors : kExitOk;
}

}  // namespace

int run(int argc, char** argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int k = 1; k < argc; ++k) args.emplace_back(argv[k]);
  return run(args, out, err);
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Multiscale flatness analysis of point clouds"};
  app.name("flatness");
  app.set_version_flag("--version", tool_version());
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* g = app.add_subcommand("generate", "Write a synthetic point cloud and its metadata sidecar");
  g->add_option("--family", gen.family, "thin_triangle, gapped_segment, lipschitz_graph, dyadic_snowflake, circle_arc, flat_disk")
      ->required();
  g->add_option("--param", gen.params, "Family parameter as key=value (repeatable)");
  g->add_option("--out", gen.out, "Output path")->required();
  g->add_option("--seed", gen.seed, "Seed")->capture_default_str();
  g->add_option("--format", gen.format, "csv, json or auto (from the extension)")
      ->check(CLI::IsMember({"auto", "csv", "json"}))
      ->capture_default_str();

  AnalyzeArgs an;
  auto* z = app.add_subcommand("analyze", "Compute the dyadic flatness profile of a point cloud");
  z->add_option("--in", an.in, "Point cloud (CSV or JSON)")->required();
  z->add_option("--out", an.out, "Profile JSON output path")->required();
  add_config_options(z, an.opts);

  VerifyArgs ver;
  auto* v = app.add_subcommand("verify", "Check theorem statements on clouds or profiles");
  v->add_option("--in", ver.inputs, "Point cloud or profile JSON (repeatable)")->required();
  v->add_option("--statements", ver.statements,
                "Comma-separated: precise_A, precise_B, sum_A, sum_B, converse_alpha, converse_beta")
      ->required()
      ->delimiter(',');
  v->add_option("--lambda", ver.lambdas, "Exponent for the sum statements (repeatable)")->capture_default_str();
  v->add_option("--radius", ver.radius, "Radius for the converse statements")->capture_default_str();
  v->add_option("--out", ver.out, "Report JSON output path")->required();
  add_config_options(v, ver.opts);

  ReportArgs rep;
  auto* r = app.add_subcommand("report", "Render a profile or report as CSV or canonical JSON");
  r->add_option("--in", rep.in, "Profile or report JSON")->required();
  r->add_option("--format", rep.format, "csv or json")->check(CLI::IsMember({"csv", "json"}))->capture_default_str();
  r->add_option("--out", rep.out, "Output path (default: standard output)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (*g) return cmd_generate(gen, out);
    if (*z) return cmd_analyze(an, out, err);
    if (*v) return cmd_verify(ver, out, err);
    if (*r) return cmd_report(rep, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitErrors;
  }
  return kExitUsage;
}

}  // namespace flatness::cli
