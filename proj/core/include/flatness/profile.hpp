#pragma once

#include "flatness/geometry.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace flatness {

/// Scale range and sampling controls for dyadic flatness profiles.
struct DyadicConfig {
  /// Margin ε in (0, 1/2): intrinsic numbers use centers in B_{1-ε}(0).
  double eps_margin = 0.25;
  /// First index ī of the profile; scales run over [ī - 2, i_max].
  int i_min = 3;
  int i_max = 6;
  std::size_t n = 1;
  /// Max number of centers per scale (farthest-point subsample beyond this).
  std::size_t center_sample_cap = 24;
  /// Net resolution for the Euclidean n-ball; <= 0 selects max(spacing, r/200).
  double net_resolution = 0.0;
  /// Ball samples above this size are coarsened for the intrinsic numbers,
  /// with the coarsening radius charged to hi.
  std::size_t ball_point_cap = 1500;
  /// Constant C of the θ certificate.
  double theta_constant = 64.0;
  /// Working smallness threshold standing in for the unspecified α(n), δ(n).
  double hypothesis_threshold = 0.01;
  /// Minimum radius in units of sample spacing.
  double scale_floor_factor = 8.0;
  std::uint64_t seed = 1;

  void validate() const;
  double scale(int i) const;
};

/// Per-scale brackets. Missing quantities (not requested, or below the scale
/// floor) are empty optionals.
struct ScaleRecord {
  int i = 0;
  double r = 0.0;
  bool below_floor = false;
  std::optional<Bracket> alpha;
  std::optional<Bracket> beta;
  std::optional<Bracket> a;
  std::optional<Bracket> b;
  std::size_t extrinsic_centers = 0;
  std::size_t intrinsic_centers = 0;
  /// Whether every center contributing to alpha satisfied the floor etc.
  std::vector<std::string> notes;
};

struct FlatnessProfile {
  DyadicConfig config;
  std::size_t cloud_size = 0;
  std::size_t dim = 0;
  double spacing = 0.0;
  std::vector<ScaleRecord> scales;

  ScaleRecord* find(int i);
  const ScaleRecord* find(int i) const;
};

/// Merges the extrinsic and intrinsic halves of a profile computed with the
/// same configuration.
FlatnessProfile merge_profiles(const FlatnessProfile& extrinsic, const FlatnessProfile& intrinsic);

/// Deterministic center selection: all cloud points within B_radius(0),
/// farthest-point subsampled to `cap` starting from the point nearest 0.
std::vector<std::size_t> select_centers(const PointCloud& cloud, double radius, std::size_t cap);

}  // namespace flatness
