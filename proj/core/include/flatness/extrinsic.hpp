#pragma once

#include "flatness/geometry.hpp"
#include "flatness/grassmann_search.hpp"
#include "flatness/profile.hpp"

#include <optional>
#include <vector>

namespace flatness {

/// β and α at one center and radius, with the planes attaining each hi.
struct ExtrinsicEstimate {
  Bracket beta;
  std::optional<Bracket> alpha;
  AffinePlane beta_plane;
  std::optional<AffinePlane> alpha_plane;
  /// Absolute resolution of the plane-ball net used for alpha.
  double alpha_net_resolution = 0.0;
  std::size_t ball_size = 0;
};

/// Throws ScaleFloor when r < floor_factor * spacing.
void check_scale_floor(const PointCloud& cloud, double r, double floor_factor = 8.0);

ExtrinsicEstimate estimate_extrinsic(const PointCloud& cloud, const Point& x, double r, std::size_t n,
                                     const GrassmannSearchConfig& cfg, bool with_alpha = true,
                                     double floor_factor = 8.0);

/// Jones number: r^{-1} inf over n-planes Γ ∋ x of sup_{y ∈ S ∩ B_r(x)} d(y, Γ).
Bracket beta_number(const PointCloud& cloud, const Point& x, double r, std::size_t n,
                    const GrassmannSearchConfig& cfg = {});

/// Reifenberg number: r^{-1} inf over n-planes Γ ∋ x of d_H(S ∩ B_r(x), Γ ∩ B_r(x)).
Bracket alpha_number(const PointCloud& cloud, const Point& x, double r, std::size_t n,
                     const GrassmannSearchConfig& cfg = {});

/// Plane through x attaining beta's hi, with the measured ratio of its
/// normalized two-sided Hausdorff distance to alpha's hi.
struct RealizingPlane {
  AffinePlane plane;
  double beta_achieved = 0.0;
  double alpha_ratio = 0.0;
  Bracket alpha;
};

RealizingPlane realizing_plane(const PointCloud& cloud, const Point& x, double r, std::size_t n,
                               const GrassmannSearchConfig& cfg = {}, double alpha_gate = 0.01);

/// r^{-1} d_H(S ∩ B_r(x), Γ ∩ B_r(x)) for a fixed plane through x, as an
/// upper value (net error included).
double plane_hausdorff_upper(const PointCloud& cloud, const AffinePlane& plane, const Point& x, double r,
                             double net_resolution);

/// Profile centers for α_i, β_i: S ∩ B_1(0), farthest-point subsampled.
std::vector<std::size_t> extrinsic_centers(const PointCloud& cloud, const DyadicConfig& cfg);

/// α_i and β_i at one scale as the max over the given centers.
ScaleRecord extrinsic_scale_record(const PointCloud& cloud, const DyadicConfig& cfg, int i,
                                   const std::vector<std::size_t>& centers, const GrassmannSearchConfig& search = {});

/// α_i, β_i for i in [i_min - 2, i_max]: sup over centers in S ∩ B_1(0).
FlatnessProfile dyadic_profile_extrinsic(const PointCloud& cloud, const DyadicConfig& cfg,
                                         const GrassmannSearchConfig& search = {});

struct TiltRecord {
  enum class Kind { Scale, Space };
  Kind kind = Kind::Scale;
  int i = 0;
  std::size_t center = 0;
  std::size_t other = 0;
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
};

struct TiltingReport {
  std::vector<TiltRecord> records;
  std::size_t skipped = 0;
  double hypothesis_threshold = 0.01;
  double max_ratio() const;
};

/// Plane distances between realizing planes at (x, r) vs (x, 2r) and (x, r)
/// vs (y, r) with |x - y| ≈ r/8, against the corresponding β sums.
TiltingReport tilting_report(const PointCloud& cloud, const DyadicConfig& cfg,
                             const GrassmannSearchConfig& search = {});

}  // namespace flatness
