#pragma once

#include "flatness/geometry.hpp"
#include "flatness/grassmann_search.hpp"
#include "flatness/metric_space.hpp"
#include "flatness/profile.hpp"

#include <vector>

namespace flatness {

/// θ = C² sup_j (β_{-2} + ... + β_j)² / 2^j with β_k = β(x, 2^{-k} r), and
/// θ' = max(θ, C α(x,r)²). The sup runs over the scales above the floor.
struct ThetaCertificate {
  double theta = 0.0;
  double theta_prime = 0.0;
  double C_used = 0.0;
  /// β_{-2}, β_{-1}, β_0, β_1, ... (upper ends of the brackets).
  std::vector<double> beta_inputs;
  double alpha_used = 0.0;
  /// True when the sup over j stopped at the scale floor rather than at a
  /// point where the remaining terms are provably dominated.
  bool truncated = false;
  /// Upper bound on the terms beyond the last computed one, assuming the
  /// remaining β's do not exceed the last computed β.
  double tail_bound = 0.0;
};

/// Orthogonal projection of S ∩ B_r(x) onto the β-realizing plane at (x, r),
/// in the plane's orthonormal coordinates centered at x, radially clamped into
/// the closed r-ball.
struct ProjectionIsometry {
  AffinePlane plane;
  std::vector<std::size_t> domain;  // cloud indices
  std::vector<Point> image;         // n-dimensional coordinates
  ThetaCertificate certificate;
  /// sup over pairs of | |Πy - Πz| - |y - z| | plus the clamp displacement
  /// (absolute length units, not divided by r).
  double measured_distortion = 0.0;
  double clamp_displacement = 0.0;
  /// α(x, 2^{-k} r) ≤ gate for the scales 4r, 2r, r.
  bool gate_met = false;
  Bracket alpha;
};

struct IntrinsicOptions {
  double theta_constant = 64.0;
  double alpha_gate = 0.01;
  /// Throw ErrorKind::Hypothesis when the α gate fails instead of recording it.
  bool enforce_gate = false;
  double floor_factor = 8.0;
  /// Finest scale considered by the θ sup, as a number of halvings of r.
  int max_halvings = 12;
};

ProjectionIsometry projection_isometry(const PointCloud& cloud, const Point& x, double r, std::size_t n,
                                       const IntrinsicOptions& opts = {}, const GrassmannSearchConfig& search = {});

/// Both intrinsic numbers at one center, sharing the projection map and the
/// subsample searches.
struct IntrinsicEstimate {
  Bracket a;
  Bracket b;
  /// Raw sup distortion of the projection map over the ball (length units).
  double map_distortion = 0.0;
  /// sup over the ball net of the distance to the map's image.
  double map_codensity = 0.0;
  double net_resolution = 0.0;
  /// Covering radius of the subsample used when the ball exceeds the point cap.
  double coarsening = 0.0;
  std::size_t ball_size = 0;
  /// Contributions to a.lo (already divided by r).
  double lo_subsample_gh = 0.0;
  double lo_diameter = 0.0;
  double lo_map = 0.0;
  bool map_search_exact = false;
};

IntrinsicEstimate estimate_intrinsic(const PointCloud& cloud, const Point& x, double r, std::size_t n,
                                     const DyadicConfig& cfg, const GrassmannSearchConfig& search = {});

Bracket a_number(const PointCloud& cloud, const Point& x, double r, std::size_t n, const DyadicConfig& cfg,
                 const GrassmannSearchConfig& search = {});
Bracket b_number(const PointCloud& cloud, const Point& x, double r, std::size_t n, const DyadicConfig& cfg,
                 const GrassmannSearchConfig& search = {});

/// Profile centers for a_i, b_i: S ∩ B_{1-ε}(0), farthest-point subsampled.
std::vector<std::size_t> intrinsic_centers(const PointCloud& cloud, const DyadicConfig& cfg);

/// a_i and b_i at one scale as the max over the given centers.
ScaleRecord intrinsic_scale_record(const PointCloud& cloud, const DyadicConfig& cfg, int i,
                                   const std::vector<std::size_t>& centers, const GrassmannSearchConfig& search = {});

/// a_i and b_i for i in [i_min, i_max], sup over centers in B_{1-ε}(0).
FlatnessProfile dyadic_profile_intrinsic(const PointCloud& cloud, const DyadicConfig& cfg,
                                         const GrassmannSearchConfig& search = {});

}  // namespace flatness
