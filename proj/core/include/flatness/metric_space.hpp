#pragma once

#include "flatness/geometry.hpp"

#include <cstddef>
#include <limits>
#include <optional>
#include <vector>

namespace flatness {

/// A finite metric space given by its distance matrix. Spaces built from
/// Euclidean points keep the coordinates.
class FiniteMetricSpace {
 public:
  FiniteMetricSpace() = default;
  /// Validates symmetry, zero diagonal, nonnegativity and the triangle
  /// inequality (within 1e-9 relative to the diameter).
  explicit FiniteMetricSpace(Eigen::MatrixXd dist, std::vector<std::size_t> labels = {});

  static FiniteMetricSpace euclidean(std::vector<Point> points, std::vector<std::size_t> labels = {});

  std::size_t size() const { return static_cast<std::size_t>(dist_.rows()); }
  double operator()(std::size_t i, std::size_t j) const { return dist_(i, j); }
  const Eigen::MatrixXd& dist() const { return dist_; }
  const std::vector<std::size_t>& labels() const { return labels_; }
  const std::vector<Point>& coordinates() const { return coords_; }
  double diameter() const;

  FiniteMetricSpace subspace(const std::vector<std::size_t>& indices) const;

 private:
  Eigen::MatrixXd dist_;
  std::vector<std::size_t> labels_;
  std::vector<Point> coords_;
};

/// Pairwise Euclidean distances of the sample points in the closed ball B_r(x).
/// Labels hold the cloud indices.
FiniteMetricSpace restrict_metric(const PointCloud& cloud, const Point& x, double r);

/// Net of the closed n-ball of radius r with covering radius <= h: lattice
/// points of step min(h, 2h/sqrt(n)) inside the ball plus radial projections of
/// the lattice points just outside it. Throws SizeCap beyond `cap` points.
std::vector<Point> euclidean_ball_net_points(std::size_t n, double r, double h, std::size_t cap = 2'000'000);
FiniteMetricSpace euclidean_ball_net(std::size_t n, double r, double h, std::size_t cap = 4096);

/// A map between finite spaces as target indices; kUnmapped marks undefined points.
using PointMap = std::vector<std::size_t>;
inline constexpr std::size_t kUnmapped = std::numeric_limits<std::size_t>::max();

/// sup over pairs of |d_Y(f(x), f(y)) - d_X(x, y)|.
double distortion(const PointMap& f, const FiniteMetricSpace& X, const FiniteMetricSpace& Y);
/// sup over y in Y of d_Y(y, f(X)).
double codensity(const PointMap& f, const FiniteMetricSpace& X, const FiniteMetricSpace& Y);
/// 2 max(distortion, codensity): an upper bound for d_GH(X, Y).
double gh_upper_via_map(const PointMap& f, const FiniteMetricSpace& X, const FiniteMetricSpace& Y);

enum class BoundMethod { ExactEnumeration, Subsample, DistributionBound, MapBased };
const char* to_string(BoundMethod m);

struct CorrespondenceBound {
  double lower = 0.0;
  double upper = 0.0;
  BoundMethod method = BoundMethod::ExactEnumeration;
};

/// Exact d_GH = 1/2 min over correspondences of the distortion, for spaces with
/// at most `max_size` points.
CorrespondenceBound gh_bruteforce(const FiniteMetricSpace& X, const FiniteMetricSpace& Y, std::size_t max_size = 7);

/// Lower bound 1/2 |diam X - diam Y| on d_GH(X, Y).
double gh_diameter_lower_bound(const FiniteMetricSpace& X, const FiniteMetricSpace& Y);

struct MinDistortionResult {
  double value = 0.0;
  PointMap map;
  /// False when the node budget ran out; value is then only an upper bound.
  bool exact = false;
  std::size_t nodes = 0;
};

/// Minimum distortion over all maps X -> Y (no surjectivity), by depth-first
/// branch-and-bound. `initial_upper` seeds the incumbent. When Y is
/// symmetric, `first_choices` may restrict the image of the first point to a
/// fundamental domain (empty means all of Y).
MinDistortionResult min_distortion_map(const FiniteMetricSpace& X, const FiniteMetricSpace& Y,
                                       std::size_t node_budget = 5'000'000,
                                       double initial_upper = std::numeric_limits<double>::infinity(),
                                       const std::vector<std::size_t>& first_choices = {});

}  // namespace flatness
