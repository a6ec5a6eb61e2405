#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace flatness {

using Point = Eigen::VectorXd;
using Frame = Eigen::MatrixXd;  // d x n, orthonormal columns

enum class ErrorKind {
  DimensionMismatch,
  EmptyInput,
  InvalidArgument,
  NotOnPlane,
  FrameCondition,
  Degenerate,
  ScaleFloor,
  Hypothesis,
  SizeCap,
  PartialMap,
  InconsistentDistances,
  Io,
  Parse,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline constexpr double kOrthoTolerance = 1e-12;
inline constexpr double kMembershipTolerance = 1e-9;

/// Interval [lo, hi] enclosing an estimated non-negative quantity.
/// `certified` is true when lo is a rigorous lower bound rather than a
/// convergence heuristic.
struct Bracket {
  double lo = 0.0;
  double hi = 0.0;
  bool certified = false;

  static Bracket make(double lo, double hi, bool certified);
  bool contains(double v, double tol = 0.0) const { return v >= lo - tol && v <= hi + tol; }
};

/// Finite sample of a set in R^d.
class PointCloud {
 public:
  PointCloud() = default;
  /// Validates the points and estimates the spacing (max nearest-neighbour gap).
  explicit PointCloud(std::vector<Point> points);
  PointCloud(std::vector<Point> points, double spacing);

  std::size_t size() const { return points_.size(); }
  std::size_t dim() const { return dim_; }
  double spacing() const { return spacing_; }
  const Point& operator[](std::size_t i) const { return points_[i]; }
  const std::vector<Point>& points() const { return points_; }

  /// Indices of points within the closed ball B_r(x), with a relative
  /// boundary tolerance of 1e-9.
  std::vector<std::size_t> ball_indices(const Point& x, double r) const;
  /// Index of the sample point nearest to x.
  std::size_t nearest(const Point& x) const;

 private:
  std::vector<Point> points_;
  std::size_t dim_ = 0;
  double spacing_ = 0.0;
};

double estimate_spacing(std::span<const Point> points);

/// n-dimensional affine plane base + span(frame) in R^d.
class AffinePlane {
 public:
  /// Orthonormalizes `directions` (d x n); throws Degenerate when rank < n.
  AffinePlane(Point base, const Eigen::MatrixXd& directions);

  const Point& base() const { return base_; }
  const Frame& frame() const { return frame_; }
  std::size_t n() const { return static_cast<std::size_t>(frame_.cols()); }
  std::size_t d() const { return static_cast<std::size_t>(frame_.rows()); }

  /// Coordinates of the orthogonal projection of y in the plane's frame,
  /// relative to base.
  Eigen::VectorXd coordinates(const Point& y) const;
  Point at(const Eigen::VectorXd& coords) const { return base_ + frame_ * coords; }
  /// Same direction subspace, new base point.
  AffinePlane through(const Point& p) const;

 private:
  Point base_;
  Frame frame_;
};

/// Orthonormal basis of the column span (modified Gram-Schmidt, two passes).
/// Throws Degenerate when a column is dependent on the previous ones.
Eigen::MatrixXd gram_schmidt(const Eigen::MatrixXd& columns, double rank_tol = 1e-12);

double hausdorff_distance(const PointCloud& a, const PointCloud& b);
double hausdorff_distance(std::span<const Point> a, std::span<const Point> b);

double point_plane_distance(const Point& y, const AffinePlane& plane);
Point project(const AffinePlane& plane, const Point& y);

/// Sine of the largest principal angle between the direction subspaces,
/// i.e. d_H(V1 ∩ B1(0), V2 ∩ B1(0)).
double plane_distance(const AffinePlane& g1, const AffinePlane& g2);

/// Cosines of the principal angles between direction subspaces, descending.
Eigen::VectorXd principal_cosines(const Frame& f1, const Frame& f2);

/// RHS - LHS of |x-y|^2 <= |Πx-Πy|^2 + |x-y|^2 (d(G1,G2) + d(y,G1)/|x-y|)^2
/// with Π the orthogonal projection onto g2. Requires x on g1 and y != x.
double pitagora_residual(const AffinePlane& g1, const AffinePlane& g2, const Point& x,
                         const Point& y);

/// A point q on `target` whose orthogonal projection onto `source` is p.
/// Exists whenever plane_distance(source, target) < 1.
Point lift_to_plane(const AffinePlane& source, const AffinePlane& target, const Point& p);

/// Hausdorff distance between the discs g1 ∩ B_R(0) and g2 ∩ B_R(0), with
/// the boundary sphere of each disc sampled at `samples` points per circle.
double plane_ball_hausdorff(const AffinePlane& g1, const AffinePlane& g2, double radius,
                            std::size_t samples = 720);

struct FrameCloseReport {
  double dH = 0.0;
  double ratio = 0.0;
  AffinePlane reconstructed;
};

FrameCloseReport verify_frame_close(const AffinePlane& g1, std::span<const Point> witnesses,
                                    double eps);

/// Least-squares n-plane through the given points (centroid + top-n
/// principal directions).
AffinePlane fit_plane(std::span<const Point> points, std::size_t n);

struct Isometry {
  Eigen::MatrixXd rotation;  // d x n, orthonormal columns
  Point offset;              // image of the origin of R^n

  Point operator()(const Eigen::VectorXd& p) const { return offset + rotation * p; }
};

struct IsometrySample {
  Eigen::VectorXd domain;  // in R^n
  Point image;             // in R^d
};

struct IsometryFit {
  Isometry isometry;
  double deviation = 0.0;
};

IsometryFit fit_isometry(std::span<const IsometrySample> samples, double r);

}  // namespace flatness
