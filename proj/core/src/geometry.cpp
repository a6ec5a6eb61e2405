#include "flatness/geometry.hpp"

#include "flatness/kdtree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

namespace flatness {

namespace {

void require_same_dim(const Point& a, const Point& b, const char* what) {
  if (a.size() != b.size()) {
    throw Error(ErrorKind::DimensionMismatch,
                std::string(what) + ": dimension mismatch (" + std::to_string(a.size()) + " vs " +
                    std::to_string(b.size()) + ")");
  }
}

void require_plane_dim(const Point& y, const AffinePlane& g, const char* what) {
  if (static_cast<std::size_t>(y.size()) != g.d()) {
    throw Error(ErrorKind::DimensionMismatch, std::string(what) + ": point has dimension " +
                                                  std::to_string(y.size()) + ", plane lives in R^" +
                                                  std::to_string(g.d()));
  }
}

}  // namespace

Bracket Bracket::make(double lo, double hi, bool certified) {
  if (!std::isfinite(lo) || !std::isfinite(hi)) {
    throw Error(ErrorKind::InvalidArgument, "bracket bounds must be finite");
  }
  lo = std::max(lo, 0.0);
  hi = std::max(hi, 0.0);
  if (lo > hi) {
    // Roundoff can put a certified lower bound a hair above the best value
    // found; anything larger is a logic error.
    if (lo - hi > 1e-9 * std::max(1.0, hi)) {
      throw Error(ErrorKind::InvalidArgument, "bracket lo exceeds hi");
    }
    lo = hi;
  }
  return Bracket{lo, hi, certified};
}

// ---------------------------------------------------------------------------
// PointCloud

double estimate_spacing(std::span<const Point> points) {
  if (points.size() < 2) return 0.0;
  KdTree tree(std::vector<Point>(points.begin(), points.end()));
  double gap = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) gap = std::max(gap, tree.nearest_excluding(points[i], i).distance);
  return gap;
}

PointCloud::PointCloud(std::vector<Point> points) : PointCloud(std::move(points), -1.0) {}

PointCloud::PointCloud(std::vector<Point> points, double spacing) : points_(std::move(points)) {
  if (points_.empty()) throw Error(ErrorKind::EmptyInput, "point cloud is empty");
  dim_ = static_cast<std::size_t>(points_.front().size());
  if (dim_ == 0) throw Error(ErrorKind::InvalidArgument, "points must have dimension >= 1");
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (static_cast<std::size_t>(points_[i].size()) != dim_) {
      throw Error(ErrorKind::DimensionMismatch,
                  "point " + std::to_string(i) + " has dimension " + std::to_string(points_[i].size()) +
                      ", expected " + std::to_string(dim_));
    }
    if (!points_[i].allFinite()) {
      throw Error(ErrorKind::InvalidArgument, "point " + std::to_string(i) + " has non-finite coordinates");
    }
  }
  spacing_ = spacing > 0 ? spacing : estimate_spacing(points_);
  if (!(spacing_ > 0)) {
    // A single point (or fully coincident sample) has no meaningful gap; use
    // the smallest positive value so downstream scale floors stay defined.
    spacing_ = std::numeric_limits<double>::min();
  }
}

std::vector<std::size_t> PointCloud::ball_indices(const Point& x, double r) const {
  require_same_dim(x, points_.front(), "ball_indices");
  const double reach = r * (1.0 + kMembershipTolerance);
  const double reach_sq = reach * reach;
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if ((points_[i] - x).squaredNorm() <= reach_sq) out.push_back(i);
  }
  return out;
}

std::size_t PointCloud::nearest(const Point& x) const {
  require_same_dim(x, points_.front(), "nearest");
  std::size_t best = 0;
  double best_sq = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < points_.size(); ++i) {
    const double dsq = (points_[i] - x).squaredNorm();
    if (dsq < best_sq) {
      best_sq = dsq;
      best = i;
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// AffinePlane

Eigen::MatrixXd gram_schmidt(const Eigen::MatrixXd& columns, double rank_tol) {
  Eigen::MatrixXd q = columns;
  const double scale = std::max(1.0, columns.cwiseAbs().maxCoeff());
  for (Eigen::Index j = 0; j < q.cols(); ++j) {
    for (int pass = 0; pass < 2; ++pass) {
      for (Eigen::Index k = 0; k < j; ++k) q.col(j) -= q.col(k).dot(q.col(j)) * q.col(k);
    }
    const double norm = q.col(j).norm();
    if (!(norm > rank_tol * scale)) {
      throw Error(ErrorKind::Degenerate, "directions are linearly dependent");
    }
    q.col(j) /= norm;
  }
  return q;
}

AffinePlane::AffinePlane(Point base, const Eigen::MatrixXd& directions) : base_(std::move(base)) {
  if (directions.rows() != base_.size()) {
    throw Error(ErrorKind::DimensionMismatch, "plane frame and base point dimensions differ");
  }
  if (directions.cols() < 1 || directions.cols() >= directions.rows()) {
    throw Error(ErrorKind::InvalidArgument, "plane dimension must satisfy 1 <= n < d");
  }
  if (!base_.allFinite() || !directions.allFinite()) {
    throw Error(ErrorKind::InvalidArgument, "plane data must be finite");
  }
  frame_ = gram_schmidt(directions);
}

Eigen::VectorXd AffinePlane::coordinates(const Point& y) const {
  require_plane_dim(y, *this, "coordinates");
  return frame_.transpose() * (y - base_);
}

AffinePlane AffinePlane::through(const Point& p) const {
  require_plane_dim(p, *this, "through");
  return AffinePlane(p, frame_);
}

// ---------------------------------------------------------------------------
// Distances and projections

double hausdorff_distance(std::span<const Point> a, std::span<const Point> b) {
  if (a.empty() || b.empty()) throw Error(ErrorKind::EmptyInput, "hausdorff_distance: empty input");
  const auto dim = a.front().size();
  for (const auto& p : a) require_same_dim(p, a.front(), "hausdorff_distance");
  for (const auto& p : b) {
    if (p.size() != dim) throw Error(ErrorKind::DimensionMismatch, "hausdorff_distance: dimension mismatch");
  }
  auto directed = [](std::span<const Point> from, std::span<const Point> to) {
    KdTree tree(std::vector<Point>(to.begin(), to.end()));
    double worst = 0.0;
    for (const auto& p : from) worst = std::max(worst, tree.nearest(p).distance);
    return worst;
  };
  return std::max(directed(a, b), directed(b, a));
}

double hausdorff_distance(const PointCloud& a, const PointCloud& b) {
  if (a.dim() != b.dim()) throw Error(ErrorKind::DimensionMismatch, "hausdorff_distance: dimension mismatch");
  return hausdorff_distance(std::span<const Point>(a.points()), std::span<const Point>(b.points()));
}

double point_plane_distance(const Point& y, const AffinePlane& plane) {
  require_plane_dim(y, plane, "point_plane_distance");
  const Eigen::VectorXd v = y - plane.base();
  return (v - plane.frame() * (plane.frame().transpose() * v)).norm();
}

Point project(const AffinePlane& plane, const Point& y) {
  require_plane_dim(y, plane, "project");
  return plane.base() + plane.frame() * (plane.frame().transpose() * (y - plane.base()));
}

Eigen::VectorXd principal_cosines(const Frame& f1, const Frame& f2) {
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(f1.transpose() * f2);
  Eigen::VectorXd s = svd.singularValues();
  return s.cwiseMin(1.0).cwiseMax(0.0);
}

double plane_distance(const AffinePlane& g1, const AffinePlane& g2) {
  if (g1.d() != g2.d()) throw Error(ErrorKind::DimensionMismatch, "plane_distance: ambient dimensions differ");
  if (g1.n() != g2.n()) throw Error(ErrorKind::InvalidArgument, "plane_distance: plane dimensions differ");
  // sin of the largest principal angle = spectral norm of (I - P2) F1. The
  // direct form is accurate for small angles, where 1 - cos^2 cancels.
  const Eigen::MatrixXd resid = g1.frame() - g2.frame() * (g2.frame().transpose() * g1.frame());
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(resid);
  return std::clamp(svd.singularValues()(0), 0.0, 1.0);
}

double pitagora_residual(const AffinePlane& g1, const AffinePlane& g2, const Point& x, const Point& y) {
  require_plane_dim(x, g1, "pitagora_residual");
  require_plane_dim(y, g1, "pitagora_residual");
  if (g1.d() != g2.d() || g1.n() != g2.n()) {
    throw Error(ErrorKind::DimensionMismatch, "pitagora_residual: planes differ in dimension");
  }
  const double scale = std::max({1.0, x.norm(), g1.base().norm()});
  if (point_plane_distance(x, g1) > kMembershipTolerance * scale) {
    throw Error(ErrorKind::NotOnPlane, "pitagora_residual: x does not lie on the first plane");
  }
  const double dxy = (x - y).norm();
  if (!(dxy > 0)) throw Error(ErrorKind::InvalidArgument, "pitagora_residual: y must differ from x");
  const double dproj = (project(g2, x) - project(g2, y)).norm();
  const double tilt = plane_distance(g1, g2) + point_plane_distance(y, g1) / dxy;
  return dproj * dproj + dxy * dxy * tilt * tilt - dxy * dxy;
}

Point lift_to_plane(const AffinePlane& source, const AffinePlane& target, const Point& p) {
  require_plane_dim(p, source, "lift_to_plane");
  if (source.d() != target.d() || source.n() != target.n()) {
    throw Error(ErrorKind::DimensionMismatch, "lift_to_plane: planes differ in dimension");
  }
  // Solve F1^T (b2 + F2 c - b1) = F1^T (p - b1)  <=>  (F1^T F2) c = F1^T (p - b2).
  const Eigen::MatrixXd m = source.frame().transpose() * target.frame();
  const Eigen::VectorXd rhs = source.frame().transpose() * (p - target.base());
  Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
  if (!lu.isInvertible()) {
    throw Error(ErrorKind::Degenerate, "lift_to_plane: planes are orthogonal in some direction");
  }
  return target.at(lu.solve(rhs));
}

namespace {

/// Points of the boundary sphere of the disc g ∩ B_R(0); empty when the disc
/// is empty, the single center when it degenerates to a point.
std::vector<Point> disc_boundary(const AffinePlane& g, double radius, std::size_t samples) {
  const Point center = project(g, Point::Zero(static_cast<Eigen::Index>(g.d())));
  const double h2 = radius * radius - center.squaredNorm();
  std::vector<Point> out;
  if (h2 < 0) return out;
  const double rho = std::sqrt(h2);
  const auto n = g.n();
  if (n == 1) {
    out.push_back(center + rho * g.frame().col(0));
    out.push_back(center - rho * g.frame().col(0));
    return out;
  }
  if (n == 2) {
    for (std::size_t k = 0; k < samples; ++k) {
      const double t = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(samples);
      out.push_back(center + rho * (std::cos(t) * g.frame().col(0) + std::sin(t) * g.frame().col(1)));
    }
    return out;
  }
  // Fixed-seed uniform sphere sample; dense enough for oracle use in n >= 3.
  std::mt19937_64 rng(0x5eedULL);
  std::normal_distribution<double> gauss;
  const std::size_t total = samples * samples / 4;
  for (std::size_t k = 0; k < total; ++k) {
    Eigen::VectorXd c(static_cast<Eigen::Index>(n));
    for (auto& v : c) v = gauss(rng);
    c.normalize();
    out.push_back(center + rho * (g.frame() * c));
  }
  return out;
}

double distance_to_disc(const Point& p, const AffinePlane& g, double radius) {
  const Point center = project(g, Point::Zero(static_cast<Eigen::Index>(g.d())));
  const double h2 = radius * radius - center.squaredNorm();
  if (h2 < 0) return std::numeric_limits<double>::infinity();
  const double rho = std::sqrt(h2);
  const Point q = project(g, p);
  const double normal = (p - q).norm();
  const double tangential = std::max(0.0, (q - center).norm() - rho);
  return std::hypot(normal, tangential);
}

}  // namespace

double plane_ball_hausdorff(const AffinePlane& g1, const AffinePlane& g2, double radius, std::size_t samples) {
  // The distance to a convex set is convex, so each directed sup over a disc
  // is attained on its boundary sphere.
  auto directed = [&](const AffinePlane& from, const AffinePlane& to) {
    double worst = 0.0;
    for (const auto& p : disc_boundary(from, radius, samples)) worst = std::max(worst, distance_to_disc(p, to, radius));
    return worst;
  };
  return std::max(directed(g1, g2), directed(g2, g1));
}

AffinePlane fit_plane(std::span<const Point> points, std::size_t n) {
  if (points.empty()) throw Error(ErrorKind::EmptyInput, "fit_plane: no points");
  const auto d = points.front().size();
  Point centroid = Point::Zero(d);
  for (const auto& p : points) {
    require_same_dim(p, points.front(), "fit_plane");
    centroid += p;
  }
  centroid /= static_cast<double>(points.size());
  Eigen::MatrixXd centered(d, static_cast<Eigen::Index>(points.size()));
  for (std::size_t k = 0; k < points.size(); ++k) centered.col(static_cast<Eigen::Index>(k)) = points[k] - centroid;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(centered, Eigen::ComputeThinU);
  if (svd.singularValues().size() < static_cast<Eigen::Index>(n) ||
      svd.singularValues()(static_cast<Eigen::Index>(n) - 1) <= 1e-12 * std::max(1.0, svd.singularValues()(0))) {
    throw Error(ErrorKind::Degenerate, "fit_plane: points do not span an n-plane");
  }
  return AffinePlane(centroid, svd.matrixU().leftCols(static_cast<Eigen::Index>(n)));
}

FrameCloseReport verify_frame_close(const AffinePlane& g1, std::span<const Point> witnesses, double eps) {
  const std::size_t n = g1.n();
  if (witnesses.size() != n + 1) {
    throw Error(ErrorKind::InvalidArgument, "verify_frame_close: expected n+1 witnesses");
  }
  if (!(eps > 0 && eps < 0.01)) throw Error(ErrorKind::InvalidArgument, "verify_frame_close: eps must lie in (0, 1/100)");
  for (const auto& w : witnesses) require_plane_dim(w, g1, "verify_frame_close");

  Eigen::MatrixXd edges(static_cast<Eigen::Index>(g1.d()), static_cast<Eigen::Index>(n));
  for (std::size_t i = 1; i <= n; ++i) edges.col(static_cast<Eigen::Index>(i - 1)) = witnesses[i] - witnesses[0];
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(edges, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  if (sv(sv.size() - 1) <= 1e-9 * std::max(1.0, sv(0))) {
    throw Error(ErrorKind::Degenerate, "verify_frame_close: degenerate witnesses (simplex volume 0)");
  }
  // Closest orthonormal frame (polar factor) to the witness edges.
  const Eigen::MatrixXd e = svd.matrixU() * svd.matrixV().transpose();
  for (Eigen::Index i = 0; i < edges.cols(); ++i) {
    if ((edges.col(i) - e.col(i)).norm() > 0.1 + 1e-12) {
      throw Error(ErrorKind::FrameCondition, "verify_frame_close: |x_i - x_0 - e_i| > 1/10");
    }
  }
  for (const auto& w : witnesses) {
    if (point_plane_distance(w, g1) > eps * (1.0 + 1e-9)) {
      throw Error(ErrorKind::InvalidArgument, "verify_frame_close: witness farther than eps from the first plane");
    }
  }
  AffinePlane g2 = fit_plane(witnesses, n);
  const double scale = std::max(1.0, witnesses[0].norm());
  for (const auto& w : witnesses) {
    if (point_plane_distance(w, g2) > kMembershipTolerance * scale) {
      throw Error(ErrorKind::NotOnPlane, "verify_frame_close: witnesses are not coplanar");
    }
  }
  const double dh = plane_ball_hausdorff(g1, g2, 4.0, 1440);
  return FrameCloseReport{dh, dh / eps, std::move(g2)};
}

IsometryFit fit_isometry(std::span<const IsometrySample> samples, double r) {
  if (samples.empty()) throw Error(ErrorKind::EmptyInput, "fit_isometry: no samples");
  if (!(r > 0)) throw Error(ErrorKind::InvalidArgument, "fit_isometry: radius must be positive");
  const auto n = samples.front().domain.size();
  const auto d = samples.front().image.size();
  if (n < 1 || d <= n) throw Error(ErrorKind::InvalidArgument, "fit_isometry: need 1 <= n < d");
  for (const auto& s : samples) {
    if (s.domain.size() != n || s.image.size() != d) {
      throw Error(ErrorKind::DimensionMismatch, "fit_isometry: inconsistent sample dimensions");
    }
  }

  // Anchor at the sample nearest to the origin of R^n.
  std::size_t anchor = 0;
  for (std::size_t k = 1; k < samples.size(); ++k) {
    if (samples[k].domain.norm() < samples[anchor].domain.norm()) anchor = k;
  }
  const Eigen::VectorXd p0 = samples[anchor].domain;
  const Point q0 = samples[anchor].image;

  // Least-squares linear part A with A (p - p0) ≈ f(p) - f(p0).
  Eigen::MatrixXd dp(n, static_cast<Eigen::Index>(samples.size()));
  Eigen::MatrixXd dq(d, static_cast<Eigen::Index>(samples.size()));
  for (std::size_t k = 0; k < samples.size(); ++k) {
    dp.col(static_cast<Eigen::Index>(k)) = samples[k].domain - p0;
    dq.col(static_cast<Eigen::Index>(k)) = samples[k].image - q0;
  }
  Eigen::FullPivLU<Eigen::MatrixXd> rank_check(dp);
  rank_check.setThreshold(1e-10);
  if (rank_check.rank() < n) {
    throw Error(ErrorKind::Degenerate, "fit_isometry: fewer than n+1 affinely independent domain samples");
  }
  const Eigen::MatrixXd a = (dp * dp.transpose()).ldlt().solve(dp * dq.transpose()).transpose();
  const Eigen::MatrixXd rotation = gram_schmidt(a, 1e-12);

  Isometry iso{rotation, q0 - rotation * p0};
  double deviation = 0.0;
  for (const auto& s : samples) deviation = std::max(deviation, (iso(s.domain) - s.image).norm());
  return IsometryFit{std::move(iso), deviation};
}

}  // namespace flatness
