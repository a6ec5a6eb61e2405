#include "flatness/simplex.hpp"

#include <algorithm>
#include <cmath>

namespace flatness {

namespace {

double factorial(std::size_t n) {
  double f = 1.0;
  for (std::size_t k = 2; k <= n; ++k) f *= static_cast<double>(k);
  return f;
}

void check_vertices(std::span<const Point> vertices) {
  if (vertices.size() < 2) throw Error(ErrorKind::InvalidArgument, "a simplex needs at least two vertices");
  const auto d = vertices[0].size();
  for (const auto& v : vertices) {
    if (v.size() != d) throw Error(ErrorKind::DimensionMismatch, "simplex vertices of different dimensions");
    if (!v.allFinite()) throw Error(ErrorKind::InvalidArgument, "simplex vertex is not finite");
  }
  if (vertices.size() > static_cast<std::size_t>(d) + 1) {
    throw Error(ErrorKind::InvalidArgument, "an n-simplex in R^d needs n <= d");
  }
}

/// Volume of the simplex spanned by the given points, used inside searches.
double volume_of(std::span<const Point> points, const std::vector<std::size_t>& idx) {
  const auto n = static_cast<Eigen::Index>(idx.size() - 1);
  Eigen::MatrixXd m(points[idx[0]].size(), n);
  for (Eigen::Index k = 0; k < n; ++k) m.col(k) = points[idx[static_cast<std::size_t>(k) + 1]] - points[idx[0]];
  const Eigen::MatrixXd gram = m.transpose() * m;
  const double det = gram.determinant();
  const double scale = std::pow(gram.diagonal().maxCoeff(), static_cast<double>(n));
  if (det <= 1e-13 * scale) return 0.0;
  return std::sqrt(det) / factorial(static_cast<std::size_t>(n));
}

}  // namespace

double cayley_menger_volume_squared_distances(const Eigen::MatrixXd& squared) {
  const Eigen::Index k = squared.rows();
  if (squared.cols() != k || k < 2) throw Error(ErrorKind::InvalidArgument, "squared distances must be square, size >= 2");
  if (!squared.allFinite()) throw Error(ErrorKind::InvalidArgument, "squared distances must be finite");
  const std::size_t n = static_cast<std::size_t>(k - 1);
  Eigen::MatrixXd cm = Eigen::MatrixXd::Ones(k + 1, k + 1);
  cm(0, 0) = 0.0;
  cm.bottomRightCorner(k, k) = squared;
  const double det = cm.fullPivLu().determinant();
  const double sign = (n + 1) % 2 == 0 ? 1.0 : -1.0;
  const double norm = std::ldexp(1.0, static_cast<int>(n)) * factorial(n) * factorial(n);
  const double vol2 = sign * det / norm;
  const double scale = std::pow(std::max(squared.maxCoeff(), 0.0), static_cast<double>(n)) / norm;
  if (vol2 < -1e-12 * scale) {
    throw Error(ErrorKind::InconsistentDistances, "Cayley-Menger determinant has the wrong sign");
  }
  // Squared volumes at the determinant's rounding level count as degenerate.
  if (vol2 <= 1e-13 * scale) return 0.0;
  return std::sqrt(vol2);
}

double cayley_menger_volume(std::span<const Point> vertices) {
  check_vertices(vertices);
  const auto k = static_cast<Eigen::Index>(vertices.size());
  Eigen::MatrixXd sq = Eigen::MatrixXd::Zero(k, k);
  for (Eigen::Index i = 0; i < k; ++i) {
    for (Eigen::Index j = 0; j < i; ++j) {
      const double v = (vertices[static_cast<std::size_t>(i)] - vertices[static_cast<std::size_t>(j)]).squaredNorm();
      sq(i, j) = v;
      sq(j, i) = v;
    }
  }
  return cayley_menger_volume_squared_distances(sq);
}

double gram_volume(std::span<const Point> vertices) {
  check_vertices(vertices);
  std::vector<std::size_t> idx(vertices.size());
  for (std::size_t k = 0; k < idx.size(); ++k) idx[k] = k;
  return volume_of(vertices, idx);
}

SimplexSearchResult max_simplex_volume_exact(std::span<const Point> points, std::size_t n) {
  SimplexSearchResult out;
  if (points.size() < n + 1) return out;
  std::vector<std::size_t> idx(n + 1);
  for (std::size_t k = 0; k <= n; ++k) idx[k] = k;
  double best = -1.0;
  while (true) {
    const double v = volume_of(points, idx);
    if (v > best) {
      best = v;
      out.vertices = idx;
    }
    // Next combination in lexicographic order.
    std::size_t pos = n + 1;
    while (pos > 0 && idx[pos - 1] == points.size() - (n + 1) + (pos - 1)) --pos;
    if (pos == 0) break;
    ++idx[pos - 1];
    for (std::size_t k = pos; k <= n; ++k) idx[k] = idx[k - 1] + 1;
  }
  out.normalized_volume = best;
  return out;
}

SimplexSearchResult max_simplex_volume_heuristic(std::span<const Point> points, std::size_t n) {
  SimplexSearchResult out;
  out.heuristic = true;
  if (points.size() < n + 1) return out;
  Point centroid = Point::Zero(points[0].size());
  for (const auto& p : points) centroid += p;
  centroid /= static_cast<double>(points.size());
  auto farthest_from = [&](const Point& q) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < points.size(); ++k) {
      if ((points[k] - q).squaredNorm() > (points[best] - q).squaredNorm()) best = k;
    }
    return best;
  };
  std::vector<std::size_t> idx{farthest_from(centroid)};
  idx.push_back(farthest_from(points[idx[0]]));
  while (idx.size() < n + 1) {
    std::size_t best = 0;
    double best_v = -1.0;
    idx.push_back(0);
    for (std::size_t k = 0; k < points.size(); ++k) {
      idx.back() = k;
      const double v = volume_of(points, idx);
      if (v > best_v) {
        best_v = v;
        best = k;
      }
    }
    idx.back() = best;
  }
  double current = volume_of(points, idx);
  bool improved = true;
  while (improved) {
    improved = false;
    for (std::size_t slot = 0; slot <= n; ++slot) {
      const std::size_t keep = idx[slot];
      std::size_t best = keep;
      for (std::size_t k = 0; k < points.size(); ++k) {
        idx[slot] = k;
        const double v = volume_of(points, idx);
        if (v > current * (1.0 + 1e-12)) {
          current = v;
          best = k;
          improved = true;
        }
      }
      idx[slot] = best;
    }
  }
  out.vertices = idx;
  out.normalized_volume = current;
  return out;
}

SimplexSearchResult max_simplex_volume(const PointCloud& cloud, const Point& x, double r, std::size_t n,
                                       std::size_t exact_limit) {
  if (!(r > 0)) throw Error(ErrorKind::InvalidArgument, "radius must be positive");
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "simplex dimension must be >= 1");
  if (static_cast<std::size_t>(x.size()) != cloud.dim()) {
    throw Error(ErrorKind::DimensionMismatch, "center dimension differs from the cloud dimension");
  }
  const std::vector<std::size_t> ball = cloud.ball_indices(x, r);
  SimplexSearchResult out;
  if (ball.size() < n + 1 || n > cloud.dim()) return out;
  std::vector<Point> pts;
  pts.reserve(ball.size());
  for (auto i : ball) pts.push_back(cloud[i]);
  out = ball.size() <= exact_limit ? max_simplex_volume_exact(pts, n) : max_simplex_volume_heuristic(pts, n);
  for (auto& v : out.vertices) v = ball[v];
  out.normalized_volume /= std::pow(r, static_cast<double>(n));
  return out;
}

}  // namespace flatness
