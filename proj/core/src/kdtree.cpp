#include "flatness/kdtree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace flatness {

namespace {
constexpr std::size_t kLeafSize = 12;
}

KdTree::KdTree(std::vector<Eigen::VectorXd> points) : points_(std::move(points)) {
  order_.resize(points_.size());
  std::iota(order_.begin(), order_.end(), std::size_t{0});
  if (!points_.empty()) {
    nodes_.reserve(2 * points_.size() / kLeafSize + 2);
    build(0, points_.size());
  }
}

std::size_t KdTree::build(std::size_t begin, std::size_t end) {
  const std::size_t id = nodes_.size();
  nodes_.push_back(Node{begin, end});
  if (end - begin <= kLeafSize) return id;

  const auto dim = points_[order_[begin]].size();
  Eigen::VectorXd lo = points_[order_[begin]];
  Eigen::VectorXd hi = lo;
  for (std::size_t k = begin; k < end; ++k) {
    lo = lo.cwiseMin(points_[order_[k]]);
    hi = hi.cwiseMax(points_[order_[k]]);
  }
  Eigen::Index axis = 0;
  (hi - lo).maxCoeff(&axis);
  if (hi[axis] - lo[axis] <= 0.0 || dim == 0) return id;  // all coincident

  const std::size_t mid = begin + (end - begin) / 2;
  std::nth_element(order_.begin() + static_cast<std::ptrdiff_t>(begin),
                   order_.begin() + static_cast<std::ptrdiff_t>(mid),
                   order_.begin() + static_cast<std::ptrdiff_t>(end),
                   [&](std::size_t a, std::size_t b) { return points_[a][axis] < points_[b][axis]; });
  const double split = points_[order_[mid]][axis];
  const std::size_t left = build(begin, mid);
  const std::size_t right = build(mid, end);
  Node& node = nodes_[id];
  node.axis = static_cast<int>(axis);
  node.split = split;
  node.left = left;
  node.right = right;
  return id;
}

KdTree::Hit KdTree::nearest(const Eigen::VectorXd& q) const {
  return nearest_excluding(q, std::numeric_limits<std::size_t>::max());
}

KdTree::Hit KdTree::nearest_excluding(const Eigen::VectorXd& q, std::size_t exclude) const {
  Hit best{0, std::numeric_limits<double>::infinity()};
  if (points_.empty()) return best;
  double best_sq = std::numeric_limits<double>::infinity();
  nearest_rec(0, q, exclude, best, best_sq);
  best.distance = std::sqrt(best_sq);
  return best;
}

void KdTree::nearest_rec(std::size_t id, const Eigen::VectorXd& q, std::size_t exclude, Hit& best,
                         double& best_sq) const {
  const Node& node = nodes_[id];
  if (node.axis < 0) {
    for (std::size_t k = node.begin; k < node.end; ++k) {
      const std::size_t idx = order_[k];
      if (idx == exclude) continue;
      const double dsq = (points_[idx] - q).squaredNorm();
      // Ties resolve to the smallest original index so results do not depend
      // on the tree layout.
      if (dsq < best_sq || (dsq == best_sq && idx < best.index)) {
        best_sq = dsq;
        best.index = idx;
      }
    }
    return;
  }
  const double diff = q[node.axis] - node.split;
  const std::size_t first = diff < 0 ? node.left : node.right;
  const std::size_t second = diff < 0 ? node.right : node.left;
  nearest_rec(first, q, exclude, best, best_sq);
  if (diff * diff <= best_sq) nearest_rec(second, q, exclude, best, best_sq);
}

std::vector<std::size_t> KdTree::within(const Eigen::VectorXd& q, double r) const {
  std::vector<std::size_t> out;
  if (points_.empty() || r < 0) return out;
  within_rec(0, q, r * r, out);
  std::sort(out.begin(), out.end());
  return out;
}

void KdTree::within_rec(std::size_t id, const Eigen::VectorXd& q, double r_sq,
                        std::vector<std::size_t>& out) const {
  const Node& node = nodes_[id];
  if (node.axis < 0) {
    for (std::size_t k = node.begin; k < node.end; ++k) {
      const std::size_t idx = order_[k];
      if ((points_[idx] - q).squaredNorm() <= r_sq) out.push_back(idx);
    }
    return;
  }
  const double diff = q[node.axis] - node.split;
  if (diff <= 0 || diff * diff <= r_sq) within_rec(node.left, q, r_sq, out);
  if (diff >= 0 || diff * diff <= r_sq) within_rec(node.right, q, r_sq, out);
}

FarthestPointSample farthest_point_sample(std::span<const Eigen::VectorXd> points, std::size_t start,
                                          std::size_t cap, double min_radius) {
  FarthestPointSample out;
  if (points.empty() || cap == 0) return out;
  std::vector<double> dist(points.size(), std::numeric_limits<double>::infinity());
  std::size_t next = start;
  while (true) {
    out.indices.push_back(next);
    double far = -1.0;
    std::size_t far_idx = 0;
    for (std::size_t k = 0; k < points.size(); ++k) {
      dist[k] = std::min(dist[k], (points[k] - points[next]).norm());
      if (dist[k] > far) {
        far = dist[k];
        far_idx = k;
      }
    }
    out.covering_radius = std::max(far, 0.0);
    if (out.indices.size() >= cap || far <= min_radius || far == 0.0) break;
    next = far_idx;
  }
  return out;
}

}  // namespace flatness
