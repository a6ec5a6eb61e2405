#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <vector>

namespace flatness {

/// Static k-d tree over a fixed set of points. Queries are exact.
class KdTree {
 public:
  KdTree() = default;
  explicit KdTree(std::vector<Eigen::VectorXd> points);

  std::size_t size() const { return points_.size(); }
  bool empty() const { return points_.empty(); }
  const Eigen::VectorXd& point(std::size_t i) const { return points_[i]; }

  struct Hit {
    std::size_t index = 0;
    double distance = 0.0;
  };

  Hit nearest(const Eigen::VectorXd& q) const;
  /// Nearest point other than the one stored at index `exclude`.
  Hit nearest_excluding(const Eigen::VectorXd& q, std::size_t exclude) const;
  /// Indices (into the original point order) within distance r of q, sorted.
  std::vector<std::size_t> within(const Eigen::VectorXd& q, double r) const;

 private:
  struct Node {
    std::size_t begin = 0;
    std::size_t end = 0;
    int axis = -1;  // -1 for leaves
    double split = 0.0;
    std::size_t left = 0;
    std::size_t right = 0;
  };

  std::size_t build(std::size_t begin, std::size_t end);
  void nearest_rec(std::size_t node, const Eigen::VectorXd& q, std::size_t exclude, Hit& best,
                   double& best_sq) const;
  void within_rec(std::size_t node, const Eigen::VectorXd& q, double r_sq,
                  std::vector<std::size_t>& out) const;

  std::vector<Eigen::VectorXd> points_;
  std::vector<std::size_t> order_;
  std::vector<Node> nodes_;
};

/// Greedy farthest-point subsample of `points` (indices), starting at
/// `start`, stopping at `cap` points or when the covering radius drops to
/// `min_radius`. Returns the chosen indices in selection order and the
/// covering radius of the selection.
struct FarthestPointSample {
  std::vector<std::size_t> indices;
  double covering_radius = 0.0;
};

FarthestPointSample farthest_point_sample(std::span<const Eigen::VectorXd> points, std::size_t start,
                                          std::size_t cap, double min_radius = 0.0);

}  // namespace flatness
