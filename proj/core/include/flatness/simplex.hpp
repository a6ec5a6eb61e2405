#pragma once

#include "flatness/geometry.hpp"

#include <span>
#include <vector>

namespace flatness {

/// n-volume of the simplex with the given n+1 vertices, from squared pairwise
/// distances via the Cayley–Menger determinant. Squared volumes within
/// 1e-13 times the n-th power of the largest squared edge are treated as 0;
/// values below -1e-12 times that scale throw InconsistentDistances.
double cayley_menger_volume(std::span<const Point> vertices);
/// Same, from an (n+1) x (n+1) matrix of squared distances.
double cayley_menger_volume_squared_distances(const Eigen::MatrixXd& squared);

/// n-volume from the Gram determinant of the edge vectors, sqrt(det(MᵀM))/n!.
double gram_volume(std::span<const Point> vertices);

struct SimplexSearchResult {
  /// r^{-n} times the largest n-volume found.
  double normalized_volume = 0.0;
  /// Cloud indices of the best vertices (empty when the ball is too small).
  std::vector<std::size_t> vertices;
  /// False when the value comes from exhaustive enumeration.
  bool heuristic = false;
};

/// V_n = sup over (n+1)-subsets of S ∩ B_r(x) of r^{-n} Vol_n. Exhaustive up to
/// `exact_limit` ball points, otherwise greedy seeding plus single-vertex swaps.
SimplexSearchResult max_simplex_volume(const PointCloud& cloud, const Point& x, double r, std::size_t n,
                                       std::size_t exact_limit = 40);

/// The two strategies on an explicit point list (indices refer to `points`).
SimplexSearchResult max_simplex_volume_exact(std::span<const Point> points, std::size_t n);
SimplexSearchResult max_simplex_volume_heuristic(std::span<const Point> points, std::size_t n);

}  // namespace flatness
