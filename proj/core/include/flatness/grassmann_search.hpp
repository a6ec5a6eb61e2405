#pragma once

#include "flatness/geometry.hpp"
#include "flatness/kdtree.hpp"

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

namespace flatness {

struct GrassmannSearchConfig {
  std::size_t restarts = 8;
  /// Angular resolution (radians) at which the certified branch-and-bound stops.
  double grid_resolution = 1e-7;
  /// Coordinate-descent sweeps per local search.
  std::size_t max_iterations = 400;
  /// Largest (n, d) for which certified lower bounds are produced. Only
  /// (1,2), (1,3) and (2,3) are supported by the angular search.
  std::size_t certify_max_n = 2;
  std::size_t certify_max_d = 3;
  /// Relative slack applied to hi to produce an uncertified lo.
  double convergence_slack = 0.05;
  /// Branch-and-bound cell budget; exceeding it keeps lo certified but loose.
  std::size_t max_cells = 400000;
  /// Resolution of the net on the plane ball used by alpha, as a fraction of r.
  double alpha_net_fraction = 1.0 / 256.0;
  std::uint64_t seed = 0x9e3779b97f4a7c15ULL;

  void validate() const;
  bool certifies(std::size_t n, std::size_t d) const;
};

/// The sample S ∩ B_r(x) expressed in canonical coordinates: translated to x,
/// scaled by 1/r and rotated onto its principal axes (descending second
/// moments about x). Every search runs in these coordinates, which makes the
/// results equivariant under rigid motions and scaling of the input.
struct LocalSample {
  Point center;
  double radius = 0.0;
  Eigen::MatrixXd axes;    // d x d, columns are the canonical axes in ambient coords
  Eigen::MatrixXd coords;  // d x N normalized canonical coordinates
  std::vector<std::size_t> indices;
  double max_norm = 0.0;

  std::size_t size() const { return indices.size(); }
  std::size_t dim() const { return static_cast<std::size_t>(coords.rows()); }
  /// Ambient-coordinate plane through the center for a canonical frame.
  AffinePlane plane(const Eigen::MatrixXd& canonical_frame) const;
  /// Canonical frame for an ambient direction frame.
  Eigen::MatrixXd canonical(const Eigen::MatrixXd& ambient_frame) const;
};

LocalSample make_local_sample(const PointCloud& cloud, const Point& x, double r);

/// max_k |v_k - F F^T v_k| over the normalized coordinates.
double sup_distance(const Eigen::MatrixXd& coords, const Eigen::MatrixXd& frame);

/// Net of the closed unit n-ball with covering radius <= h (lattice points,
/// radially clamped onto the ball).
std::vector<Eigen::VectorXd> unit_ball_net(std::size_t n, double h);

/// sup over a net of the plane's unit ball of the distance to the sample.
class CoverageEvaluator {
 public:
  CoverageEvaluator(const Eigen::MatrixXd& coords, std::size_t n, double h);
  double operator()(const Eigen::MatrixXd& frame) const;
  double resolution() const { return h_; }
  std::size_t net_size() const { return net_.size(); }

 private:
  KdTree tree_;
  std::vector<Eigen::VectorXd> net_;
  double h_;
};

/// Objective over planes through the origin: returns {lower, upper} values
/// with lower <= true value <= upper, both 1-Lipschitz in the angle metric
/// up to the factor `lipschitz` supplied to the search.
struct ObjectiveValue {
  double lower = 0.0;
  double upper = 0.0;
};
using PlaneObjective = std::function<ObjectiveValue(const Eigen::MatrixXd&)>;

struct SearchOutcome {
  Eigen::MatrixXd frame;  // canonical coordinates, d x n
  double hi = 0.0;
  double lo = 0.0;
  bool certified = false;
  std::size_t evaluations = 0;
  std::size_t cells = 0;
};

/// Certified branch-and-bound over lines/hyperplanes for (n,d) in
/// {(1,2),(1,3),(2,3)}; `lipschitz` bounds the objective's Lipschitz constant
/// in the angular metric.
SearchOutcome branch_and_bound(std::size_t n, std::size_t d, const PlaneObjective& f, double lipschitz,
                               double resolution, std::size_t max_cells);

/// Multi-start coordinate descent on rotation angles, seeded from the first n
/// canonical axes plus deterministic random perturbations. `extra_seeds`
/// (canonical frames) are tried as additional starting points.
SearchOutcome local_search(std::size_t n, std::size_t d, const PlaneObjective& f,
                           const GrassmannSearchConfig& cfg,
                           const std::vector<Eigen::MatrixXd>& extra_seeds = {});

}  // namespace flatness
