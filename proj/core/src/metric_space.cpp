#include "flatness/metric_space.hpp"

#include "flatness/kdtree.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

namespace flatness {

FiniteMetricSpace::FiniteMetricSpace(Eigen::MatrixXd dist, std::vector<std::size_t> labels)
    : dist_(std::move(dist)), labels_(std::move(labels)) {
  const Eigen::Index m = dist_.rows();
  if (dist_.cols() != m) throw Error(ErrorKind::InvalidArgument, "distance matrix must be square");
  if (!labels_.empty() && labels_.size() != static_cast<std::size_t>(m)) {
    throw Error(ErrorKind::InvalidArgument, "label count differs from the space size");
  }
  if (!dist_.allFinite()) throw Error(ErrorKind::InvalidArgument, "distance matrix has non-finite entries");
  for (Eigen::Index i = 0; i < m; ++i) {
    if (dist_(i, i) != 0.0) throw Error(ErrorKind::InvalidArgument, "distance matrix diagonal must be zero");
    for (Eigen::Index j = 0; j < i; ++j) {
      if (dist_(i, j) != dist_(j, i)) throw Error(ErrorKind::InvalidArgument, "distance matrix is not symmetric");
      if (dist_(i, j) < 0.0) throw Error(ErrorKind::InvalidArgument, "negative distance");
    }
  }
  const double tol = 1e-9 * std::max(1.0, dist_.size() ? dist_.maxCoeff() : 0.0);
  for (Eigen::Index i = 0; i < m; ++i) {
    for (Eigen::Index j = 0; j < m; ++j) {
      for (Eigen::Index k = 0; k < m; ++k) {
        if (dist_(i, k) > dist_(i, j) + dist_(j, k) + tol) {
          throw Error(ErrorKind::InconsistentDistances, "triangle inequality violated");
        }
      }
    }
  }
}

FiniteMetricSpace FiniteMetricSpace::euclidean(std::vector<Point> points, std::vector<std::size_t> labels) {
  if (!labels.empty() && labels.size() != points.size()) {
    throw Error(ErrorKind::InvalidArgument, "label count differs from the point count");
  }
  const std::size_t m = points.size();
  FiniteMetricSpace s;
  s.dist_ = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
  for (std::size_t i = 0; i < m; ++i) {
    if (i > 0 && points[i].size() != points[0].size()) {
      throw Error(ErrorKind::DimensionMismatch, "points of different dimensions");
    }
    for (std::size_t j = 0; j < i; ++j) {
      const double v = (points[i] - points[j]).norm();
      s.dist_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
      s.dist_(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = v;
    }
  }
  s.labels_ = std::move(labels);
  s.coords_ = std::move(points);
  return s;
}

double FiniteMetricSpace::diameter() const { return dist_.size() ? dist_.maxCoeff() : 0.0; }

FiniteMetricSpace FiniteMetricSpace::subspace(const std::vector<std::size_t>& indices) const {
  FiniteMetricSpace s;
  const auto m = static_cast<Eigen::Index>(indices.size());
  s.dist_.resize(m, m);
  for (Eigen::Index i = 0; i < m; ++i) {
    if (indices[static_cast<std::size_t>(i)] >= size()) throw Error(ErrorKind::InvalidArgument, "subspace index out of range");
    for (Eigen::Index j = 0; j < m; ++j) {
      s.dist_(i, j) = dist_(static_cast<Eigen::Index>(indices[static_cast<std::size_t>(i)]),
                            static_cast<Eigen::Index>(indices[static_cast<std::size_t>(j)]));
    }
  }
  for (auto i : indices) {
    if (!labels_.empty()) s.labels_.push_back(labels_[i]);
    if (!coords_.empty()) s.coords_.push_back(coords_[i]);
  }
  return s;
}

FiniteMetricSpace restrict_metric(const PointCloud& cloud, const Point& x, double r) {
  if (static_cast<std::size_t>(x.size()) != cloud.dim()) {
    throw Error(ErrorKind::DimensionMismatch, "center dimension differs from the cloud dimension");
  }
  std::vector<std::size_t> idx = cloud.ball_indices(x, r);
  if (idx.empty()) throw Error(ErrorKind::EmptyInput, "restrict_metric: the ball contains no sample point");
  std::vector<Point> pts;
  pts.reserve(idx.size());
  for (auto i : idx) pts.push_back(cloud[i]);
  return FiniteMetricSpace::euclidean(std::move(pts), std::move(idx));
}

std::vector<Point> euclidean_ball_net_points(std::size_t n, double r, double h, std::size_t cap) {
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "net dimension must be >= 1");
  if (!(r > 0) || !(h > 0) || !(h < r)) throw Error(ErrorKind::InvalidArgument, "net requires 0 < h < r");
  const double step = std::min(h, 2.0 * h / std::sqrt(static_cast<double>(n)));
  const double reach = r + 0.5 * step * std::sqrt(static_cast<double>(n));
  const auto k = static_cast<long long>(std::floor(reach / step + 1e-9));
  const double side = static_cast<double>(2 * k + 1);
  const double volume_estimate = std::pow(side, static_cast<double>(n));
  if (volume_estimate > 4.0 * static_cast<double>(cap) + 1e6) {
    throw Error(ErrorKind::SizeCap, "ball net exceeds the size cap; increase h");
  }
  std::vector<Point> out;
  std::set<std::vector<double>> seen_boundary;
  std::vector<long long> idx(n, -k);
  const double tol = 1e-12 * r;
  while (true) {
    Point p(static_cast<Eigen::Index>(n));
    for (std::size_t a = 0; a < n; ++a) p[static_cast<Eigen::Index>(a)] = static_cast<double>(idx[a]) * step;
    const double norm = p.norm();
    if (norm <= r + tol) {
      out.push_back(std::move(p));
    } else if (norm <= reach) {
      Point q = p * (r / norm);
      std::vector<double> key(q.data(), q.data() + q.size());
      if (seen_boundary.insert(key).second) out.push_back(std::move(q));
    }
    if (out.size() > cap) throw Error(ErrorKind::SizeCap, "ball net exceeds the size cap; increase h");
    std::size_t a = 0;
    while (a < n && idx[a] == k) idx[a++] = -k;
    if (a == n) break;
    ++idx[a];
  }
  return out;
}

FiniteMetricSpace euclidean_ball_net(std::size_t n, double r, double h, std::size_t cap) {
  return FiniteMetricSpace::euclidean(euclidean_ball_net_points(n, r, h, cap));
}

namespace {

void check_map(const PointMap& f, const FiniteMetricSpace& X, const FiniteMetricSpace& Y) {
  if (f.size() != X.size()) throw Error(ErrorKind::PartialMap, "map is not defined on every point of the domain");
  for (auto y : f) {
    if (y == kUnmapped) throw Error(ErrorKind::PartialMap, "map is not defined on every point of the domain");
    if (y >= Y.size()) throw Error(ErrorKind::InvalidArgument, "map target index out of range");
  }
}

}  // namespace

double distortion(const PointMap& f, const FiniteMetricSpace& X, const FiniteMetricSpace& Y) {
  check_map(f, X, Y);
  double worst = 0.0;
  for (std::size_t i = 0; i < X.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) worst = std::max(worst, std::abs(Y(f[i], f[j]) - X(i, j)));
  }
  return worst;
}

double codensity(const PointMap& f, const FiniteMetricSpace& X, const FiniteMetricSpace& Y) {
  check_map(f, X, Y);
  double worst = 0.0;
  for (std::size_t y = 0; y < Y.size(); ++y) {
    double best = std::numeric_limits<double>::infinity();
    for (auto t : f) best = std::min(best, Y(y, t));
    worst = std::max(worst, best);
  }
  return worst;
}

double gh_upper_via_map(const PointMap& f, const FiniteMetricSpace& X, const FiniteMetricSpace& Y) {
  return 2.0 * std::max(distortion(f, X, Y), codensity(f, X, Y));
}

const char* to_string(BoundMethod m) {
  switch (m) {
    case BoundMethod::ExactEnumeration: return "exact_enumeration";
    case BoundMethod::Subsample: return "subsample";
    case BoundMethod::DistributionBound: return "distribution_bound";
    case BoundMethod::MapBased: return "map_based";
  }
  return "unknown";
}

namespace {

/// Decides whether a correspondence of distortion <= t exists. Every
/// correspondence contains the union of the graphs of some f: X -> Y and
/// g: Y -> X, so the search assigns f first and then g on the points of Y
/// that f misses.
class CorrespondenceSearch {
 public:
  CorrespondenceSearch(const FiniteMetricSpace& X, const FiniteMetricSpace& Y) : X_(X), Y_(Y) {}

  bool feasible(double t) {
    t_ = t;
    pairs_.clear();
    covered_.assign(Y_.size(), 0);
    return assign_f(0);
  }

 private:
  bool compatible(std::size_t x, std::size_t y) const {
    for (const auto& [px, py] : pairs_) {
      if (std::abs(X_(x, px) - Y_(y, py)) > t_) return false;
    }
    return true;
  }

  bool assign_f(std::size_t x) {
    if (x == X_.size()) return assign_g(0);
    for (std::size_t y = 0; y < Y_.size(); ++y) {
      if (!compatible(x, y)) continue;
      pairs_.emplace_back(x, y);
      ++covered_[y];
      if (assign_f(x + 1)) return true;
      --covered_[y];
      pairs_.pop_back();
    }
    return false;
  }

  bool assign_g(std::size_t y) {
    while (y < Y_.size() && covered_[y]) ++y;
    if (y == Y_.size()) return true;
    for (std::size_t x = 0; x < X_.size(); ++x) {
      if (!compatible(x, y)) continue;
      pairs_.emplace_back(x, y);
      if (assign_g(y + 1)) return true;
      pairs_.pop_back();
    }
    return false;
  }

  const FiniteMetricSpace& X_;
  const FiniteMetricSpace& Y_;
  double t_ = 0.0;
  std::vector<std::pair<std::size_t, std::size_t>> pairs_;
  std::vector<int> covered_;
};

}  // namespace

CorrespondenceBound gh_bruteforce(const FiniteMetricSpace& X, const FiniteMetricSpace& Y, std::size_t max_size) {
  if (X.size() == 0 || Y.size() == 0) throw Error(ErrorKind::EmptyInput, "gh_bruteforce: empty space");
  if (X.size() > max_size || Y.size() > max_size) {
    throw Error(ErrorKind::SizeCap, "gh_bruteforce: space size exceeds the cap of " + std::to_string(max_size));
  }
  // The optimal distortion is one of the values |d_X(a,b) - d_Y(c,d)|.
  std::vector<double> candidates;
  for (std::size_t a = 0; a < X.size(); ++a) {
    for (std::size_t b = a; b < X.size(); ++b) {
      for (std::size_t c = 0; c < Y.size(); ++c) {
        for (std::size_t d = c; d < Y.size(); ++d) candidates.push_back(std::abs(X(a, b) - Y(c, d)));
      }
    }
  }
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
  CorrespondenceSearch search(X, Y);
  std::size_t lo = 0;
  std::size_t hi = candidates.size() - 1;  // the largest value is always feasible
  while (lo < hi) {
    const std::size_t mid = lo + (hi - lo) / 2;
    if (search.feasible(candidates[mid])) {
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  const double value = 0.5 * candidates[lo];
  return CorrespondenceBound{value, value, BoundMethod::ExactEnumeration};
}

double gh_diameter_lower_bound(const FiniteMetricSpace& X, const FiniteMetricSpace& Y) {
  return 0.5 * std::abs(X.diameter() - Y.diameter());
}

namespace {

class MapSearch {
 public:
  MapSearch(const FiniteMetricSpace& X, const FiniteMetricSpace& Y, std::size_t budget, double best,
            const std::vector<std::size_t>& first)
      : X_(X), Y_(Y), first_(first), budget_(budget), best_(best), current_(X.size(), kUnmapped) {}

  void run() {
    if (X_.size() <= 1) {
      best_ = 0.0;
      best_map_.assign(X_.size(), 0);
      return;
    }
    descend(0, 0.0);
  }

  double best() const { return best_; }
  const PointMap& best_map() const { return best_map_; }
  bool exhausted() const { return out_of_budget_; }
  std::size_t nodes() const { return nodes_; }

 private:
  void descend(std::size_t k, double cur) {
    if (k == X_.size()) {
      best_ = cur;
      best_map_ = current_;
      return;
    }
    std::vector<std::pair<double, std::size_t>> options;
    const bool restricted = k == 0 && !first_.empty();
    const std::size_t count = restricted ? first_.size() : Y_.size();
    for (std::size_t c = 0; c < count; ++c) {
      const std::size_t y = restricted ? first_[c] : c;
      double v = cur;
      for (std::size_t j = 0; j < k && v < best_; ++j) v = std::max(v, std::abs(Y_(y, current_[j]) - X_(k, j)));
      if (v < best_) options.emplace_back(v, y);
    }
    nodes_ += count;
    if (nodes_ > budget_) {
      out_of_budget_ = true;
      return;
    }
    std::sort(options.begin(), options.end());
    for (const auto& [v, y] : options) {
      if (out_of_budget_) return;
      if (v >= best_) break;
      current_[k] = y;
      descend(k + 1, v);
    }
    current_[k] = kUnmapped;
  }

  const FiniteMetricSpace& X_;
  const FiniteMetricSpace& Y_;
  const std::vector<std::size_t>& first_;
  std::size_t budget_;
  double best_;
  PointMap current_;
  PointMap best_map_;
  std::size_t nodes_ = 0;
  bool out_of_budget_ = false;
};

}  // namespace

MinDistortionResult min_distortion_map(const FiniteMetricSpace& X, const FiniteMetricSpace& Y,
                                       std::size_t node_budget, double initial_upper,
                                       const std::vector<std::size_t>& first_choices) {
  if (X.size() == 0 || Y.size() == 0) throw Error(ErrorKind::EmptyInput, "min_distortion_map: empty space");
  // Strict pruning would discard a map achieving exactly the seed value.
  const double seed = std::isfinite(initial_upper) ? initial_upper * (1.0 + 1e-12) + 1e-300
                                                    : std::numeric_limits<double>::infinity();
  for (auto y : first_choices) {
    if (y >= Y.size()) throw Error(ErrorKind::InvalidArgument, "first choice index out of range");
  }
  MapSearch search(X, Y, node_budget, seed, first_choices);
  search.run();
  MinDistortionResult out;
  out.nodes = search.nodes();
  out.exact = !search.exhausted();
  out.map = search.best_map();
  out.value = out.map.empty() ? initial_upper : search.best();
  return out;
}

}  // namespace flatness
