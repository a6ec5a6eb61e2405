#include "flatness/grassmann_search.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>
#include <random>

namespace flatness {

void GrassmannSearchConfig::validate() const {
  if (restarts < 1) throw Error(ErrorKind::InvalidArgument, "GrassmannSearchConfig: restarts must be >= 1");
  if (!(grid_resolution > 0)) throw Error(ErrorKind::InvalidArgument, "GrassmannSearchConfig: grid_resolution must be > 0");
  if (!(convergence_slack >= 0 && convergence_slack < 1)) {
    throw Error(ErrorKind::InvalidArgument, "GrassmannSearchConfig: convergence_slack must lie in [0,1)");
  }
  if (!(alpha_net_fraction > 0 && alpha_net_fraction < 1)) {
    throw Error(ErrorKind::InvalidArgument, "GrassmannSearchConfig: alpha_net_fraction must lie in (0,1)");
  }
}

bool GrassmannSearchConfig::certifies(std::size_t n, std::size_t d) const {
  const bool supported = (n == 1 && (d == 2 || d == 3)) || (n == 2 && d == 3);
  return supported && n <= certify_max_n && d <= certify_max_d;
}

// ---------------------------------------------------------------------------
// Canonical local sample

AffinePlane LocalSample::plane(const Eigen::MatrixXd& canonical_frame) const {
  return AffinePlane(center, axes * canonical_frame);
}

Eigen::MatrixXd LocalSample::canonical(const Eigen::MatrixXd& ambient_frame) const {
  return axes.transpose() * ambient_frame;
}

LocalSample make_local_sample(const PointCloud& cloud, const Point& x, double r) {
  if (!(r > 0)) throw Error(ErrorKind::InvalidArgument, "radius must be positive");
  LocalSample out;
  out.center = x;
  out.radius = r;
  out.indices = cloud.ball_indices(x, r);
  if (out.indices.empty()) throw Error(ErrorKind::EmptyInput, "ball S ∩ B_r(x) is empty");
  const auto d = static_cast<Eigen::Index>(cloud.dim());
  Eigen::MatrixXd raw(d, static_cast<Eigen::Index>(out.indices.size()));
  for (std::size_t k = 0; k < out.indices.size(); ++k) {
    raw.col(static_cast<Eigen::Index>(k)) = (cloud[out.indices[k]] - x) / r;
  }
  const Eigen::MatrixXd moment = raw * raw.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(moment);
  Eigen::MatrixXd axes = eig.eigenvectors().rowwise().reverse();
  const Eigen::MatrixXd proj = axes.transpose() * raw;
  for (Eigen::Index j = 0; j < d; ++j) {
    const double third = proj.row(j).array().cube().sum();
    const double scale = proj.row(j).array().abs().cube().sum();
    if (third < -1e-9 * scale) axes.col(j) = -axes.col(j);
  }
  out.axes = axes;
  out.coords = axes.transpose() * raw;
  out.max_norm = out.coords.colwise().norm().maxCoeff();
  return out;
}

double sup_distance(const Eigen::MatrixXd& coords, const Eigen::MatrixXd& frame) {
  if (coords.cols() == 0) return 0.0;
  const Eigen::MatrixXd resid = coords - frame * (frame.transpose() * coords);
  return resid.colwise().norm().maxCoeff();
}

std::vector<Eigen::VectorXd> unit_ball_net(std::size_t n, double h) {
  if (n == 0 || !(h > 0)) throw Error(ErrorKind::InvalidArgument, "unit_ball_net: need n >= 1 and h > 0");
  const double step = 2.0 * h / std::sqrt(static_cast<double>(n));
  const double reach = 1.0 + h;
  const long k_max = static_cast<long>(std::ceil(reach / step));
  std::vector<Eigen::VectorXd> net;
  std::vector<long> idx(n, -k_max);
  while (true) {
    Eigen::VectorXd c(static_cast<Eigen::Index>(n));
    for (std::size_t j = 0; j < n; ++j) c(static_cast<Eigen::Index>(j)) = static_cast<double>(idx[j]) * step;
    const double norm = c.norm();
    if (norm <= reach) {
      if (norm > 1.0) c /= norm;
      net.push_back(std::move(c));
    }
    std::size_t j = 0;
    while (j < n && ++idx[j] > k_max) idx[j++] = -k_max;
    if (j == n) break;
  }
  return net;
}

CoverageEvaluator::CoverageEvaluator(const Eigen::MatrixXd& coords, std::size_t n, double h)
    : net_(unit_ball_net(n, h)), h_(h) {
  std::vector<Eigen::VectorXd> pts;
  pts.reserve(static_cast<std::size_t>(coords.cols()));
  for (Eigen::Index k = 0; k < coords.cols(); ++k) pts.emplace_back(coords.col(k));
  tree_ = KdTree(std::move(pts));
}

double CoverageEvaluator::operator()(const Eigen::MatrixXd& frame) const {
  double worst = 0.0;
  Eigen::VectorXd p(frame.rows());
  for (const auto& c : net_) {
    p.noalias() = frame * c;
    worst = std::max(worst, tree_.nearest(p).distance);
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Branch and bound over lines / hyperplanes in R^2 and R^3

namespace {

constexpr double kPi = std::numbers::pi;

Eigen::MatrixXd frame_from_params(std::size_t n, std::size_t d, double a, double b) {
  if (d == 2) {
    Eigen::MatrixXd f(2, 1);
    f << std::cos(a), std::sin(a);
    return f;
  }
  const Eigen::Vector3d u(std::sin(a) * std::cos(b), std::sin(a) * std::sin(b), std::cos(a));
  if (n == 1) return Eigen::MatrixXd(u);
  // Hyperplane with normal u; complete deterministically.
  Eigen::Index k = 0;
  u.cwiseAbs().minCoeff(&k);
  Eigen::Vector3d e = Eigen::Vector3d::Zero();
  e(k) = 1.0;
  const Eigen::Vector3d f1 = (e - u(k) * u).normalized();
  const Eigen::Vector3d f2 = u.cross(f1);
  Eigen::MatrixXd f(3, 2);
  f.col(0) = f1;
  f.col(1) = f2;
  return f;
}

struct Cell {
  double a0, a1, b0, b1;
  double lb;
  double radius;
  std::size_t id;
};

struct CellOrder {
  bool operator()(const Cell& x, const Cell& y) const {
    if (x.lb != y.lb) return x.lb > y.lb;
    return x.id > y.id;
  }
};

double cell_radius(std::size_t d, const Cell& c) {
  if (d == 2) return 0.5 * (c.a1 - c.a0);
  return 0.5 * (c.a1 - c.a0) + std::sin(std::min(c.a1, 0.5 * kPi)) * 0.5 * (c.b1 - c.b0);
}

}  // namespace

SearchOutcome branch_and_bound(std::size_t n, std::size_t d, const PlaneObjective& f, double lipschitz,
                               double resolution, std::size_t max_cells) {
  if (!((n == 1 && (d == 2 || d == 3)) || (n == 2 && d == 3))) {
    throw Error(ErrorKind::InvalidArgument, "branch_and_bound: unsupported (n, d)");
  }
  SearchOutcome out;
  out.hi = std::numeric_limits<double>::infinity();
  std::priority_queue<Cell, std::vector<Cell>, CellOrder> heap;
  std::size_t next_id = 0;

  auto evaluate = [&](Cell c, double parent_lb) {
    const double a = 0.5 * (c.a0 + c.a1);
    const double b = 0.5 * (c.b0 + c.b1);
    const Eigen::MatrixXd frame = frame_from_params(n, d, a, b);
    const ObjectiveValue v = f(frame);
    ++out.evaluations;
    if (v.upper < out.hi) {
      out.hi = v.upper;
      out.frame = frame;
    }
    c.radius = cell_radius(d, c);
    c.lb = std::max(parent_lb, v.lower - lipschitz * c.radius);
    c.id = next_id++;
    heap.push(c);
  };

  const double lowest = -std::numeric_limits<double>::infinity();
  if (d == 2) {
    // Lines through the origin: direction angle in [0, pi).
    constexpr int kInitial = 8;
    for (int k = 0; k < kInitial; ++k) {
      evaluate(Cell{kPi * k / kInitial, kPi * (k + 1) / kInitial, 0, 0, 0, 0, 0}, lowest);
    }
  } else {
    // Upper hemisphere: polar angle in [0, pi/2], azimuth in [0, 2 pi).
    constexpr int kPolar = 4;
    constexpr int kAzimuth = 8;
    for (int i = 0; i < kPolar; ++i) {
      for (int j = 0; j < kAzimuth; ++j) {
        evaluate(Cell{0.5 * kPi * i / kPolar, 0.5 * kPi * (i + 1) / kPolar, 2 * kPi * j / kAzimuth,
                      2 * kPi * (j + 1) / kAzimuth, 0, 0, 0},
                 lowest);
      }
    }
  }

  out.lo = out.hi;
  while (!heap.empty()) {
    const Cell top = heap.top();
    if (top.lb >= out.hi || top.radius <= resolution || next_id >= max_cells) {
      out.lo = std::min(std::max(top.lb, 0.0), out.hi);
      break;
    }
    heap.pop();
    Cell first = top;
    Cell second = top;
    const bool split_a = d == 2 || 0.5 * (top.a1 - top.a0) >= std::sin(std::min(top.a1, 0.5 * kPi)) * 0.5 * (top.b1 - top.b0);
    if (split_a) {
      const double mid = 0.5 * (top.a0 + top.a1);
      first.a1 = mid;
      second.a0 = mid;
    } else {
      const double mid = 0.5 * (top.b0 + top.b1);
      first.b1 = mid;
      second.b0 = mid;
    }
    evaluate(first, top.lb);
    evaluate(second, top.lb);
  }
  out.cells = next_id;
  out.certified = true;
  return out;
}

// ---------------------------------------------------------------------------
// Local search

namespace {

void rotate_columns(Eigen::MatrixXd& q, Eigen::Index a, Eigen::Index b, double t) {
  const double c = std::cos(t);
  const double s = std::sin(t);
  const Eigen::VectorXd qa = q.col(a);
  q.col(a) = c * qa + s * q.col(b);
  q.col(b) = -s * qa + c * q.col(b);
}

/// Orthogonal matrix from a skew generator via the Cayley transform.
Eigen::MatrixXd cayley(const Eigen::MatrixXd& skew) {
  const auto d = skew.rows();
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(d, d);
  return (id - 0.5 * skew).partialPivLu().solve(id + 0.5 * skew);
}

Eigen::MatrixXd complete_basis(const Eigen::MatrixXd& frame) {
  const auto d = frame.rows();
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(frame);
  Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(d, d);
  q.leftCols(frame.cols()) = frame;
  return q;
}

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

struct Descent {
  Eigen::MatrixXd q;
  double value;
};

Descent coordinate_descent(std::size_t n, std::size_t d, const PlaneObjective& f, Eigen::MatrixXd q,
                           std::size_t max_iterations, std::mt19937_64& rng, std::size_t& evals) {
  const auto nn = static_cast<Eigen::Index>(n);
  const auto dd = static_cast<Eigen::Index>(d);
  double value = f(q.leftCols(nn)).upper;
  ++evals;
  double step = 0.25;
  std::normal_distribution<double> gauss;
  for (std::size_t it = 0; it < max_iterations && step > 1e-13; ++it) {
    bool improved = false;
    for (Eigen::Index a = 0; a < nn; ++a) {
      for (Eigen::Index b = nn; b < dd; ++b) {
        for (double sign : {1.0, -1.0}) {
          Eigen::MatrixXd trial = q;
          rotate_columns(trial, a, b, sign * step);
          const double v = f(trial.leftCols(nn)).upper;
          ++evals;
          if (v < value) {
            value = v;
            q = std::move(trial);
            improved = true;
            break;
          }
        }
      }
    }
    // Joint moves get past kinks where every single-angle move is uphill.
    for (int k = 0; k < 2; ++k) {
      Eigen::MatrixXd skew = Eigen::MatrixXd::Zero(dd, dd);
      for (Eigen::Index a = 0; a < nn; ++a) {
        for (Eigen::Index b = nn; b < dd; ++b) {
          const double w = gauss(rng);
          skew(a, b) = w;
          skew(b, a) = -w;
        }
      }
      const double norm = skew.norm();
      if (norm == 0) continue;
      Eigen::MatrixXd trial = q * cayley(skew * (step / norm));
      const double v = f(trial.leftCols(nn)).upper;
      ++evals;
      if (v < value) {
        value = v;
        q = std::move(trial);
        improved = true;
      }
    }
    if (!improved) step *= 0.5;
  }
  // Re-orthonormalize to keep the frame invariant exact.
  q = gram_schmidt(q);
  const double final_value = f(q.leftCols(nn)).upper;
  return Descent{std::move(q), final_value};
}

}  // namespace

SearchOutcome local_search(std::size_t n, std::size_t d, const PlaneObjective& f, const GrassmannSearchConfig& cfg,
                           const std::vector<Eigen::MatrixXd>& extra_seeds) {
  SearchOutcome out;
  out.hi = std::numeric_limits<double>::infinity();
  const auto dd = static_cast<Eigen::Index>(d);
  auto consider = [&](const Descent& r) {
    if (r.value < out.hi) {
      out.hi = r.value;
      out.frame = r.q.leftCols(static_cast<Eigen::Index>(n));
    }
  };
  for (std::size_t k = 0; k < cfg.restarts; ++k) {
    std::mt19937_64 rng(splitmix(cfg.seed + k));
    Eigen::MatrixXd q = Eigen::MatrixXd::Identity(dd, dd);
    if (k > 0) {
      std::normal_distribution<double> gauss(0.0, 0.6);
      Eigen::MatrixXd skew = Eigen::MatrixXd::Zero(dd, dd);
      for (Eigen::Index a = 0; a < dd; ++a) {
        for (Eigen::Index b = a + 1; b < dd; ++b) {
          const double w = gauss(rng);
          skew(a, b) = w;
          skew(b, a) = -w;
        }
      }
      q = cayley(skew);
    }
    consider(coordinate_descent(n, d, f, q, cfg.max_iterations, rng, out.evaluations));
  }
  for (std::size_t k = 0; k < extra_seeds.size(); ++k) {
    std::mt19937_64 rng(splitmix(cfg.seed ^ (0xabcdefULL + k)));
    consider(coordinate_descent(n, d, f, complete_basis(gram_schmidt(extra_seeds[k])), cfg.max_iterations, rng,
                                out.evaluations));
  }
  out.lo = out.hi * (1.0 - cfg.convergence_slack);
  out.certified = false;
  return out;
}

}  // namespace flatness
