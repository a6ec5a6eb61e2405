#include "flatness/intrinsic.hpp"

#include "flatness/extrinsic.hpp"
#include "flatness/kdtree.hpp"
#include "flatness/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace flatness {

namespace {

void check_center(const PointCloud& cloud, const Point& x, std::size_t n) {
  if (static_cast<std::size_t>(x.size()) != cloud.dim()) {
    throw Error(ErrorKind::DimensionMismatch, "center dimension differs from the cloud dimension");
  }
  if (n < 1 || n >= cloud.dim()) throw Error(ErrorKind::InvalidArgument, "need 1 <= n < d");
}

/// Plane coordinates F^T (y - x), radially clamped into the closed r-ball.
/// Returns the largest clamp displacement.
double project_into_ball(const std::vector<Point>& pts, const AffinePlane& plane, const Point& x, double r,
                         std::vector<Point>& image) {
  image.clear();
  image.reserve(pts.size());
  double clamp = 0.0;
  for (const auto& y : pts) {
    Point c = plane.frame().transpose() * (y - x);
    const double norm = c.norm();
    if (norm > r) {
      clamp = std::max(clamp, norm - r);
      c *= r / norm;
    }
    image.push_back(std::move(c));
  }
  return clamp;
}

struct PairScan {
  double distortion = 0.0;
  double diameter = 0.0;
};

/// sup over pairs of | |f(y)-f(z)| - |y-z| | and the diameter of the domain.
PairScan scan_pairs(const std::vector<Point>& domain, const std::vector<Point>& image) {
  const std::size_t m = domain.size();
  const std::size_t block = 64;
  const std::size_t blocks = (m + block - 1) / block;
  std::vector<PairScan> partial(blocks);
  parallel_for(blocks, [&](std::size_t b) {
    PairScan s;
    const std::size_t end = std::min(m, (b + 1) * block);
    for (std::size_t i = b * block; i < end; ++i) {
      for (std::size_t j = 0; j < i; ++j) {
        const double dx = (domain[i] - domain[j]).norm();
        const double dy = (image[i] - image[j]).norm();
        s.distortion = std::max(s.distortion, std::abs(dx - dy));
        s.diameter = std::max(s.diameter, dx);
      }
    }
    partial[b] = s;
  });
  PairScan out;
  for (const auto& s : partial) {
    out.distortion = std::max(out.distortion, s.distortion);
    out.diameter = std::max(out.diameter, s.diameter);
  }
  return out;
}

double max_nearest_distance(const std::vector<Point>& queries, const KdTree& tree) {
  const std::size_t block = 1024;
  const std::size_t blocks = (queries.size() + block - 1) / block;
  std::vector<double> partial(blocks, 0.0);
  parallel_for(blocks, [&](std::size_t b) {
    const std::size_t end = std::min(queries.size(), (b + 1) * block);
    double worst = 0.0;
    for (std::size_t i = b * block; i < end; ++i) worst = std::max(worst, tree.nearest(queries[i]).distance);
    partial[b] = worst;
  });
  return partial.empty() ? 0.0 : *std::max_element(partial.begin(), partial.end());
}

std::vector<Point> ball_net(std::size_t n, double r, double& h) {
  while (true) {
    try {
      return euclidean_ball_net_points(n, r, h);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::SizeCap) throw;
      h *= 1.5;
    }
  }
}

/// Net points in the fundamental domain 0 <= y_1 <= ... <= y_n of the
/// coordinate sign and permutation symmetries, which the ball net shares.
std::vector<std::size_t> fundamental_domain(const std::vector<Point>& net) {
  std::vector<std::size_t> out;
  const double tol = 1e-12;
  for (std::size_t k = 0; k < net.size(); ++k) {
    const Point& y = net[k];
    bool keep = y[0] >= -tol;
    for (Eigen::Index a = 1; keep && a < y.size(); ++a) keep = y[a] >= y[a - 1] - tol;
    if (keep) out.push_back(k);
  }
  return out;
}

std::vector<Point> pick(const std::vector<Point>& pts, const std::vector<std::size_t>& idx) {
  std::vector<Point> out;
  out.reserve(idx.size());
  for (auto i : idx) out.push_back(pts[i]);
  return out;
}

double default_net_resolution(const DyadicConfig& cfg, double spacing, double r) {
  return cfg.net_resolution > 0 ? cfg.net_resolution : std::max(spacing, r / 200.0);
}

}  // namespace

ProjectionIsometry projection_isometry(const PointCloud& cloud, const Point& x, double r, std::size_t n,
                                       const IntrinsicOptions& opts, const GrassmannSearchConfig& search) {
  check_center(cloud, x, n);
  if (!(opts.theta_constant > 0)) throw Error(ErrorKind::InvalidArgument, "theta constant must be positive");
  check_scale_floor(cloud, r, opts.floor_factor);

  const ExtrinsicEstimate here = estimate_extrinsic(cloud, x, r, n, search, true, opts.floor_factor);
  bool gate = here.alpha->hi <= opts.alpha_gate;
  ThetaCertificate cert;
  cert.C_used = opts.theta_constant;
  cert.alpha_used = here.alpha->hi;
  for (int k = -2; k <= opts.max_halvings; ++k) {
    const double radius = std::ldexp(r, -k);
    if (radius < opts.floor_factor * cloud.spacing()) break;
    if (k == 0) {
      cert.beta_inputs.push_back(here.beta.hi);
      continue;
    }
    const bool with_alpha = k < 0;
    const ExtrinsicEstimate e = estimate_extrinsic(cloud, x, radius, n, search, with_alpha, opts.floor_factor);
    if (with_alpha) gate = gate && e.alpha->hi <= opts.alpha_gate;
    cert.beta_inputs.push_back(e.beta.hi);
  }
  if (!gate && opts.enforce_gate) {
    throw Error(ErrorKind::Hypothesis, "projection_isometry: alpha exceeds the gate at one of the scales 4r, 2r, r");
  }

  // β_inputs[m] is β at scale index m-2; the sup runs over j = m-2 >= 0.
  double sup = 0.0;
  double partial = 0.0;
  int last_j = -1;
  for (std::size_t m = 0; m < cert.beta_inputs.size(); ++m) {
    partial += cert.beta_inputs[m];
    const int j = static_cast<int>(m) - 2;
    if (j < 0) continue;
    sup = std::max(sup, partial * partial / std::ldexp(1.0, j));
    last_j = j;
  }
  if (last_j >= 0) {
    const double b_last = cert.beta_inputs.back();
    double tail = 0.0;
    for (int extra = 1; extra <= 256; ++extra) {
      const double s = partial + extra * b_last;
      tail = std::max(tail, s * s / std::ldexp(1.0, last_j + extra));
    }
    cert.tail_bound = opts.theta_constant * opts.theta_constant * tail;
    cert.truncated = tail > sup;
  } else {
    cert.truncated = true;
  }
  cert.theta = opts.theta_constant * opts.theta_constant * sup;
  cert.theta_prime = std::max(cert.theta, opts.theta_constant * cert.alpha_used * cert.alpha_used);

  ProjectionIsometry out{here.beta_plane, cloud.ball_indices(x, r), {}, cert, 0.0, 0.0, gate, *here.alpha};
  const std::vector<Point> domain = pick(cloud.points(), out.domain);
  out.clamp_displacement = project_into_ball(domain, out.plane, x, r, out.image);
  out.measured_distortion = scan_pairs(domain, out.image).distortion;
  return out;
}

IntrinsicEstimate estimate_intrinsic(const PointCloud& cloud, const Point& x, double r, std::size_t n,
                                     const DyadicConfig& cfg, const GrassmannSearchConfig& search) {
  check_center(cloud, x, n);
  check_scale_floor(cloud, r, cfg.scale_floor_factor);
  IntrinsicEstimate out;
  double h = default_net_resolution(cfg, cloud.spacing(), r);
  if (!(h < r)) throw Error(ErrorKind::InvalidArgument, "net resolution must be below the radius");

  const ExtrinsicEstimate ext = estimate_extrinsic(cloud, x, r, n, search, false, cfg.scale_floor_factor);
  const std::vector<std::size_t> ball = cloud.ball_indices(x, r);
  out.ball_size = ball.size();
  std::vector<Point> domain = pick(cloud.points(), ball);
  double delta = 0.0;
  if (domain.size() > cfg.ball_point_cap) {
    std::size_t start = 0;
    for (std::size_t k = 0; k < domain.size(); ++k) {
      if ((domain[k] - x).squaredNorm() < (domain[start] - x).squaredNorm()) start = k;
    }
    const auto fps = farthest_point_sample(domain, start, cfg.ball_point_cap);
    delta = fps.covering_radius;
    domain = pick(domain, fps.indices);
  }
  out.coarsening = delta;

  std::vector<Point> image;
  project_into_ball(domain, ext.beta_plane, x, r, image);
  const PairScan scan = scan_pairs(domain, image);
  out.map_distortion = scan.distortion;

  const std::vector<Point> net = ball_net(n, r, h);
  out.net_resolution = h;
  out.map_codensity = max_nearest_distance(net, KdTree(image));

  const double a_hi = (2.0 * std::max(out.map_distortion, out.map_codensity) + h + delta) / r;
  const double b_hi = (out.map_distortion + 2.0 * delta) / r;

  // Diameter: d_GH(X, B_r) >= |diam X - 2r| / 2 and diam X <= diam X' + 2δ.
  out.lo_diameter = std::max(0.0, 0.5 * (2.0 * r - scan.diameter - 2.0 * delta)) / r;

  // Exact GH of farthest-point subsamples, less both covering radii.
  std::mt19937_64 rng(cfg.seed);
  std::size_t net_center = 0;
  for (std::size_t k = 0; k < net.size(); ++k) {
    if (net[k].squaredNorm() < net[net_center].squaredNorm()) net_center = k;
  }
  double best_sub = 0.0;
  for (int draw = 0; draw < 20; ++draw) {
    const std::size_t sx = draw == 0 ? 0 : static_cast<std::size_t>(rng() % domain.size());
    const std::size_t sy = draw == 0 ? net_center : static_cast<std::size_t>(rng() % net.size());
    const auto fx = farthest_point_sample(domain, sx, 7);
    const auto fy = farthest_point_sample(net, sy, 7);
    const CorrespondenceBound gh = gh_bruteforce(FiniteMetricSpace::euclidean(pick(domain, fx.indices)),
                                                 FiniteMetricSpace::euclidean(pick(net, fy.indices)));
    best_sub = std::max(best_sub, gh.lower - (fx.covering_radius + delta) - (fy.covering_radius + h));
  }
  out.lo_subsample_gh = best_sub / r;

  // Least distortion of maps from a small subsample into a coarse net. The
  // restriction of any map on the ball has no larger distortion, and snapping
  // into the net costs at most 2 h_c.
  const double coarse_fraction = n == 1 ? 64.0 : (n == 2 ? 16.0 : 8.0);
  double h_c = std::max(h, r / coarse_fraction);
  const std::vector<Point> coarse = ball_net(n, r, h_c);
  const FiniteMetricSpace coarse_space = FiniteMetricSpace::euclidean(coarse);
  const std::vector<std::size_t> first = fundamental_domain(coarse);
  const KdTree coarse_tree(coarse);
  double map_lo = 0.0;
  for (std::size_t k = std::min<std::size_t>(6, domain.size()); k >= 2; --k) {
    const auto fx = farthest_point_sample(domain, 0, k);
    const FiniteMetricSpace sub = FiniteMetricSpace::euclidean(pick(domain, fx.indices));
    PointMap snapped;
    for (auto i : fx.indices) snapped.push_back(coarse_tree.nearest(image[i]).index);
    const double seed = distortion(snapped, sub, coarse_space);
    const MinDistortionResult res = min_distortion_map(sub, coarse_space, 20'000'000, seed, first);
    if (res.exact) {
      map_lo = res.value * (1.0 - 1e-12);
      out.map_search_exact = true;
      break;
    }
  }
  out.lo_map = std::max(0.0, 0.5 * map_lo - h_c) / r;
  const double b_lo = std::max(0.0, map_lo - 2.0 * h_c) / r;

  const double a_lo = std::max({out.lo_diameter, out.lo_subsample_gh, out.lo_map});
  out.a = Bracket::make(std::min(a_lo, a_hi), a_hi, true);
  out.b = Bracket::make(std::min(b_lo, b_hi), b_hi, true);
  return out;
}

Bracket a_number(const PointCloud& cloud, const Point& x, double r, std::size_t n, const DyadicConfig& cfg,
                 const GrassmannSearchConfig& search) {
  return estimate_intrinsic(cloud, x, r, n, cfg, search).a;
}

Bracket b_number(const PointCloud& cloud, const Point& x, double r, std::size_t n, const DyadicConfig& cfg,
                 const GrassmannSearchConfig& search) {
  return estimate_intrinsic(cloud, x, r, n, cfg, search).b;
}

std::vector<std::size_t> intrinsic_centers(const PointCloud& cloud, const DyadicConfig& cfg) {
  cfg.validate();
  if (cfg.n >= cloud.dim()) throw Error(ErrorKind::InvalidArgument, "profile dimension n must be < d");
  std::vector<std::size_t> centers = select_centers(cloud, 1.0 - cfg.eps_margin, cfg.center_sample_cap);
  if (centers.empty()) throw Error(ErrorKind::EmptyInput, "the cloud does not meet B_{1-eps}(0)");
  return centers;
}

ScaleRecord intrinsic_scale_record(const PointCloud& cloud, const DyadicConfig& cfg, int i,
                                   const std::vector<std::size_t>& centers, const GrassmannSearchConfig& search) {
  ScaleRecord rec;
  rec.i = i;
  rec.r = cfg.scale(i);
  if (rec.r < cfg.scale_floor_factor * cloud.spacing()) {
    rec.below_floor = true;
    rec.notes.push_back("below scale floor");
    return rec;
  }
  std::vector<IntrinsicEstimate> results(centers.size());
  parallel_for(centers.size(), [&](std::size_t k) {
    results[k] = estimate_intrinsic(cloud, cloud[centers[k]], rec.r, cfg.n, cfg, search);
  });
  Bracket a{0, 0, true};
  Bracket b{0, 0, true};
  for (const auto& res : results) {
    a.lo = std::max(a.lo, res.a.lo);
    a.hi = std::max(a.hi, res.a.hi);
    b.lo = std::max(b.lo, res.b.lo);
    b.hi = std::max(b.hi, res.b.hi);
  }
  rec.a = a;
  rec.b = b;
  rec.intrinsic_centers = centers.size();
  return rec;
}

FlatnessProfile dyadic_profile_intrinsic(const PointCloud& cloud, const DyadicConfig& cfg,
                                         const GrassmannSearchConfig& search) {
  search.validate();
  const std::vector<std::size_t> centers = intrinsic_centers(cloud, cfg);
  FlatnessProfile profile;
  profile.config = cfg;
  profile.cloud_size = cloud.size();
  profile.dim = cloud.dim();
  profile.spacing = cloud.spacing();
  for (int i = cfg.i_min; i <= cfg.i_max; ++i) {
    profile.scales.push_back(intrinsic_scale_record(cloud, cfg, i, centers, search));
  }
  return profile;
}

}  // namespace flatness
