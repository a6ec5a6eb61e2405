#include "flatness/extrinsic.hpp"

#include "flatness/kdtree.hpp"
#include "flatness/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>

namespace flatness {

void check_scale_floor(const PointCloud& cloud, double r, double floor_factor) {
  if (!(r > 0)) throw Error(ErrorKind::InvalidArgument, "radius must be positive");
  if (r < floor_factor * cloud.spacing()) {
    throw Error(ErrorKind::ScaleFloor, "radius " + std::to_string(r) + " is below the scale floor " +
                                           std::to_string(floor_factor) + " x spacing = " +
                                           std::to_string(floor_factor * cloud.spacing()));
  }
}

namespace {

void check_dims(const PointCloud& cloud, const Point& x, std::size_t n) {
  if (static_cast<std::size_t>(x.size()) != cloud.dim()) {
    throw Error(ErrorKind::DimensionMismatch, "center dimension differs from the cloud dimension");
  }
  if (n < 1 || n >= cloud.dim()) throw Error(ErrorKind::InvalidArgument, "need 1 <= n < d");
}

/// Net resolution (relative to r) for alpha's plane-ball term.
double alpha_net_fraction(const PointCloud& cloud, double r, const GrassmannSearchConfig& cfg) {
  return std::min(cfg.alpha_net_fraction, 0.5 * cloud.spacing() / r);
}

}  // namespace

ExtrinsicEstimate estimate_extrinsic(const PointCloud& cloud, const Point& x, double r, std::size_t n,
                                     const GrassmannSearchConfig& cfg, bool with_alpha, double floor_factor) {
  cfg.validate();
  check_dims(cloud, x, n);
  check_scale_floor(cloud, r, floor_factor);
  const LocalSample local = make_local_sample(cloud, x, r);
  const std::size_t d = cloud.dim();
  const double lipschitz = std::max(1.0, local.max_norm);
  const bool certify = cfg.certifies(n, d);

  const PlaneObjective beta_objective = [&](const Eigen::MatrixXd& frame) {
    const double v = sup_distance(local.coords, frame);
    return ObjectiveValue{v, v};
  };

  SearchOutcome beta;
  if (certify) {
    beta = branch_and_bound(n, d, beta_objective, lipschitz, cfg.grid_resolution, cfg.max_cells);
    const SearchOutcome polish = local_search(n, d, beta_objective, cfg, {beta.frame});
    if (polish.hi < beta.hi) {
      beta.hi = polish.hi;
      beta.frame = polish.frame;
    }
  } else {
    beta = local_search(n, d, beta_objective, cfg);
  }

  ExtrinsicEstimate out{Bracket{}, std::nullopt, local.plane(beta.frame), std::nullopt, 0.0, local.size()};
  if (!with_alpha) {
    out.beta = Bracket::make(beta.lo, beta.hi, beta.certified);
    return out;
  }

  const double h_rel = alpha_net_fraction(cloud, r, cfg);
  const double h_coarse = std::max(h_rel, 1.0 / 32.0);
  const CoverageEvaluator fine(local.coords, n, h_rel);
  const std::optional<CoverageEvaluator> coarse =
      h_coarse > h_rel ? std::optional<CoverageEvaluator>(std::in_place, local.coords, n, h_coarse) : std::nullopt;

  double best_upper = std::numeric_limits<double>::infinity();
  const PlaneObjective alpha_objective = [&](const Eigen::MatrixXd& frame) {
    const double b = sup_distance(local.coords, frame);
    if (coarse) {
      // The coarse net is a subset-style lower estimate; skip the fine net
      // when the plane cannot compete with the best value found so far.
      const double c = (*coarse)(frame);
      if (std::max(b, c) - coarse->resolution() > best_upper) {
        return ObjectiveValue{std::max(b, c), std::max(b, c + h_coarse)};
      }
    }
    const double c = fine(frame);
    const ObjectiveValue v{std::max(b, c), std::max(b, c + h_rel)};
    best_upper = std::min(best_upper, v.upper);
    return v;
  };

  SearchOutcome alpha;
  if (certify) {
    alpha = branch_and_bound(n, d, alpha_objective, lipschitz, std::max(cfg.grid_resolution, 0.25 * h_rel),
                             cfg.max_cells);
  } else {
    GrassmannSearchConfig light = cfg;
    light.restarts = std::max<std::size_t>(1, cfg.restarts / 2);
    alpha = local_search(n, d, alpha_objective, light, {beta.frame});
  }

  // α ≥ β pointwise in the plane, so both searches inform each other.
  const double beta_at_alpha = sup_distance(local.coords, alpha.frame);
  if (beta_at_alpha < beta.hi) {
    beta.hi = beta_at_alpha;
    beta.frame = alpha.frame;
    if (!beta.certified) beta.lo = beta.hi * (1.0 - cfg.convergence_slack);
  }
  out.beta = Bracket::make(beta.lo, beta.hi, beta.certified);
  out.beta_plane = local.plane(beta.frame);
  const double alpha_lo = std::max(alpha.lo, out.beta.certified ? out.beta.lo : 0.0);
  out.alpha = Bracket::make(std::min(alpha_lo, alpha.hi), alpha.hi, alpha.certified);
  out.alpha_plane = local.plane(alpha.frame);
  out.alpha_net_resolution = h_rel * r;
  return out;
}

Bracket beta_number(const PointCloud& cloud, const Point& x, double r, std::size_t n,
                    const GrassmannSearchConfig& cfg) {
  return estimate_extrinsic(cloud, x, r, n, cfg, false).beta;
}

Bracket alpha_number(const PointCloud& cloud, const Point& x, double r, std::size_t n,
                     const GrassmannSearchConfig& cfg) {
  return *estimate_extrinsic(cloud, x, r, n, cfg, true).alpha;
}

double plane_hausdorff_upper(const PointCloud& cloud, const AffinePlane& plane, const Point& x, double r,
                             double net_resolution) {
  if (point_plane_distance(x, plane) > kMembershipTolerance * std::max(1.0, x.norm())) {
    throw Error(ErrorKind::NotOnPlane, "plane_hausdorff_upper: plane must contain the center");
  }
  const LocalSample local = make_local_sample(cloud, x, r);
  const Eigen::MatrixXd frame = local.canonical(plane.frame());
  const double h_rel = net_resolution / r;
  const CoverageEvaluator cover(local.coords, plane.n(), h_rel);
  return std::max(sup_distance(local.coords, frame), cover(frame) + h_rel);
}

RealizingPlane realizing_plane(const PointCloud& cloud, const Point& x, double r, std::size_t n,
                               const GrassmannSearchConfig& cfg, double alpha_gate) {
  const ExtrinsicEstimate est = estimate_extrinsic(cloud, x, r, n, cfg, true);
  if (est.alpha->hi > alpha_gate) {
    throw Error(ErrorKind::Hypothesis, "realizing_plane: alpha(x,r) = " + std::to_string(est.alpha->hi) +
                                           " exceeds the gate " + std::to_string(alpha_gate));
  }
  const double measured = plane_hausdorff_upper(cloud, est.beta_plane, x, r, est.alpha_net_resolution);
  const double ratio = est.alpha->hi > 0 ? measured / est.alpha->hi : 1.0;
  return RealizingPlane{est.beta_plane, est.beta.hi, ratio, *est.alpha};
}

ScaleRecord extrinsic_scale_record(const PointCloud& cloud, const DyadicConfig& cfg, int i,
                                   const std::vector<std::size_t>& centers, const GrassmannSearchConfig& search) {
  ScaleRecord rec;
  rec.i = i;
  rec.r = cfg.scale(i);
  if (rec.r < cfg.scale_floor_factor * cloud.spacing()) {
    rec.below_floor = true;
    rec.notes.push_back("below scale floor");
    return rec;
  }
  std::vector<std::optional<ExtrinsicEstimate>> results(centers.size());
  parallel_for(centers.size(), [&](std::size_t k) {
    results[k] = estimate_extrinsic(cloud, cloud[centers[k]], rec.r, cfg.n, search, true, cfg.scale_floor_factor);
  });
  Bracket alpha{0, 0, true};
  Bracket beta{0, 0, true};
  for (const auto& res : results) {
    alpha.lo = std::max(alpha.lo, res->alpha->lo);
    alpha.hi = std::max(alpha.hi, res->alpha->hi);
    alpha.certified = alpha.certified && res->alpha->certified;
    beta.lo = std::max(beta.lo, res->beta.lo);
    beta.hi = std::max(beta.hi, res->beta.hi);
    beta.certified = beta.certified && res->beta.certified;
  }
  rec.alpha = alpha;
  rec.beta = beta;
  rec.extrinsic_centers = centers.size();
  return rec;
}

std::vector<std::size_t> extrinsic_centers(const PointCloud& cloud, const DyadicConfig& cfg) {
  cfg.validate();
  if (cfg.n >= cloud.dim()) throw Error(ErrorKind::InvalidArgument, "profile dimension n must be < d");
  std::vector<std::size_t> centers = select_centers(cloud, 1.0, cfg.center_sample_cap);
  if (centers.empty()) throw Error(ErrorKind::EmptyInput, "the cloud does not meet B_1(0)");
  return centers;
}

FlatnessProfile dyadic_profile_extrinsic(const PointCloud& cloud, const DyadicConfig& cfg,
                                         const GrassmannSearchConfig& search) {
  search.validate();
  const std::vector<std::size_t> centers = extrinsic_centers(cloud, cfg);
  FlatnessProfile profile;
  profile.config = cfg;
  profile.cloud_size = cloud.size();
  profile.dim = cloud.dim();
  profile.spacing = cloud.spacing();
  for (int i = cfg.i_min - 2; i <= cfg.i_max; ++i) {
    profile.scales.push_back(extrinsic_scale_record(cloud, cfg, i, centers, search));
  }
  return profile;
}

double TiltingReport::max_ratio() const {
  double m = 0.0;
  for (const auto& r : records) m = std::max(m, r.ratio);
  return m;
}

TiltingReport tilting_report(const PointCloud& cloud, const DyadicConfig& cfg, const GrassmannSearchConfig& search) {
  cfg.validate();
  TiltingReport report;
  report.hypothesis_threshold = cfg.hypothesis_threshold;
  const std::vector<std::size_t> centers = select_centers(cloud, 1.0, cfg.center_sample_cap);

  std::map<std::pair<std::size_t, int>, std::optional<ExtrinsicEstimate>> cache;
  std::mutex cache_mutex;
  auto estimate = [&](std::size_t idx, int i) -> const std::optional<ExtrinsicEstimate>& {
    {
      std::lock_guard<std::mutex> lock(cache_mutex);
      auto it = cache.find({idx, i});
      if (it != cache.end()) return it->second;
    }
    std::optional<ExtrinsicEstimate> value;
    const double r = cfg.scale(i);
    if (r >= cfg.scale_floor_factor * cloud.spacing()) {
      value = estimate_extrinsic(cloud, cloud[idx], r, cfg.n, search, true, cfg.scale_floor_factor);
    }
    std::lock_guard<std::mutex> lock(cache_mutex);
    return cache.emplace(std::make_pair(idx, i), std::move(value)).first->second;
  };
  auto gate = [&](const std::optional<ExtrinsicEstimate>& e) {
    return e && e->alpha && e->alpha->hi <= cfg.hypothesis_threshold;
  };

  // Partner for space pairs: the sample point whose distance to x is closest
  // to r/8 (always strictly inside r/4).
  auto partner = [&](std::size_t idx, double r) -> std::optional<std::size_t> {
    const auto ball = cloud.ball_indices(cloud[idx], 0.25 * r);
    std::optional<std::size_t> best;
    double gap = std::numeric_limits<double>::infinity();
    for (auto j : ball) {
      if (j == idx) continue;
      const double dist = (cloud[j] - cloud[idx]).norm();
      if (dist >= 0.25 * r) continue;
      const double g = std::abs(dist - 0.125 * r);
      if (g < gap) {
        gap = g;
        best = j;
      }
    }
    return best;
  };

  struct Slot {
    std::vector<TiltRecord> records;
    std::size_t skipped = 0;
  };
  for (int i = cfg.i_min; i <= cfg.i_max; ++i) {
    const double r = cfg.scale(i);
    std::vector<Slot> slots(centers.size());
    parallel_for(centers.size(), [&](std::size_t k) {
      const std::size_t x = centers[k];
      Slot& slot = slots[k];
      const auto& here = estimate(x, i);
      const auto& coarser = estimate(x, i - 1);
      if (gate(here) && gate(coarser)) {
        const double lhs = plane_distance(here->beta_plane, coarser->beta_plane);
        const double rhs = here->beta.hi + coarser->beta.hi;
        slot.records.push_back(TiltRecord{TiltRecord::Kind::Scale, i, x, x, lhs, rhs, lhs / std::max(rhs, 1e-15)});
      } else {
        ++slot.skipped;
      }
      const auto y = partner(x, r);
      if (!y) {
        ++slot.skipped;
        return;
      }
      const auto& there = estimate(*y, i);
      if (gate(here) && gate(there)) {
        const double lhs = plane_distance(here->beta_plane, there->beta_plane);
        const double rhs = here->beta.hi + there->beta.hi;
        slot.records.push_back(TiltRecord{TiltRecord::Kind::Space, i, x, *y, lhs, rhs, lhs / std::max(rhs, 1e-15)});
      } else {
        ++slot.skipped;
      }
    });
    for (auto& s : slots) {
      report.records.insert(report.records.end(), s.records.begin(), s.records.end());
      report.skipped += s.skipped;
    }
  }
  return report;
}

}  // namespace flatness
