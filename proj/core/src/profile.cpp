#include "flatness/profile.hpp"

#include "flatness/kdtree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace flatness {

void DyadicConfig::validate() const {
  if (!(eps_margin > 0 && eps_margin < 0.5)) {
    throw Error(ErrorKind::InvalidArgument, "DyadicConfig: eps_margin must lie in (0, 1/2)");
  }
  if (!(std::ldexp(1.0, -i_min) < eps_margin)) {
    throw Error(ErrorKind::InvalidArgument, "DyadicConfig: need 2^{-i_min} < eps_margin");
  }
  if (i_min > i_max) throw Error(ErrorKind::InvalidArgument, "DyadicConfig: i_min must not exceed i_max");
  if (n < 1) throw Error(ErrorKind::InvalidArgument, "DyadicConfig: n must be >= 1");
  if (center_sample_cap < 1) throw Error(ErrorKind::InvalidArgument, "DyadicConfig: center_sample_cap must be >= 1");
  if (ball_point_cap < 8) throw Error(ErrorKind::InvalidArgument, "DyadicConfig: ball_point_cap must be >= 8");
  if (!(theta_constant > 0)) throw Error(ErrorKind::InvalidArgument, "DyadicConfig: theta_constant must be > 0");
  if (!(hypothesis_threshold > 0)) {
    throw Error(ErrorKind::InvalidArgument, "DyadicConfig: hypothesis_threshold must be > 0");
  }
  if (!(scale_floor_factor > 0)) throw Error(ErrorKind::InvalidArgument, "DyadicConfig: scale_floor_factor must be > 0");
}

double DyadicConfig::scale(int i) const { return std::ldexp(1.0, -i); }

ScaleRecord* FlatnessProfile::find(int i) {
  for (auto& s : scales) {
    if (s.i == i) return &s;
  }
  return nullptr;
}

const ScaleRecord* FlatnessProfile::find(int i) const {
  for (const auto& s : scales) {
    if (s.i == i) return &s;
  }
  return nullptr;
}

FlatnessProfile merge_profiles(const FlatnessProfile& extrinsic, const FlatnessProfile& intrinsic) {
  FlatnessProfile out = extrinsic;
  for (const auto& rec : intrinsic.scales) {
    ScaleRecord* mine = out.find(rec.i);
    if (mine == nullptr) {
      out.scales.push_back(rec);
      continue;
    }
    mine->a = rec.a;
    mine->b = rec.b;
    mine->intrinsic_centers = rec.intrinsic_centers;
    mine->below_floor = mine->below_floor || rec.below_floor;
    mine->notes.insert(mine->notes.end(), rec.notes.begin(), rec.notes.end());
  }
  std::sort(out.scales.begin(), out.scales.end(), [](const ScaleRecord& a, const ScaleRecord& b) { return a.i < b.i; });
  return out;
}

std::vector<std::size_t> select_centers(const PointCloud& cloud, double radius, std::size_t cap) {
  const Point origin = Point::Zero(static_cast<Eigen::Index>(cloud.dim()));
  std::vector<std::size_t> inside = cloud.ball_indices(origin, radius);
  if (inside.size() <= cap) return inside;
  std::vector<Eigen::VectorXd> pts;
  pts.reserve(inside.size());
  std::size_t start = 0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < inside.size(); ++k) {
    pts.push_back(cloud[inside[k]]);
    const double nrm = cloud[inside[k]].norm();
    if (nrm < best) {
      best = nrm;
      start = k;
    }
  }
  const auto fps = farthest_point_sample(pts, start, cap);
  std::vector<std::size_t> out;
  out.reserve(fps.indices.size());
  for (auto k : fps.indices) out.push_back(inside[k]);
  return out;
}

}  // namespace flatness
