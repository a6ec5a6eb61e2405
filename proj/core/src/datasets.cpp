#include "flatness/datasets.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <random>

namespace flatness {

namespace {

/// Uniform double in [0,1) from the top 53 bits, identical on every platform.
double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

void require(bool ok, const std::string& param, const std::string& rule) {
  if (!ok) throw Error(ErrorKind::InvalidArgument, "parameter '" + param + "' " + rule);
}

double as_count(double v) { return std::floor(v); }

}  // namespace

const char* to_string(Family f) {
  switch (f) {
    case Family::ThinTriangle: return "thin_triangle";
    case Family::GappedSegment: return "gapped_segment";
    case Family::LipschitzGraph: return "lipschitz_graph";
    case Family::DyadicSnowflake: return "dyadic_snowflake";
    case Family::CircleArc: return "circle_arc";
    case Family::FlatDisk: return "flat_disk";
  }
  return "unknown";
}

Family family_from_string(const std::string& name) {
  for (Family f : {Family::ThinTriangle, Family::GappedSegment, Family::LipschitzGraph, Family::DyadicSnowflake,
                   Family::CircleArc, Family::FlatDisk}) {
    if (name == to_string(f)) return f;
  }
  throw Error(ErrorKind::InvalidArgument, "unknown family '" + name + "'");
}

GeneratedSet thin_triangle(double eps, std::size_t m, std::uint64_t seed) {
  require(std::isfinite(eps) && eps >= 1e-6 && eps < 0.5, "eps", "must lie in [1e-6, 1/2)");
  require(m >= 10, "m", "must be at least 10");
  const double c = std::sqrt(1.0 - eps * eps);
  const std::size_t kp = m / 2;       // segments on O-P (kp + 1 points, O included)
  const std::size_t kq = m - 1 - kp;  // points on O-Q besides O
  std::vector<Point> pts;
  pts.reserve(m);
  for (std::size_t k = 0; k <= kp; ++k) {
    const double t = static_cast<double>(k) / static_cast<double>(kp);
    pts.push_back(Eigen::Vector2d(t * c, t * eps));
  }
  for (std::size_t k = 1; k <= kq; ++k) {
    const double t = static_cast<double>(k) / static_cast<double>(kq);
    pts.push_back(Eigen::Vector2d(-t * c, t * eps));
  }
  GeneratedSet out{PointCloud(std::move(pts)), Family::ThinTriangle, {{"eps", eps}, {"m", double(m)}}, {}, seed};
  out.expected = {{"alpha_O_1_lower", eps}, {"projection_distortion_O_1_upper", 4 * eps * eps}};
  return out;
}

GeneratedSet gapped_segment(double g, std::size_t m, std::uint64_t seed) {
  require(std::isfinite(g) && g > 0 && g < 0.25, "g", "must lie in (0, 1/4)");
  require(m >= 4, "m", "must be at least 4");
  const std::size_t right = m / 2;
  const std::size_t left = m - right;
  std::vector<Point> pts;
  pts.reserve(m);
  for (std::size_t k = 0; k < left; ++k) {
    const double t = g + (1.0 - g) * static_cast<double>(k) / static_cast<double>(left - 1);
    pts.push_back(Eigen::Vector2d(-t, 0.0));
  }
  for (std::size_t k = 0; k < right; ++k) {
    const double t = g + (1.0 - g) * static_cast<double>(k) / static_cast<double>(right - 1);
    pts.push_back(Eigen::Vector2d(t, 0.0));
  }
  GeneratedSet out{PointCloud(std::move(pts)), Family::GappedSegment, {{"g", g}, {"m", double(m)}}, {}, seed};
  out.expected = {{"beta_upper", 0.0}, {"gap_half_width", g}};
  return out;
}

GeneratedSet lipschitz_graph(double amplitude, std::size_t frequency, std::size_t m, std::size_t n, std::size_t d,
                             std::uint64_t seed) {
  require(std::isfinite(amplitude) && amplitude >= 0 && amplitude < 0.1, "amplitude", "must lie in [0, 1/10)");
  require(frequency >= 1, "frequency", "must be at least 1");
  require(n >= 1, "n", "must be at least 1");
  require(d > n, "d", "must exceed n");
  require(m >= 4, "m", "must be at least 4");
  const double half = 2.0;
  std::mt19937_64 rng(seed);
  // Directions w and phases φ per (normal coordinate, frequency).
  const std::size_t codim = d - n;
  std::vector<Eigen::VectorXd> dirs;
  std::vector<double> phases;
  for (std::size_t c = 0; c < codim; ++c) {
    for (std::size_t k = 0; k < frequency; ++k) {
      Eigen::VectorXd w(static_cast<Eigen::Index>(n));
      for (Eigen::Index a = 0; a < w.size(); ++a) {
        // Box-Muller from the platform-independent uniform source.
        const double u1 = 1.0 - unit(rng);
        const double u2 = unit(rng);
        w[a] = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
      }
      if (w.norm() < 1e-12) w.setUnit(0);
      dirs.push_back(w.normalized());
      phases.push_back(2.0 * std::numbers::pi * unit(rng));
    }
  }
  double weight_sum = 0.0;
  for (std::size_t k = 1; k <= frequency; ++k) weight_sum += 1.0 / double(k * k);

  const auto side = static_cast<std::size_t>(
      std::max(2.0, std::ceil(std::pow(static_cast<double>(m), 1.0 / static_cast<double>(n)))));
  const double step = 2.0 * half / static_cast<double>(side - 1);
  std::vector<Point> pts;
  std::vector<std::size_t> idx(n, 0);
  while (true) {
    Point p = Point::Zero(static_cast<Eigen::Index>(d));
    for (std::size_t a = 0; a < n; ++a) p[static_cast<Eigen::Index>(a)] = -half + step * static_cast<double>(idx[a]);
    const Eigen::VectorXd u = p.head(static_cast<Eigen::Index>(n));
    for (std::size_t c = 0; c < codim; ++c) {
      double v = 0.0;
      for (std::size_t k = 1; k <= frequency; ++k) {
        const std::size_t slot = c * frequency + (k - 1);
        v += std::cos(std::numbers::pi * double(k) * dirs[slot].dot(u) + phases[slot]) / double(k * k);
      }
      p[static_cast<Eigen::Index>(n + c)] = amplitude * v / weight_sum;
    }
    pts.push_back(std::move(p));
    std::size_t a = 0;
    while (a < n && idx[a] == side - 1) idx[a++] = 0;
    if (a == n) break;
    ++idx[a];
  }
  GeneratedSet out{PointCloud(std::move(pts)),
                   Family::LipschitzGraph,
                   {{"amplitude", amplitude}, {"frequency", double(frequency)}, {"m", double(m)}, {"n", double(n)},
                    {"d", double(d)}},
                   {},
                   seed};
  out.expected = {{"sup_height", amplitude}, {"alpha_0_upper", 2.0 * amplitude}};
  return out;
}

GeneratedSet dyadic_snowflake(double gamma, std::size_t depth, std::size_t m, double c, std::uint64_t seed) {
  require(std::isfinite(gamma) && gamma > 0 && gamma <= 1, "gamma", "must lie in (0, 1]");
  require(depth <= 14, "depth", "must be at most 14");
  require(std::isfinite(c) && c >= 0 && c < 1, "c", "must lie in [0, 1)");
  require(m >= 10, "m", "must be at least 10");
  std::mt19937_64 rng(seed);
  const double start_sign = (rng() & 1U) ? 1.0 : -1.0;
  std::vector<double> amp(depth + 1, 0.0);
  std::vector<double> phase(depth + 1, 0.0);
  for (std::size_t l = 1; l <= depth; ++l) {
    const double sign = (l % 2 == 1) ? start_sign : -start_sign;
    amp[l] = sign * c * std::pow(2.0, -(1.0 + gamma) * static_cast<double>(l));
    phase[l] = 2.0 * std::numbers::pi * unit(rng);
  }
  std::vector<Point> pts;
  pts.reserve(m);
  for (std::size_t k = 0; k < m; ++k) {
    const double t = -2.0 + 4.0 * static_cast<double>(k) / static_cast<double>(m - 1);
    double y = 0.0;
    for (std::size_t l = 1; l <= depth; ++l) y += amp[l] * std::cos(std::numbers::pi * std::ldexp(1.0, int(l)) * t + phase[l]);
    pts.push_back(Eigen::Vector2d(t, y));
  }
  GeneratedSet out{PointCloud(std::move(pts)),
                   Family::DyadicSnowflake,
                   {{"gamma", gamma}, {"depth", double(depth)}, {"m", double(m)}, {"c", c}},
                   {},
                   seed};
  out.expected = {{"target_decay_c", c}, {"target_decay_gamma", gamma}};
  return out;
}

GeneratedSet circle_arc(double kappa, std::size_t m, std::uint64_t seed) {
  require(std::isfinite(kappa) && kappa > 0, "kappa", "must be positive");
  require(m >= 3, "m", "must be at least 3");
  const double radius = 1.0 / kappa;
  const double s_max = std::min(2.0, std::numbers::pi * radius * (1.0 - 1e-9));
  std::vector<Point> pts;
  pts.reserve(m);
  for (std::size_t k = 0; k < m; ++k) {
    const double s = -s_max + 2.0 * s_max * static_cast<double>(k) / static_cast<double>(m - 1);
    const double th = s * kappa;
    pts.push_back(Eigen::Vector2d(radius * std::sin(th), radius * (1.0 - std::cos(th))));
  }
  GeneratedSet out{PointCloud(std::move(pts)), Family::CircleArc, {{"kappa", kappa}, {"m", double(m)}}, {}, seed};
  // Small-r asymptotics of β at a sample point: the arc leaves its tangent
  // line by κr²/2 inside B_r.
  out.expected = {{"beta_small_r_over_r", kappa / 2.0}};
  return out;
}

GeneratedSet flat_disk(std::size_t n, std::size_t d, std::size_t m, std::uint64_t seed) {
  require(n >= 1, "n", "must be at least 1");
  require(d > n, "d", "must exceed n");
  require(m >= 4, "m", "must be at least 4");
  const double radius = 2.0;
  // The disk occupies about V_n/2^n of the enclosing cube.
  const double cube_fraction = n == 1 ? 1.0 : (n == 2 ? std::numbers::pi / 4.0 : std::numbers::pi / 6.0);
  const auto side = static_cast<std::size_t>(
      std::max(2.0, std::ceil(std::pow(static_cast<double>(m) / cube_fraction, 1.0 / static_cast<double>(n)))));
  const double step = 2.0 * radius / static_cast<double>(side - 1);
  std::vector<Point> pts;
  std::vector<std::size_t> idx(n, 0);
  while (true) {
    Point p = Point::Zero(static_cast<Eigen::Index>(d));
    for (std::size_t a = 0; a < n; ++a) p[static_cast<Eigen::Index>(a)] = -radius + step * static_cast<double>(idx[a]);
    if (p.norm() <= radius * (1.0 + 1e-12)) pts.push_back(std::move(p));
    std::size_t a = 0;
    while (a < n && idx[a] == side - 1) idx[a++] = 0;
    if (a == n) break;
    ++idx[a];
  }
  GeneratedSet out{PointCloud(std::move(pts)), Family::FlatDisk, {{"n", double(n)}, {"d", double(d)}, {"m", double(m)}},
                   {}, seed};
  out.expected = {{"flatness_upper", 0.0}};
  return out;
}

GeneratedSet generate(const std::string& family, const std::map<std::string, double>& params, std::uint64_t seed) {
  const Family f = family_from_string(family);
  std::map<std::string, double> p = params;
  auto take = [&](const std::string& key, std::optional<double> fallback) {
    auto it = p.find(key);
    if (it == p.end()) {
      if (!fallback) throw Error(ErrorKind::InvalidArgument, "missing parameter '" + key + "' for " + family);
      return *fallback;
    }
    const double v = it->second;
    p.erase(it);
    if (!std::isfinite(v)) throw Error(ErrorKind::InvalidArgument, "parameter '" + key + "' must be finite");
    return v;
  };
  auto count = [&](const std::string& key, std::optional<double> fallback) {
    const double v = take(key, fallback);
    require(v >= 0 && v == as_count(v), key, "must be a nonnegative integer");
    return static_cast<std::size_t>(v);
  };
  GeneratedSet out;
  switch (f) {
    case Family::ThinTriangle: {
      const double eps = take("eps", std::nullopt);
      out = thin_triangle(eps, count("m", 2000), seed);
      break;
    }
    case Family::GappedSegment: {
      const double g = take("g", std::nullopt);
      out = gapped_segment(g, count("m", 1000), seed);
      break;
    }
    case Family::LipschitzGraph: {
      const double a = take("amplitude", std::nullopt);
      const std::size_t freq = count("frequency", 4);
      const std::size_t m = count("m", 4000);
      const std::size_t n = count("n", 1);
      const std::size_t d = count("d", 2);
      out = lipschitz_graph(a, freq, m, n, d, seed);
      break;
    }
    case Family::DyadicSnowflake: {
      const double gamma = take("gamma", std::nullopt);
      const std::size_t depth = count("depth", 12);
      const std::size_t m = count("m", 20000);
      const double c = take("c", 0.01);
      out = dyadic_snowflake(gamma, depth, m, c, seed);
      break;
    }
    case Family::CircleArc: {
      const double kappa = take("kappa", std::nullopt);
      out = circle_arc(kappa, count("m", 2000), seed);
      break;
    }
    case Family::FlatDisk: {
      const std::size_t n = count("n", 1);
      const std::size_t d = count("d", 2);
      out = flat_disk(n, d, count("m", 2000), seed);
      break;
    }
  }
  if (!p.empty()) throw Error(ErrorKind::InvalidArgument, "unknown parameter '" + p.begin()->first + "' for " + family);
  return out;
}

}  // namespace flatness
