#include "flatness/datasets.hpp"
#include "flatness/extrinsic.hpp"
#include "flatness/intrinsic.hpp"
#include "flatness/kdtree.hpp"
#include "flatness/metric_space.hpp"
#include "flatness/simplex.hpp"

#include <benchmark/benchmark.h>

#include <map>
#include <random>

using namespace flatness;

namespace {

const PointCloud& triangle(std::size_t m) {
  static std::map<std::size_t, PointCloud> cache;
  auto it = cache.find(m);
  if (it == cache.end()) it = cache.emplace(m, thin_triangle(0.1, m).cloud).first;
  return it->second;
}

FiniteMetricSpace random_space(std::mt19937_64& rng, int size) {
  std::normal_distribution<double> g;
  std::vector<Point> pts;
  for (int k = 0; k < size; ++k) pts.push_back(Eigen::Vector3d(g(rng), g(rng), g(rng)));
  return FiniteMetricSpace::euclidean(pts);
}

}  // namespace

static void BM_BetaNumber(benchmark::State& state) {
  const PointCloud& c = triangle(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(beta_number(c, Point::Zero(2), 1.0, 1));
}
BENCHMARK(BM_BetaNumber)->Arg(2000)->Arg(8000)->Unit(benchmark::kMillisecond);

static void BM_AlphaNumber(benchmark::State& state) {
  const PointCloud& c = triangle(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(alpha_number(c, Point::Zero(2), 1.0, 1));
}
BENCHMARK(BM_AlphaNumber)->Arg(2000)->Unit(benchmark::kMillisecond);

static void BM_EstimateIntrinsic(benchmark::State& state) {
  const PointCloud& c = triangle(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(estimate_intrinsic(c, Point::Zero(2), 1.0, 1, DyadicConfig{}));
}
BENCHMARK(BM_EstimateIntrinsic)->Arg(2000)->Unit(benchmark::kMillisecond);

static void BM_KdTreeNearest(benchmark::State& state) {
  const PointCloud& c = triangle(static_cast<std::size_t>(state.range(0)));
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1, 1);
  for (auto _ : state) benchmark::DoNotOptimize(c.nearest(Eigen::Vector2d(u(rng), 0.1 * u(rng))));
}
BENCHMARK(BM_KdTreeNearest)->Arg(2000)->Arg(32000);

static void BM_CayleyMenger(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g;
  std::vector<Point> v;
  for (int k = 0; k <= n; ++k) {
    Point p(6);
    for (int j = 0; j < 6; ++j) p(j) = g(rng);
    v.push_back(p);
  }
  for (auto _ : state) benchmark::DoNotOptimize(cayley_menger_volume(v));
}
BENCHMARK(BM_CayleyMenger)->DenseRange(1, 4);

static void BM_GhBruteforce(benchmark::State& state) {
  const int size = static_cast<int>(state.range(0));
  std::mt19937_64 rng(3);
  const FiniteMetricSpace x = random_space(rng, size);
  const FiniteMetricSpace y = random_space(rng, size);
  for (auto _ : state) benchmark::DoNotOptimize(gh_bruteforce(x, y));
}
BENCHMARK(BM_GhBruteforce)->DenseRange(3, 6)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
