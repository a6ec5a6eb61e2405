#pragma once

#include "flatness/geometry.hpp"

#include <cstdint>
#include <map>
#include <string>

namespace flatness {

enum class Family { ThinTriangle, GappedSegment, LipschitzGraph, DyadicSnowflake, CircleArc, FlatDisk };
const char* to_string(Family f);
Family family_from_string(const std::string& name);

/// A generated cloud with its parameters and self-reported analytic facts.
struct GeneratedSet {
  PointCloud cloud;
  Family family = Family::FlatDisk;
  std::map<std::string, double> params;
  std::map<std::string, double> expected;
  std::uint64_t seed = 0;
};

/// m points on the closed segments O-P and O-Q, P = (√(1-ε²), ε),
/// Q = (-√(1-ε²), ε). O is a sample point. Requires 1e-6 <= ε < 1/2, m >= 10.
GeneratedSet thin_triangle(double eps, std::size_t m, std::uint64_t seed = 0);

/// m points evenly spaced on [-1,-g] ∪ [g,1] × {0}. Requires 0 < g < 1/4, m >= 4.
GeneratedSet gapped_segment(double g, std::size_t m, std::uint64_t seed = 0);

/// Graph over [-2,2]^n in R^d of u -> amplitude · Σ_k k^{-2} cos(π k <w_k,u> + φ_k) / Σ_k k^{-2}
/// (one independent sum per normal coordinate), sampled on a grid of about m
/// points. Requires 0 <= amplitude < 1/10, 1 <= n < d, frequency >= 1.
GeneratedSet lipschitz_graph(double amplitude, std::size_t frequency, std::size_t m, std::size_t n = 1,
                             std::size_t d = 2, std::uint64_t seed = 0);

/// Planar curve t -> (t, Σ_{l=1}^{depth} c 2^{-(1+γ)l} σ_l cos(π 2^l t + ψ_l)) on
/// [-2, 2], sampled at m evenly spaced t. Signs σ_l alternate from a seeded
/// start and phases ψ_l are seeded. Requires 0 < γ <= 1, depth <= 14, c >= 0.
GeneratedSet dyadic_snowflake(double gamma, std::size_t depth, std::size_t m, double c = 0.01,
                              std::uint64_t seed = 0);

/// Arc of the circle of radius 1/κ tangent to the x-axis at the origin, arc
/// length min(2, π/κ) on each side, m points. Requires κ > 0.
GeneratedSet circle_arc(double kappa, std::size_t m, std::uint64_t seed = 0);

/// Lattice sample of about m points of the n-disk of radius 2 in the first n
/// coordinates of R^d.
GeneratedSet flat_disk(std::size_t n, std::size_t d, std::size_t m, std::uint64_t seed = 0);

/// Dispatch by family name with string-keyed parameters; unknown or
/// out-of-range parameters throw InvalidArgument naming the parameter.
GeneratedSet generate(const std::string& family, const std::map<std::string, double>& params, std::uint64_t seed);

}  // namespace flatness
