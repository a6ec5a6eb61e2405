#pragma once

#include "flatness/geometry.hpp"
#include "flatness/grassmann_search.hpp"
#include "flatness/profile.hpp"

#include <limits>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace flatness {

enum class Statement { PreciseA, PreciseB, SumA, SumB, ConverseAlpha, ConverseBeta };
const char* to_string(Statement s);
Statement statement_from_string(const std::string& name);

/// One empirical check of an inequality lhs <= C rhs. The conservative ratio
/// lhs.hi / max(rhs.lo, floor) is the measured constant; the optimistic ratio
/// lhs.lo / max(rhs.hi, floor) is reported alongside.
struct VerificationRecord {
  static constexpr double kRatioFloor = 1e-15;

  Statement statement = Statement::PreciseA;
  Bracket lhs;
  Bracket rhs;
  double ratio = 0.0;
  double optimistic_ratio = 0.0;
  bool hypotheses_met = false;
  double lambda = std::numeric_limits<double>::quiet_NaN();
  /// Scale index (precise statements) and radius; NaN when not applicable.
  int i = 0;
  double r = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> center;
  /// The sup over j or the infinite sums stopped at the scale floor.
  bool truncated = false;
  /// Bound on the omitted tail (infinite when no geometric decay is visible).
  double tail = 0.0;
  /// Statement vacuous (e.g. V_n = 0).
  bool vacuous = false;
  /// Partial sums of the left-hand side, indexed from the first scale.
  std::vector<std::pair<int, double>> partial_sums;
  /// Named auxiliary values (brackets, V_n, regression inputs, ...).
  std::map<std::string, double> diagnostics;
  std::vector<std::string> notes;

  void finalize_ratio();
};

/// Working smallness threshold used for every α/β gate.
inline constexpr double kWorkingThreshold = 0.01;

struct PreciseOptions {
  double C = 64.0;
  double gate = kWorkingThreshold;
  int max_halvings = 12;
};

/// a(x,2^{-i}) against C sup_j (β_{i-2}+...+β_{i+j})²/2^j ∨ C α_i², with the
/// β's and α measured at x. Throws Hypothesis when |x| > 1 - 2^{-i}; records
/// a failed α gate in hypotheses_met.
VerificationRecord verify_precise_A(const PointCloud& cloud, const Point& x, int i, const DyadicConfig& cfg,
                                    const PreciseOptions& opts = {}, const GrassmannSearchConfig& search = {});
/// b(x,2^{-i}) against C sup_j (β_{i-2}+...+β_{i+j})²/2^j.
VerificationRecord verify_precise_B(const PointCloud& cloud, const Point& x, int i, const DyadicConfig& cfg,
                                    const PreciseOptions& opts = {}, const GrassmannSearchConfig& search = {});

/// Σ_{i>=ī} a_i^λ against Σ_{i>=ī-2} α_i^{2λ} over the profile's scales above
/// the floor. The profile must hold α on [ī-2, i_max] and a on [ī, i_max].
VerificationRecord verify_sum_A(const FlatnessProfile& profile, double lambda, double delta = kWorkingThreshold);
/// Σ_{i>=ī} b_i^λ against Σ_{i>=ī-2} β_i^{2λ}.
VerificationRecord verify_sum_B(const FlatnessProfile& profile, double lambda, double delta = kWorkingThreshold);

/// Computes the full profile and then the sum statement.
VerificationRecord verify_sum_A(const PointCloud& cloud, double lambda, const DyadicConfig& cfg,
                                const GrassmannSearchConfig& search = {});
VerificationRecord verify_sum_B(const PointCloud& cloud, double lambda, const DyadicConfig& cfg,
                                const GrassmannSearchConfig& search = {});

/// α(x,r)² against a(x,r). Diagnostics carry the α and a brackets for
/// log-log regression.
VerificationRecord verify_converse_alpha(const PointCloud& cloud, const Point& x, double r, std::size_t n,
                                         const DyadicConfig& cfg = {}, const GrassmannSearchConfig& search = {});

/// β(x,r) against min(√b / V_n, V_n^{1/n}).
VerificationRecord verify_converse_beta(const PointCloud& cloud, const Point& x, double r, std::size_t n,
                                        const DyadicConfig& cfg = {}, const GrassmannSearchConfig& search = {});

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

/// Least-squares fit of log y against log x. Needs at least 3 pairs with
/// positive entries and two distinct x values.
SlopeFit slope_analysis(const std::vector<std::pair<double, double>>& pairs);

/// Full dyadic profile (extrinsic on [ī-2, i_max], intrinsic on [ī, i_max]).
FlatnessProfile dyadic_profile(const PointCloud& cloud, const DyadicConfig& cfg,
                               const GrassmannSearchConfig& search = {});

}  // namespace flatness
