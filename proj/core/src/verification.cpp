#include "flatness/verification.hpp"

#include "flatness/extrinsic.hpp"
#include "flatness/intrinsic.hpp"
#include "flatness/simplex.hpp"

#include <algorithm>
#include <cmath>

namespace flatness {

const char* to_string(Statement s) {
  switch (s) {
    case Statement::PreciseA: return "precise_A";
    case Statement::PreciseB: return "precise_B";
    case Statement::SumA: return "sum_A";
    case Statement::SumB: return "sum_B";
    case Statement::ConverseAlpha: return "converse_alpha";
    case Statement::ConverseBeta: return "converse_beta";
  }
  return "unknown";
}

Statement statement_from_string(const std::string& name) {
  for (Statement s : {Statement::PreciseA, Statement::PreciseB, Statement::SumA, Statement::SumB,
                      Statement::ConverseAlpha, Statement::ConverseBeta}) {
    if (name == to_string(s)) return s;
  }
  throw Error(ErrorKind::InvalidArgument, "unsupported statement '" + name + "'");
}

void VerificationRecord::finalize_ratio() {
  ratio = lhs.hi / std::max(rhs.lo, kRatioFloor);
  optimistic_ratio = lhs.lo / std::max(rhs.hi, kRatioFloor);
}

namespace {

std::vector<double> to_vector(const Point& x) { return std::vector<double>(x.data(), x.data() + x.size()); }

/// Local β (and α) brackets at x for the scales 2^{-j}, j = i-2, i-1, ...,
/// down to the floor, with the θ-type supremum over j.
struct LocalBetaSeries {
  std::vector<Bracket> beta;
  std::vector<Bracket> alpha;
  bool gate_met = true;
  double sup_lo = 0.0;
  double sup_hi = 0.0;
  bool truncated = false;
  double tail = 0.0;
};

LocalBetaSeries local_series(const PointCloud& cloud, const Point& x, int i, const DyadicConfig& cfg,
                             const PreciseOptions& opts, const GrassmannSearchConfig& search) {
  LocalBetaSeries s;
  for (int j = i - 2; j <= i + opts.max_halvings; ++j) {
    const double r = cfg.scale(j);
    if (r < cfg.scale_floor_factor * cloud.spacing()) break;
    const ExtrinsicEstimate e = estimate_extrinsic(cloud, x, r, cfg.n, search, true, cfg.scale_floor_factor);
    s.beta.push_back(e.beta);
    s.alpha.push_back(*e.alpha);
    s.gate_met = s.gate_met && e.alpha->hi <= opts.gate;
  }
  if (s.beta.size() < 3) {
    throw Error(ErrorKind::ScaleFloor, "scale 2^{-i} is too close to the floor for the beta series");
  }
  double part_lo = 0.0;
  double part_hi = 0.0;
  int last_j = 0;
  for (std::size_t m = 0; m < s.beta.size(); ++m) {
    part_lo += s.beta[m].lo;
    part_hi += s.beta[m].hi;
    const int j = static_cast<int>(m) - 2;
    if (j < 0) continue;
    const double w = std::ldexp(1.0, -j);
    s.sup_lo = std::max(s.sup_lo, part_lo * part_lo * w);
    s.sup_hi = std::max(s.sup_hi, part_hi * part_hi * w);
    last_j = j;
  }
  const double b_last = s.beta.back().hi;
  double tail = 0.0;
  for (int extra = 1; extra <= 256; ++extra) {
    const double v = part_hi + extra * b_last;
    tail = std::max(tail, v * v * std::ldexp(1.0, -(last_j + extra)));
  }
  s.tail = tail;
  s.truncated = tail > s.sup_hi;
  return s;
}

void check_precise_domain(const Point& x, int i) {
  if (x.norm() > 1.0 - std::ldexp(1.0, -i) + 1e-12) {
    throw Error(ErrorKind::Hypothesis, "precise statements need |x| <= 1 - 2^{-i}");
  }
}

VerificationRecord precise(Statement which, const PointCloud& cloud, const Point& x, int i, const DyadicConfig& cfg,
                           const PreciseOptions& opts, const GrassmannSearchConfig& search) {
  cfg.validate();
  check_precise_domain(x, i);
  const double r = cfg.scale(i);
  const LocalBetaSeries s = local_series(cloud, x, i, cfg, opts, search);
  const IntrinsicEstimate intr = estimate_intrinsic(cloud, x, r, cfg.n, cfg, search);

  VerificationRecord rec;
  rec.statement = which;
  rec.i = i;
  rec.r = r;
  rec.center = to_vector(x);
  rec.hypotheses_met = s.gate_met;
  rec.truncated = s.truncated;
  rec.tail = opts.C * opts.C * s.tail;
  const double c2 = opts.C * opts.C;
  double rhs_lo = c2 * s.sup_lo;
  double rhs_hi = c2 * s.sup_hi;
  const Bracket& alpha_i = s.alpha[2];
  if (which == Statement::PreciseA) {
    rec.lhs = intr.a;
    rhs_lo = std::max(rhs_lo, opts.C * alpha_i.lo * alpha_i.lo);
    rhs_hi = std::max(rhs_hi, opts.C * alpha_i.hi * alpha_i.hi);
  } else {
    rec.lhs = intr.b;
  }
  rec.rhs = Bracket::make(rhs_lo, rhs_hi, true);
  rec.finalize_ratio();
  rec.diagnostics = {{"C", opts.C},
                     {"beta_sup_term_hi", s.sup_hi},
                     {"alpha_i_lo", alpha_i.lo},
                     {"alpha_i_hi", alpha_i.hi},
                     {"beta_scales", static_cast<double>(s.beta.size())}};
  for (std::size_t m = 0; m < s.beta.size(); ++m) {
    rec.diagnostics["beta_" + std::to_string(i - 2 + static_cast<int>(m)) + "_hi"] = s.beta[m].hi;
  }
  if (!s.gate_met) rec.notes.push_back("alpha exceeds the working threshold at some scale j >= i-2");
  if (s.truncated) rec.notes.push_back("sup over j truncated at the scale floor");
  return rec;
}

struct SumSide {
  double lo = 0.0;
  double hi = 0.0;
};

VerificationRecord sum_statement(Statement which, const FlatnessProfile& profile, double lambda, double delta) {
  if (!(lambda > 0) || !std::isfinite(lambda)) throw Error(ErrorKind::InvalidArgument, "lambda must be positive");
  const DyadicConfig& cfg = profile.config;
  VerificationRecord rec;
  rec.statement = which;
  rec.lambda = lambda;
  rec.i = cfg.i_min;
  rec.hypotheses_met = true;
  const bool is_a = which == Statement::SumA;

  SumSide rhs;
  int rhs_terms = 0;
  for (int i = cfg.i_min - 2; i <= cfg.i_max; ++i) {
    const ScaleRecord* s = profile.find(i);
    if (s == nullptr) throw Error(ErrorKind::InvalidArgument, "profile is missing scale " + std::to_string(i));
    if (s->below_floor) {
      rec.truncated = true;
      continue;
    }
    const std::optional<Bracket>& v = is_a ? s->alpha : s->beta;
    if (!v) throw Error(ErrorKind::InvalidArgument, "profile lacks extrinsic numbers at scale " + std::to_string(i));
    const Bracket& hyp = s->alpha ? *s->alpha : *v;
    rec.hypotheses_met = rec.hypotheses_met && hyp.hi <= delta;
    rhs.lo += std::pow(v->lo, 2.0 * lambda);
    rhs.hi += std::pow(v->hi, 2.0 * lambda);
    ++rhs_terms;
  }

  SumSide lhs;
  std::vector<double> terms;
  for (int i = cfg.i_min; i <= cfg.i_max; ++i) {
    const ScaleRecord* s = profile.find(i);
    if (s == nullptr || s->below_floor) {
      rec.truncated = true;
      continue;
    }
    const std::optional<Bracket>& v = is_a ? s->a : s->b;
    if (!v) throw Error(ErrorKind::InvalidArgument, "profile lacks intrinsic numbers at scale " + std::to_string(i));
    lhs.lo += std::pow(v->lo, lambda);
    const double term = std::pow(v->hi, lambda);
    lhs.hi += term;
    terms.push_back(term);
    rec.partial_sums.emplace_back(i, lhs.hi);
  }
  if (terms.empty() || rhs_terms == 0) throw Error(ErrorKind::ScaleFloor, "no scale above the floor");
  rec.truncated = true;  // the sums are infinite; the finest computed scale ends them
  if (terms.size() >= 2 && terms[terms.size() - 2] > 0) {
    const double q = terms.back() / terms[terms.size() - 2];
    rec.tail = q < 1.0 ? terms.back() * q / (1.0 - q) : std::numeric_limits<double>::infinity();
  } else {
    rec.tail = terms.back() > 0 ? std::numeric_limits<double>::infinity() : 0.0;
  }
  rec.lhs = Bracket::make(std::min(lhs.lo, lhs.hi), lhs.hi, true);
  rec.rhs = Bracket::make(std::min(rhs.lo, rhs.hi), rhs.hi, true);
  rec.finalize_ratio();
  rec.diagnostics = {{"delta", delta}, {"lhs_terms", double(terms.size())}, {"rhs_terms", double(rhs_terms)}};
  if (!rec.hypotheses_met) rec.notes.push_back("alpha exceeds the working threshold at some scale i >= i_min-2");
  return rec;
}

}  // namespace

VerificationRecord verify_precise_A(const PointCloud& cloud, const Point& x, int i, const DyadicConfig& cfg,
                                    const PreciseOptions& opts, const GrassmannSearchConfig& search) {
  return precise(Statement::PreciseA, cloud, x, i, cfg, opts, search);
}

VerificationRecord verify_precise_B(const PointCloud& cloud, const Point& x, int i, const DyadicConfig& cfg,
                                    const PreciseOptions& opts, const GrassmannSearchConfig& search) {
  return precise(Statement::PreciseB, cloud, x, i, cfg, opts, search);
}

VerificationRecord verify_sum_A(const FlatnessProfile& profile, double lambda, double delta) {
  return sum_statement(Statement::SumA, profile, lambda, delta);
}

VerificationRecord verify_sum_B(const FlatnessProfile& profile, double lambda, double delta) {
  return sum_statement(Statement::SumB, profile, lambda, delta);
}

FlatnessProfile dyadic_profile(const PointCloud& cloud, const DyadicConfig& cfg, const GrassmannSearchConfig& search) {
  return merge_profiles(dyadic_profile_extrinsic(cloud, cfg, search), dyadic_profile_intrinsic(cloud, cfg, search));
}

VerificationRecord verify_sum_A(const PointCloud& cloud, double lambda, const DyadicConfig& cfg,
                                const GrassmannSearchConfig& search) {
  return verify_sum_A(dyadic_profile(cloud, cfg, search), lambda, cfg.hypothesis_threshold);
}

VerificationRecord verify_sum_B(const PointCloud& cloud, double lambda, const DyadicConfig& cfg,
                                const GrassmannSearchConfig& search) {
  return verify_sum_B(dyadic_profile(cloud, cfg, search), lambda, cfg.hypothesis_threshold);
}

VerificationRecord verify_converse_alpha(const PointCloud& cloud, const Point& x, double r, std::size_t n,
                                         const DyadicConfig& cfg, const GrassmannSearchConfig& search) {
  const ExtrinsicEstimate e = estimate_extrinsic(cloud, x, r, n, search, true, cfg.scale_floor_factor);
  const IntrinsicEstimate intr = estimate_intrinsic(cloud, x, r, n, cfg, search);
  VerificationRecord rec;
  rec.statement = Statement::ConverseAlpha;
  rec.r = r;
  rec.center = to_vector(x);
  rec.hypotheses_met = true;
  const Bracket& alpha = *e.alpha;
  rec.lhs = Bracket::make(alpha.lo * alpha.lo, alpha.hi * alpha.hi, alpha.certified);
  rec.rhs = intr.a;
  rec.finalize_ratio();
  rec.diagnostics = {{"alpha_lo", alpha.lo},
                     {"alpha_hi", alpha.hi},
                     {"a_lo", intr.a.lo},
                     {"a_hi", intr.a.hi},
                     {"a_lo_diameter", intr.lo_diameter},
                     {"a_lo_subsample_gh", intr.lo_subsample_gh},
                     {"a_lo_map", intr.lo_map},
                     {"map_distortion_over_r", intr.map_distortion / r},
                     {"net_resolution_over_r", intr.net_resolution / r},
                     {"alpha_net_resolution_over_r", e.alpha_net_resolution / r}};
  return rec;
}

VerificationRecord verify_converse_beta(const PointCloud& cloud, const Point& x, double r, std::size_t n,
                                        const DyadicConfig& cfg, const GrassmannSearchConfig& search) {
  const ExtrinsicEstimate e = estimate_extrinsic(cloud, x, r, n, search, true, cfg.scale_floor_factor);
  const IntrinsicEstimate intr = estimate_intrinsic(cloud, x, r, n, cfg, search);
  const SimplexSearchResult vol = max_simplex_volume(cloud, x, r, n);
  VerificationRecord rec;
  rec.statement = Statement::ConverseBeta;
  rec.r = r;
  rec.center = to_vector(x);
  rec.hypotheses_met = true;
  rec.lhs = e.beta;
  const double vn = vol.normalized_volume;
  const double root = std::pow(vn, 1.0 / static_cast<double>(n));
  if (vn <= 0.0) {
    rec.vacuous = true;
    rec.rhs = Bracket{0.0, 0.0, true};
    rec.notes.push_back("V_n = 0: the right-hand side vanishes and the statement is vacuous");
  } else {
    rec.rhs = Bracket::make(std::min(std::sqrt(intr.b.lo) / vn, root), std::min(std::sqrt(intr.b.hi) / vn, root), true);
  }
  rec.finalize_ratio();
  const bool corollary_gate = e.alpha->hi < 0.125;
  rec.diagnostics = {{"V_n", vn},
                     {"V_n_heuristic", vol.heuristic ? 1.0 : 0.0},
                     {"b_lo", intr.b.lo},
                     {"b_hi", intr.b.hi},
                     {"alpha_hi", e.alpha->hi},
                     {"corollary_gate", corollary_gate ? 1.0 : 0.0}};
  if (corollary_gate && !rec.vacuous) {
    const double c_measured = rec.ratio;
    rec.diagnostics["corollary_holds"] = e.beta.hi <= 100.0 * c_measured * std::sqrt(intr.b.hi) ? 1.0 : 0.0;
  }
  return rec;
}

SlopeFit slope_analysis(const std::vector<std::pair<double, double>>& pairs) {
  if (pairs.size() < 3) throw Error(ErrorKind::InvalidArgument, "slope_analysis needs at least 3 pairs");
  double sx = 0, sy = 0;
  for (const auto& [x, y] : pairs) {
    if (!(x > 0) || !(y > 0) || !std::isfinite(x) || !std::isfinite(y)) {
      throw Error(ErrorKind::InvalidArgument, "slope_analysis needs positive finite entries");
    }
    sx += std::log(x);
    sy += std::log(y);
  }
  const double m = static_cast<double>(pairs.size());
  const double mx = sx / m;
  const double my = sy / m;
  double sxx = 0, sxy = 0, syy = 0;
  for (const auto& [x, y] : pairs) {
    const double dx = std::log(x) - mx;
    const double dy = std::log(y) - my;
    sxx += dx * dx;
    sxy += dx * dy;
    syy += dy * dy;
  }
  if (sxx <= 0) throw Error(ErrorKind::InvalidArgument, "slope_analysis needs two distinct x values");
  SlopeFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = my - fit.slope * mx;
  fit.r_squared = syy > 0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return fit;
}

}  // namespace flatness
