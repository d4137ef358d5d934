#include "bilap/exponents.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "bilap/errors.hpp"

namespace bilap::exponents {
namespace {

void check_dimension(int N) {
  if (N < 5) throw DomainError(fmt::format("dimension N={} must be at least 5", N));
}

void check_beta(double beta) {
  if (!(beta >= 0.0 && beta <= 1.0))
    throw DomainError(fmt::format("beta={} must lie in [0,1]", beta));
}

void check_params(int N, const GrowthParams& p) {
  check_dimension(N);
  check_beta(p.beta);
  if (!std::isfinite(p.alpha)) throw DomainError("alpha must be finite");
  if (p.gamma && !std::isfinite(*p.gamma)) throw DomainError("gamma must be finite when present");
}

Threshold max_of(std::initializer_list<std::pair<double, ThresholdTerm>> terms) {
  Threshold t{-std::numeric_limits<double>::infinity(), ThresholdTerm::one};
  for (const auto& [value, term] : terms) {
    if (value > t.value) t = {value, term};
  }
  return t;
}

}  // namespace

std::string_view to_string(WindowKind kind) {
  switch (kind) {
    case WindowKind::interval: return "interval";
    case WindowKind::half_line: return "half_line";
    case WindowKind::split_pair: return "split_pair";
    case WindowKind::empty: return "empty";
  }
  return "?";
}

std::string_view to_string(ThresholdTerm term) {
  switch (term) {
    case ThresholdTerm::one: return "one";
    case ThresholdTerm::two_beta: return "two_beta";
    case ThresholdTerm::q_star: return "q_star";
    case ThresholdTerm::q_lower_star: return "q_lower_star";
    case ThresholdTerm::q_double_star: return "q_double_star";
  }
  return "?";
}

std::string_view to_string(RegionCase c) {
  switch (c) {
    case RegionCase::below_dimension: return "below_dimension";
    case RegionCase::at_dimension: return "at_dimension";
    case RegionCase::between: return "between";
    case RegionCase::at_upper: return "at_upper";
    case RegionCase::above_upper: return "above_upper";
  }
  return "?";
}

std::string_view to_string(OriginRule rule) {
  return rule == OriginRule::bounded_ratio ? "origin_ratio" : "origin_singular";
}

std::string_view to_string(InfinityRule rule) {
  return rule == InfinityRule::bounded_ratio ? "infinity_ratio" : "infinity_decaying";
}

bool ExponentWindow::contains(double q) const {
  switch (kind) {
    case WindowKind::interval: return lo < q && q < hi;
    case WindowKind::half_line: return lo < q;
    case WindowKind::split_pair:
    case WindowKind::empty: return false;
  }
  return false;
}

double critical_exponent(int N) {
  check_dimension(N);
  return 2.0 * N / (N - 4.0);
}

double alpha_star(int N, double beta) {
  check_dimension(N);
  check_beta(beta);
  return std::max(4.0 * beta - 2.0 - N / 2.0, -(1.0 - beta) * N);
}

double q_star(int N, double alpha, double beta) {
  check_dimension(N);
  check_beta(beta);
  return 2.0 * (alpha - 4.0 * beta + N) / (N - 4.0);
}

double q_lower_star(int N, double alpha, double beta, double gamma) {
  check_dimension(N);
  check_beta(beta);
  if (gamma == N) throw SingularFormulaError(fmt::format("q_lower_star is singular at gamma = N = {}", N));
  return 2.0 * (alpha - gamma * beta + N) / (N - gamma);
}

double q_double_star(int N, double alpha, double beta, double gamma) {
  check_dimension(N);
  check_beta(beta);
  if (gamma == 2.0 * (N - 2)) {
    throw SingularFormulaError(fmt::format("q_double_star is singular at gamma = 2(N-2) = {}", 2 * (N - 2)));
  }
  return 2.0 * (2.0 * alpha + (1.0 - 2.0 * beta) * gamma + 2.0 * (N - 2)) / (2.0 * (N - 2) - gamma);
}

RegionSpec make_region(int N, double beta, double gamma) {
  check_dimension(N);
  check_beta(beta);
  if (!std::isfinite(gamma)) throw DomainError("gamma must be finite");
  if (gamma < 4.0) throw HypothesisError(fmt::format("origin region requires gamma >= 4, got {}", gamma));
  RegionSpec r{beta, gamma, RegionCase::below_dimension};
  const double upper = 2.0 * N - 4.0;
  if (gamma < N) r.region_case = RegionCase::below_dimension;
  else if (gamma == N) r.region_case = RegionCase::at_dimension;
  else if (gamma < upper) r.region_case = RegionCase::between;
  else if (gamma == upper) r.region_case = RegionCase::at_upper;
  else r.region_case = RegionCase::above_upper;
  return r;
}

ExponentWindow origin_window(int N, const GrowthParams& p) {
  check_params(N, p);
  ExponentWindow w;
  const double a_star = alpha_star(N, p.beta);
  if (!(p.alpha > a_star)) {
    w.kind = WindowKind::empty;
    w.reason = fmt::format("alpha={} does not exceed alpha*(beta)={}", p.alpha, a_star);
    return w;
  }
  w.kind = WindowKind::interval;
  w.lo = std::max(1.0, 2.0 * p.beta);
  w.hi = q_star(N, p.alpha, p.beta);
  return w;
}

Threshold infinity_threshold(int N, const GrowthParams& p) {
  check_params(N, p);
  return max_of({{1.0, ThresholdTerm::one},
                 {2.0 * p.beta, ThresholdTerm::two_beta},
                 {q_star(N, p.alpha, p.beta), ThresholdTerm::q_star}});
}

Threshold infinity_threshold_decaying(int N, const GrowthParams& p) {
  check_params(N, p);
  if (!p.gamma) throw HypothesisError("decaying-potential rule needs gamma at infinity");
  if (*p.gamma > 4.0) throw HypothesisError(fmt::format("decaying-potential rule needs gamma <= 4, got {}", *p.gamma));
  const double g = *p.gamma;
  return max_of({{1.0, ThresholdTerm::one},
                 {2.0 * p.beta, ThresholdTerm::two_beta},
                 {q_lower_star(N, p.alpha, p.beta, g), ThresholdTerm::q_lower_star},
                 {q_double_star(N, p.alpha, p.beta, g), ThresholdTerm::q_double_star}});
}

bool region_contains(int N, const RegionSpec& region, double alpha, double q) {
  const RegionSpec r = make_region(N, region.beta, region.gamma);
  if (r.region_case != region.region_case) throw DomainError("region case tag does not match gamma");
  const double b = r.beta;
  const double g = r.gamma;
  const double floor = std::max(1.0, 2.0 * b);
  switch (r.region_case) {
    case RegionCase::below_dimension:
      return floor < q && q < std::min(q_lower_star(N, alpha, b, g), q_double_star(N, alpha, b, g));
    case RegionCase::at_dimension:
      return alpha > -(1.0 - b) * N && floor < q && q < q_double_star(N, alpha, b, g);
    case RegionCase::between:
      return std::max(floor, q_lower_star(N, alpha, b, g)) < q && q < q_double_star(N, alpha, b, g);
    case RegionCase::at_upper:
      return alpha > -(1.0 - b) * g && std::max(floor, q_lower_star(N, alpha, b, g)) < q;
    case RegionCase::above_upper:
      return std::max({floor, q_lower_star(N, alpha, b, g), q_double_star(N, alpha, b, g)}) < q;
  }
  return false;
}

std::pair<GrowthParams, GrowthParams> power_law_params(double a) {
  GrowthParams origin{1.0 - a, 0.0, std::nullopt};
  if (a >= 4.0) origin.gamma = a;
  return {origin, GrowthParams{1.0 - a, 0.0, a}};
}

ExponentWindow region_window(int N, const RegionSpec& region, double alpha) {
  const RegionSpec r = make_region(N, region.beta, region.gamma);
  const double b = r.beta;
  const double g = r.gamma;
  const double floor = std::max(1.0, 2.0 * b);
  constexpr double inf = std::numeric_limits<double>::infinity();
  double lo = floor;
  double hi = inf;
  std::string blocked;
  switch (r.region_case) {
    case RegionCase::below_dimension:
      hi = std::min(q_lower_star(N, alpha, b, g), q_double_star(N, alpha, b, g));
      break;
    case RegionCase::at_dimension:
      if (!(alpha > -(1.0 - b) * N)) blocked = fmt::format("alpha={} must exceed -(1-beta)N", alpha);
      hi = q_double_star(N, alpha, b, g);
      break;
    case RegionCase::between:
      lo = std::max(floor, q_lower_star(N, alpha, b, g));
      hi = q_double_star(N, alpha, b, g);
      break;
    case RegionCase::at_upper:
      if (!(alpha > -(1.0 - b) * g)) blocked = fmt::format("alpha={} must exceed -(1-beta)gamma", alpha);
      lo = std::max(floor, q_lower_star(N, alpha, b, g));
      break;
    case RegionCase::above_upper:
      lo = std::max({floor, q_lower_star(N, alpha, b, g), q_double_star(N, alpha, b, g)});
      break;
  }
  ExponentWindow w;
  if (!blocked.empty() || !(lo < hi)) {
    w.kind = WindowKind::empty;
    w.reason = blocked.empty() ? fmt::format("region bounds ({}, {}) are empty", lo, hi) : blocked;
    return w;
  }
  w.kind = hi == inf ? WindowKind::half_line : WindowKind::interval;
  w.lo = lo;
  w.hi = hi;
  return w;
}

CombinedWindow combined_window(int N, const GrowthParams& origin, const GrowthParams& infinity) {
  check_params(N, origin);
  check_params(N, infinity);
  CombinedWindow out;
  ExponentWindow near;
  if (origin.gamma && *origin.gamma > 4.0) {
    out.origin_rule = OriginRule::singular_potential;
    near = region_window(N, make_region(N, origin.beta, *origin.gamma), origin.alpha);
  } else {
    near = origin_window(N, origin);
  }
  Threshold far;
  if (infinity.gamma && *infinity.gamma <= 4.0) {
    out.infinity_rule = InfinityRule::decaying_potential;
    far = infinity_threshold_decaying(N, infinity);
  } else {
    far = infinity_threshold(N, infinity);
  }

  ExponentWindow& w = out.window;
  if (near.kind == WindowKind::empty) {
    w = near;
    return out;
  }
  const double lo = std::max(near.lo, far.value);
  const bool open_top = near.kind == WindowKind::half_line;
  if (open_top || lo < near.hi) {
    w.kind = open_top ? WindowKind::half_line : WindowKind::interval;
    w.lo = lo;
    w.hi = open_top ? std::numeric_limits<double>::infinity() : near.hi;
    return out;
  }
  w.kind = WindowKind::split_pair;
  w.lo = near.lo;
  w.hi = near.hi;
  w.q2_threshold = far.value;
  return out;
}

ExponentWindow power_law_window(int N, double a) {
  check_dimension(N);
  if (!std::isfinite(a)) throw DomainError("a must be finite");
  if (a > 4.0) throw HypothesisError(fmt::format("power-law exponent a={} exceeds 4", a));
  const auto [origin, infinity] = power_law_params(a);
  return combined_window(N, origin, infinity).window;
}

Certificate certify_pair(int N, const GrowthParams& origin, const GrowthParams& infinity, double q1, double q2) {
  check_params(N, origin);
  check_params(N, infinity);
  Certificate c;
  std::string failures;

  bool near_ok = false;
  if (origin.gamma && *origin.gamma > 4.0) {
    c.origin_rule = OriginRule::singular_potential;
    near_ok = region_contains(N, make_region(N, origin.beta, *origin.gamma), origin.alpha, q1);
    if (!near_ok) failures = fmt::format("q1={} outside the singular-potential origin region", q1);
  } else {
    c.origin_rule = OriginRule::bounded_ratio;
    const ExponentWindow w = origin_window(N, origin);
    near_ok = w.contains(q1);
    if (!near_ok) {
      failures = w.kind == WindowKind::empty
                     ? fmt::format("origin window empty: {}", w.reason)
                     : fmt::format("q1={} outside origin window ({}, {})", q1, w.lo, w.hi);
    }
  }

  Threshold far;
  if (infinity.gamma && *infinity.gamma <= 4.0) {
    c.infinity_rule = InfinityRule::decaying_potential;
    far = infinity_threshold_decaying(N, infinity);
  } else {
    c.infinity_rule = InfinityRule::bounded_ratio;
    far = infinity_threshold(N, infinity);
  }
  const bool far_ok = q2 > far.value;
  if (!far_ok) {
    if (!failures.empty()) failures += "; ";
    failures += fmt::format("q2={} not above the {} threshold {}", q2, to_string(far.attained_by), far.value);
  }
  c.certified = near_ok && far_ok;
  c.failure = std::move(failures);
  return c;
}

}  // namespace bilap::exponents
