#pragma once

#include <optional>
#include <utility>
#include <string>
#include <string_view>

namespace bilap::exponents {

// Growth parameters of K against V: K(r) <= c r^alpha V(r)^beta near the
// origin or near infinity, with optionally r^gamma V(r) bounded from below.
struct GrowthParams {
  double alpha = 0.0;
  double beta = 0.0;
  std::optional<double> gamma;
};

enum class WindowKind { interval, half_line, split_pair, empty };

std::string_view to_string(WindowKind kind);

// Open set of admissible exponents. For `interval` it is (lo, hi), for
// `half_line` it is (lo, inf). A `split_pair` certifies q1 in q1_window and
// q2 > q2_threshold without any single q serving both ends.
struct ExponentWindow {
  WindowKind kind = WindowKind::empty;
  double lo = 0.0;
  double hi = 0.0;
  std::optional<double> q2_threshold;
  std::string reason;

  bool contains(double q) const;
};

// The additive term that attains a max-type threshold. Ties resolve to the
// earliest enumerator.
enum class ThresholdTerm { one, two_beta, q_star, q_lower_star, q_double_star };

std::string_view to_string(ThresholdTerm term);

struct Threshold {
  double value = 1.0;
  ThresholdTerm attained_by = ThresholdTerm::one;
};

// The five shapes of the origin region for singular potentials with
// r^gamma V bounded below, gamma >= 4.
enum class RegionCase {
  below_dimension,   // 4 <= gamma < N
  at_dimension,      // gamma == N
  between,           // N < gamma < 2N-4
  at_upper,          // gamma == 2N-4
  above_upper        // gamma > 2N-4
};

std::string_view to_string(RegionCase c);

struct RegionSpec {
  double beta = 0.0;
  double gamma = 4.0;
  RegionCase region_case = RegionCase::below_dimension;
};

RegionSpec make_region(int N, double beta, double gamma);

enum class OriginRule { bounded_ratio, singular_potential };
enum class InfinityRule { bounded_ratio, decaying_potential };

std::string_view to_string(OriginRule rule);
std::string_view to_string(InfinityRule rule);

struct Certificate {
  bool certified = false;
  OriginRule origin_rule = OriginRule::bounded_ratio;
  InfinityRule infinity_rule = InfinityRule::bounded_ratio;
  std::string failure;
};

// Closed forms.
double critical_exponent(int N);  // 2N/(N-4)
double alpha_star(int N, double beta);
double q_star(int N, double alpha, double beta);
double q_lower_star(int N, double alpha, double beta, double gamma);
double q_double_star(int N, double alpha, double beta, double gamma);

// Certification near the origin for a bounded ratio K/(r^alpha V^beta).
ExponentWindow origin_window(int N, const GrowthParams& p);

// Threshold at infinity for a bounded ratio.
Threshold infinity_threshold(int N, const GrowthParams& p);

// Threshold at infinity when additionally r^gamma V is bounded below with
// gamma <= 4. Throws HypothesisError when gamma is absent or exceeds 4.
Threshold infinity_threshold_decaying(int N, const GrowthParams& p);

// Origin region for singular potentials. Throws HypothesisError if gamma < 4.
bool region_contains(int N, const RegionSpec& region, double alpha, double q);

// The origin region as a set of q for fixed alpha.
ExponentWindow region_window(int N, const RegionSpec& region, double alpha);

struct CombinedWindow {
  ExponentWindow window;
  OriginRule origin_rule = OriginRule::bounded_ratio;
  InfinityRule infinity_rule = InfinityRule::bounded_ratio;
};

// Single exponents certified at both ends, using the same rule preference as
// certify_pair. Falls back to a split pair when no single q serves both ends.
CombinedWindow combined_window(int N, const GrowthParams& origin, const GrowthParams& infinity);

// Combined window for V = r^-a, K = r^(1-a), a <= 4.
ExponentWindow power_law_window(int N, double a);

// Growth parameters matching V = r^-a, K = r^(1-a): {origin, infinity}.
std::pair<GrowthParams, GrowthParams> power_law_params(double a);

// Decide whether (q1, q2) is certified by the available rules. The singular
// potential rule is preferred at the origin whenever gamma0 > 4 is supplied,
// the decaying rule at infinity whenever gamma_inf <= 4 is supplied.
Certificate certify_pair(int N, const GrowthParams& origin, const GrowthParams& infinity,
                         double q1, double q2);

}  // namespace bilap::exponents
