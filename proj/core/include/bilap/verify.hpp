#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "bilap/energy.hpp"
#include "bilap/grid.hpp"

namespace bilap::verify {

enum class BoundKind { value, gradient, outer, inner };

std::string_view to_string(BoundKind k);

struct BoundOptions {
  double ratio_tol = 1e-3;
  double constant_scale = 1.0;  // test hook: scales every constant
};

struct DecayBoundReport {
  BoundKind kind = BoundKind::value;
  double constant = 0.0;    // closed-form constant
  double multiplier = 0.0;  // constant times the potential-dependent factor
  double norm = 0.0;        // the norm on the right-hand side
  double lambda = 0.0;      // essinf estimate (outer and inner bounds)
  double radius = 0.0;      // R2 (outer) or R (inner)
  double max_ratio = 0.0;
  std::size_t worst_node = 0;
  double tol = 1e-3;
  bool pass = true;
};

// |u(r)| <= value_constant(N) ||Delta u|| r^{-(N-4)/2}.
double value_constant(int N);
// |u'(r)| <= gradient_constant(N) ||Delta u|| r^{-(N-2)/2}.
double gradient_constant(int N);
// (1/sqrt(sigma_N)) (8 / (N (2(N-2) - gamma)))^{1/4}, gamma <= 14/3.
double outer_constant(int N, double gamma_inf);
// sqrt(max(2/sqrt(N), N - 7/2) / sigma_N).
double inner_constant(int N);

DecayBoundReport check_pointwise(const RadialField& u, BoundKind kind, const BoundOptions& opts = {});

// Ratio test on nodes r > R2 with lambda = min over those nodes of r^gamma V.
DecayBoundReport check_decay_outer(const RadialField& u, std::span<const double> V, double gamma_inf, double R2,
                                   const BoundOptions& opts = {});

// Ratio test on nodes r < R with lambda = min over those nodes of r^gamma V.
DecayBoundReport check_decay_inner(const RadialField& u, std::span<const double> V, double gamma0, double R,
                                   const BoundOptions& opts = {});

enum class Functional { S0, Sinf, R0, Rinf };

std::string_view to_string(Functional f);
Functional parse_functional(std::string_view s);

struct EstimateOptions {
  int trials = 200;
  std::uint64_t seed = 0;
  unsigned jobs = 1;
  bool witnesses = true;
};

struct EmbeddingEstimate {
  Functional functional = Functional::S0;
  double q = 2.0;
  std::vector<double> radii;
  std::vector<double> estimates;
  double trend_slope = 0.0;
  int trials = 0;
  std::uint64_t seed = 0;
  std::size_t samples = 0;  // random fields plus witnesses
};

// Lower bounds on S0/Sinf: the maximum over one shared sample set of
// integral_{B_R or complement} K |u|^q for ||u|| = 1.
EmbeddingEstimate estimate_S(const GridPtr& grid, const SampledPotentials& pot, double q, std::vector<double> radii,
                             Functional which, const EstimateOptions& opts);

// Lower bounds on R0/Rinf over pairs (u, h) with ||u|| = ||h|| = 1. The pair
// set contains every (u, u) used by estimate_S with the same seed.
EmbeddingEstimate estimate_R(const GridPtr& grid, const SampledPotentials& pot, double q, std::vector<double> radii,
                             Functional which, const EstimateOptions& opts);

// Least-squares slope of log(estimate) against log(R) over positive entries.
double log_log_slope(std::span<const double> radii, std::span<const double> values);

// Deterministic witness fields for the given functional and radii.
std::vector<std::vector<double>> witness_fields(const RadialGrid& grid, Functional which, std::span<const double> radii);

}  // namespace bilap::verify
