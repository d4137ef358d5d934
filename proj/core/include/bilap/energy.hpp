#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "bilap/exponents.hpp"
#include "bilap/grid.hpp"

namespace bilap {

using RadialFn = std::function<double(double)>;

struct PotentialSpec {
  RadialFn V;
  RadialFn K;
  RadialFn Q;  // empty means Q = 0
  std::optional<exponents::GrowthParams> origin;
  std::optional<exponents::GrowthParams> infinity;
  double K_integrability_s = 2.0;

  bool has_forcing() const { return static_cast<bool>(Q); }

  // V = r^-a, K = r^(1-a), Q = 0 with the matching growth parameters.
  static PotentialSpec power_law(double a);
};

struct SampledPotentials {
  std::vector<double> V;
  std::vector<double> K;
  std::vector<double> Q;
  bool forcing = false;

  // Validates finiteness and signs (V >= 0, K > 0, Q >= 0) at every node and
  // the integrability exponent s > 2N/(N+4).
  static SampledPotentials sample(const RadialGrid& grid, const PotentialSpec& pot);
};

enum class NonlinearityKind { zero, pure_power, capped_pair, custom };
enum class SignConvention { zero_on_negatives, odd };

std::string_view to_string(NonlinearityKind k);
std::string_view to_string(SignConvention s);
NonlinearityKind parse_nonlinearity_kind(std::string_view s);
SignConvention parse_sign_convention(std::string_view s);

// f and F are specified for t >= 0 and extended to t < 0 by the sign
// convention: zero (f = F = 0) or odd f with even F.
struct NonlinearitySpec {
  NonlinearityKind kind = NonlinearityKind::pure_power;
  double q = 4.0;                         // pure_power: f = t^(q-1)
  double M = 1.0, q1 = 2.0, q2 = 2.0;     // capped_pair: f = M min(t^(q1-1), t^(q2-1))
  std::function<double(double)> f, F, fprime;  // custom
  std::optional<double> theta;
  std::optional<double> t0;
  std::optional<double> m;
  SignConvention sign = SignConvention::zero_on_negatives;

  static NonlinearitySpec none();
  static NonlinearitySpec pure_power(double q, SignConvention s = SignConvention::zero_on_negatives);
  static NonlinearitySpec capped_pair(double M, double q1, double q2,
                                      SignConvention s = SignConvention::zero_on_negatives);

  // Lower and upper growth exponents, when known.
  std::optional<std::pair<double, double>> exponent_range() const;
  bool has_derivative() const;
  bool even_primitive() const;
};

double f_eval(const NonlinearitySpec& nl, double t);
double F_eval(const NonlinearitySpec& nl, double t);
double fprime_eval(const NonlinearitySpec& nl, double t);
long double f_eval_ld(const NonlinearitySpec& nl, long double t);
long double F_eval_ld(const NonlinearitySpec& nl, long double t);

struct EnergyBreakdown {
  double half_norm_sq = 0.0;
  double K_term = 0.0;
  double Q_term = 0.0;
  double total = 0.0;
};

struct GradientEval {
  // Node-wise strong form: bilaplacian(u) + V u - K f(u) - Q. Its pairing
  // integrate(g * h) is the directional derivative of the discrete energy.
  std::vector<double> strong;
  // Coefficient-space derivative dE/du_i = sigma_N w_i g_i.
  std::vector<double> dual;
  double residual_l2 = 0.0;
  double residual_hv = 0.0;
};

// Discrete energy functional on a fixed grid with sampled potentials.
class EnergyFunctional {
 public:
  EnergyFunctional(GridPtr grid, SampledPotentials pot, NonlinearitySpec nl);
  EnergyFunctional(GridPtr grid, const PotentialSpec& pot, NonlinearitySpec nl);
  ~EnergyFunctional();
  EnergyFunctional(const EnergyFunctional&);
  EnergyFunctional& operator=(const EnergyFunctional&);

  const GridPtr& grid() const { return grid_; }
  const SampledPotentials& potentials() const { return pot_; }
  const NonlinearitySpec& nonlinearity() const { return nl_; }

  EnergyBreakdown energy(std::span<const double> u) const;
  // I(v) - I(u), accumulated node by node from differences.
  long double energy_difference(std::span<const double> u, std::span<const double> v) const;
  GradientEval gradient(std::span<const double> u) const;

  double pairing(std::span<const double> g, std::span<const double> h) const;
  double hv_inner(std::span<const double> u, std::span<const double> v) const;
  double hv_norm(std::span<const double> u) const;

  // Solves B x = e with B the Gram matrix of the discrete H^2_V inner product.
  std::vector<double> riesz(std::span<const double> e) const;
  // sqrt(e^T B^{-1} e): norm of a coefficient-space functional.
  double dual_norm(std::span<const double> e) const;
  // Solves (B - sigma W diag(K f'(u))) d = -e. Empty when f' is unavailable
  // or the factorization fails.
  std::optional<std::vector<double>> newton_direction(std::span<const double> u, std::span<const double> e) const;

 private:
  struct Factor;
  const Factor& factor() const;

  GridPtr grid_;
  SampledPotentials pot_;
  NonlinearitySpec nl_;
  mutable std::shared_ptr<Factor> factor_;
};

EnergyBreakdown energy(const GridPtr& grid, const PotentialSpec& pot, const NonlinearitySpec& nl,
                       const RadialField& u);

struct GradientResult {
  RadialField field;
  double residual_l2 = 0.0;
  double residual_hv = 0.0;
};

GradientResult gradient(const GridPtr& grid, const PotentialSpec& pot, const NonlinearitySpec& nl,
                        const RadialField& u);

struct QIntegral {
  double value = 0.0;            // on [r_min, r_max]
  double extended_origin = 0.0;  // on [r_min / 100, r_max]
  double extended_infinity = 0.0;// on [r_min, 100 r_max]
  bool origin_growth = false;
  bool infinity_growth = false;
  bool finite() const { return !origin_growth && !infinity_growth && value < 1e300; }
};

struct QAdmissibility {
  QIntegral rellich;    // integral of Q^2 r^(N+3) dr
  QIntegral sobolev;    // integral of Q^(2N/(N+4)) r^(N-1) dr
  QIntegral potential;  // integral of Q^2 / V r^(N-1) dr
  double L0_rellich = 0.0;
  double L0_potential = 0.0;
  double L0 = 0.0;           // best finite analytic bound on |int Q h| / ||h||
  double L0_discrete = 0.0;  // exact dual norm of h -> integrate(Q h) on the grid
};

QAdmissibility check_Q_admissible(const GridPtr& grid, const PotentialSpec& pot);

}  // namespace bilap
