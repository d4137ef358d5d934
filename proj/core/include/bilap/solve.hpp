#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bilap/energy.hpp"
#include "bilap/grid.hpp"

namespace bilap {

enum class Preconditioner { diagonal, riesz };

std::string_view to_string(Preconditioner p);
Preconditioner parse_preconditioner(std::string_view s);

struct SolverConfig {
  int max_iters = 500;
  double grad_tol = 1e-6;  // on the H^2_V-dual residual
  double initial_step = 1.0;
  double backtrack = 0.5;
  double armijo = 1e-4;
  int path_points = 16;
  int deformation_steps = 2000;
  double climb_step = 0.5;
  double lambda_max = 1048576.0;
  double seed_norm = 1e-3;
  Preconditioner preconditioner = Preconditioner::riesz;
  bool newton = true;
  std::uint64_t seed = 0;

  void validate() const;
  bool operator==(const SolverConfig&) const = default;
};

struct GeometryProbe {
  double rho = 0.0;
  double sphere_min = 0.0;  // smallest sampled energy on the sphere of radius rho
  int directions = 0;
};

enum class Classification { minimizer, mountain_pass, failed };

std::string_view to_string(Classification c);

struct SolveResult {
  RadialField u;
  EnergyBreakdown energy;
  double residual = 0.0;     // H^2_V-dual
  double residual_l2 = 0.0;  // L^2-dual
  int iterations = 0;
  Classification classification = Classification::failed;
  double nonneg_violation = 0.0;  // max(0, -min u)
  bool trivial = false;           // u is identically zero
  std::vector<double> energy_history;
  std::vector<std::string> warnings;
  std::string diagnostic;
  std::optional<GeometryProbe> geometry;  // mountain pass only
  double endpoint_lambda = 0.0;           // mountain pass only
};

// Exponent certification messages for a run; empty when certified.
std::vector<std::string> certification_warnings(int N, const PotentialSpec& pot, const NonlinearitySpec& nl);

// Descent for the coercive (sublinear) regime starting from a small Gaussian
// seed. Accepted steps never increase the energy.
SolveResult minimize(const EnergyFunctional& fn, const SolverConfig& cfg);

struct RayScale {
  double lambda = 0.0;
  RadialField field;
};

// Smallest lambda in {1, 2, 4, ...} with I(lambda u0) < 0.
RayScale ray_scale_endpoint(const EnergyFunctional& fn, const RadialField& u0, double lambda_max);

// Samples I on the H^2_V sphere of radius rho along seeded bump directions
// (plus `extra`) and halves rho from rho_start until every sample is positive.
GeometryProbe probe_geometry(const EnergyFunctional& fn, double rho_start, int directions, std::uint64_t seed,
                             const std::vector<std::vector<double>>& extra = {});

// Discretized-path mountain-pass method: the highest interior path point
// climbs (descends along the gradient except along the path tangent) and the
// two path halves are re-equispaced in the H^2_V metric.
SolveResult mountain_pass(const EnergyFunctional& fn, const SolverConfig& cfg);

}  // namespace bilap
