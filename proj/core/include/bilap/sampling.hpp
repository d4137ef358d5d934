#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "bilap/grid.hpp"

namespace bilap::sampling {

// Engine for one trial, derived from the master seed so that results do not
// depend on scheduling.
std::mt19937_64 trial_engine(std::uint64_t master_seed, std::uint64_t stream, std::uint64_t index);

// Uniform double in [0, 1) from the top 53 bits; identical on every platform.
double uniform01(std::mt19937_64& eng);

// exp(-1/(1-t^2)) on |t| < 1, zero elsewhere.
double bump_profile(double t);

// Bump in log r: amplitude * profile((log r - center) / width).
struct LogBump {
  double center = 0.0;
  double width = 1.0;
  double amplitude = 1.0;
};

std::vector<LogBump> random_mixture(const RadialGrid& grid, std::mt19937_64& eng);
std::vector<double> render(const RadialGrid& grid, const std::vector<LogBump>& bumps);

// One to three log-bumps supported strictly inside the grid.
std::vector<double> random_bump_field(const RadialGrid& grid, std::uint64_t master_seed, std::uint64_t stream,
                                      std::uint64_t index);

// Bump in r centered at `center` with half-width `width`.
std::vector<double> linear_bump_field(const RadialGrid& grid, double center, double width);

}  // namespace bilap::sampling
