#include "bilap/sampling.hpp"

#include <algorithm>
#include <cmath>

namespace bilap::sampling {

std::mt19937_64 trial_engine(std::uint64_t master_seed, std::uint64_t stream, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(master_seed), static_cast<std::uint32_t>(master_seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

double uniform01(std::mt19937_64& eng) { return static_cast<double>(eng() >> 11) * 0x1.0p-53; }

double bump_profile(double t) {
  const double a = 1.0 - t * t;
  return a > 0.0 ? std::exp(-1.0 / a) : 0.0;
}

std::vector<LogBump> random_mixture(const RadialGrid& grid, std::mt19937_64& eng) {
  const double s0 = std::log(grid.r_min());
  const double s1 = std::log(grid.r_max());
  const double span = s1 - s0;
  const int count = 1 + static_cast<int>(eng() % 3);
  const double w_lo = std::min(0.25, span / 8);
  const double w_hi = std::min(2.5, span / 2.5);
  std::vector<LogBump> out;
  for (int j = 0; j < count; ++j) {
    LogBump b;
    b.width = w_lo + (w_hi - w_lo) * uniform01(eng);
    const double lo = s0 + 1.05 * b.width;
    const double hi = s1 - 1.05 * b.width;
    b.center = lo + (hi - lo) * uniform01(eng);
    b.amplitude = 0.05 + 0.95 * uniform01(eng);
    out.push_back(b);
  }
  return out;
}

std::vector<double> render(const RadialGrid& grid, const std::vector<LogBump>& bumps) {
  const auto r = grid.nodes();
  std::vector<double> v(r.size(), 0.0);
  for (std::size_t i = 0; i < r.size(); ++i) {
    const double s = std::log(r[i]);
    for (const auto& b : bumps) v[i] += b.amplitude * bump_profile((s - b.center) / b.width);
  }
  return v;
}

std::vector<double> random_bump_field(const RadialGrid& grid, std::uint64_t master_seed, std::uint64_t stream,
                                      std::uint64_t index) {
  auto eng = trial_engine(master_seed, stream, index);
  return render(grid, random_mixture(grid, eng));
}

std::vector<double> linear_bump_field(const RadialGrid& grid, double center, double width) {
  const auto r = grid.nodes();
  std::vector<double> v(r.size());
  for (std::size_t i = 0; i < r.size(); ++i) v[i] = bump_profile((r[i] - center) / width);
  return v;
}

}  // namespace bilap::sampling
