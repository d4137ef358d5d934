#include "bilap/grid.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include <fmt/format.h>

#include "bilap/errors.hpp"

namespace bilap {

DimensionContext DimensionContext::make(int N) {
  if (N < 5) throw DomainError(fmt::format("dimension N={} must be at least 5", N));
  DimensionContext c;
  c.N = N;
  c.sigma_N = 2.0 * std::pow(std::numbers::pi, N / 2.0) / std::tgamma(N / 2.0);
  c.two_star_star = 2.0 * N / (N - 4.0);
  return c;
}

std::string_view to_string(Spacing s) { return s == Spacing::uniform ? "uniform" : "log"; }

Spacing parse_spacing(std::string_view s) {
  if (s == "uniform") return Spacing::uniform;
  if (s == "log" || s == "logarithmic") return Spacing::logarithmic;
  throw DomainError(fmt::format("unknown grid spacing '{}'", s));
}

std::shared_ptr<const RadialGrid> RadialGrid::build(const DimensionContext& ctx, double r_min, double r_max,
                                                    std::size_t M, Spacing mode) {
  if (M < 16) throw DomainError(fmt::format("grid needs at least 16 nodes, got {}", M));
  if (!(r_min > 0.0) || !std::isfinite(r_min)) throw DomainError("r_min must be positive and finite");
  if (!(r_max > r_min) || !std::isfinite(r_max)) throw DomainError("r_max must exceed r_min");
  const auto checked = DimensionContext::make(ctx.N);

  std::shared_ptr<RadialGrid> g(new RadialGrid());
  g->ctx_ = checked;
  g->mode_ = mode;
  g->r_.resize(M);
  g->w_.resize(M);
  g->wl_.resize(M);
  g->face_.resize(M);

  const long double N = checked.N;
  const std::size_t last = M - 1;
  if (mode == Spacing::logarithmic) {
    const long double s0 = std::log(static_cast<long double>(r_min));
    const long double s1 = std::log(static_cast<long double>(r_max));
    const long double h = (s1 - s0) / last;
    g->h_ = static_cast<double>(h);
    for (std::size_t i = 0; i < M; ++i) {
      const long double s = i == last ? s1 : s0 + h * i;
      g->r_[i] = i == 0 ? r_min : (i == last ? r_max : static_cast<double>(std::exp(s)));
      g->wl_[i] = h * std::pow(static_cast<long double>(g->r_[i]), N);
    }
    for (std::size_t i = 0; i < last; ++i) {
      const long double rm = std::sqrt(static_cast<long double>(g->r_[i]) * g->r_[i + 1]);
      g->face_[i] = std::pow(rm, N - 2) / h;
    }
    g->face_[last] = std::pow(static_cast<long double>(r_max) * std::exp(h / 2), N - 2) / h;
  } else {
    const long double h = (static_cast<long double>(r_max) - r_min) / last;
    g->h_ = static_cast<double>(h);
    for (std::size_t i = 0; i < M; ++i) {
      g->r_[i] = i == last ? r_max : static_cast<double>(r_min + h * i);
      g->wl_[i] = h * std::pow(static_cast<long double>(g->r_[i]), N - 1);
    }
    for (std::size_t i = 0; i < last; ++i) {
      const long double rm = (static_cast<long double>(g->r_[i]) + g->r_[i + 1]) / 2;
      g->face_[i] = std::pow(rm, N - 1) / h;
    }
    g->face_[last] = std::pow(static_cast<long double>(r_max) + h / 2, N - 1) / h;
  }
  g->wl_.front() /= 2;
  g->wl_.back() /= 2;
  for (std::size_t i = 0; i < M; ++i) g->w_[i] = static_cast<double>(g->wl_[i]);
  return g;
}

double RadialGrid::integrate(std::span<const double> f) const {
  if (f.size() != size()) throw DomainError("integrand size does not match the grid");
  long double acc = 0;
  for (std::size_t i = 0; i < f.size(); ++i) acc += wl_[i] * f[i];
  return static_cast<double>(acc * ctx_.sigma_N);
}

void RadialGrid::flux_ld(std::span<const long double> u, std::span<long double> out) const {
  const std::size_t M = size();
  for (std::size_t i = 0; i < M; ++i) {
    const long double right = face_[i] * ((i + 1 < M ? u[i + 1] : 0.0L) - u[i]);
    const long double left = i > 0 ? face_[i - 1] * (u[i] - u[i - 1]) : 0.0L;
    out[i] = right - left;
  }
}

void RadialGrid::laplacian_ld(std::span<const long double> u, std::span<long double> out) const {
  flux_ld(u, out);
  for (std::size_t i = 0; i < size(); ++i) out[i] /= wl_[i];
}

void RadialGrid::laplacian_ld(std::span<const double> u, std::span<long double> out) const {
  std::vector<long double> ul(u.begin(), u.end());
  laplacian_ld(std::span<const long double>(ul), out);
}

RadialField::RadialField(GridPtr grid, std::vector<double> values) : grid_(std::move(grid)), values_(std::move(values)) {
  if (!grid_) throw DomainError("field needs a grid");
  if (values_.size() != grid_->size()) throw DomainError("field size does not match the grid");
  for (double v : values_) {
    if (!std::isfinite(v)) throw DomainError("field values must be finite");
  }
}

std::span<const double> RadialField::laplacian_values() const {
  if (!cache_) {
    std::vector<long double> lap(size());
    grid_->laplacian_ld(values_, lap);
    cache_ = std::make_shared<const std::vector<double>>(lap.begin(), lap.end());
  }
  return *cache_;
}

RadialField laplacian(const RadialField& u) {
  const auto lap = u.laplacian_values();
  return RadialField(u.grid(), std::vector<double>(lap.begin(), lap.end()));
}

RadialField bilaplacian(const RadialField& u) {
  const RadialGrid& g = *u.grid();
  std::vector<long double> first(u.size()), second(u.size());
  g.laplacian_ld(u.values(), first);
  g.laplacian_ld(std::span<const long double>(first), second);
  return RadialField(u.grid(), std::vector<double>(second.begin(), second.end()));
}

double integrate(const RadialGrid& grid, std::span<const double> f) { return grid.integrate(f); }

NormParts norm_HV(std::span<const double> V, const RadialField& u) {
  const RadialGrid& g = *u.grid();
  if (V.size() != g.size()) throw DomainError("potential size does not match the grid");
  std::vector<long double> lap(g.size());
  g.laplacian_ld(u.values(), lap);
  const auto w = g.weights_ld();
  long double a = 0, b = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!(V[i] >= 0.0)) throw DomainError(fmt::format("negative or NaN potential at node {}", i));
    a += w[i] * lap[i] * lap[i];
    b += w[i] * V[i] * static_cast<long double>(u[i]) * u[i];
  }
  NormParts p;
  p.laplacian_sq = static_cast<double>(a * g.ctx().sigma_N);
  p.potential_sq = static_cast<double>(b * g.ctx().sigma_N);
  p.norm = std::sqrt(p.laplacian_sq + p.potential_sq);
  return p;
}

double lebesgue_norm(std::span<const double> K, const RadialField& u, double q) {
  const RadialGrid& g = *u.grid();
  if (K.size() != g.size()) throw DomainError("weight size does not match the grid");
  if (!(q >= 1.0)) throw DomainError("Lebesgue exponent must be at least 1");
  const auto w = g.weights_ld();
  long double acc = 0;
  for (std::size_t i = 0; i < g.size(); ++i) acc += w[i] * K[i] * std::pow(std::fabs(static_cast<long double>(u[i])), q);
  return static_cast<double>(std::pow(acc * g.ctx().sigma_N, 1.0L / q));
}

SumNorm sum_norm(std::span<const double> K, const RadialField& u, double q1, double q2) {
  const RadialGrid& g = *u.grid();
  if (K.size() != g.size()) throw DomainError("weight size does not match the grid");
  if (!(q1 > 1.0)) throw DomainError("sum norm needs q1 > 1");
  if (q1 > q2) throw DomainError(fmt::format("sum norm needs q1 <= q2, got {} > {}", q1, q2));
  const std::size_t M = g.size();
  const auto w = g.weights_ld();
  const long double sigma = g.ctx().sigma_N;

  // inner[k]: L^{q1} mass of nodes 0..k-1; outer[k]: L^{q2} mass of nodes k..M-1.
  std::vector<long double> inner(M + 1, 0.0L), outer(M + 1, 0.0L);
  for (std::size_t i = 0; i < M; ++i) {
    inner[i + 1] = inner[i] + sigma * w[i] * K[i] * std::pow(std::fabs(static_cast<long double>(u[i])), q1);
  }
  for (std::size_t i = M; i-- > 0;) {
    outer[i] = outer[i + 1] + sigma * w[i] * K[i] * std::pow(std::fabs(static_cast<long double>(u[i])), q2);
  }
  SumNorm best{std::numeric_limits<double>::infinity(), 0.0};
  for (std::size_t k = 0; k <= M; ++k) {
    const long double v = std::max(std::pow(inner[k], 1.0L / q1), std::pow(outer[k], 1.0L / q2));
    if (v < best.value) {
      best.value = static_cast<double>(v);
      best.split_radius = k < M ? g.nodes()[k] : std::numeric_limits<double>::infinity();
    }
  }
  return best;
}

}  // namespace bilap
