#include "bilap/verify.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "bilap/errors.hpp"
#include "bilap/parallel.hpp"
#include "bilap/sampling.hpp"

namespace bilap::verify {

std::string_view to_string(BoundKind k) {
  switch (k) {
    case BoundKind::value: return "value_bound";
    case BoundKind::gradient: return "gradient_bound";
    case BoundKind::outer: return "outer_decay";
    case BoundKind::inner: return "inner_decay";
  }
  return "?";
}

std::string_view to_string(Functional f) {
  switch (f) {
    case Functional::S0: return "S0";
    case Functional::Sinf: return "Sinf";
    case Functional::R0: return "R0";
    case Functional::Rinf: return "Rinf";
  }
  return "?";
}

Functional parse_functional(std::string_view s) {
  if (s == "S0") return Functional::S0;
  if (s == "Sinf") return Functional::Sinf;
  if (s == "R0") return Functional::R0;
  if (s == "Rinf") return Functional::Rinf;
  throw DomainError(fmt::format("unknown functional '{}'", s));
}

double value_constant(int N) {
  const auto ctx = DimensionContext::make(N);
  return 2.0 / (N - 4.0) / std::sqrt(N * ctx.sigma_N);
}

double gradient_constant(int N) {
  const auto ctx = DimensionContext::make(N);
  return 1.0 / std::sqrt(N * ctx.sigma_N);
}

double outer_constant(int N, double gamma_inf) {
  const auto ctx = DimensionContext::make(N);
  if (gamma_inf > 14.0 / 3.0) throw HypothesisError(fmt::format("outer decay bound needs gamma <= 14/3, got {}", gamma_inf));
  return std::pow(8.0 / (N * (2.0 * (N - 2) - gamma_inf)), 0.25) / std::sqrt(ctx.sigma_N);
}

double inner_constant(int N) {
  const auto ctx = DimensionContext::make(N);
  return std::sqrt(std::max(2.0 / std::sqrt(static_cast<double>(N)), N - 3.5) / ctx.sigma_N);
}

namespace {

double laplacian_norm(const RadialField& u) {
  const auto lap = u.laplacian_values();
  std::vector<double> sq(lap.size());
  for (std::size_t i = 0; i < sq.size(); ++i) sq[i] = lap[i] * lap[i];
  return std::sqrt(u.grid()->integrate(sq));
}

std::vector<double> radial_derivative(const RadialField& u) {
  const RadialGrid& g = *u.grid();
  const auto r = g.nodes();
  const double h = g.step();
  const std::size_t M = u.size();
  std::vector<double> d(M);
  for (std::size_t i = 0; i < M; ++i) {
    double dx;
    if (i == 0) dx = (-3.0 * u[0] + 4.0 * u[1] - u[2]) / (2.0 * h);
    else if (i + 1 == M) dx = (3.0 * u[M - 1] - 4.0 * u[M - 2] + u[M - 3]) / (2.0 * h);
    else dx = (u[i + 1] - u[i - 1]) / (2.0 * h);
    d[i] = g.spacing() == Spacing::logarithmic ? dx / r[i] : dx;
  }
  return d;
}

void scan(DecayBoundReport& rep, std::span<const double> values, std::span<const double> r, double exponent,
          bool (*in_region)(double, double), double radius) {
  const double scale = rep.multiplier * rep.norm;
  rep.max_ratio = 0.0;
  if (scale > 0.0) {
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (!in_region(r[i], radius)) continue;
      const double ratio = std::fabs(values[i]) * std::pow(r[i], exponent) / scale;
      if (ratio > rep.max_ratio) {
        rep.max_ratio = ratio;
        rep.worst_node = i;
      }
    }
  }
  rep.pass = rep.max_ratio <= 1.0 + rep.tol;
}

bool everywhere(double, double) { return true; }
bool outside(double r, double R) { return r > R; }
bool inside(double r, double R) { return r < R; }

}  // namespace

DecayBoundReport check_pointwise(const RadialField& u, BoundKind kind, const BoundOptions& opts) {
  const int N = u.grid()->dim();
  DecayBoundReport rep;
  rep.kind = kind;
  rep.tol = opts.ratio_tol;
  rep.norm = laplacian_norm(u);
  const auto r = u.grid()->nodes();
  if (kind == BoundKind::value) {
    rep.constant = value_constant(N);
    rep.multiplier = rep.constant * opts.constant_scale;
    scan(rep, u.values(), r, (N - 4.0) / 2.0, everywhere, 0.0);
  } else if (kind == BoundKind::gradient) {
    rep.constant = gradient_constant(N);
    rep.multiplier = rep.constant * opts.constant_scale;
    const auto du = radial_derivative(u);
    scan(rep, du, r, (N - 2.0) / 2.0, everywhere, 0.0);
  } else {
    throw DomainError("check_pointwise handles the value and gradient bounds only");
  }
  return rep;
}

DecayBoundReport check_decay_outer(const RadialField& u, std::span<const double> V, double gamma_inf, double R2,
                                   const BoundOptions& opts) {
  const RadialGrid& g = *u.grid();
  const int N = g.dim();
  const auto r = g.nodes();
  DecayBoundReport rep;
  rep.kind = BoundKind::outer;
  rep.tol = opts.ratio_tol;
  rep.radius = R2;
  rep.constant = outer_constant(N, gamma_inf);
  double lambda = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (r[i] > R2) lambda = std::min(lambda, std::pow(r[i], gamma_inf) * V[i]);
  }
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw HypothesisError(fmt::format("essinf of r^gamma V beyond R2={} is not positive on the grid", R2));
  }
  rep.lambda = lambda;
  rep.multiplier = rep.constant * std::pow(lambda, -0.25) * opts.constant_scale;
  rep.norm = norm_HV(V, u).norm;
  scan(rep, u.values(), r, (2.0 * (N - 2) - gamma_inf) / 4.0, outside, R2);
  return rep;
}

DecayBoundReport check_decay_inner(const RadialField& u, std::span<const double> V, double gamma0, double R,
                                   const BoundOptions& opts) {
  const RadialGrid& g = *u.grid();
  const int N = g.dim();
  const auto r = g.nodes();
  if (gamma0 < 4.0) throw HypothesisError(fmt::format("inner decay bound needs gamma >= 4, got {}", gamma0));
  DecayBoundReport rep;
  rep.kind = BoundKind::inner;
  rep.tol = opts.ratio_tol;
  rep.radius = R;
  rep.constant = inner_constant(N);
  double lambda = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (r[i] < R) lambda = std::min(lambda, std::pow(r[i], gamma0) * V[i]);
  }
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    throw HypothesisError(fmt::format("essinf of r^gamma V inside R={} is not positive on the grid", R));
  }
  rep.lambda = lambda;
  const double factor = 1.0 / std::sqrt(lambda) + std::pow(R, (gamma0 - 4.0) / 2.0) / lambda;
  rep.multiplier = rep.constant * std::sqrt(factor) * opts.constant_scale;
  rep.norm = norm_HV(V, u).norm;
  scan(rep, u.values(), r, (2.0 * N - 4.0 - gamma0) / 2.0, inside, R);
  return rep;
}

double log_log_slope(std::span<const double> radii, std::span<const double> values) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (std::size_t i = 0; i < radii.size(); ++i) {
    if (!(values[i] > 0.0)) continue;
    const double x = std::log(radii[i]);
    const double y = std::log(values[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    ++n;
  }
  if (n < 2) return 0.0;
  const double den = n * sxx - sx * sx;
  return den != 0.0 ? (n * sxy - sx * sy) / den : 0.0;
}

std::vector<std::vector<double>> witness_fields(const RadialGrid& grid, Functional which, std::span<const double> radii) {
  std::vector<std::vector<double>> out;
  const double lo = grid.r_min();
  const double hi = grid.r_max();
  const bool origin = which == Functional::S0 || which == Functional::R0;
  for (double R : radii) {
    if (origin) {
      const double c = std::log(R / 2.0);
      for (double w : {0.25, 0.5}) {
        if (std::exp(c - w) <= lo || std::exp(c + w) >= hi) continue;
        out.push_back(sampling::render(grid, {sampling::LogBump{c, w, 1.0}}));
      }
    } else {
      const double rho = 2.0 * R;
      for (double w : {std::sqrt(rho) / 2.0, std::sqrt(rho), rho / 2.0}) {
        if (rho - w <= lo || rho + w >= hi) continue;
        out.push_back(sampling::linear_bump_field(grid, rho, w));
      }
    }
  }
  return out;
}

namespace {

constexpr std::uint64_t kFieldStream = 1;
constexpr std::uint64_t kPartnerStream = 2;

bool origin_side(Functional f) { return f == Functional::S0 || f == Functional::R0; }

void normalize(std::vector<double>& u, std::span<const double> V, const GridPtr& grid) {
  const double n = norm_HV(V, RadialField(grid, u)).norm;
  if (n > 0.0) {
    for (double& x : u) x /= n;
  }
}

// Partial integrals of sigma w K |u|^{q-1} |h| over each region, in node order.
std::vector<double> region_integrals(const RadialGrid& g, std::span<const double> K, std::span<const double> u,
                                     std::span<const double> h, double q, std::span<const double> radii,
                                     bool origin) {
  const auto r = g.nodes();
  const auto w = g.weights_ld();
  std::vector<double> out(radii.size());
  for (std::size_t k = 0; k < radii.size(); ++k) {
    long double acc = 0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      const bool in = origin ? r[i] < radii[k] : r[i] > radii[k];
      if (!in) continue;
      acc += w[i] * K[i] * std::pow(std::fabs(static_cast<long double>(u[i])), q - 1) * std::fabs(h[i]);
    }
    out[k] = static_cast<double>(acc * g.ctx().sigma_N);
  }
  return out;
}

EmbeddingEstimate run_estimate(const GridPtr& grid, const SampledPotentials& pot, double q, std::vector<double> radii,
                               Functional which, const EstimateOptions& opts, bool pairs) {
  if (opts.trials < 100) throw DomainError(fmt::format("estimates need at least 100 trials, got {}", opts.trials));
  if (!(q >= 1.0)) throw DomainError("estimates need q >= 1");
  if (radii.empty()) throw DomainError("estimates need at least one radius");
  std::sort(radii.begin(), radii.end());
  const bool origin = origin_side(which);
  const std::size_t T = static_cast<std::size_t>(opts.trials);

  auto witnesses = opts.witnesses ? witness_fields(*grid, which, radii) : std::vector<std::vector<double>>{};
  for (auto& wv : witnesses) normalize(wv, pot.V, grid);

  // Sample j < T: random (u_j, h_j) or (u_j, u_j); the rest are witnesses.
  const std::size_t per_trial = pairs ? 2 : 1;
  const std::size_t total = T + witnesses.size();
  std::vector<std::vector<double>> values(total * per_trial);
  parallel_for(total, opts.jobs, [&](std::size_t j) {
    if (j < T) {
      auto u = sampling::random_bump_field(*grid, opts.seed, kFieldStream, j);
      normalize(u, pot.V, grid);
      values[j * per_trial] = region_integrals(*grid, pot.K, u, u, q, radii, origin);
      if (pairs) {
        auto h = sampling::random_bump_field(*grid, opts.seed, kPartnerStream, j);
        normalize(h, pot.V, grid);
        values[j * per_trial + 1] = region_integrals(*grid, pot.K, u, h, q, radii, origin);
      }
    } else {
      const auto& u = witnesses[j - T];
      values[j * per_trial] = region_integrals(*grid, pot.K, u, u, q, radii, origin);
      if (pairs) values[j * per_trial + 1] = values[j * per_trial];
    }
  });

  EmbeddingEstimate est;
  est.functional = which;
  est.q = q;
  est.radii = radii;
  est.estimates.assign(radii.size(), 0.0);
  est.trials = opts.trials;
  est.seed = opts.seed;
  est.samples = total;
  for (const auto& v : values) {
    for (std::size_t k = 0; k < radii.size(); ++k) est.estimates[k] = std::max(est.estimates[k], v[k]);
  }
  est.trend_slope = log_log_slope(est.radii, est.estimates);
  return est;
}

}  // namespace

EmbeddingEstimate estimate_S(const GridPtr& grid, const SampledPotentials& pot, double q, std::vector<double> radii,
                             Functional which, const EstimateOptions& opts) {
  if (which != Functional::S0 && which != Functional::Sinf) throw DomainError("estimate_S handles S0 and Sinf");
  return run_estimate(grid, pot, q, std::move(radii), which, opts, false);
}

EmbeddingEstimate estimate_R(const GridPtr& grid, const SampledPotentials& pot, double q, std::vector<double> radii,
                             Functional which, const EstimateOptions& opts) {
  if (which != Functional::R0 && which != Functional::Rinf) throw DomainError("estimate_R handles R0 and Rinf");
  return run_estimate(grid, pot, q, std::move(radii), which, opts, true);
}

}  // namespace bilap::verify
