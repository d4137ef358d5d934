#include "bilap/solve.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "bilap/errors.hpp"
#include "bilap/exponents.hpp"
#include "bilap/sampling.hpp"

namespace bilap {

std::string_view to_string(Preconditioner p) { return p == Preconditioner::riesz ? "riesz" : "diagonal"; }

Preconditioner parse_preconditioner(std::string_view s) {
  if (s == "riesz") return Preconditioner::riesz;
  if (s == "diagonal") return Preconditioner::diagonal;
  throw DomainError(fmt::format("unknown preconditioner '{}'", s));
}

std::string_view to_string(Classification c) {
  switch (c) {
    case Classification::minimizer: return "minimizer";
    case Classification::mountain_pass: return "mountain_pass";
    case Classification::failed: return "failed";
  }
  return "?";
}

void SolverConfig::validate() const {
  if (max_iters < 1) throw DomainError("max_iters must be positive");
  if (!(grad_tol > 0.0)) throw DomainError("grad_tol must be positive");
  if (!(initial_step > 0.0)) throw DomainError("initial_step must be positive");
  if (!(backtrack > 0.0 && backtrack < 1.0)) throw DomainError("backtrack must lie in (0,1)");
  if (!(armijo > 0.0 && armijo < 1.0)) throw DomainError("armijo must lie in (0,1)");
  if (path_points < 8) throw DomainError("path_points must be at least 8");
  if (deformation_steps < 1) throw DomainError("deformation_steps must be positive");
  if (!(climb_step > 0.0)) throw DomainError("climb_step must be positive");
  if (!(lambda_max >= 1.0)) throw DomainError("lambda_max must be at least 1");
  if (!(seed_norm > 0.0)) throw DomainError("seed_norm must be positive");
}

std::vector<std::string> certification_warnings(int N, const PotentialSpec& pot, const NonlinearitySpec& nl) {
  std::vector<std::string> out;
  const auto range = nl.exponent_range();
  if (!range) return out;
  if (!pot.origin || !pot.infinity) {
    out.emplace_back("potential growth parameters unknown; exponents not certified");
    return out;
  }
  const auto c = exponents::certify_pair(N, *pot.origin, *pot.infinity, range->first, range->second);
  if (!c.certified) out.push_back(fmt::format("exponents ({}, {}) not certified: {}", range->first, range->second, c.failure));
  return out;
}

namespace {

std::vector<double> gaussian_seed(const RadialGrid& g) {
  std::vector<double> u(g.size());
  const auto r = g.nodes();
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = std::exp(-r[i] * r[i]);
  return u;
}

long double dot(std::span<const double> a, std::span<const double> b) {
  long double acc = 0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += static_cast<long double>(a[i]) * b[i];
  return acc;
}

double max_abs(std::span<const double> u) {
  double m = 0.0;
  for (double v : u) m = std::max(m, std::fabs(v));
  return m;
}

double negative_part(std::span<const double> u) {
  double m = 0.0;
  for (double v : u) m = std::max(m, -v);
  return m;
}

std::vector<double> axpy(std::span<const double> u, double tau, std::span<const double> d) {
  std::vector<double> v(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) v[i] = u[i] + tau * d[i];
  return v;
}

bool forcing_present(const SampledPotentials& p) {
  return p.forcing && std::any_of(p.Q.begin(), p.Q.end(), [](double q) { return q != 0.0; });
}

bool linear_homogeneous(const EnergyFunctional& fn) {
  return fn.nonlinearity().kind == NonlinearityKind::zero && !forcing_present(fn.potentials());
}

struct LineSearch {
  bool accepted = false;
  std::vector<double> v;
  long double delta = 0;
  double tau = 0;
};

// Backtracking on the sufficient-decrease condition. When the decrease is
// below the resolution of the energy, a step that does not increase it is
// still accepted.
LineSearch backtrack_search(const EnergyFunctional& fn, std::span<const double> u, std::span<const double> d,
                            long double slope, double tau, const SolverConfig& cfg) {
  LineSearch best;
  constexpr double tau_min = 1e-14;
  for (; tau >= tau_min; tau *= cfg.backtrack) {
    auto v = axpy(u, tau, d);
    const long double delta = fn.energy_difference(u, v);
    if (!std::isfinite(static_cast<double>(delta))) continue;
    if (delta <= cfg.armijo * tau * slope) return {true, std::move(v), delta, tau};
    if (delta <= 0 && !best.accepted) best = {true, std::move(v), delta, tau};
  }
  return best;
}

}  // namespace

SolveResult minimize(const EnergyFunctional& fn, const SolverConfig& cfg) {
  cfg.validate();
  const RadialGrid& g = *fn.grid();
  const auto& pot = fn.potentials();
  const auto& nl = fn.nonlinearity();
  const bool project = nl.even_primitive();

  std::vector<double> u = gaussian_seed(g);
  const double n0 = fn.hv_norm(u);
  for (double& x : u) x *= cfg.seed_norm / n0;

  SolveResult res{RadialField(fn.grid(), u), {}, 0.0, 0.0, 0, Classification::failed, 0.0, false, {}, {}, {}, {}, 0.0};
  double energy = fn.energy(u).total;
  res.energy_history.push_back(energy);
  double tau_riesz = cfg.initial_step;
  bool converged = false;
  GradientEval G;
  int it = 0;
  for (;; ++it) {
    G = fn.gradient(u);
    if (!std::isfinite(G.residual_hv)) throw SolverError("non-finite gradient during minimization");
    if (G.residual_hv <= cfg.grad_tol) {
      converged = true;
      break;
    }
    if (it >= cfg.max_iters) break;

    LineSearch step;
    if (cfg.newton && nl.has_derivative()) {
      if (auto dn = fn.newton_direction(u, G.dual)) {
        const long double slope = dot(G.dual, *dn);
        if (slope < 0) step = backtrack_search(fn, u, *dn, slope, 1.0, cfg);
      }
    }
    if (!step.accepted) {
      std::vector<double> d;
      if (cfg.preconditioner == Preconditioner::riesz) {
        d = fn.riesz(G.dual);
        for (double& x : d) x = -x;
      } else {
        d.resize(u.size());
        for (std::size_t i = 0; i < u.size(); ++i) d[i] = -G.strong[i] / (1.0 + pot.V[i]);
      }
      const long double slope = dot(G.dual, d);
      step = backtrack_search(fn, u, d, slope, tau_riesz, cfg);
      if (step.accepted) tau_riesz = std::min(cfg.initial_step, 2.0 * step.tau);
    }
    if (!step.accepted) {
      res.diagnostic = fmt::format("line search stagnated at iteration {} with residual {:.3e}", it, G.residual_hv);
      break;
    }
    if (project) {
      std::vector<double> a(step.v.size());
      for (std::size_t i = 0; i < a.size(); ++i) a[i] = std::fabs(step.v[i]);
      if (fn.energy_difference(step.v, a) <= 0) step.v = std::move(a);
    }
    const long double delta = fn.energy_difference(u, step.v);
    if (delta > 0) {
      res.diagnostic = fmt::format("energy increased at iteration {}", it);
      break;
    }
    u = std::move(step.v);
    energy = fn.energy(u).total;
    if (!std::isfinite(energy) || max_abs(u) > 1e150) {
      throw SolverError(fmt::format("minimization diverged at iteration {}: energy {}; check the exponents", it, energy));
    }
    res.energy_history.push_back(energy);
  }

  if (linear_homogeneous(fn) && converged && fn.hv_norm(u) <= 1e-6 * cfg.seed_norm) {
    std::fill(u.begin(), u.end(), 0.0);
    G = fn.gradient(u);
  }
  res.u = RadialField(fn.grid(), u);
  res.energy = fn.energy(u);
  res.residual = G.residual_hv;
  res.residual_l2 = G.residual_l2;
  res.iterations = it;
  res.nonneg_violation = negative_part(u);
  res.trivial = max_abs(u) == 0.0;
  res.classification = converged ? Classification::minimizer : Classification::failed;
  if (!converged && res.diagnostic.empty()) {
    res.diagnostic = fmt::format("max_iters reached with residual {:.3e}", G.residual_hv);
  }
  const bool f4 = nl.theta && *nl.theta < 2.0 && nl.m && *nl.m > 0.0;
  if (converged && !forcing_present(pot) && f4 && !(res.energy.total < 0.0)) {
    res.classification = Classification::failed;
    res.diagnostic = fmt::format("final energy {} is not negative although the sublinear lower bound holds",
                                 res.energy.total);
  }
  return res;
}

RayScale ray_scale_endpoint(const EnergyFunctional& fn, const RadialField& u0, double lambda_max) {
  const auto v = u0.values();
  if (u0.grid() != fn.grid()) throw DomainError("seed lives on a different grid");
  if (negative_part(v) > 0.0) throw DomainError("ray seed must be nonnegative");
  if (std::fabs(v.back()) > 1e-12 * max_abs(v)) throw DomainError("ray seed must vanish at the outer node");
  const auto& nl = fn.nonlinearity();
  if (nl.t0 && !(max_abs(v) >= *nl.t0)) {
    throw DomainError(fmt::format("ray seed never reaches t0 = {}", *nl.t0));
  }
  for (double lambda = 1.0; lambda <= lambda_max; lambda *= 2.0) {
    std::vector<double> w(v.begin(), v.end());
    for (double& x : w) x *= lambda;
    if (fn.energy(w).total < 0.0) return RayScale{lambda, RadialField(fn.grid(), std::move(w))};
  }
  throw GeometryError(fmt::format("no negative energy along the ray up to lambda = {}", lambda_max));
}

GeometryProbe probe_geometry(const EnergyFunctional& fn, double rho_start, int directions, std::uint64_t seed,
                             const std::vector<std::vector<double>>& extra) {
  if (!(rho_start > 0.0)) throw DomainError("rho_start must be positive");
  const RadialGrid& g = *fn.grid();
  std::vector<std::vector<double>> dirs;
  for (int j = 0; j < directions; ++j) dirs.push_back(sampling::random_bump_field(g, seed, 7, static_cast<std::uint64_t>(j)));
  for (const auto& e : extra) dirs.push_back(e);
  for (auto& d : dirs) {
    const double n = fn.hv_norm(d);
    if (n > 0.0) {
      for (double& x : d) x /= n;
    }
  }
  double rho = rho_start;
  for (int halving = 0; halving < 80; ++halving, rho /= 2.0) {
    double lowest = std::numeric_limits<double>::infinity();
    for (const auto& d : dirs) {
      std::vector<double> w(d);
      for (double& x : w) x *= rho;
      lowest = std::min(lowest, fn.energy(w).total);
    }
    if (lowest > 0.0) return GeometryProbe{rho, lowest, static_cast<int>(dirs.size())};
  }
  throw GeometryError("energy is not positive on any small sphere around 0");
}

namespace {

// Re-equispaces path points first..last (inclusive, endpoints fixed) by
// H^2_V arc length.
void reparameterize(const EnergyFunctional& fn, std::vector<std::vector<double>>& path, std::size_t first,
                    std::size_t last) {
  if (last <= first + 1) return;
  std::vector<double> s(last - first + 1, 0.0);
  for (std::size_t j = first; j < last; ++j) {
    const auto d = axpy(path[j + 1], -1.0, path[j]);
    s[j - first + 1] = s[j - first] + fn.hv_norm(d);
  }
  const double total = s.back();
  if (!(total > 0.0)) return;
  std::vector<std::vector<double>> old(path.begin() + static_cast<long>(first), path.begin() + static_cast<long>(last) + 1);
  const std::size_t n = last - first;
  std::size_t seg = 0;
  for (std::size_t j = 1; j < n; ++j) {
    const double target = total * static_cast<double>(j) / static_cast<double>(n);
    while (seg + 1 < n && s[seg + 1] < target) ++seg;
    const double len = s[seg + 1] - s[seg];
    const double t = len > 0.0 ? (target - s[seg]) / len : 0.0;
    auto& dst = path[first + j];
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = (1.0 - t) * old[seg][i] + t * old[seg + 1][i];
  }
}

}  // namespace

SolveResult mountain_pass(const EnergyFunctional& fn, const SolverConfig& cfg) {
  cfg.validate();
  if (forcing_present(fn.potentials())) throw HypothesisError("mountain pass requires Q = 0");
  const auto range = fn.nonlinearity().exponent_range();
  if (!range || !(range->first > 2.0)) throw HypothesisError("mountain pass requires growth exponents above 2");

  const RadialGrid& g = *fn.grid();
  const RadialField seed(fn.grid(), gaussian_seed(g));
  const RayScale ray = ray_scale_endpoint(fn, seed, cfg.lambda_max);
  const auto ubar = ray.field.values();
  const double bar_norm = fn.hv_norm(ubar);

  const std::size_t P = static_cast<std::size_t>(cfg.path_points);
  std::vector<std::vector<double>> path(P + 1);
  for (std::size_t j = 0; j <= P; ++j) {
    path[j].resize(ubar.size());
    for (std::size_t i = 0; i < ubar.size(); ++i) path[j][i] = ubar[i] * static_cast<double>(j) / static_cast<double>(P);
  }
  const GeometryProbe geometry =
      probe_geometry(fn, bar_norm / 16.0, 16, cfg.seed, {std::vector<double>(ubar.begin(), ubar.end())});

  std::vector<double> E(P + 1);
  auto refresh = [&] {
    for (std::size_t j = 1; j < P; ++j) E[j] = fn.energy(path[j]).total;
  };
  refresh();

  const double tau = cfg.climb_step;
  bool converged = false;
  std::size_t k = 1;
  GradientEval G;
  std::vector<double> history;
  int it = 0;
  for (;; ++it) {
    k = 1;
    for (std::size_t j = 2; j < P; ++j) {
      if (E[j] > E[k]) k = j;
    }
    history.push_back(E[k]);
    if (!(E[k] > 0.0) || fn.hv_norm(path[k]) < 1e-3 * bar_norm) {
      throw SolverError(fmt::format("path collapsed toward 0 at iteration {}", it));
    }
    G = fn.gradient(path[k]);
    if (!std::isfinite(G.residual_hv)) throw SolverError("non-finite gradient on the path");
    if (G.residual_hv <= cfg.grad_tol) {
      converged = true;
      break;
    }
    if (it >= cfg.deformation_steps) break;

    const auto gB = fn.riesz(G.dual);
    auto t = axpy(path[k + 1], -1.0, path[k - 1]);
    const double tn = fn.hv_norm(t);
    if (tn > 0.0) {
      for (double& x : t) x /= tn;
    }
    const double along = tn > 0.0 ? fn.hv_inner(gB, t) : 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) path[k][i] += tau * (-gB[i] + 2.0 * along * t[i]);

    reparameterize(fn, path, 0, k);
    reparameterize(fn, path, k, P);
    refresh();
  }

  const auto& u = path[k];
  SolveResult res{RadialField(fn.grid(), u), fn.energy(u), G.residual_hv, G.residual_l2, it,
                  Classification::failed, negative_part(u), max_abs(u) == 0.0, std::move(history), {}, {},
                  geometry, ray.lambda};
  if (converged && res.energy.total > 0.0) {
    res.classification = Classification::mountain_pass;
  } else if (!converged) {
    res.diagnostic = fmt::format("deformation steps exhausted with residual {:.3e}", G.residual_hv);
  } else {
    res.diagnostic = fmt::format("critical point has non-positive energy {}", res.energy.total);
  }
  return res;
}

}  // namespace bilap
