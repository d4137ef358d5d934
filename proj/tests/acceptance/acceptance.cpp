// Acceptance run: one line per criterion, exit status 1 if any fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "bilap/exponents.hpp"
#include "bilap/sampling.hpp"
#include "bilap/solve.hpp"
#include "bilap/verify.hpp"
#include "oracles.hpp"

using namespace bilap;
namespace ex = bilap::exponents;
namespace vf = bilap::verify;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Criterion {
  const char* id;
  const char* name;
  double budget_s;
  std::function<Outcome()> run;
};

GridPtr log_grid(double r0, double r1, std::size_t M) {
  return RadialGrid::build(DimensionContext::make(5), r0, r1, M, Spacing::logarithmic);
}

char buf[512];

template <class... Args>
std::string fmt(const char* f, Args... args) {
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Outcome exponent_reproduction() {
  using oracle::Fraction;
  const int N = 5;
  const Fraction lo = Fraction(2) * Fraction(2 * N - 2 - 2) / Fraction(2 * N - 2 - 4);
  const Fraction hi = Fraction(2) * Fraction(N - 2 + 1) / Fraction(N - 4);
  const Fraction split = Fraction(2) * Fraction(N - 3) / Fraction(N - 4);
  const auto w2 = ex::power_law_window(N, 2);
  const auto w4 = ex::power_law_window(N, 4);
  const bool ok2 = w2.kind == ex::WindowKind::interval && w2.lo == lo.value() && w2.hi == hi.value() &&
                   w2.lo == 3.0 && w2.hi == 8.0;
  const bool ok4 = w4.kind == ex::WindowKind::split_pair && w4.hi == split.value() && w4.q2_threshold &&
                   *w4.q2_threshold == split.value() && split.value() == 4.0;
  return {ok2 && ok4, fmt("a=2 window (%.17g, %.17g); a=4 split %.17g / %.17g", w2.lo, w2.hi, w4.hi,
                          w4.q2_threshold.value_or(std::nan("")))};
}

Outcome region_consistency() {
  std::mt19937_64 eng(20240601);
  std::uniform_real_distribution<double> beta(0, 1), alpha(-12, 12), q(0, 20);
  long agree = 0, total = 0;
  for (int N = 5; N <= 9; ++N) {
    for (int k = 0; k < 10000; ++k) {
      const double b = beta(eng), a = alpha(eng), qq = q(eng);
      const bool region = ex::region_contains(N, ex::make_region(N, b, 4.0), a, qq);
      const bool window = ex::origin_window(N, {a, b, std::nullopt}).contains(qq);
      agree += region == window;
      ++total;
    }
  }
  return {agree == total, fmt("%ld/%ld agree", agree, total)};
}

Outcome operator_order() {
  std::vector<double> err;
  for (std::size_t M : {256u, 512u, 1024u}) {
    const auto g = RadialGrid::build(DimensionContext::make(5), 1e-3, 1.0, M, Spacing::uniform);
    const auto b = bilaplacian(sample(g, [](double r) { return std::pow(r, 4); }));
    const auto r = g->nodes();
    double e = 0;
    for (std::size_t i = 0; i < M; ++i)
      if (r[i] >= 0.25 && r[i] <= 0.75) e = std::max(e, std::abs(b[i] - 280.0));
    err.push_back(e);
  }
  const double p1 = oracle::observed_order(err[0], err[1]);
  const double p2 = oracle::observed_order(err[1], err[2]);
  return {p1 >= 1.9 && p2 >= 1.9, fmt("errors %.3e %.3e %.3e, orders %.3f %.3f", err[0], err[1], err[2], p1, p2)};
}

Outcome gradient_check() {
  const auto g = log_grid(1e-3, 20, 400);
  auto pot = PotentialSpec::power_law(2);
  pot.Q = [](double r) { return std::exp(-r); };
  NonlinearitySpec custom;
  custom.kind = NonlinearityKind::custom;
  custom.f = [](double t) { return t * t * t / (1 + t * t); };
  custom.F = [](double t) { return 0.5 * (t * t - std::log1p(t * t)); };
  double worst = 0;
  int count = 0;
  for (const auto& nl : {NonlinearitySpec::pure_power(4), NonlinearitySpec::capped_pair(1, 3, 5), custom}) {
    const EnergyFunctional fn(g, pot, nl);
    for (std::uint64_t k = 0; k < 10; ++k) {
      const auto u = sampling::random_bump_field(*g, 1009, 1, k);
      const auto h = sampling::random_bump_field(*g, 1009, 2, k);
      const double eps = 1e-5;
      std::vector<double> up(u), um(u);
      for (std::size_t i = 0; i < u.size(); ++i) {
        up[i] += eps * h[i];
        um[i] -= eps * h[i];
      }
      const double fd = static_cast<double>(fn.energy_difference(um, up) / (2 * eps));
      const double an = fn.pairing(fn.gradient(u).strong, h);
      worst = std::max(worst, std::abs(fd - an) / std::abs(an));
      ++count;
    }
  }
  return {worst <= 1e-6, fmt("%d pairs, worst relative mismatch %.3e", count, worst)};
}

Outcome decay_bounds() {
  const auto g = log_grid(1e-4, 50, 2048);
  double worst = 0;
  int checks = 0, failures = 0;
  for (double a : {0.0, 2.0, 4.0}) {
    const auto V = SampledPotentials::sample(*g, PotentialSpec::power_law(a)).V;
    for (std::uint64_t k = 0; k < 50; ++k) {
      const RadialField u(g, sampling::random_bump_field(*g, 20240601, 1, k));
      std::vector<vf::DecayBoundReport> reps{vf::check_pointwise(u, vf::BoundKind::value),
                                             vf::check_pointwise(u, vf::BoundKind::gradient),
                                             vf::check_decay_outer(u, V, a, 1.0)};
      if (a >= 4) reps.push_back(vf::check_decay_inner(u, V, a, 1.0));
      for (const auto& r : reps) {
        worst = std::max(worst, r.max_ratio);
        failures += !r.pass;
        ++checks;
      }
    }
  }
  return {failures == 0 && worst <= 1 + 1e-3, fmt("%d checks, %d failures, max ratio %.6f", checks, failures, worst)};
}

double max_abs(std::span<const double> v) {
  double m = 0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

Outcome sublinear_existence() {
  const auto g = log_grid(1e-4, 20, 2048);
  const EnergyFunctional fn(g, PotentialSpec::power_law(2), NonlinearitySpec::pure_power(1.5));
  const auto res = minimize(fn, SolverConfig{});
  const double mn = *std::min_element(res.u.values().begin(), res.u.values().end());
  const double mx = max_abs(res.u.values());
  const bool ok = res.classification == Classification::minimizer && res.energy.total < 0 && res.residual <= 1e-6 &&
                  mn >= -1e-8 * mx;
  return {ok, fmt("I=%.10g residual=%.3e min u=%.4g max u=%.4g iterations=%d", res.energy.total, res.residual, mn, mx,
                  res.iterations)};
}

Outcome mountain_pass_run(const PotentialSpec& pot, const char* label) {
  const auto g = log_grid(1e-4, 50, 2048);
  const double q = 4;
  const EnergyFunctional fn(g, pot, NonlinearitySpec::pure_power(q));
  SolverConfig cfg;
  cfg.grad_tol = 1e-5;
  const auto res = mountain_pass(fn, cfg);
  const double norm_sq = 2 * res.energy.half_norm_sq;
  const double kq = q * res.energy.K_term;
  const double nehari = std::abs(norm_sq - kq) / norm_sq;
  const bool ok = res.classification == Classification::mountain_pass && res.energy.total > 0 &&
                  res.residual <= 1e-5 && nehari <= 1e-4;
  return {ok, fmt("%s: I=%.8g residual=%.3e Nehari defect %.3e", label, res.energy.total, res.residual, nehari)};
}

Outcome superlinear_existence() {
  PotentialSpec unit;
  unit.V = [](double) { return 1.0; };
  unit.K = [](double) { return 1.0; };
  const auto a = mountain_pass_run(PotentialSpec::power_law(0), "V=1,K=r");
  const auto b = mountain_pass_run(unit, "V=K=1");
  return {a.pass && b.pass, a.detail + "; " + b.detail};
}

Outcome embedding_trend() {
  vf::EstimateOptions opts;
  opts.seed = 20240601;
  opts.trials = 200;

  const auto g = log_grid(1e-4, 50, 2048);
  const auto pot = SampledPotentials::sample(*g, PotentialSpec::power_law(2));
  std::vector<double> r0;
  for (int k = 6; k >= 1; --k) r0.push_back(std::ldexp(1.0, -k));
  const auto s0 = vf::estimate_S(g, pot, 5, r0, vf::Functional::S0, opts);
  bool monotone = true;
  for (std::size_t i = 1; i < s0.estimates.size(); ++i) monotone = monotone && s0.estimates[i] >= s0.estimates[i - 1];

  const auto big = log_grid(1e-4, 1000, 4096);
  const auto pot_big = SampledPotentials::sample(*big, PotentialSpec::power_law(2));
  std::vector<double> rinf;
  for (int k = 1; k <= 6; ++k) rinf.push_back(std::ldexp(1.0, k));
  const auto si = vf::estimate_S(big, pot_big, 2.5, rinf, vf::Functional::Sinf, opts);
  const double floor = 0.5 * si.estimates.front();
  bool above = floor > 0;
  for (double e : si.estimates) above = above && e >= floor;

  return {monotone && s0.trend_slope > 0 && above,
          fmt("S0 slope %.4f (%s), S0 range [%.3e, %.3e]; Sinf(q=2.5) range [%.4e, %.4e], floor %.4e",
              s0.trend_slope, monotone ? "non-decreasing" : "NOT monotone", s0.estimates.front(), s0.estimates.back(),
              *std::min_element(si.estimates.begin(), si.estimates.end()), si.estimates.front(), floor)};
}

}  // namespace

int main() {
  const std::vector<Criterion> criteria{
      {"AC1", "exponent reproduction", 1, exponent_reproduction},
      {"AC2", "region consistency at gamma=4", 10, region_consistency},
      {"AC3", "bilaplacian convergence order", 10, operator_order},
      {"AC4", "gradient finite-difference check", 30, gradient_check},
      {"AC5", "pointwise and decay bounds", 60, decay_bounds},
      {"AC6", "sublinear minimizer", 300, sublinear_existence},
      {"AC7", "superlinear mountain pass", 600, superlinear_existence},
      {"AC8", "embedding trends", 300, embedding_trend},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = c.run();
    } catch (const std::exception& e) {
      out = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs <= c.budget_s;
    const bool pass = out.pass && in_time;
    failed += !pass;
    std::printf("%s %s %s [%.2f s / %.0f s%s] %s\n", pass ? "PASS" : "FAIL", c.id, c.name, secs, c.budget_s,
                in_time ? "" : " over budget", out.detail.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
