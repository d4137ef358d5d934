#include "cli/commands.hpp"

#include <cmath>
#include <filesystem>
#include <iostream>
#include <limits>
#include <sstream>
#include <vector>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "bilap/errors.hpp"
#include "bilap/exponents.hpp"
#include "bilap/parallel.hpp"
#include "bilap/sampling.hpp"
#include "bilap/solve.hpp"
#include "bilap/verify.hpp"
#include "cli/csv.hpp"

namespace bilap::cli {
namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kBoundFieldStream = 11;

std::ostream& log_of(const CommandOptions& o) { return o.log ? *o.log : std::cout; }

std::string out_path(const RunConfig& c, const char* file) {
  fs::create_directories(c.output_dir);
  return (fs::path(c.output_dir) / file).string();
}

std::string describe(const exponents::GrowthParams& p) {
  std::string s = fmt::format("alpha={};beta={}", p.alpha, p.beta);
  if (p.gamma) s += fmt::format(";gamma={}", *p.gamma);
  return s;
}

template <class Body>
int guarded(const CommandOptions& opts, Body&& body) {
  std::ostream& log = log_of(opts);
  try {
    return body();
  } catch (const GeometryError& e) {
    fmt::print(log, "error: {}\n", e.what());
    return exit_solver_failure;
  } catch (const SolverError& e) {
    fmt::print(log, "error: {}\n", e.what());
    return exit_solver_failure;
  } catch (const DomainError& e) {
    fmt::print(log, "invalid configuration: {}\n", e.what());
    return exit_invalid_config;
  } catch (const nlohmann::json::exception& e) {
    fmt::print(log, "invalid configuration: {}\n", e.what());
    return exit_invalid_config;
  }
}

// Value and gradient bounds always; decay bounds when the growth parameters
// of the potential satisfy their hypotheses.
std::vector<verify::DecayBoundReport> bound_reports(const RunConfig& c, const PotentialSpec& pot,
                                                    std::span<const double> V, const RadialField& u,
                                                    const verify::BoundOptions& bo) {
  std::vector<verify::DecayBoundReport> out;
  out.push_back(verify::check_pointwise(u, verify::BoundKind::value, bo));
  out.push_back(verify::check_pointwise(u, verify::BoundKind::gradient, bo));
  if (pot.infinity && pot.infinity->gamma && *pot.infinity->gamma <= 14.0 / 3.0) {
    out.push_back(verify::check_decay_outer(u, V, *pot.infinity->gamma, c.verify.outer_radius, bo));
  }
  if (pot.origin && pot.origin->gamma && *pot.origin->gamma >= 4.0) {
    out.push_back(verify::check_decay_inner(u, V, *pot.origin->gamma, c.verify.inner_radius, bo));
  }
  return out;
}

std::vector<Cell> bound_cells(const verify::DecayBoundReport& r) {
  return {std::string(verify::to_string(r.kind)), r.constant, r.multiplier, r.lambda, r.radius, r.max_ratio,
          std::string(r.pass ? "true" : "false")};
}

}  // namespace

int cmd_exponents(const RunConfig& c, const CommandOptions& opts) {
  return guarded(opts, [&] {
    validate(c);
    std::ostream& log = log_of(opts);
    const int N = c.dimension;
    const PotentialSpec pot = make_potential(c);
    CsvWriter csv(out_path(c, "windows.csv"), {"N", "a_or_params", "q_lo", "q_hi", "kind", "origin_thm", "infinity_thm"});

    exponents::CombinedWindow cw;
    std::string label;
    if (!pot.origin || !pot.infinity) {
      cw.window.kind = exponents::WindowKind::empty;
      cw.window.reason = "growth parameters of tabulated potentials are unknown";
      label = "table";
    } else {
      cw = exponents::combined_window(N, *pot.origin, *pot.infinity);
      label = c.potential.kind == "power_law" ? fmt::format("a={}", c.potential.a)
                                              : describe(*pot.origin) + "|" + describe(*pot.infinity);
    }
    const auto& w = cw.window;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    double lo = nan, hi = nan;
    switch (w.kind) {
      case exponents::WindowKind::interval:
      case exponents::WindowKind::half_line:
        lo = w.lo;
        hi = w.hi;
        fmt::print(log, "N={} {}: q in ({}, {}) [{}] via {} + {}\n", N, label, lo, hi, exponents::to_string(w.kind),
                   exponents::to_string(cw.origin_rule), exponents::to_string(cw.infinity_rule));
        break;
      case exponents::WindowKind::split_pair:
        lo = w.hi;
        hi = *w.q2_threshold;
        fmt::print(log, "N={} {}: split pair {} < q1 < {}, q2 > {} via {} + {}\n", N, label, w.lo, w.hi, hi,
                   exponents::to_string(cw.origin_rule), exponents::to_string(cw.infinity_rule));
        break;
      case exponents::WindowKind::empty:
        fmt::print(log, "N={} {}: no certified exponent ({})\n", N, label, w.reason);
        break;
    }
    csv.row({static_cast<long long>(N), label, lo, hi, std::string(exponents::to_string(w.kind)),
             std::string(exponents::to_string(cw.origin_rule)), std::string(exponents::to_string(cw.infinity_rule))});

    bool certified = w.kind != exponents::WindowKind::empty;
    if (c.exponents.check_pair) {
      if (!pot.origin || !pot.infinity) {
        fmt::print(log, "pair ({}, {}) uncertified: growth parameters unknown\n", c.exponents.q1, c.exponents.q2);
        certified = false;
      } else {
        const auto cert = exponents::certify_pair(N, *pot.origin, *pot.infinity, c.exponents.q1, c.exponents.q2);
        if (cert.certified) {
          fmt::print(log, "pair ({}, {}) certified via {} + {}\n", c.exponents.q1, c.exponents.q2,
                     exponents::to_string(cert.origin_rule), exponents::to_string(cert.infinity_rule));
        } else {
          fmt::print(log, "pair ({}, {}) uncertified: {}\n", c.exponents.q1, c.exponents.q2, cert.failure);
        }
        certified = certified && cert.certified;
      }
    }
    return opts.strict && !certified ? exit_uncertified : exit_ok;
  });
}

int cmd_solve(const RunConfig& c, const CommandOptions& opts) {
  return guarded(opts, [&] {
    validate(c);
    std::ostream& log = log_of(opts);
    const auto grid = make_grid(c);
    const PotentialSpec pot = make_potential(c);
    const NonlinearitySpec nl = make_nonlinearity(c);
    const EnergyFunctional fn(grid, pot, nl);
    SolverConfig sc = c.solver.config;
    sc.seed = c.seed;

    auto warnings = certification_warnings(c.dimension, pot, nl);
    for (const auto& w : warnings) fmt::print(log, "warning: {}\n", w);
    if (opts.strict && !warnings.empty()) return static_cast<int>(exit_uncertified);
    if (pot.has_forcing()) {
      const auto q = check_Q_admissible(grid, pot);
      fmt::print(log, "forcing bound L0 = {} (discrete dual norm {})\n", q.L0, q.L0_discrete);
    }

    std::string mode = c.solver.mode;
    if (mode == "auto") {
      const auto range = nl.exponent_range();
      mode = range && range->first > 2.0 ? "mountain_pass" : "minimize";
    }
    SolveResult res = mode == "mountain_pass" ? mountain_pass(fn, sc) : minimize(fn, sc);
    res.warnings.insert(res.warnings.begin(), warnings.begin(), warnings.end());

    {
      CsvWriter csv(out_path(c, "solution.csv"), {"r", "u", "lap_u"});
      const auto r = grid->nodes();
      const auto lap = res.u.laplacian_values();
      for (std::size_t i = 0; i < r.size(); ++i) csv.row({r[i], res.u[i], lap[i]});
    }
    {
      CsvWriter csv(out_path(c, "result.csv"),
                    {"mode", "classification", "half_norm_sq", "K_term", "Q_term", "total", "residual_hv",
                     "residual_l2", "iterations", "nonneg_violation", "trivial", "endpoint_lambda", "rho",
                     "sphere_min"});
      const double nan = std::numeric_limits<double>::quiet_NaN();
      csv.row({mode, std::string(to_string(res.classification)), res.energy.half_norm_sq, res.energy.K_term,
               res.energy.Q_term, res.energy.total, res.residual, res.residual_l2,
               static_cast<long long>(res.iterations), res.nonneg_violation, std::string(res.trivial ? "true" : "false"),
               res.endpoint_lambda, res.geometry ? res.geometry->rho : nan,
               res.geometry ? res.geometry->sphere_min : nan});
    }
    {
      CsvWriter csv(out_path(c, "decay.csv"),
                    {"bound_kind", "constant", "multiplier", "lambda", "radius", "max_ratio", "pass"});
      verify::BoundOptions bo{c.verify.ratio_tol, c.verify.constant_scale};
      for (const auto& r : bound_reports(c, pot, fn.potentials().V, res.u, bo)) csv.row(bound_cells(r));
    }

    fmt::print(log, "{}: {} I={} residual={:.3e} iterations={}{}\n", mode, to_string(res.classification),
               res.energy.total, res.residual, res.iterations, res.trivial ? " (trivial solution)" : "");
    if (res.classification == Classification::failed) {
      fmt::print(log, "solver failure: {}\n", res.diagnostic);
      return static_cast<int>(exit_solver_failure);
    }
    return static_cast<int>(exit_ok);
  });
}

int cmd_verify(const RunConfig& c, const CommandOptions& opts) {
  return guarded(opts, [&] {
    validate(c);
    std::ostream& log = log_of(opts);
    const auto grid = make_grid(c);
    const PotentialSpec pot = make_potential(c);
    const auto sampled = SampledPotentials::sample(*grid, pot);
    const verify::BoundOptions bo{c.verify.ratio_tol, c.verify.constant_scale};

    int violations = 0;
    {
      CsvWriter csv(out_path(c, "bounds.csv"),
                    {"field", "bound_kind", "constant", "multiplier", "lambda", "radius", "max_ratio", "pass"});
      std::vector<std::vector<verify::DecayBoundReport>> reports(static_cast<std::size_t>(c.verify.fields));
      parallel_for(reports.size(), opts.jobs, [&](std::size_t f) {
        RadialField u(grid, sampling::random_bump_field(*grid, c.seed, kBoundFieldStream, f));
        reports[f] = bound_reports(c, pot, sampled.V, u, bo);
      });
      for (std::size_t f = 0; f < reports.size(); ++f) {
        for (const auto& r : reports[f]) {
          auto cells = bound_cells(r);
          cells.insert(cells.begin(), static_cast<long long>(f));
          csv.row(cells);
          if (!r.pass) ++violations;
        }
      }
    }
    {
      CsvWriter csv(out_path(c, "estimates.csv"), {"functional", "q", "R", "estimate", "trials", "seed"});
      verify::EstimateOptions eo{c.verify.trials, c.seed, opts.jobs, true};
      for (const auto& name : c.verify.functionals) {
        const auto which = verify::parse_functional(name);
        const bool origin = which == verify::Functional::S0 || which == verify::Functional::R0;
        const auto& radii = origin ? c.verify.radii_origin : c.verify.radii_infinity;
        const bool is_S = which == verify::Functional::S0 || which == verify::Functional::Sinf;
        const auto est = is_S ? verify::estimate_S(grid, sampled, c.verify.q, radii, which, eo)
                              : verify::estimate_R(grid, sampled, c.verify.q, radii, which, eo);
        for (std::size_t k = 0; k < est.radii.size(); ++k) {
          csv.row({name, est.q, est.radii[k], est.estimates[k], static_cast<long long>(est.trials),
                   std::to_string(est.seed)});
        }
        fmt::print(log, "{}(q={}): trend slope {:.4f} over {} samples\n", name, est.q, est.trend_slope, est.samples);
      }
    }
    fmt::print(log, "bound checks: {} violations over {} fields\n", violations, c.verify.fields);
    return violations > 0 ? static_cast<int>(exit_bound_violation) : static_cast<int>(exit_ok);
  });
}

int cmd_sweep(const RunConfig& c, const CommandOptions& opts) {
  return guarded(opts, [&] {
    validate(c);
    std::ostream& log = log_of(opts);
    const auto& values = c.sweep.values;
    std::vector<int> codes(values.size(), 0);
    std::vector<std::string> logs(values.size());
    parallel_for(values.size(), opts.jobs, [&](std::size_t i) {
      RunConfig job = c;
      const double v = values[i];
      if (c.sweep.parameter == "a") job.potential.a = v;
      else if (c.sweep.parameter == "q") job.nonlinearity.q = v;
      else job.dimension = static_cast<int>(std::lround(v));
      job.seed = c.seed + i;
      job.output_dir = (fs::path(c.output_dir) / fmt::format("sweep_{}", i)).string();
      std::ostringstream out;
      CommandOptions inner{opts.strict, 1, &out};
      codes[i] = run_command(c.sweep.command, job, inner);
      logs[i] = out.str();
    });
    CsvWriter csv(out_path(c, "sweep.csv"), {"index", "parameter", "value", "command", "exit_code", "output_dir"});
    int worst = exit_ok;
    for (std::size_t i = 0; i < values.size(); ++i) {
      fmt::print(log, "[{} {}={}] {}", i, c.sweep.parameter, values[i], logs[i]);
      csv.row({static_cast<long long>(i), c.sweep.parameter, values[i], c.sweep.command, static_cast<long long>(codes[i]),
               fmt::format("sweep_{}", i)});
      if (worst == exit_ok) worst = codes[i];
    }
    return worst;
  });
}

int run_command(std::string_view name, const RunConfig& config, const CommandOptions& opts) {
  if (name == "exponents") return cmd_exponents(config, opts);
  if (name == "solve") return cmd_solve(config, opts);
  if (name == "verify") return cmd_verify(config, opts);
  if (name == "sweep") return cmd_sweep(config, opts);
  fmt::print(log_of(opts), "unknown command '{}'\n", name);
  return exit_invalid_config;
}

}  // namespace bilap::cli
