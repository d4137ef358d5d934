#include "cli/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <fmt/format.h>

#include "bilap/errors.hpp"
#include "bilap/exponents.hpp"
#include "bilap/field_io.hpp"
#include "bilap/verify.hpp"

namespace bilap::cli {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

// Reads keys of one object and rejects any key that was not consumed.
class Section {
 public:
  Section(const json& j, std::string name) : j_(j), name_(std::move(name)) {
    if (!j_.is_object()) throw DomainError(fmt::format("config section '{}' must be an object", name_));
  }

  template <class T>
  void read(const char* key, T& dst) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    try {
      dst = j_.at(key).get<T>();
    } catch (const json::exception& e) {
      throw DomainError(fmt::format("config key '{}.{}': {}", name_, key, e.what()));
    }
  }

  const json* child(const char* key) {
    seen_.insert(key);
    return j_.contains(key) ? &j_.at(key) : nullptr;
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) throw DomainError(fmt::format("unknown config key '{}.{}'", name_, it.key()));
    }
  }

 private:
  const json& j_;
  std::string name_;
  std::set<std::string> seen_;
};

}  // namespace

ordered_json to_json(const RunConfig& c) {
  ordered_json j;
  j["dimension"] = c.dimension;
  j["seed"] = c.seed;
  j["output_dir"] = c.output_dir;
  const auto& p = c.potential;
  j["potential"] = {{"kind", p.kind},
                    {"a", p.a},
                    {"name", p.name},
                    {"V_table", p.V_table},
                    {"K_table", p.K_table},
                    {"Q_table", p.Q_table},
                    {"forcing", p.forcing},
                    {"forcing_amplitude", p.forcing_amplitude},
                    {"forcing_rate", p.forcing_rate},
                    {"K_integrability_s", p.K_integrability_s}};
  const auto& n = c.nonlinearity;
  j["nonlinearity"] = {{"kind", n.kind}, {"q", n.q}, {"M", n.M}, {"q1", n.q1}, {"q2", n.q2}, {"sign", n.sign}};
  const auto& g = c.grid;
  j["grid"] = {{"r_min", g.r_min}, {"r_max", g.r_max}, {"nodes", g.nodes}, {"spacing", g.spacing}};
  const auto& s = c.solver.config;
  j["solver"] = {{"mode", c.solver.mode},
                 {"max_iters", s.max_iters},
                 {"grad_tol", s.grad_tol},
                 {"initial_step", s.initial_step},
                 {"backtrack", s.backtrack},
                 {"armijo", s.armijo},
                 {"path_points", s.path_points},
                 {"deformation_steps", s.deformation_steps},
                 {"climb_step", s.climb_step},
                 {"lambda_max", s.lambda_max},
                 {"seed_norm", s.seed_norm},
                 {"preconditioner", std::string(to_string(s.preconditioner))},
                 {"newton", s.newton}};
  const auto& v = c.verify;
  j["verify"] = {{"fields", v.fields},
                 {"ratio_tol", v.ratio_tol},
                 {"constant_scale", v.constant_scale},
                 {"outer_radius", v.outer_radius},
                 {"inner_radius", v.inner_radius},
                 {"q", v.q},
                 {"trials", v.trials},
                 {"functionals", v.functionals},
                 {"radii_origin", v.radii_origin},
                 {"radii_infinity", v.radii_infinity}};
  j["exponents"] = {{"check_pair", c.exponents.check_pair}, {"q1", c.exponents.q1}, {"q2", c.exponents.q2}};
  j["sweep"] = {{"command", c.sweep.command}, {"parameter", c.sweep.parameter}, {"values", c.sweep.values}};
  return j;
}

RunConfig from_json(const json& j) {
  RunConfig c;
  Section top(j, "config");
  top.read("dimension", c.dimension);
  top.read("seed", c.seed);
  top.read("output_dir", c.output_dir);
  if (const json* p = top.child("potential")) {
    Section s(*p, "potential");
    auto& d = c.potential;
    s.read("kind", d.kind);
    s.read("a", d.a);
    s.read("name", d.name);
    s.read("V_table", d.V_table);
    s.read("K_table", d.K_table);
    s.read("Q_table", d.Q_table);
    s.read("forcing", d.forcing);
    s.read("forcing_amplitude", d.forcing_amplitude);
    s.read("forcing_rate", d.forcing_rate);
    s.read("K_integrability_s", d.K_integrability_s);
    s.finish();
  }
  if (const json* p = top.child("nonlinearity")) {
    Section s(*p, "nonlinearity");
    auto& d = c.nonlinearity;
    s.read("kind", d.kind);
    s.read("q", d.q);
    s.read("M", d.M);
    s.read("q1", d.q1);
    s.read("q2", d.q2);
    s.read("sign", d.sign);
    s.finish();
  }
  if (const json* p = top.child("grid")) {
    Section s(*p, "grid");
    auto& d = c.grid;
    s.read("r_min", d.r_min);
    s.read("r_max", d.r_max);
    s.read("nodes", d.nodes);
    s.read("spacing", d.spacing);
    s.finish();
  }
  if (const json* p = top.child("solver")) {
    Section s(*p, "solver");
    auto& d = c.solver.config;
    s.read("mode", c.solver.mode);
    s.read("max_iters", d.max_iters);
    s.read("grad_tol", d.grad_tol);
    s.read("initial_step", d.initial_step);
    s.read("backtrack", d.backtrack);
    s.read("armijo", d.armijo);
    s.read("path_points", d.path_points);
    s.read("deformation_steps", d.deformation_steps);
    s.read("climb_step", d.climb_step);
    s.read("lambda_max", d.lambda_max);
    s.read("seed_norm", d.seed_norm);
    std::string pre(to_string(d.preconditioner));
    s.read("preconditioner", pre);
    d.preconditioner = parse_preconditioner(pre);
    s.read("newton", d.newton);
    s.finish();
  }
  if (const json* p = top.child("verify")) {
    Section s(*p, "verify");
    auto& d = c.verify;
    s.read("fields", d.fields);
    s.read("ratio_tol", d.ratio_tol);
    s.read("constant_scale", d.constant_scale);
    s.read("outer_radius", d.outer_radius);
    s.read("inner_radius", d.inner_radius);
    s.read("q", d.q);
    s.read("trials", d.trials);
    s.read("functionals", d.functionals);
    s.read("radii_origin", d.radii_origin);
    s.read("radii_infinity", d.radii_infinity);
    s.finish();
  }
  if (const json* p = top.child("exponents")) {
    Section s(*p, "exponents");
    s.read("check_pair", c.exponents.check_pair);
    s.read("q1", c.exponents.q1);
    s.read("q2", c.exponents.q2);
    s.finish();
  }
  if (const json* p = top.child("sweep")) {
    Section s(*p, "sweep");
    s.read("command", c.sweep.command);
    s.read("parameter", c.sweep.parameter);
    s.read("values", c.sweep.values);
    s.finish();
  }
  top.finish();
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError(fmt::format("cannot open config '{}'", path));
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw DomainError(fmt::format("config '{}' is not valid JSON: {}", path, e.what()));
  }
  return from_json(j);
}

std::string dump_config(const RunConfig& c) { return to_json(c).dump(2) + "\n"; }

void validate(const RunConfig& c) {
  (void)DimensionContext::make(c.dimension);
  const auto& g = c.grid;
  (void)parse_spacing(g.spacing);
  if (g.nodes < 16) throw DomainError("grid.nodes must be at least 16");
  if (!(g.r_min > 0.0) || !(g.r_max > g.r_min)) throw DomainError("grid needs 0 < r_min < r_max");

  const auto& p = c.potential;
  if (p.kind == "power_law") {
    if (!std::isfinite(p.a)) throw DomainError("potential.a must be finite");
    if (p.a > 4.0) throw HypothesisError(fmt::format("power-law exponent a={} exceeds 4", p.a));
  } else if (p.kind == "builtin") {
    if (p.name != "unit" && p.name != "two_scale") throw DomainError(fmt::format("unknown builtin potential '{}'", p.name));
  } else if (p.kind == "table") {
    if (p.V_table.empty() || p.K_table.empty()) throw DomainError("table potentials need V_table and K_table");
  } else {
    throw DomainError(fmt::format("unknown potential kind '{}'", p.kind));
  }
  if (p.forcing != "none" && p.forcing != "exp") throw DomainError(fmt::format("unknown forcing '{}'", p.forcing));
  if (p.forcing == "exp" && !(p.forcing_amplitude >= 0.0 && p.forcing_rate > 0.0)) {
    throw DomainError("exp forcing needs amplitude >= 0 and rate > 0");
  }
  const int N = c.dimension;
  if (!(p.K_integrability_s > 2.0 * N / (N + 4.0))) throw DomainError("K_integrability_s must exceed 2N/(N+4)");

  (void)make_nonlinearity(c);
  if (c.solver.mode != "auto" && c.solver.mode != "minimize" && c.solver.mode != "mountain_pass") {
    throw DomainError(fmt::format("unknown solver mode '{}'", c.solver.mode));
  }
  c.solver.config.validate();

  const auto& v = c.verify;
  if (v.fields < 1) throw DomainError("verify.fields must be positive");
  if (!(v.ratio_tol > 0.0)) throw DomainError("verify.ratio_tol must be positive");
  if (!(v.constant_scale > 0.0)) throw DomainError("verify.constant_scale must be positive");
  if (v.trials < 100) throw DomainError("verify.trials must be at least 100");
  if (!(v.q >= 1.0)) throw DomainError("verify.q must be at least 1");
  if (!(v.outer_radius > 0.0) || !(v.inner_radius > 0.0)) throw DomainError("verify radii must be positive");
  for (const auto& f : v.functionals) (void)verify::parse_functional(f);
  for (double r : v.radii_origin) {
    if (!(r > 0.0)) throw DomainError("verify.radii_origin must be positive");
  }
  for (double r : v.radii_infinity) {
    if (!(r > 0.0)) throw DomainError("verify.radii_infinity must be positive");
  }

  const auto& s = c.sweep;
  if (s.command != "exponents" && s.command != "solve" && s.command != "verify") {
    throw DomainError(fmt::format("unknown sweep command '{}'", s.command));
  }
  if (s.parameter != "a" && s.parameter != "q" && s.parameter != "dimension") {
    throw DomainError(fmt::format("unknown sweep parameter '{}'", s.parameter));
  }
}

GridPtr make_grid(const RunConfig& c) {
  return RadialGrid::build(DimensionContext::make(c.dimension), c.grid.r_min, c.grid.r_max, c.grid.nodes,
                           parse_spacing(c.grid.spacing));
}

PotentialSpec make_potential(const RunConfig& c) {
  const auto& p = c.potential;
  PotentialSpec spec;
  if (p.kind == "power_law") {
    spec = PotentialSpec::power_law(p.a);
  } else if (p.kind == "builtin" && p.name == "unit") {
    spec.V = [](double) { return 1.0; };
    spec.K = [](double) { return 1.0; };
    spec.origin = exponents::GrowthParams{0.0, 0.0, std::nullopt};
    spec.infinity = exponents::GrowthParams{0.0, 0.0, 0.0};
  } else if (p.kind == "builtin" && p.name == "two_scale") {
    spec.V = [](double r) { return r < 1.0 ? std::pow(r, -6.0) : std::pow(r, -2.0); };
    spec.K = [](double) { return 1.0; };
    spec.origin = exponents::GrowthParams{0.0, 0.0, 6.0};
    spec.infinity = exponents::GrowthParams{0.0, 0.0, 2.0};
  } else if (p.kind == "table") {
    spec.V = TabulatedFunction(read_table(p.V_table));
    spec.K = TabulatedFunction(read_table(p.K_table));
    if (!p.Q_table.empty()) spec.Q = TabulatedFunction(read_table(p.Q_table));
  } else {
    throw DomainError(fmt::format("unknown potential '{}'", p.kind));
  }
  if (p.forcing == "exp") {
    const double A = p.forcing_amplitude;
    const double k = p.forcing_rate;
    spec.Q = [A, k](double r) { return A * std::exp(-k * r); };
  }
  spec.K_integrability_s = p.K_integrability_s;
  return spec;
}

NonlinearitySpec make_nonlinearity(const RunConfig& c) {
  const auto& n = c.nonlinearity;
  const SignConvention sign = parse_sign_convention(n.sign);
  switch (parse_nonlinearity_kind(n.kind)) {
    case NonlinearityKind::zero: {
      auto spec = NonlinearitySpec::none();
      spec.sign = sign;
      return spec;
    }
    case NonlinearityKind::pure_power: return NonlinearitySpec::pure_power(n.q, sign);
    case NonlinearityKind::capped_pair: return NonlinearitySpec::capped_pair(n.M, n.q1, n.q2, sign);
    case NonlinearityKind::custom: break;
  }
  throw DomainError("custom nonlinearities are available through the library only");
}

}  // namespace bilap::cli
