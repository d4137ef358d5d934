#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "bilap/energy.hpp"
#include "bilap/grid.hpp"
#include "bilap/solve.hpp"

namespace bilap::cli {

struct GridSection {
  double r_min = 1e-4;
  double r_max = 50.0;
  std::size_t nodes = 2048;
  std::string spacing = "log";

  bool operator==(const GridSection&) const = default;
};

// kind: power_law (uses a), builtin (uses name), table (uses *_table files).
struct PotentialSection {
  std::string kind = "power_law";
  double a = 2.0;
  std::string name = "unit";
  std::string V_table;
  std::string K_table;
  std::string Q_table;
  std::string forcing = "none";  // none | exp: Q = amplitude * exp(-rate r)
  double forcing_amplitude = 1.0;
  double forcing_rate = 1.0;
  double K_integrability_s = 2.0;

  bool operator==(const PotentialSection&) const = default;
};

struct NonlinearitySection {
  std::string kind = "pure_power";
  double q = 4.0;
  double M = 1.0;
  double q1 = 3.0;
  double q2 = 5.0;
  std::string sign = "zero_on_negatives";

  bool operator==(const NonlinearitySection&) const = default;
};

struct SolverSection {
  std::string mode = "auto";  // auto | minimize | mountain_pass
  SolverConfig config;

  bool operator==(const SolverSection&) const = default;
};

struct VerifySection {
  int fields = 50;
  double ratio_tol = 1e-3;
  double constant_scale = 1.0;
  double outer_radius = 1.0;
  double inner_radius = 1.0;
  double q = 5.0;
  int trials = 200;
  std::vector<std::string> functionals{"S0", "Sinf", "R0", "Rinf"};
  std::vector<double> radii_origin{0.015625, 0.03125, 0.0625, 0.125, 0.25, 0.5};
  std::vector<double> radii_infinity{2.0, 4.0, 8.0, 16.0, 32.0, 64.0};

  bool operator==(const VerifySection&) const = default;
};

struct ExponentsSection {
  bool check_pair = false;
  double q1 = 5.0;
  double q2 = 5.0;

  bool operator==(const ExponentsSection&) const = default;
};

struct SweepSection {
  std::string command = "exponents";  // exponents | solve | verify
  std::string parameter = "a";        // a | q | dimension
  std::vector<double> values{0.0, 1.0, 2.0, 3.0, 4.0};

  bool operator==(const SweepSection&) const = default;
};

struct RunConfig {
  int dimension = 5;
  PotentialSection potential;
  NonlinearitySection nonlinearity;
  GridSection grid;
  SolverSection solver;
  VerifySection verify;
  ExponentsSection exponents;
  SweepSection sweep;
  std::uint64_t seed = 20240601;
  std::string output_dir = "out";

  bool operator==(const RunConfig&) const = default;
};

nlohmann::ordered_json to_json(const RunConfig& c);
// Missing keys take defaults; unknown keys are rejected.
RunConfig from_json(const nlohmann::json& j);

RunConfig load_config(const std::string& path);
std::string dump_config(const RunConfig& c);

// Checks every module precondition that can be checked without computing.
void validate(const RunConfig& c);

// Builders used by the commands.
GridPtr make_grid(const RunConfig& c);
PotentialSpec make_potential(const RunConfig& c);
NonlinearitySpec make_nonlinearity(const RunConfig& c);

}  // namespace bilap::cli
