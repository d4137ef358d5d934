#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "bilap/errors.hpp"
#include "cli/commands.hpp"
#include "cli/config.hpp"

int main(int argc, char** argv) {
  using namespace bilap::cli;
  CLI::App app{"Radial bilaplacian toolkit: exponent windows, solvers and bound checks"};
  app.require_subcommand(0, 1);

  std::string config_path;
  unsigned jobs = 1;
  std::uint64_t seed = 0;
  std::string out_dir;
  bool strict = false;
  bool print_defaults = false;

  app.add_flag("--print-defaults", print_defaults, "Print the default configuration and exit");
  std::vector<CLI::App*> subs;
  for (const char* name : {"exponents", "solve", "verify", "sweep"}) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "JSON configuration file");
    sub->add_option("--jobs", jobs, "Worker threads for trials and sweeps")->check(CLI::PositiveNumber);
    sub->add_option("--seed", seed, "Master seed (overrides the config)");
    sub->add_option("--out", out_dir, "Output directory (overrides the config)");
    sub->add_flag("--strict", strict, "Exit with code 3 when exponents are not certified");
    subs.push_back(sub);
  }
  subs[0]->description("Certified exponent windows");
  subs[1]->description("Solve for a critical point and check decay bounds");
  subs[2]->description("Bound checks and embedding estimates on random fields");
  subs[3]->description("Run a command over a list of parameter values");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : exit_invalid_config;
  }

  if (print_defaults) {
    std::cout << dump_config(RunConfig{});
    return 0;
  }
  if (app.get_subcommands().empty()) {
    std::cout << app.help();
    return exit_invalid_config;
  }

  RunConfig config;
  try {
    if (!config_path.empty()) config = load_config(config_path);
  } catch (const bilap::DomainError& e) {
    std::cerr << "invalid configuration: " << e.what() << "\n";
    return exit_invalid_config;
  }
  const CLI::App* sub = app.get_subcommands().front();
  if (sub->count("--seed")) config.seed = seed;
  if (sub->count("--out")) config.output_dir = out_dir;
  return run_command(sub->get_name(), config, CommandOptions{strict, jobs, nullptr});
}
