#include "confbound_cli/commands.hpp"
#include "confbound_cli/config.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <map>
#include <optional>

namespace {

struct Overrides {
  std::string config;
  std::optional<int> m;
  std::optional<int> level;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<int> workers;
};

void add_common_options(CLI::App& sub, Overrides& o) {
  sub.add_option("--config", o.config, "JSON experiment configuration");
  sub.add_option("--m", o.m, "sphere dimension (2 or 3)");
  sub.add_option("--level", o.level, "mesh subdivision level");
  sub.add_option("--seed", o.seed, "random seed");
  sub.add_option("--out", o.out, "output directory");
  sub.add_option("--workers", o.workers, "worker threads (0: available parallelism)");
}

const std::map<std::string, std::string> kDescriptions{
    {"geom-check", "Möbius, reflection and fold identities on random samples"},
    {"spectrum", "bottom of the spectrum for each metric"},
    {"bound-scan", "normalized lambda_2 and the full estimate chain for each metric"},
    {"com", "center of mass and folded centers along a cap path"},
    {"vfield", "vector-field grid, zero search and t = 0 degree"},
    {"optimize", "compass-search ascent of lambda_2 Vol^{2/m}"},
    {"report", "markdown summary of the outputs in --out"},
};

confbound::cli::ExperimentConfig resolve(const Overrides& o) {
  using namespace confbound::cli;
  ExperimentConfig c = o.config.empty() ? ExperimentConfig{} : load_config(o.config);
  if (o.m) {
    c.m = *o.m;
  }
  if (o.level) {
    c.level = *o.level;
  }
  if (o.seed) {
    c.seed = *o.seed;
  }
  if (o.out) {
    c.out = *o.out;
  }
  if (o.workers) {
    c.workers = *o.workers;
  }
  validate(c);
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  using namespace confbound::cli;
  CLI::App app{"Conformal eigenvalue bounds on spheres: geometry checks, spectra, bound chains and optimization"};
  app.require_subcommand(1);
  Overrides overrides;
  for (const auto& name : command_names()) {
    add_common_options(*app.add_subcommand(name, kDescriptions.at(name)), overrides);
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitSuccess : kExitUsage;
  }
  const std::string name = app.get_subcommands().front()->get_name();
  try {
    return run_command(name, resolve(overrides), std::cout);
  } catch (const ConfigError& e) {
    std::cerr << "confbound " << name << ": configuration error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "confbound " << name << ": " << e.what() << '\n';
    return kExitCheckFailure;
  }
}
