#include <iostream>
#include <string>
#include <utility>

#include <CLI11.hpp>

#include "nhmech/run.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Discrete nonholonomic mechanics on Lie groupoids"};
  app.require_subcommand(1);

  std::string config;
  nhmech::cli::RunContext ctx;
  long long seed = 0;
  const std::pair<const char*, const char*> commands[] = {
      {"simulate", "evolve the initial element and write the trajectory"},
      {"check", "regularity, reversibility and Legendre matching report"},
      {"momentum", "momentum drift along a trajectory"},
  };
  for (const auto& [name, help] : commands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config, "run configuration (JSON)")->required();
    sub->add_option("--out", ctx.out_dir, "output directory")->capture_default_str();
    sub->add_option("--seed", seed, "reserved; runs are deterministic");
    sub->add_flag("--verbose", ctx.verbose, "per-step progress on stderr");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return nhmech::cli::kConfigError;
  }
  const std::string command = app.get_subcommands().front()->get_name();
  return nhmech::cli::run_command(command, config, ctx);
}
