#include <CLI11.hpp>
#include <cstdio>
#include <exception>

#include "iontrap/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Simulator for a microwave-addressed trapped-ion register"};
  app.require_subcommand(1);

  iontrap::CliOptions options;
  const struct {
    const char* name;
    const char* description;
  } commands[] = {
      {"positions", "ion equilibrium positions and transition frequencies (CSV)"},
      {"spectrum", "microwave spectrum: per-ion excitation vs carrier frequency (CSV)"},
      {"rabi", "Rabi oscillations of addressed and spectator ions vs pulse duration (CSV)"},
      {"benchmark", "randomized-sequence fidelity curves with fits (CSV + JSON)"},
      {"xtalk", "full cross-talk matrix from per-ion benchmarks (JSON + CSV)"},
      {"optimize", "commensurate pulse parameters for suppressed cross-talk (JSON)"},
      {"scaling", "error-budget table with parameter scalings (CSV)"},
      {"oracle", "three-way consistency check: closed form vs random walk vs unitary (CSV)"},
  };
  for (const auto& c : commands) {
    CLI::App* sub = app.add_subcommand(c.name, c.description);
    sub->add_option("--config", options.config_path, "run configuration file")->required();
    sub->add_option("--out", options.out_dir, "output directory (created if missing)");
    sub->add_option("--seed", options.seed_override, "override the configured seed");
    sub->add_option("--trials", options.trials_override, "override the configured trial count");
    sub->add_option("--threads", options.threads, "worker threads for trial loops")
        ->check(CLI::PositiveNumber);
  }

  CLI11_PARSE(app, argc, argv);
  const std::string command = app.get_subcommands().front()->get_name();

  try {
    return iontrap::run_command(command, options);
  } catch (const iontrap::ConfigError& error) {
    if (error.line > 0)
      std::fprintf(stderr, "config error (line %d): %s\n", error.line, error.what());
    else
      std::fprintf(stderr, "config error: %s\n", error.what());
    return 2;
  } catch (const std::exception& error) {
    std::fprintf(stderr, "error: %s\n", error.what());
    return 3;
  }
}
