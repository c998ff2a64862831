#include <cstdint>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "volpot_cli/run.hpp"

int main(int argc, char** argv) {
  CLI::App app{"volpot: volume potential evaluation and verification"};
  app.require_subcommand(0, 1);

  volpot::cli::RunOptions options;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool version = false;
  app.add_flag("--version", version, "Print build information and the default-tolerance table");

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", options.config_path, "Configuration file")->required();
    sub->add_option("--out", out_dir, "Output directory for CSV reports");
    sub->add_option("--jobs", options.jobs, "Independent checks to run concurrently")
        ->check(CLI::PositiveNumber);
    sub->add_option("--seed", seed, "Seed for random sample clouds");
  };
  add_common(app.add_subcommand("eval", "Evaluate the volume potential at configured points"));
  add_common(app.add_subcommand("verify", "Run the configured verification checks"));
  add_common(app.add_subcommand("converge", "Convergence study over increasing N"));
  add_common(app.add_subcommand("modulus", "Hessian modulus-of-continuity experiment"));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : volpot::cli::kExitError;
  }

  if (version) {
    volpot::cli::print_version(std::cout);
    return 0;
  }
  if (app.get_subcommands().empty()) {
    std::cout << app.help();
    return volpot::cli::kExitError;
  }
  CLI::App* sub = app.get_subcommands().front();
  if (sub->count("--out") > 0) options.out_dir = out_dir;
  if (sub->count("--seed") > 0) options.seed = seed;
  return volpot::cli::run(sub->get_name(), options, std::cout, std::cerr);
}
