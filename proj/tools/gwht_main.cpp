#include <CLI11.hpp>

#include <iostream>

#include "runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"gwht: error exponents, OSRB bounds and protocol simulation for distributed testing"};
  app.require_subcommand(1);
  gwht::cli::RunRequest req;
  std::size_t trials = 0, workers = 0;
  std::uint64_t seed = 0;
  std::string out_path;

  for (const auto& name : gwht::cli::kCommands) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", req.config_path, "experiment configuration (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out_path, "result file; .csv for delimited rows, otherwise JSON");
    sub->add_option("--trials", trials, "override trial counts")->check(CLI::PositiveNumber);
    sub->add_option("--seed", seed, "override the configured seed");
    sub->add_option("--workers", workers, "worker threads (0 = all cores)");
    sub->callback([&, name, sub] {
      req.command = name;
      if (sub->count("--out")) req.out_path = out_path;
      if (sub->count("--trials")) req.trials = trials;
      if (sub->count("--seed")) req.seed = seed;
      if (sub->count("--workers")) req.workers = workers;
    });
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : gwht::cli::kExitConfig;
  }
  return gwht::cli::run(req, std::cout, std::cerr);
}
