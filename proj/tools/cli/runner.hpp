#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "config.hpp"

namespace gwht::cli {

inline const std::vector<std::string> kCommands = {"exponents", "region", "osrb", "simulate", "equivocation", "duality"};

struct RunRequest {
  std::string command;
  std::string config_path;
  std::optional<std::string> out_path;
  std::optional<std::size_t> trials;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> workers;
};

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitResource = 3;

// Records for one command, in sweep order. Throws on operational errors.
std::vector<json> run_command(const std::string& command, const ExperimentConfig& cfg);

// Loads, validates, runs, writes the result file and prints a summary.
int run(const RunRequest& req, std::ostream& out, std::ostream& err);

}  // namespace gwht::cli
