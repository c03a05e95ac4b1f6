#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "gwht/protocol.hpp"
#include "gwht/serialize.hpp"

namespace gwht::cli {

// Machine-readable validation failure. `field` is a JSON pointer into the config.
struct ConfigError {
  std::string code;
  std::string field;
  std::string message;
  int line = 0;  // 1-based line in the source text when known
};

class ConfigErrors : public std::runtime_error {
 public:
  explicit ConfigErrors(std::vector<ConfigError> errors);
  const std::vector<ConfigError>& errors() const { return errors_; }

 private:
  std::vector<ConfigError> errors_;
};

struct SweepPoint {
  std::size_t n = 1;
  double delta_c = 1.0;
  RateVector rates;
};

struct ExperimentConfig {
  ProtocolConfig protocol;
  std::size_t trials = 1000;
  ProtocolMode mode = ProtocolMode::B;
  std::size_t workers = 1;
  std::vector<int> detectors{1, 2};

  std::vector<std::size_t> sweep_n;
  std::vector<double> sweep_delta_c;
  std::vector<RateVector> sweep_rates;

  bool finite_n = false;  // exponents: report the corrected variants at each n

  std::vector<std::size_t> osrb_n;
  std::size_t osrb_trials = 200;

  EquivocationMode eq_mode = EquivocationMode::Exact;
  std::vector<std::size_t> eq_n;
  std::size_t eq_trials = 2000;

  std::vector<std::size_t> duality_n;
  std::size_t duality_binnings = 20;

  // Sweep grid in n-major, then delta_c, then rates order.
  std::vector<SweepPoint> points() const;
  ProtocolConfig at(const SweepPoint& p) const;
};

// Every problem in the document, not just the first. Empty means valid.
// `command` decides whether a seed is mandatory.
std::vector<ConfigError> validate_config(const json& doc, const std::string& command = "");
// Same, and fills ConfigError::line by locating each field in `text`.
std::vector<ConfigError> validate_config_text(const std::string& text, const std::string& command = "");

// Throws ConfigErrors when validation fails.
ExperimentConfig parse_config(const json& doc, const std::string& command = "");

// Reads and parses a file; syntax errors are reported with line and column.
json read_config_document(const std::string& path);
ExperimentConfig load_config(const std::string& path, const std::string& command = "");

}  // namespace gwht::cli
