// run_config.hpp
// JSON-configured experiment runs: config parsing with field-level errors,
// experiment dispatch, and deterministic JSON/CSV result files.

#pragma once

#include "sptq/counting.hpp"
#include "sptq/elements.hpp"
#include "sptq/experiments.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace sptq {

/// Config parse or validation failure; names the offending field.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::runtime_error("config field '" + field + "': " + message),
        field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ExperimentError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// One experiment invocation. Angles are degrees at this boundary and
/// converted to radians on the way into the library.
struct RunConfig {
  std::string experiment;  // truth-table, pol-scan, ifo-scan, visibility-curve,
                           // swap, ghz, momentum-check
  ImperfectionSet imperfections;
  bool exact = false;       // exact probabilities instead of sampled counts
  CountingConfig counting;  // used when exact is false

  // Polarization scan grid and output port.
  double theta_start_deg = 0.0;
  double theta_stop_deg = 180.0;
  int theta_points = 181;
  int momentum_port = 0;

  // Interferometer scan: analysis angle plus the motion settings.
  double theta_a_deg = 25.0;
  IfoScanSettings ifo;

  // Analysis-angle grid for the visibility curve.
  double curve_theta_start_deg = 0.0;
  double curve_theta_stop_deg = 90.0;
  int curve_theta_points = 19;

  // Momentum check: which idler path is blocked ("T", "B" or "none").
  std::string blocked = "T";

  std::string output_dir = ".";

  std::vector<double> polarization_angles() const;  // radians
  std::vector<double> curve_angles() const;         // radians
};

/// Parses and validates a JSON config document. Unknown fields, type
/// mismatches, and out-of-range values raise ConfigError naming the field.
RunConfig parse_config(const std::string& json_text);

/// Reads and parses a config file. Unreadable file raises IoError.
RunConfig load_config(const std::string& path);

struct RunOutput {
  std::string result_path;  // <experiment>_result.json
  std::string table_path;   // <experiment>_table.csv
};

/// Runs the configured experiment and writes the result pair into
/// output_dir (created if needed). Identical config and seed produce
/// byte-identical files.
RunOutput run_experiment(const RunConfig& cfg);

}  // namespace sptq
