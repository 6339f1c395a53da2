#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace denjoy::cli {

enum class Experiment { ConfCheck, Denjoy, Blowup, Distort, Trap, DemoTheorem };

std::string_view to_string(Experiment e) noexcept;
// Accepts the subcommand names (conf, denjoy, blowup, distort, trap,
// demo-theorem) and the long form conf-check.
Experiment parse_experiment(std::string_view name);

// Validation failure; carries the config line (0 when not from a file) and
// the dotted field name.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(int line, std::string field, const std::string& message);

  int line() const noexcept { return line_; }
  const std::string& field() const noexcept { return field_; }
  const std::string& message() const noexcept { return message_; }

 private:
  int line_;
  std::string field_;
  std::string message_;
};

struct ExperimentConfig {
  Experiment kind = Experiment::DemoTheorem;
  std::uint64_t seed = 1;
  std::string experiment_id = "experiment";
  std::string output_dir = "denjoy-out";
  bool plots = false;

  // [torus]
  int k = 2;
  std::vector<double> theta;  // empty -> (sqrt 2 - 1, sqrt 3 - 1, ...)

  // [schedule]
  double c_r = 0.05;
  double p = 0.8;
  int window = 2000;
  double v_max = 0.5;

  // [distortion]
  int order = 0;  // 0 -> k
  double eps0 = 1.0;
  std::string direction = "diag";
  double delta = 0.05;
  int steps = 2000;
  int fit_samples = 400;

  // [trap]
  double lambda = 2.0;
  int horizon = 2000;
  int boundary_samples = 10000;
  double margin = 0.0;
  int minimality_horizon = 2000;

  // [denjoy]
  double alpha = 0.6180339887498949;
  double c = 0.1;
  long long truncation = 200000;
  double tail_tolerance = 1e-5;
  long long orbit_length = 100000;

  // [conf]
  int trials = 1000;
  std::vector<int> dims = {2, 3, 4};
  int bridge_trials = 10000;

  // Line numbers of keys read from a config file, for diagnostics.
  std::map<std::string, int> source_lines;

  int flatness_order() const { return order > 0 ? order : k; }
  std::vector<double> translation() const;

  // Range checks across all fields; throws ConfigError.
  void validate() const;

  // Canonical key = value text used for the config hash; excludes the output
  // directory and the plots flag.
  std::string canonical() const;
};

// Parses "[section]" headers and "key = value" lines; '#' starts a comment.
// Unknown sections or keys, duplicates and malformed values are rejected.
ExperimentConfig parse_config(std::string_view text, ExperimentConfig base = {});
ExperimentConfig load_config(const std::string& path, ExperimentConfig base = {});

std::uint64_t fnv1a64(std::string_view data) noexcept;

}  // namespace denjoy::cli
