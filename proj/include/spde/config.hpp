#pragma once

// JSON run configuration with sections model, discretization, study and
// output. Every key is optional; unknown keys are rejected so that typos do
// not silently fall back to defaults.

#include "spde/experiments.hpp"
#include "spde/linear_errors.hpp"

#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace spde {

class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct RunConfig {
  StudyConfig study;                        // model, grids, reference, MC settings
  std::vector<std::size_t> steps_grid;      // discretization.steps
  std::vector<ModeCount> modes_grid;        // discretization.modes, may contain "all"
  std::size_t simulate_steps = 64;
  std::size_t simulate_modes = 64;
  std::uint32_t simulate_path = 0;
  bool moments = false;                     // converge also writes the moment audit
  std::size_t audit_trials = 1000;
  std::size_t audit_modes = 32;
  std::filesystem::path out_dir = "out";

  /// study.modes_grid from modes_grid; throws ConfigError if "all" is present.
  void require_finite_modes();
};

/// Throws ConfigError on malformed JSON, wrong types or unknown keys.
RunConfig parse_config(const std::string &json_text);
RunConfig load_config(const std::filesystem::path &path);
RunConfig default_config();

/// SPDE_SEED and SPDE_OUT.
void apply_environment(RunConfig &cfg);

} // namespace spde
