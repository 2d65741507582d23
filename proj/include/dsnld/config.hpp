#ifndef DSNLD_CONFIG_HPP
#define DSNLD_CONFIG_HPP

#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "dsnld/experiments.hpp"

// Run configuration: a JSON file with an explicit schema. Unknown fields are
// rejected by name, seeds are never defaulted, and the full parsed document
// is echoed into every report so a run can be reproduced from its output.
// The schema is documented in the README.

namespace dsnld {

struct RunConfig {
  std::string experiment;
  Seeds seeds;
  GridSpec grid{20.0, 1024};
  double t_end = 1.0;
  double dt = 1e-2;
  std::vector<double> snapshot_times;
  NonlinearitySpec spec;
  double kappa = 0.0;
  std::vector<double> kappa_list;
  NoiseModel model;
  InitialLaw x0;
  int n_particles = 100000;
  double ess_floor_fraction = 0.0;
  double bandwidth = 0.0;
  int picard_sweeps = 1;
  int realizations = 8;
  double cfl_safety = 0.9;
  int min_substeps = 1;
  double boundary_tolerance = 1e-6;
  nlohmann::json tolerances;         // per-experiment tolerance overrides
  nlohmann::json experiment_params;  // per-experiment extras
  std::string output_dir = "out";
  int threads = 0;  // 0 = library default

  nlohmann::json echo;  // the parsed document, verbatim

  ExperimentBase base() const;
  double tolerance(const std::string& key, double fallback) const;
};

/// Parse and schema-validate a config document. Throws ConfigError with the
/// offending field name on unknown fields, missing seeds, or mismatched
/// time grids.
RunConfig parse_config(const nlohmann::json& doc);

RunConfig load_config_file(const std::filesystem::path& path);

Coefficient parse_coefficient(const nlohmann::json& j, const std::string& where);
NonlinearitySpec parse_nonlinearity(const nlohmann::json& j);
InitialLaw parse_initial_law(const nlohmann::json& j);

/// Build the parameter struct for the named experiment and run it.
ExperimentReport dispatch_experiment(const RunConfig& config);

}  // namespace dsnld

#endif
