#ifndef DSNLD_IO_HPP
#define DSNLD_IO_HPP

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "dsnld/experiments.hpp"

namespace dsnld {

/// Snapshot CSV: header line, then one "xi,value" row per node with 17
/// significant digits.
std::string field_to_csv(const DensityField& field);

/// Cumulative-path CSV for a realization: t, W^1..W^N.
std::string realization_to_csv(const NoiseRealization& real);

/// Two-column CSV (u, psi) loader for table nonlinearities and densities.
std::vector<std::pair<double, double>> load_table_csv(const std::filesystem::path& path);

/// FNV-1a 64-bit hash of a byte string, as a fixed-width hex string.
std::string content_hash(const std::string& bytes);

struct ManifestEntry {
  std::string name;
  std::string hash;
  std::size_t bytes = 0;
};

struct Manifest {
  std::vector<ManifestEntry> entries;
  bool complete = true;
  std::string note;
  nlohmann::json to_json() const;
};

/// Write report.json, one CSV per snapshot (named by experiment, omega
/// index and time stamp) and manifest.json under out_dir. Throws IoError on
/// failure after recording a partial manifest.
Manifest write_outputs(const ExperimentReport& report, const std::filesystem::path& out_dir);

}  // namespace dsnld

#endif
