#include "dsnld/io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "dsnld/errors.hpp"
#include "dsnld/rng.hpp"

namespace dsnld {

std::string field_to_csv(const DensityField& field) {
  std::string out = "xi,value\n";
  char line[80];
  for (int j = 0; j < field.grid.n_points; ++j) {
    std::snprintf(line, sizeof(line), "%.17g,%.17g\n", field.grid.node(j), field.values[j]);
    out += line;
  }
  return out;
}

std::string realization_to_csv(const NoiseRealization& real) {
  std::string out = "t";
  for (int i = 1; i <= real.num_drivers(); ++i) out += ",W" + std::to_string(i);
  out += "\n";
  std::vector<double> cum(real.num_drivers(), 0.0);
  char buf[64];
  for (std::size_t n = 0; n < real.time_grid.size(); ++n) {
    std::snprintf(buf, sizeof(buf), "%.17g", real.time_grid[n]);
    out += buf;
    for (int i = 0; i < real.num_drivers(); ++i) {
      std::snprintf(buf, sizeof(buf), ",%.17g", cum[i]);
      out += buf;
      if (n < real.time_grid.size() - 1) cum[i] += real.dw(static_cast<int>(n), i);
    }
    out += "\n";
  }
  return out;
}

std::vector<std::pair<double, double>> load_table_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open table file " + path.string());
  std::vector<std::pair<double, double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ss(line);
    double u, v;
    if (ss >> u >> v) rows.emplace_back(u, v);
  }
  if (rows.empty()) throw IoError("table file " + path.string() + " has no rows");
  return rows;
}

std::string content_hash(const std::string& bytes) {
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(rng::fnv1a(bytes)));
  return buf;
}

nlohmann::json Manifest::to_json() const {
  nlohmann::json j;
  j["complete"] = complete;
  if (!note.empty()) j["note"] = note;
  j["files"] = nlohmann::json::array();
  for (const auto& e : entries)
    j["files"].push_back({{"name", e.name}, {"hash", e.hash}, {"bytes", e.bytes}});
  return j;
}

namespace {

std::string format_time(double t) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", t);
  return buf;
}

void write_file(const std::filesystem::path& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << bytes;
  if (!out) throw IoError("short write to " + path.string());
}

}  // namespace

Manifest write_outputs(const ExperimentReport& report, const std::filesystem::path& out_dir) {
  Manifest manifest;
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create output directory " + out_dir.string());

  auto emit = [&](const std::string& name, const std::string& bytes) {
    try {
      write_file(out_dir / name, bytes);
    } catch (const IoError&) {
      manifest.complete = false;
      manifest.note = "partial manifest: failed while writing " + name;
      write_file(out_dir / "manifest.json", manifest.to_json().dump(2) + "\n");
      throw;
    }
    manifest.entries.push_back({name, content_hash(bytes), bytes.size()});
  };

  emit("report.json", report.to_json().dump(2) + "\n");
  for (const auto& [name, bytes] : report.extra_files) emit(name, bytes);
  for (const auto& snap : report.snapshots) {
    const std::string name = report.experiment_id + "_" + snap.label + "_w" +
                             std::to_string(snap.omega) + "_t" +
                             format_time(snap.field.time_stamp) + ".csv";
    emit(name, field_to_csv(snap.field));
  }
  write_file(out_dir / "manifest.json", manifest.to_json().dump(2) + "\n");
  return manifest;
}

}  // namespace dsnld
