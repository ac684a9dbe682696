#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "nlch/mesh.hpp"
#include "nlch/sim.hpp"

namespace nlch {

// Configuration: flat `key = value` text, `#` starts a comment. Unknown keys
// and malformed lines raise ConfigError with the line number; missing keys
// keep the SimConfig defaults.
SimConfig parse_config(const std::string& text);
SimConfig load_config(const std::filesystem::path& path);
std::string serialize_config(const SimConfig& cfg);

struct LineProfile {
    double x0 = 0.0;  // abscissa of the selected mesh column
    std::vector<std::pair<double, double>> samples;  // (y, phi), increasing y
};

/// Header x,y,phi,mu, then one row per node in mesh order, 17 significant digits.
void write_snapshot_csv(const Snapshot& snap, const Mesh& mesh, const std::filesystem::path& path);

/// Reads a snapshot written by write_snapshot_csv and rebuilds the structured
/// mesh from its coordinates. Step and time are not stored and come back 0.
std::pair<Snapshot, Mesh> read_snapshot_csv(const std::filesystem::path& path);

LineProfile extract_profile(const Snapshot& snap, const Mesh& mesh, double x0);

/// Binary PGM (P5, maxval 255), (nx+1) x (ny+1), top row = largest y.
void emit_heatmap(const Snapshot& snap, const Mesh& mesh, const std::filesystem::path& path);

void write_diagnostics_csv(const Diagnostics& diag, const std::filesystem::path& path);

/// Writes `contents` to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);

}  // namespace nlch
