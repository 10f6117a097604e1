/// @file io.hpp
/// @brief External formats: flat key=value run configuration, diagnostics
///        CSV (17 significant digits), "EHD2" field snapshots, run manifest.
///
/// Snapshot format: one text header line
///     EHD2 <fieldname> <nx> <ny> <lx> <ly> <time>\n
/// followed by nx*ny little-endian IEEE-754 doubles, row-major with y
/// outer. Round-trips are bitwise.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "ehd/analysis.hpp"
#include "ehd/sim.hpp"

namespace ehd {

/// Parse a config file: `key = value` lines, '#' comments, blank lines ok.
/// Unknown keys, duplicate keys, malformed lines and out-of-range values
/// raise ConfigError carrying key and line number.
SimConfig parse_config_text(const std::string& text);
SimConfig load_config(const std::string& path);

// -------------------------------------------------------- diagnostics ----

void write_diagnostics_csv(const std::string& path, const std::vector<DiagnosticsRecord>& records);
std::string diagnostics_csv_header();
std::string diagnostics_csv_row(const DiagnosticsRecord& r);

/// Read back a diagnostics CSV; validates the header. Returns column-major
/// data addressed by header name through `columns`.
struct DiagnosticsTable {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> data; ///< data[col][row]
    const std::vector<double>& column(const std::string& name) const;
};
DiagnosticsTable read_diagnostics_csv(const std::string& path);

// ---------------------------------------------------------- snapshots ----

struct Snapshot {
    std::string field;
    int nx = 0, ny = 0;
    double lx = 0.0, ly = 0.0;
    double time = 0.0;
    std::vector<double> data; ///< nx*ny, row-major y-outer
};

void write_snapshot(const std::string& path, const Snapshot& snap);
Snapshot read_snapshot(const std::string& path);

Snapshot snapshot_of(const ScalarField& s, const std::string& field, double time);

// ----------------------------------------------------------- manifest ----

/// Write the run manifest (JSON): config echo, outputs, status, timing.
/// Written exactly once per run by the CLI driver.
void write_manifest(const std::string& path, const SimConfig& config,
                    const std::vector<std::string>& outputs, const std::string& status,
                    double wall_seconds, std::int64_t steps_done);

} // namespace ehd
