/// @file io.cpp
/// @brief Config parsing, diagnostics CSV, EHD2 snapshots, run manifest.
///
/// Numbers round-trip bitwise: text reals are serialized with %.17g (17
/// significant digits recover any IEEE-754 double exactly), snapshot
/// payloads are raw little-endian doubles.

#include "ehd/io.hpp"

#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "ehd/errors.hpp"

static_assert(std::endian::native == std::endian::little,
              "EHD2 snapshot writer assumes a little-endian host");

namespace ehd {

namespace {

constexpr const char* kVersion = "0.1.0";

std::string trim(const std::string& s) {
    const size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return {};
    const size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

/// strtod with a full-consumption check. Unlike std::stod it does not throw
/// on subnormals (glibc flags ERANGE yet still returns the correctly rounded
/// value), so 17-digit round-trips cover the whole double range.
bool parse_double_token(const std::string& s, double& out) {
    if (s.empty()) return false;
    const char* begin = s.c_str();
    char* end = nullptr;
    const double x = std::strtod(begin, &end);
    if (end != begin + s.size()) return false;
    out = x;
    return true;
}

double parse_real(const std::string& val, const std::string& key, int line) {
    double x = 0.0;
    if (!parse_double_token(val, x))
        throw ConfigError("not a number: '" + val + "'", key, line);
    return x;
}

long long parse_int(const std::string& val, const std::string& key, int line) {
    size_t pos = 0;
    long long x = 0;
    try {
        x = std::stoll(val, &pos);
    } catch (const std::exception&) {
        throw ConfigError("not an integer: '" + val + "'", key, line);
    }
    if (pos != val.size())
        throw ConfigError("not an integer: '" + val + "'", key, line);
    return x;
}

void apply_key(SimConfig& c, const std::string& key, const std::string& val, int line) {
    auto as_int = [&](int lo = INT32_MIN) {
        const long long x = parse_int(val, key, line);
        if (x < lo || x > INT32_MAX) throw ConfigError("value out of range", key, line);
        return static_cast<int>(x);
    };
    if (key == "nx") c.nx = as_int();
    else if (key == "ny") c.ny = as_int();
    else if (key == "lx") c.lx = parse_real(val, key, line);
    else if (key == "ly") c.ly = parse_real(val, key, line);
    else if (key == "dt") c.dt = parse_real(val, key, line);
    else if (key == "t_end") c.t_end = parse_real(val, key, line);
    else if (key == "theta") c.theta = parse_real(val, key, line);
    else if (key == "poisson_tol") c.poisson_tol = parse_real(val, key, line);
    else if (key == "transport_tol") c.transport_tol = parse_real(val, key, line);
    else if (key == "fluid_tol") c.fluid_tol = parse_real(val, key, line);
    else if (key == "output_every") c.output_every = parse_int(val, key, line);
    else if (key == "seed") {
        const long long x = parse_int(val, key, line);
        if (x < 0) throw ConfigError("seed must be nonnegative", key, line);
        c.seed = static_cast<std::uint64_t>(x);
    } else if (key == "mode") {
        if (val == "coupled") c.mode = CouplingMode::coupled;
        else if (val == "debye") c.mode = CouplingMode::debye;
        else throw ConfigError("mode must be 'coupled' or 'debye', got '" + val + "'", key, line);
    } else if (key == "preset") {
        c.preset = val;
    } else if (key.rfind("preset.", 0) == 0) {
        const std::string name = key.substr(7);
        if (name.empty()) throw ConfigError("empty preset parameter name", key, line);
        c.preset_params[name] = parse_real(val, key, line);
    } else {
        throw ConfigError("unknown key", key, line);
    }
}

} // namespace

SimConfig parse_config_text(const std::string& text) {
    SimConfig cfg;
    std::set<std::string> seen;
    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        std::string line = trim(raw.substr(0, raw.find('#')));
        if (line.empty()) continue;
        const size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("expected 'key = value'", "", lineno);
        const std::string key = trim(line.substr(0, eq));
        const std::string val = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError("missing key before '='", "", lineno);
        if (!seen.insert(key).second) throw ConfigError("duplicate key", key, lineno);
        if (val.empty()) throw ConfigError("missing value", key, lineno);
        apply_key(cfg, key, val, lineno);
    }
    return cfg;
}

SimConfig load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot read config file '" + path + "'");
    std::ostringstream text;
    text << f.rdbuf();
    return parse_config_text(text.str());
}

// ------------------------------------------------------------ diagnostics ----

std::string diagnostics_csv_header() {
    std::string out;
    for (const char* name : diagnostics_columns()) {
        if (!out.empty()) out += ',';
        out += name;
    }
    return out;
}

std::string diagnostics_csv_row(const DiagnosticsRecord& r) {
    std::string out = std::to_string(r.step);
    for (double x : {r.t, r.mass_v, r.mass_w, r.min_v, r.min_w, r.kinetic, r.entropy,
                     r.electrostatic, r.k_total, r.lyapunov, r.dist_sq, r.dissipation, r.max_div})
        out += ',' + fmt17(x);
    return out;
}

void write_diagnostics_csv(const std::string& path,
                           const std::vector<DiagnosticsRecord>& records) {
    std::ofstream f(path);
    if (!f) throw IoError("cannot open '" + path + "' for writing");
    f << diagnostics_csv_header() << '\n';
    for (const DiagnosticsRecord& r : records) f << diagnostics_csv_row(r) << '\n';
    f.flush();
    if (!f) throw IoError("write failed on '" + path + "'");
}

const std::vector<double>& DiagnosticsTable::column(const std::string& name) const {
    for (size_t c = 0; c < columns.size(); ++c)
        if (columns[c] == name) return data[c];
    throw ContractError("diagnostics table has no column '" + name + "'");
}

DiagnosticsTable read_diagnostics_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw IoError("cannot read diagnostics file '" + path + "'");
    std::string line;
    if (!std::getline(f, line)) throw IoError("empty diagnostics file '" + path + "'");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != diagnostics_csv_header())
        throw IoError("unrecognised diagnostics header in '" + path + "'");

    DiagnosticsTable table;
    for (const char* name : diagnostics_columns()) table.columns.emplace_back(name);
    table.data.resize(table.columns.size());

    int rowno = 1;
    while (std::getline(f, line)) {
        ++rowno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::istringstream row(line);
        std::string cellstr;
        size_t col = 0;
        while (std::getline(row, cellstr, ',')) {
            if (col >= table.columns.size())
                throw IoError("row " + std::to_string(rowno) + " of '" + path
                              + "' has too many fields");
            double x = 0.0;
            if (!parse_double_token(cellstr, x))
                throw IoError("row " + std::to_string(rowno) + " of '" + path
                              + "': bad number '" + cellstr + "'");
            table.data[col++].push_back(x);
        }
        if (col != table.columns.size())
            throw IoError("row " + std::to_string(rowno) + " of '" + path
                          + "' has " + std::to_string(col) + " fields, expected "
                          + std::to_string(table.columns.size()));
    }
    return table;
}

// -------------------------------------------------------------- snapshots ----

void write_snapshot(const std::string& path, const Snapshot& snap) {
    if (snap.nx < 1 || snap.ny < 1)
        throw ContractError("write_snapshot: dimensions must be positive");
    if (snap.data.size() != static_cast<size_t>(snap.nx) * snap.ny)
        throw ContractError("write_snapshot: data size does not match nx*ny");
    if (snap.field.empty() || snap.field.find_first_of(" \t\n") != std::string::npos)
        throw ContractError("write_snapshot: field name must be a single token");

    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open '" + path + "' for writing");
    const std::string header = "EHD2 " + snap.field + ' ' + std::to_string(snap.nx) + ' '
                               + std::to_string(snap.ny) + ' ' + fmt17(snap.lx) + ' '
                               + fmt17(snap.ly) + ' ' + fmt17(snap.time) + '\n';
    f.write(header.data(), static_cast<std::streamsize>(header.size()));
    f.write(reinterpret_cast<const char*>(snap.data.data()),
            static_cast<std::streamsize>(8 * snap.data.size()));
    f.flush();
    if (!f) throw IoError("write failed on '" + path + "'");
}

Snapshot read_snapshot(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot read snapshot '" + path + "'");
    std::string header;
    if (!std::getline(f, header)) throw IoError("missing snapshot header in '" + path + "'");

    Snapshot s;
    std::istringstream h(header);
    std::string magic;
    if (!(h >> magic >> s.field >> s.nx >> s.ny >> s.lx >> s.ly >> s.time) || magic != "EHD2")
        throw IoError("not an EHD2 snapshot: '" + path + "'");
    std::string extra;
    if (h >> extra) throw IoError("trailing tokens in snapshot header of '" + path + "'");
    if (s.nx < 1 || s.ny < 1 || s.nx > 1000000 || s.ny > 1000000
        || static_cast<long long>(s.nx) * s.ny > 100000000LL)
        throw IoError("implausible snapshot dimensions in '" + path + "'");

    s.data.resize(static_cast<size_t>(s.nx) * s.ny);
    f.read(reinterpret_cast<char*>(s.data.data()),
           static_cast<std::streamsize>(8 * s.data.size()));
    if (static_cast<size_t>(f.gcount()) != 8 * s.data.size())
        throw IoError("truncated snapshot payload in '" + path + "'");
    if (f.peek() != std::char_traits<char>::eof())
        throw IoError("trailing bytes after snapshot payload in '" + path + "'");
    return s;
}

Snapshot snapshot_of(const ScalarField& s, const std::string& field, double time) {
    Snapshot snap;
    snap.field = field;
    snap.nx = s.grid.nx;
    snap.ny = s.grid.ny;
    snap.lx = s.grid.lx;
    snap.ly = s.grid.ly;
    snap.time = time;
    snap.data = s.a;
    return snap;
}

// --------------------------------------------------------------- manifest ----

namespace {

std::string iso8601_utc(std::chrono::system_clock::time_point tp) {
    const std::time_t t = std::chrono::system_clock::to_time_t(tp);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

} // namespace

void write_manifest(const std::string& path, const SimConfig& config,
                    const std::vector<std::string>& outputs, const std::string& status,
                    double wall_seconds, std::int64_t steps_done) {
    nlohmann::json j;
    j["tool"] = "ehd";
    j["version"] = kVersion;
    j["status"] = status;
    j["wall_seconds"] = wall_seconds;
    j["steps_done"] = steps_done;
    const auto end = std::chrono::system_clock::now();
    const auto start =
        end - std::chrono::duration_cast<std::chrono::system_clock::duration>(
                  std::chrono::duration<double>(std::max(0.0, wall_seconds)));
    j["start_time"] = iso8601_utc(start);
    j["end_time"] = iso8601_utc(end);
    j["outputs"] = outputs;
    j["config"] = {
        {"nx", config.nx},
        {"ny", config.ny},
        {"lx", config.lx},
        {"ly", config.ly},
        {"dt", config.dt},
        {"t_end", config.t_end},
        {"theta", config.theta},
        {"mode", config.mode == CouplingMode::debye ? "debye" : "coupled"},
        {"preset", config.preset},
        {"preset_params", config.preset_params},
        {"poisson_tol", config.poisson_tol},
        {"transport_tol", config.transport_tol},
        {"fluid_tol", config.fluid_tol},
        {"output_every", config.output_every},
        {"seed", config.seed},
    };
    std::ofstream f(path);
    if (!f) throw IoError("cannot open '" + path + "' for writing");
    f << j.dump(2) << '\n';
    f.flush();
    if (!f) throw IoError("write failed on '" + path + "'");
}

} // namespace ehd
