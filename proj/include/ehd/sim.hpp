/// @file sim.hpp
/// @brief Orchestration: configuration, state, the per-step sweep and the
///        full run loop with diagnostics.
///
/// Step order (one sweep, fixed dt): charges first against the lagged
/// potential, then the Poisson refresh, then the velocity update with the
/// fresh potential. In "debye" mode the velocity stays identically zero and
/// the fluid stage is skipped.

#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "ehd/analysis.hpp"
#include "ehd/fluid.hpp"
#include "ehd/grid.hpp"
#include "ehd/steady.hpp"
#include "ehd/transport.hpp"

namespace ehd {

enum class CouplingMode { coupled, debye };

struct SimConfig {
    int nx = 64, ny = 64;
    double lx = 1.0, ly = 1.0;
    double dt = 1e-3;
    double t_end = 1.0;
    double theta = 1.0;
    CouplingMode mode = CouplingMode::coupled;
    std::string preset = "neutral-rest";
    std::map<std::string, double> preset_params; ///< keys without "preset." prefix
    double poisson_tol = 1e-10;
    double transport_tol = 1e-10;
    double fluid_tol = 1e-10;
    std::int64_t output_every = 10;
    std::uint64_t seed = 0; ///< reserved for randomised presets; echoed in the manifest

    GridSpec grid() const;
};

struct SimState {
    GridSpec grid;
    double t = 0.0;
    std::int64_t step_index = 0;
    ChargePair charges;
    ScalarField phi; ///< always consistent: laplacian(phi) = v - w to tol
    VelocityState vel;
};

/// Build the initial state for config.preset ("neutral-rest", "two-blobs",
/// "sheared-blobs"); records masses, solves the initial potential, projects
/// any preset velocity to divergence-free.
SimState init_state(const SimConfig& config);

/// One sweep. Returns the advective CFL number seen this step.
double step(SimState& state, const SimConfig& config);

struct RunResult {
    SimState final_state;
    SteadyState steady; ///< reference state used for lyapunov / dist_sq
    std::vector<DiagnosticsRecord> diagnostics;
    std::int64_t cfl_warnings = 0;
};

/// Diagnostics row for the current state against `steady`.
DiagnosticsRecord measure(const SimState& state, const SteadyState& steady, double theta);

/// Run from `start` (or from init_state(config) when null) until
/// t >= t_end. Emits a record at the first step and every output_every
/// steps thereafter, final step always included. `on_record`, when set, is
/// called for each record as it is produced.
RunResult run(const SimConfig& config, const SimState* start = nullptr,
              const std::function<void(const DiagnosticsRecord&)>& on_record = {});

} // namespace ehd
