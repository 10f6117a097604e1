/// @file sim.cpp
/// @brief Presets, the per-step sweep (charges -> Poisson refresh ->
///        velocity) and the run loop with diagnostics.
///
/// The sweep lags the coupling: charges move against the potential and
/// velocity of the previous step, then the potential is refreshed from the
/// new charges (warm-started from the old one), then the velocity feels the
/// fresh Lorentz force. Time accumulates by repeated addition of dt so that
/// a resumed run replays the identical floating-point sequence.

#include "ehd/sim.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "ehd/elliptic.hpp"
#include "ehd/errors.hpp"
#include "ehd/functionals.hpp"

namespace ehd {

namespace {

void validate_config(const SimConfig& c) {
    auto bad = [](const char* msg, const char* key) { throw ConfigError(msg, key); };
    if (c.nx < 3) bad("grid needs at least 3 cells per direction", "nx");
    if (c.ny < 3) bad("grid needs at least 3 cells per direction", "ny");
    if (!(c.lx > 0.0) || !std::isfinite(c.lx)) bad("domain extent must be positive", "lx");
    if (!(c.ly > 0.0) || !std::isfinite(c.ly)) bad("domain extent must be positive", "ly");
    if (!(c.dt > 0.0) || !std::isfinite(c.dt)) bad("time step must be positive", "dt");
    if (!(c.t_end >= 0.0) || !std::isfinite(c.t_end)) bad("end time must be nonnegative", "t_end");
    if (!(c.theta > 0.0) || !std::isfinite(c.theta)) bad("theta must be positive", "theta");
    if (!(c.poisson_tol > 0.0)) bad("tolerance must be positive", "poisson_tol");
    if (!(c.transport_tol > 0.0)) bad("tolerance must be positive", "transport_tol");
    if (!(c.fluid_tol > 0.0)) bad("tolerance must be positive", "fluid_tol");
    if (c.output_every < 1) bad("output cadence must be at least 1", "output_every");
    if (c.preset != "neutral-rest" && c.preset != "two-blobs" && c.preset != "sheared-blobs")
        throw ConfigError("unknown preset '" + c.preset + "'", "preset");
}

/// Consumes recognised preset parameters; anything left over at finish() is
/// a typo and rejected.
class PresetParams {
  public:
    explicit PresetParams(const SimConfig& c) : params_(c.preset_params) {}

    double take(const char* key, double fallback) {
        auto it = params_.find(key);
        if (it == params_.end()) return fallback;
        const double value = it->second;
        params_.erase(it);
        return value;
    }

    void finish(const std::string& preset) const {
        if (!params_.empty())
            throw ConfigError("preset '" + preset + "' does not take this parameter",
                              "preset." + params_.begin()->first);
    }

  private:
    std::map<std::string, double> params_;
};

/// Clipped Gaussian bump, normalised so the discrete mass equals `mass`
/// exactly up to rounding. The clip at exp(-8) gives compact support: cells
/// beyond 4 sigma hold exact zeros.
void fill_blob(ScalarField& s, double cx, double cy, double sigma, double mass) {
    const GridSpec& g = s.grid;
    const double clip = std::exp(-8.0);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const double x = (i + 0.5) * g.hx() - cx;
            const double y = (j + 0.5) * g.hy() - cy;
            s(i, j) = std::max(0.0, std::exp(-(x * x + y * y) / (2.0 * sigma * sigma)) - clip);
        }
    const double raw = cell_integral(s);
    if (!(raw > 0.0))
        throw ConfigError("blob support misses every cell; widen sigma", "preset.sigma");
    const double scale = mass / raw;
    for (double& v : s.a) v *= scale;
}

/// Curl of the stream function psi = amp sin^2(pi x/lx) sin^2(pi y/ly),
/// sampled on interior faces; boundary-normal faces stay exact zeros (the
/// analytic values there only vanish to rounding).
VectorField shear_velocity(const GridSpec& g, double amp) {
    const double pi = std::acos(-1.0);
    VectorField f(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 1; i < g.nx; ++i) {
            const double x = i * g.hx(), y = (j + 0.5) * g.hy();
            const double sx = std::sin(pi * x / g.lx);
            f.xf(i, j) = amp * sx * sx * (pi / g.ly) * std::sin(2.0 * pi * y / g.ly);
        }
    for (int j = 1; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const double x = (i + 0.5) * g.hx(), y = j * g.hy();
            const double sy = std::sin(pi * y / g.ly);
            f.yf(i, j) = -amp * (pi / g.lx) * std::sin(2.0 * pi * x / g.lx) * sy * sy;
        }
    return f;
}

} // namespace

GridSpec SimConfig::grid() const { return make_grid(nx, ny, lx, ly); }

SimState init_state(const SimConfig& config) {
    validate_config(config);
    const GridSpec g = config.grid();

    SimState st;
    st.grid = g;
    st.charges.v = ScalarField(g);
    st.charges.w = ScalarField(g);
    st.phi = ScalarField(g);
    st.vel.u = VectorField(g);
    st.vel.p = ScalarField(g);

    PresetParams params(config);
    if (config.preset == "neutral-rest") {
        const double c = 1.0 / (g.lx * g.ly);
        std::fill(st.charges.v.a.begin(), st.charges.v.a.end(), c);
        std::fill(st.charges.w.a.begin(), st.charges.w.a.end(), c);
    } else { // the two-blobs family
        const double mu_v = params.take("mu_v", 2.0);
        const double mu_w = params.take("mu_w", 1.0);
        const double sigma = params.take("sigma", 0.12 * std::min(g.lx, g.ly));
        if (mu_v < 0.0 || mu_w < 0.0)
            throw ContractError("init_state: preset species masses must be nonnegative");
        if (!(sigma > 0.0) || !std::isfinite(sigma))
            throw ConfigError("blob width must be positive", "preset.sigma");
        fill_blob(st.charges.v, 0.35 * g.lx, 0.5 * g.ly, sigma, mu_v);
        fill_blob(st.charges.w, 0.65 * g.lx, 0.5 * g.ly, sigma, mu_w);
        if (config.preset == "sheared-blobs") {
            const double amp = params.take("amp", 1.0);
            if (!std::isfinite(amp)) throw ConfigError("amplitude must be finite", "preset.amp");
            st.vel.u = project_divergence_free(shear_velocity(g, amp), config.fluid_tol);
        }
    }
    params.finish(config.preset);

    st.charges.mu_v = cell_integral(st.charges.v);
    st.charges.mu_w = cell_integral(st.charges.w);

    ScalarField rhs(g);
    for (size_t k = 0; k < rhs.a.size(); ++k)
        rhs.a[k] = st.charges.v.a[k] - st.charges.w.a[k];
    st.phi = solve_poisson_dirichlet(rhs, config.poisson_tol);
    return st;
}

double step(SimState& state, const SimConfig& config) {
    validate_config(config);
    if (!(state.grid == config.grid()))
        throw ContractError("step: state grid does not match the config grid");

    const std::string where = "step " + std::to_string(state.step_index) + ": ";
    try {
        state.charges = advance_charges(state.charges, state.vel.u, state.phi, config.dt,
                                        config.transport_tol);
        ScalarField rhs(state.grid);
        for (size_t k = 0; k < rhs.a.size(); ++k)
            rhs.a[k] = state.charges.v.a[k] - state.charges.w.a[k];
        state.phi = solve_poisson_dirichlet(rhs, config.poisson_tol, &state.phi);

        double cfl = 0.0;
        if (config.mode == CouplingMode::coupled) {
            const VectorField force =
                lorentz_force(state.charges.v, state.charges.w, state.phi);
            state.vel = advance_velocity(state.vel, force, config.dt, config.fluid_tol,
                                         AdvectionScheme::centered, &cfl);
        }
        state.t += config.dt;
        ++state.step_index;
        return cfl;
    } catch (const ConvergenceError& e) {
        throw ConvergenceError(ConvergenceError::already_formatted{}, where + e.what(),
                               e.achieved, e.target, e.iterations);
    } catch (const CompatibilityError& e) {
        throw CompatibilityError(where + e.what());
    } catch (const ContractError& e) {
        throw ContractError(where + e.what());
    } catch (const InternalError& e) {
        throw InternalError(where + e.what());
    }
}

DiagnosticsRecord measure(const SimState& state, const SteadyState& steady, double theta) {
    require_same_grid(state.grid, steady.Phi.grid, "measure");
    const ChargePair& c = state.charges;
    DiagnosticsRecord r;
    r.step = state.step_index;
    r.t = state.t;
    r.mass_v = cell_integral(c.v);
    r.mass_w = cell_integral(c.w);
    r.min_v = min_value(c.v);
    r.min_w = min_value(c.w);
    r.kinetic = kinetic_energy(state.vel.u);
    r.entropy = entropy(c.v, c.w);
    r.electrostatic = electrostatic_energy(state.phi);
    r.k_total = k_functional(c.v, c.w, state.phi, state.vel.u);
    r.lyapunov =
        lyapunov(c.v, c.w, state.phi, state.vel.u, steady.V, steady.W, steady.Phi, theta);
    r.dist_sq =
        distance_squared(c.v, c.w, state.phi, state.vel.u, steady.V, steady.W, steady.Phi);
    r.dissipation = dissipation(c.v, c.w, state.phi, state.vel.u);
    r.max_div = max_abs(divergence(state.vel.u));
    return r;
}

RunResult run(const SimConfig& config, const SimState* start,
              const std::function<void(const DiagnosticsRecord&)>& on_record) {
    validate_config(config);
    SimState state = start ? *start : init_state(config);
    if (start && !(state.grid == config.grid()))
        throw ContractError("run: start state grid does not match the config grid");
    if (!(state.charges.mu_v > 0.0) || !(state.charges.mu_w > 0.0))
        throw ContractError("run: the steady reference requires positive masses for both species");

    RunResult rr;
    rr.steady = solve_steady(config.grid(), state.charges.mu_v, state.charges.mu_w);

    auto record = [&]() {
        DiagnosticsRecord r = measure(state, rr.steady, config.theta);
        rr.diagnostics.push_back(r);
        if (on_record) on_record(r);
    };
    record();
    while (state.t < config.t_end) {
        const double cfl = step(state, config);
        if (cfl > 1.0) ++rr.cfl_warnings;
        if (state.step_index % config.output_every == 0 || !(state.t < config.t_end)) record();
    }
    rr.final_state = std::move(state);
    return rr;
}

} // namespace ehd
