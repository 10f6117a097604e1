/// @file cli.cpp
/// @brief The `ehd` command-line driver: simulate, steady, analyze.
///
/// Every failure path maps the exception taxonomy onto a stable exit code
/// (2 config/contract, 3 solver, 4 I/O) and leaves a machine-readable
/// error.json next to the outputs where an output directory exists.
/// Diagnostics rows are streamed and flushed as they are produced, so an
/// interrupted run still leaves a readable prefix on disk.

#include "ehd/cli.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ehd/analysis.hpp"
#include "ehd/errors.hpp"
#include "ehd/functionals.hpp"
#include "ehd/io.hpp"
#include "ehd/sim.hpp"
#include "ehd/steady.hpp"

namespace fs = std::filesystem;

namespace ehd {

namespace {

std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

/// Exit code and error.json fields for the in-flight exception.
struct Failure {
    int code = 3;
    std::string kind;
    std::string message;
};

Failure classify_current_exception() {
    try {
        throw;
    } catch (const ConfigError& e) {
        return {2, "config", e.what()};
    } catch (const ContractError& e) {
        return {2, "contract", e.what()};
    } catch (const ConvergenceError& e) {
        return {3, "solver", e.what()};
    } catch (const CompatibilityError& e) {
        return {3, "solver", e.what()};
    } catch (const IoError& e) {
        return {4, "io", e.what()};
    } catch (const fs::filesystem_error& e) {
        return {4, "io", e.what()};
    } catch (const std::exception& e) {
        return {3, "internal", e.what()};
    }
}

/// A fresh success must not leave a stale failure record from an earlier
/// attempt sitting next to the new outputs.
void clear_error_record(const std::string& out_dir) {
    std::error_code ec;
    fs::remove(fs::path(out_dir) / "error.json", ec);
}

/// Best effort: never throws, failures to record the failure are ignored.
void write_error_record(const std::string& out_dir, const Failure& f) {
    try {
        fs::create_directories(out_dir);
        nlohmann::json j;
        j["error"] = f.kind;
        j["message"] = f.message;
        j["exit_code"] = f.code;
        std::ofstream out(fs::path(out_dir) / "error.json");
        out << j.dump(2) << '\n';
    } catch (...) {
    }
}

void make_output_dir(const std::string& out_dir) {
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create output directory '" + out_dir + "': " + ec.message());
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ------------------------------------------------------------- simulate ----

int cmd_simulate(const std::string& config_path, const std::string& out_dir) {
    const auto wall0 = std::chrono::steady_clock::now();
    SimConfig config;
    try {
        config = load_config(config_path);
    } catch (...) {
        const Failure f = classify_current_exception();
        write_error_record(out_dir, f);
        std::cerr << "ehd simulate: " << f.message << '\n';
        return f.code;
    }

    std::vector<std::string> outputs;
    std::int64_t steps_done = 0;
    try {
        make_output_dir(out_dir);
        const std::string csv_path = (fs::path(out_dir) / "diagnostics.csv").string();
        std::ofstream csv(csv_path);
        if (!csv) throw IoError("cannot open '" + csv_path + "' for writing");
        csv << diagnostics_csv_header() << '\n';
        outputs.push_back(csv_path);

        RunResult rr = run(config, nullptr, [&](const DiagnosticsRecord& r) {
            csv << diagnostics_csv_row(r) << '\n';
            csv.flush();
            if (!csv) throw IoError("write failed on '" + csv_path + "'");
            steps_done = r.step;
        });
        const SimState& st = rr.final_state;
        steps_done = st.step_index;

        auto put = [&](const Snapshot& snap, const char* name) {
            const std::string p = (fs::path(out_dir) / name).string();
            write_snapshot(p, snap);
            outputs.push_back(p);
        };
        put(snapshot_of(st.charges.v, "v", st.t), "final_v.ehd2");
        put(snapshot_of(st.charges.w, "w", st.t), "final_w.ehd2");
        put(snapshot_of(st.phi, "phi", st.t), "final_phi.ehd2");
        put(snapshot_of(st.vel.p, "p", st.t), "final_p.ehd2");
        Snapshot ux{"ux", st.grid.nx + 1, st.grid.ny, st.grid.lx, st.grid.ly, st.t, st.vel.u.x};
        Snapshot uy{"uy", st.grid.nx, st.grid.ny + 1, st.grid.lx, st.grid.ly, st.t, st.vel.u.y};
        put(ux, "final_ux.ehd2");
        put(uy, "final_uy.ehd2");

        if (rr.cfl_warnings > 0)
            std::cerr << "warning: advective CFL exceeded 1 on " << rr.cfl_warnings
                      << " of " << steps_done << " steps; consider a smaller dt\n";

        const std::string manifest_path = (fs::path(out_dir) / "manifest.json").string();
        write_manifest(manifest_path, config, outputs, "success", seconds_since(wall0),
                       steps_done);
        clear_error_record(out_dir);
        std::cout << "simulate: " << steps_done << " steps to t = " << fmt17(st.t) << ", "
                  << rr.diagnostics.size() << " diagnostics records -> " << out_dir << '\n';
        return 0;
    } catch (...) {
        const Failure f = classify_current_exception();
        write_error_record(out_dir, f);
        try {
            write_manifest((fs::path(out_dir) / "manifest.json").string(), config, outputs,
                           "failed: " + f.kind, seconds_since(wall0), steps_done);
        } catch (...) {
        }
        std::cerr << "ehd simulate: " << f.message << '\n';
        return f.code;
    }
}

// --------------------------------------------------------------- steady ----

int cmd_steady(const std::string& config_path, const std::string& out_dir) {
    const auto wall0 = std::chrono::steady_clock::now();
    SimConfig config;
    try {
        config = load_config(config_path);
    } catch (...) {
        const Failure f = classify_current_exception();
        write_error_record(out_dir, f);
        std::cerr << "ehd steady: " << f.message << '\n';
        return f.code;
    }

    std::vector<std::string> outputs;
    try {
        make_output_dir(out_dir);
        // The preset fixes the species masses; the steady state depends on
        // nothing else about the initial data.
        SimState initial = init_state(config);
        SteadyState steady =
            solve_steady(config.grid(), initial.charges.mu_v, initial.charges.mu_w);

        auto put = [&](const ScalarField& s, const char* field, const char* name) {
            const std::string p = (fs::path(out_dir) / name).string();
            write_snapshot(p, snapshot_of(s, field, 0.0));
            outputs.push_back(p);
        };
        put(steady.V, "V", "steady_V.ehd2");
        put(steady.W, "W", "steady_W.ehd2");
        put(steady.Phi, "Phi", "steady_Phi.ehd2");

        const std::string summary_path = (fs::path(out_dir) / "steady_summary.txt").string();
        std::ofstream summary(summary_path);
        if (!summary) throw IoError("cannot open '" + summary_path + "' for writing");
        summary << "residual = " << fmt17(steady.residual) << '\n'
                << "iterations = " << steady.newton_iterations << '\n'
                << "j_value = " << fmt17(j_functional(steady.Phi, steady.mu_v, steady.mu_w))
                << '\n'
                << "mu_v = " << fmt17(steady.mu_v) << '\n'
                << "mu_w = " << fmt17(steady.mu_w) << '\n'
                << "v_min = " << fmt17(min_value(steady.V)) << '\n'
                << "v_max = " << fmt17(max_abs(steady.V)) << '\n'
                << "w_min = " << fmt17(min_value(steady.W)) << '\n'
                << "w_max = " << fmt17(max_abs(steady.W)) << '\n'
                << "pressure_identity_residual = " << fmt17(pressure_identity_residual(steady))
                << '\n';
        summary.flush();
        if (!summary) throw IoError("write failed on '" + summary_path + "'");
        outputs.push_back(summary_path);

        write_manifest((fs::path(out_dir) / "manifest.json").string(), config, outputs,
                       "success", seconds_since(wall0), 0);
        clear_error_record(out_dir);
        std::cout << "steady: residual " << fmt17(steady.residual) << " after "
                  << steady.newton_iterations << " Newton iterations -> " << out_dir << '\n';
        return 0;
    } catch (...) {
        const Failure f = classify_current_exception();
        write_error_record(out_dir, f);
        try {
            write_manifest((fs::path(out_dir) / "manifest.json").string(), config, outputs,
                           "failed: " + f.kind, seconds_since(wall0), 0);
        } catch (...) {
        }
        std::cerr << "ehd steady: " << f.message << '\n';
        return f.code;
    }
}

// -------------------------------------------------------------- analyze ----

int cmd_analyze(const std::string& diag_path, const std::string& column,
                std::optional<FitWindow> window, std::string out_path) {
    try {
        const DiagnosticsTable table = read_diagnostics_csv(diag_path);
        const std::vector<double>& t = table.column("t");
        const std::vector<double>& value = table.column(column);
        const DecayFit fit = fit_decay_rate(t, value, window);

        if (out_path.empty())
            out_path = (fs::path(diag_path).parent_path() / ("fit_" + column + ".txt")).string();
        std::ofstream out(out_path);
        if (!out) throw IoError("cannot open '" + out_path + "' for writing");
        out << "column = " << column << '\n'
            << "lambda = " << fmt17(fit.lambda) << '\n'
            << "c_dagger = " << fmt17(fit.c_dagger) << '\n'
            << "r_squared = " << fmt17(fit.r_squared) << '\n'
            << "t_begin = " << fmt17(fit.t_begin) << '\n'
            << "t_end = " << fmt17(fit.t_end) << '\n'
            << "points = " << fit.points << '\n';
        out.flush();
        if (!out) throw IoError("write failed on '" + out_path + "'");

        std::cout << "analyze: " << column << " ~= " << fmt17(fit.c_dagger) << " * exp(-"
                  << fmt17(fit.lambda) << " t) over [" << fmt17(fit.t_begin) << ", "
                  << fmt17(fit.t_end) << "], " << fit.points
                  << " points, r^2 = " << fmt17(fit.r_squared) << " -> " << out_path << '\n';
        return 0;
    } catch (...) {
        const Failure f = classify_current_exception();
        std::cerr << "ehd analyze: " << f.message << '\n';
        return f.code;
    }
}

} // namespace

int cli_main(int argc, const char* const* argv) {
    // OpenBLAS threading adds nondeterministic reduction orders; runs are
    // reproducible bit for bit only single-threaded. Respect an explicit
    // user override.
    ::setenv("OPENBLAS_NUM_THREADS", "1", /*overwrite=*/0);

    CLI::App app{"ehd: structure-preserving electro-hydrodynamics on a staggered grid"};
    app.require_subcommand(1);

    std::string config_path, out_dir = "out";
    CLI::App* simulate = app.add_subcommand("simulate", "run a simulation from a config file");
    simulate->add_option("config", config_path, "run configuration (key = value lines)")
        ->required();
    simulate->add_option("out_dir", out_dir, "output directory (default: out)");

    std::string steady_config, steady_out = "out";
    CLI::App* steady = app.add_subcommand("steady", "solve the steady state for a config");
    steady->add_option("config", steady_config, "run configuration (key = value lines)")
        ->required();
    steady->add_option("out_dir", steady_out, "output directory (default: out)");

    std::string diag_path, column = "dist_sq", fit_out;
    double t_begin = 0.0, t_end = 0.0;
    CLI::App* analyze = app.add_subcommand("analyze", "fit a decay rate from diagnostics");
    analyze->add_option("diagnostics", diag_path, "diagnostics CSV produced by simulate")
        ->required();
    analyze->add_option("--column", column, "column to fit (default: dist_sq)");
    CLI::Option* tb = analyze->add_option("--t-begin", t_begin, "fit window start time");
    CLI::Option* te = analyze->add_option("--t-end", t_end, "fit window end time");
    tb->needs(te);
    te->needs(tb);
    analyze->add_option("--out", fit_out, "report path (default: fit_<column>.txt beside input)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    if (simulate->parsed()) return cmd_simulate(config_path, out_dir);
    if (steady->parsed()) return cmd_steady(steady_config, steady_out);
    std::optional<FitWindow> window;
    if (tb->count() > 0) window = FitWindow{t_begin, t_end};
    return cmd_analyze(diag_path, column, window, fit_out);
}

} // namespace ehd
