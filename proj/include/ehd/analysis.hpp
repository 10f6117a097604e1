/// @file analysis.hpp
/// @brief Post-processing: exponential decay-rate fits on diagnostics
///        series and the weighted Poincare constant.

#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ehd/grid.hpp"

namespace ehd {

/// One diagnostics row. Field order here *is* the CSV column order.
struct DiagnosticsRecord {
    std::int64_t step = 0;
    double t = 0.0;
    double mass_v = 0.0;
    double mass_w = 0.0;
    double min_v = 0.0;
    double min_w = 0.0;
    double kinetic = 0.0;
    double entropy = 0.0;
    double electrostatic = 0.0;
    double k_total = 0.0;
    double lyapunov = 0.0;
    double dist_sq = 0.0;
    double dissipation = 0.0;
    double max_div = 0.0;
};

/// Column names in declared order (the CSV header).
const std::vector<const char*>& diagnostics_columns();

/// Result of an ordinary-least-squares fit of log(value) against t:
/// value(t) ~= c_dagger * exp(-lambda * t).
struct DecayFit {
    double lambda = 0.0;
    double c_dagger = 0.0;
    double r_squared = 0.0;
    double t_begin = 0.0, t_end = 0.0; ///< window actually used
    int points = 0;
};

/// Closed time window [t_begin, t_end]; records with t inside are fitted.
struct FitWindow {
    double t_begin = 0.0, t_end = 0.0;
};

/// Fit an exponential decay rate over `window`, or over the default window
/// when none is given. The default first drops records at or below
/// 100 * 1e-28 (underflowed values), then additionally drops records at or
/// below 100 * the remaining minimum (the late solver-noise floor) provided
/// at least 10 records survive that cut, and finally keeps the last half of
/// what remains, skipping the early nonlinear transient. Values must be
/// positive within the window and at least 10 points are required
/// (ContractError otherwise). A constant series fits lambda = 0 with
/// r_squared = 0.
DecayFit fit_decay_rate(const std::vector<double>& t, const std::vector<double>& value,
                        std::optional<FitWindow> window = std::nullopt);

/// Smallest constant C such that  int f^2 <= C int |grad(f rho)|^2  over all
/// mean-zero f, computed in the variable g = f*rho by inverse power
/// iteration on the Neumann gradient with the mean constraint projected
/// out. rho must be strictly positive. For rho == 1 on (0,L)x(0,H), L >= H,
/// C converges to (L/pi)^2 from the discrete first Neumann eigenvalue.
double weighted_poincare_constant(const ScalarField& rho, double tol = 1e-10,
                                  int max_iter = 50000);

} // namespace ehd
