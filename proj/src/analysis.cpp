/// @file analysis.cpp
/// @brief Decay-rate fitting and the weighted Poincare constant.

#include "ehd/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "ehd/elliptic.hpp"
#include "ehd/errors.hpp"

namespace ehd {

const std::vector<const char*>& diagnostics_columns() {
    static const std::vector<const char*> cols = {
        "step",     "t",       "mass_v",      "mass_w",        "min_v",
        "min_w",    "kinetic", "entropy",     "electrostatic", "k_total",
        "lyapunov", "dist_sq", "dissipation", "max_div"};
    return cols;
}

DecayFit fit_decay_rate(const std::vector<double>& t, const std::vector<double>& value,
                        std::optional<FitWindow> window) {
    if (t.size() != value.size())
        throw ContractError("fit_decay_rate: time and value series differ in length");

    std::vector<size_t> idx;
    if (window) {
        if (!(window->t_begin <= window->t_end))
            throw ContractError("fit_decay_rate: window must satisfy t_begin <= t_end");
        for (size_t k = 0; k < t.size(); ++k)
            if (t[k] >= window->t_begin && t[k] <= window->t_end) idx.push_back(k);
    } else {
        // drop underflowed values
        std::vector<size_t> usable;
        for (size_t k = 0; k < t.size(); ++k)
            if (value[k] > 100.0 * 1e-28) usable.push_back(k);
        if (usable.empty()) throw ContractError("fit_decay_rate: fewer than 10 usable records");
        // drop the late solver-noise floor (records within 100x of the
        // minimum), but only when enough of the series survives the cut
        double vmin = value[usable.front()];
        for (size_t k : usable) vmin = std::min(vmin, value[k]);
        std::vector<size_t> above;
        for (size_t k : usable)
            if (value[k] > 100.0 * vmin) above.push_back(k);
        const std::vector<size_t>& kept = (above.size() >= 10) ? above : usable;
        // last half: skips the early nonlinear transient
        idx.assign(kept.begin() + kept.size() / 2, kept.end());
    }
    if (idx.size() < 10) throw ContractError("fit_decay_rate: fewer than 10 records in window");
    for (size_t k : idx)
        if (!(value[k] > 0.0))
            throw ContractError("fit_decay_rate: nonpositive value in fit window (window starts "
                                "before positivity or after the floating-point floor)");

    // a bitwise-constant window is the degenerate zero-variance regression
    bool constant = true;
    for (size_t k : idx)
        if (value[k] != value[idx.front()]) { constant = false; break; }
    if (constant) {
        DecayFit fit;
        fit.lambda = 0.0;
        fit.c_dagger = value[idx.front()];
        fit.r_squared = 0.0;
        fit.t_begin = t[idx.front()];
        fit.t_end = t[idx.back()];
        fit.points = static_cast<int>(idx.size());
        return fit;
    }

    const size_t n = idx.size();
    double tbar = 0.0, ybar = 0.0;
    for (size_t k : idx) {
        tbar += t[k];
        ybar += std::log(value[k]);
    }
    tbar /= static_cast<double>(n);
    ybar /= static_cast<double>(n);
    double stt = 0.0, sty = 0.0, syy = 0.0;
    for (size_t k : idx) {
        const double dt = t[k] - tbar;
        const double dy = std::log(value[k]) - ybar;
        stt += dt * dt;
        sty += dt * dy;
        syy += dy * dy;
    }
    if (!(stt > 0.0)) throw ContractError("fit_decay_rate: window has no time extent");

    DecayFit fit;
    const double slope = sty / stt;
    fit.lambda = (slope == 0.0) ? 0.0 : -slope;
    fit.c_dagger = std::exp(ybar - slope * tbar);
    fit.r_squared = (syy > 0.0) ? (sty * sty) / (stt * syy) : 0.0;
    fit.t_begin = t[idx.front()];
    fit.t_end = t[idx.back()];
    fit.points = static_cast<int>(n);
    return fit;
}

double weighted_poincare_constant(const ScalarField& rho, double tol, int max_iter) {
    if (!(tol > 0.0)) throw ContractError("weighted_poincare_constant: tol must be > 0");
    if (max_iter < 1) throw ContractError("weighted_poincare_constant: max_iter must be >= 1");
    for (double q : rho.a)
        if (!(q > 0.0))
            throw ContractError("weighted_poincare_constant: weight must be strictly positive");

    const GridSpec& g = rho.grid;
    const size_t n = rho.a.size();
    const double area = g.cell_area();

    // constraint vector c = 1/rho: the substituted variable z = f*rho must
    // satisfy <z, 1/rho> = 0 (mean-zero f)
    std::vector<double> c(n);
    double csum = 0.0;
    for (size_t k = 0; k < n; ++k) {
        c[k] = 1.0 / rho.a[k];
        csum += c[k];
    }

    auto project_constraint = [&](ScalarField& z) {
        double zc = 0.0;
        for (size_t k = 0; k < n; ++k) zc += z.a[k] * c[k];
        const double shift = zc / csum;
        for (double& q : z.a) q -= shift;
    };

    // deterministic nonconstant seed overlapping the lowest modes
    ScalarField gv(g);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i)
            gv(i, j) = std::cos(M_PI * (i + 0.5) / g.nx) + 0.3 * std::cos(M_PI * (j + 0.5) / g.ny);
    project_constraint(gv);

    double c_prev = 0.0;
    for (int it = 0; it < max_iter; ++it) {
        // rhs of -lap z = M g - beta*c, shifted for Neumann compatibility
        ScalarField rhs(g);
        double bsum = 0.0;
        for (size_t k = 0; k < n; ++k) {
            rhs.a[k] = gv.a[k] * c[k] * c[k]; // (M g)_k = g_k / rho_k^2
            bsum += rhs.a[k];
        }
        const double beta = bsum / csum;
        for (size_t k = 0; k < n; ++k) rhs.a[k] = -(rhs.a[k] - beta * c[k]);
        ScalarField z = solve_poisson_neumann_meanzero(rhs, 1e-12);
        project_constraint(z);

        // Rayleigh quotient of the iterate
        double num = 0.0;
        for (size_t k = 0; k < n; ++k) {
            const double fz = z.a[k] * c[k];
            num += fz * fz * area;
        }
        const double den = face_norm2(gradient_neumann(z));
        if (!(den > 0.0))
            throw ConvergenceError("weighted_poincare_constant: degenerate iterate", 0.0, tol, it);
        const double cval = num / den;
        if (it > 0 && std::fabs(cval - c_prev) <= tol * std::fabs(cval)) return cval;
        c_prev = cval;

        double norm = 0.0;
        for (double q : z.a) norm += q * q;
        norm = std::sqrt(norm);
        for (size_t k = 0; k < n; ++k) gv.a[k] = z.a[k] / norm;
    }
    throw ConvergenceError("weighted_poincare_constant: power iteration stagnated",
                           c_prev, tol, max_iter);
}

} // namespace ehd
