/// @file steady.cpp
/// @brief Damped Newton minimisation of the convex potential functional J;
///        the minimiser is the self-consistent Boltzmann steady state.

#include "ehd/steady.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "ehd/errors.hpp"
#include "ehd/functionals.hpp"

namespace ehd {

namespace {

/// Hessian of J at the current densities: -lap + diag(V+W) minus two
/// nonlocal rank-one normalisation corrections. Symmetric positive
/// definite (it dominates -lap).
struct JHessian {
    const ScalarField& V;
    const ScalarField& W;
    double mu_v, mu_w;

    ScalarField apply(const ScalarField& d) const {
        ScalarField out = laplacian_dirichlet0(d);
        const double area = d.grid.cell_area();
        double vd = 0.0, wd = 0.0;
        for (size_t k = 0; k < d.a.size(); ++k) {
            vd += V.a[k] * d.a[k];
            wd += W.a[k] * d.a[k];
        }
        vd *= area;
        wd *= area;
        for (size_t k = 0; k < d.a.size(); ++k) {
            double h = -out.a[k] + (V.a[k] + W.a[k]) * d.a[k];
            if (mu_v > 0.0) h -= V.a[k] * vd / mu_v;
            if (mu_w > 0.0) h -= W.a[k] * wd / mu_w;
            out.a[k] = h;
        }
        return out;
    }
};

/// CG on the Hessian from a zero start; every truncated iterate is a
/// descent direction for J. Stops at ||r||_2 <= eta * ||b||_2.
ScalarField newton_direction(const JHessian& H, const ScalarField& b, double eta) {
    const size_t n = b.a.size();
    ScalarField x(b.grid, 0.0);
    ScalarField r = b, p = b;
    double rr = 0.0;
    for (double q : r.a) rr += q * q;
    const double target2 = eta * eta * rr;
    if (rr == 0.0) return x;
    const long cap = 20 * static_cast<long>(n) + 100;
    for (long it = 0; it < cap; ++it) {
        ScalarField ap = H.apply(p);
        double pap = 0.0;
        for (size_t k = 0; k < n; ++k) pap += p.a[k] * ap.a[k];
        if (pap <= 0.0) break;
        const double alpha = rr / pap;
        for (size_t k = 0; k < n; ++k) x.a[k] += alpha * p.a[k];
        for (size_t k = 0; k < n; ++k) r.a[k] -= alpha * ap.a[k];
        double rr_new = 0.0;
        for (double q : r.a) rr_new += q * q;
        if (rr_new <= target2) return x;
        const double beta = rr_new / rr;
        rr = rr_new;
        for (size_t k = 0; k < n; ++k) p.a[k] = r.a[k] + beta * p.a[k];
    }
    return x; // best effort; the line search guards the outer iteration
}

} // namespace

void boltzmann_densities(const ScalarField& phi, double mu_v, double mu_w, ScalarField& V_out,
                         ScalarField& W_out) {
    if (!(mu_v >= 0.0) || !(mu_w >= 0.0))
        throw ContractError("boltzmann_densities: masses must be >= 0");
    const GridSpec& g = phi.grid;
    const double area = g.cell_area();
    V_out = ScalarField(g, 0.0);
    W_out = ScalarField(g, 0.0);
    if (mu_v > 0.0) {
        // shift by the max for overflow-safe normalisation (value unchanged)
        double m = phi.a[0];
        for (double q : phi.a) m = std::max(m, q);
        double s = 0.0;
        for (double q : phi.a) s += std::exp(q - m) * area;
        for (size_t k = 0; k < phi.a.size(); ++k)
            V_out.a[k] = mu_v * std::exp(phi.a[k] - m) / s;
    }
    if (mu_w > 0.0) {
        double m = -phi.a[0];
        for (double q : phi.a) m = std::max(m, -q);
        double s = 0.0;
        for (double q : phi.a) s += std::exp(-q - m) * area;
        for (size_t k = 0; k < phi.a.size(); ++k)
            W_out.a[k] = mu_w * std::exp(-phi.a[k] - m) / s;
    }
}

SteadyState solve_steady(const GridSpec& grid, double mu_v, double mu_w, double tol, int max_iter,
                         const ScalarField* guess, std::vector<double>* j_trace) {
    if (!(mu_v >= 0.0) || !(mu_w >= 0.0))
        throw ContractError("solve_steady: masses must be >= 0");
    if (!(tol > 0.0)) throw ContractError("solve_steady: tol must be > 0");
    if (max_iter < 1) throw ContractError("solve_steady: max_iter must be >= 1");

    ScalarField phi = guess ? *guess : ScalarField(grid, 0.0);
    if (guess) require_same_grid(grid, guess->grid, "solve_steady");
    if (j_trace) j_trace->clear();

    const double area = grid.cell_area();
    ScalarField V(grid), W(grid);
    double jval = j_functional(phi, mu_v, mu_w);
    if (j_trace) j_trace->push_back(jval);

    for (int it = 0;; ++it) {
        boltzmann_densities(phi, mu_v, mu_w, V, W);
        // Euler-Lagrange residual lap(phi) - (V - W); its negation is the
        // J-gradient density
        ScalarField gradJ = laplacian_dirichlet0(phi);
        double resid = 0.0;
        for (size_t k = 0; k < gradJ.a.size(); ++k) {
            gradJ.a[k] = -gradJ.a[k] + (V.a[k] - W.a[k]);
            resid = std::max(resid, std::fabs(gradJ.a[k]));
        }
        if (resid <= tol)
            return SteadyState{V, W, phi, mu_v, mu_w, resid, it};
        if (it == max_iter)
            throw ConvergenceError("solve_steady: Newton did not reach tolerance", resid, tol,
                                   max_iter);

        ScalarField b(grid);
        for (size_t k = 0; k < b.a.size(); ++k) b.a[k] = -gradJ.a[k];
        JHessian H{V, W, mu_v, mu_w};
        const double eta = std::min(0.1, resid);
        ScalarField dir = newton_direction(H, b, eta);

        double gd = 0.0;
        for (size_t k = 0; k < dir.a.size(); ++k) gd += gradJ.a[k] * dir.a[k];
        gd *= area;
        if (!(gd < 0.0))
            throw InternalError("solve_steady: Newton direction is not a descent direction");

        // Armijo backtracking; once the predicted decrease drops below the
        // representable resolution of J, accept the full Newton step
        double s = 1.0;
        const double rounding = 1e-14 * (1.0 + std::fabs(jval));
        ScalarField trial(grid);
        double jtrial;
        for (;;) {
            for (size_t k = 0; k < trial.a.size(); ++k) trial.a[k] = phi.a[k] + s * dir.a[k];
            jtrial = j_functional(trial, mu_v, mu_w);
            if (jtrial <= jval + 1e-4 * s * gd) break;
            if (-gd * s <= rounding) break; // decrease below rounding: accept
            s *= 0.5;
            if (s < 1e-12)
                throw ConvergenceError("solve_steady: line search stalled", resid, tol, it);
        }
        phi = trial;
        jval = jtrial;
        if (j_trace) j_trace->push_back(jval);
    }
}

double pressure_identity_residual(const SteadyState& s) {
    const GridSpec& g = s.Phi.grid;
    const int nx = g.nx, ny = g.ny;
    const double hx = g.hx(), hy = g.hy();
    double worst = 0.0;
    for (int j = 0; j < ny; ++j)
        for (int i = 1; i < nx; ++i) {
            const double rho =
                0.5 * ((s.V(i - 1, j) - s.W(i - 1, j)) + (s.V(i, j) - s.W(i, j)));
            const double gphi = (s.Phi(i, j) - s.Phi(i - 1, j)) / hx;
            const double gsum =
                ((s.V(i, j) + s.W(i, j)) - (s.V(i - 1, j) + s.W(i - 1, j))) / hx;
            worst = std::max(worst, std::fabs(rho * gphi - gsum));
        }
    for (int j = 1; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            const double rho =
                0.5 * ((s.V(i, j - 1) - s.W(i, j - 1)) + (s.V(i, j) - s.W(i, j)));
            const double gphi = (s.Phi(i, j) - s.Phi(i, j - 1)) / hy;
            const double gsum =
                ((s.V(i, j) + s.W(i, j)) - (s.V(i, j - 1) + s.W(i, j - 1))) / hy;
            worst = std::max(worst, std::fabs(rho * gphi - gsum));
        }
    return worst;
}

} // namespace ehd
