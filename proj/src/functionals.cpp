/// @file functionals.cpp
/// @brief Scalar diagnostics; all quadrature conventions are documented in
///        the header and exercised verbatim by the direct-summation oracles
///        in the tests.

#include "ehd/functionals.hpp"

#include <cmath>

#include "ehd/errors.hpp"

namespace ehd {

namespace {

double xlogx(double x, const char* who) {
    if (x < 0.0) throw ContractError(std::string(who) + ": negative density");
    return (x < 1e-300) ? 0.0 : x * std::log(x);
}

void require_positive(const ScalarField& s, const char* who) {
    for (double q : s.a)
        if (!(q > 0.0)) throw ContractError(std::string(who) + ": reference density must be > 0");
}

/// Squared gradient of one velocity component: like-direction differences
/// across cells (the pinned wall-normal zeros give the Dirichlet wall
/// differences) plus cross-direction differences with reflecting ghosts;
/// the two wall-ghost differences carry half weight so the sum equals
/// -<u, lap u> in the face inner product.
double component_grad_sq(const VectorField& u) {
    const GridSpec& g = u.grid;
    const int nx = g.nx, ny = g.ny;
    const double hx = g.hx(), hy = g.hy(), area = g.cell_area();
    double total = 0.0;
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            const double d = (u.xf(i + 1, j) - u.xf(i, j)) / hx;
            total += d * d * area;
        }
    for (int i = 1; i < nx; ++i) {
        for (int j = 0; j + 1 < ny; ++j) {
            const double d = (u.xf(i, j + 1) - u.xf(i, j)) / hy;
            total += d * d * area;
        }
        const double dbot = 2.0 * u.xf(i, 0) / hy;
        const double dtop = 2.0 * u.xf(i, ny - 1) / hy;
        total += 0.5 * (dbot * dbot + dtop * dtop) * area;
    }
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            const double d = (u.yf(i, j + 1) - u.yf(i, j)) / hy;
            total += d * d * area;
        }
    for (int j = 1; j < ny; ++j) {
        for (int i = 0; i + 1 < nx; ++i) {
            const double d = (u.yf(i + 1, j) - u.yf(i, j)) / hx;
            total += d * d * area;
        }
        const double dlft = 2.0 * u.yf(0, j) / hx;
        const double drgt = 2.0 * u.yf(nx - 1, j) / hx;
        total += 0.5 * (dlft * dlft + drgt * drgt) * area;
    }
    return total;
}

} // namespace

double entropy(const ScalarField& v, const ScalarField& w) {
    require_same_grid(v.grid, w.grid, "entropy");
    const double area = v.grid.cell_area();
    double total = 0.0;
    for (double q : v.a) total += xlogx(q, "entropy") * area;
    for (double q : w.a) total += xlogx(q, "entropy") * area;
    return total;
}

double electrostatic_energy(const ScalarField& phi) {
    return 0.5 * face_norm2(gradient_dirichlet0(phi));
}

double kinetic_energy(const VectorField& u) { return 0.5 * face_norm2(u); }

double k_functional(const ScalarField& v, const ScalarField& w, const ScalarField& phi,
                    const VectorField& u) {
    require_same_grid(v.grid, phi.grid, "k_functional");
    require_same_grid(v.grid, u.grid, "k_functional");
    return entropy(v, w) + electrostatic_energy(phi) + kinetic_energy(u);
}

double j_functional(const ScalarField& phi, double mu_v, double mu_w) {
    if (!(mu_v >= 0.0) || !(mu_w >= 0.0))
        throw ContractError("j_functional: masses must be >= 0");
    double total = 0.5 * face_norm2(gradient_dirichlet0(phi));
    const double area = phi.grid.cell_area();
    if (mu_v > 0.0) {
        double s = 0.0;
        for (double q : phi.a) s += std::exp(q) * area;
        total += mu_v * std::log(s);
    }
    if (mu_w > 0.0) {
        double s = 0.0;
        for (double q : phi.a) s += std::exp(-q) * area;
        total += mu_w * std::log(s);
    }
    return total;
}

double lyapunov(const ScalarField& v, const ScalarField& w, const ScalarField& phi,
                const VectorField& u, const ScalarField& V, const ScalarField& W,
                const ScalarField& Phi, double theta, bool half_weight_potential) {
    require_same_grid(v.grid, V.grid, "lyapunov");
    require_same_grid(v.grid, w.grid, "lyapunov");
    require_same_grid(v.grid, W.grid, "lyapunov");
    require_same_grid(v.grid, phi.grid, "lyapunov");
    require_same_grid(v.grid, Phi.grid, "lyapunov");
    require_same_grid(v.grid, u.grid, "lyapunov");
    if (!(theta > 0.0)) throw ContractError("lyapunov: theta must be > 0");
    require_positive(V, "lyapunov");
    require_positive(W, "lyapunov");
    const double area = v.grid.cell_area();
    double total = theta * kinetic_energy(u);
    for (size_t k = 0; k < v.a.size(); ++k) {
        const double dv = v.a[k] - V.a[k];
        const double dw = w.a[k] - W.a[k];
        total += (0.5 * dv * dv / V.a[k] + 0.5 * dw * dw / W.a[k]) * area;
    }
    ScalarField dphi(v.grid);
    for (size_t k = 0; k < dphi.a.size(); ++k) dphi.a[k] = phi.a[k] - Phi.a[k];
    const double pot = face_norm2(gradient_dirichlet0(dphi));
    total += half_weight_potential ? 0.5 * pot : pot;
    return total;
}

double dissipation(const ScalarField& v, const ScalarField& w, const ScalarField& phi,
                   const VectorField& u) {
    require_same_grid(v.grid, w.grid, "dissipation");
    require_same_grid(v.grid, phi.grid, "dissipation");
    require_same_grid(v.grid, u.grid, "dissipation");
    for (double q : v.a)
        if (q < 0.0) throw ContractError("dissipation: negative density");
    for (double q : w.a)
        if (q < 0.0) throw ContractError("dissipation: negative density");

    const GridSpec& g = v.grid;
    const int nx = g.nx, ny = g.ny;
    const double hx = g.hx(), hy = g.hy(), area = g.cell_area();
    double total = 0.0;
    // density production on interior faces; sqrt-densities averaged to faces
    for (int j = 0; j < ny; ++j)
        for (int i = 1; i < nx; ++i) {
            const double gp = (phi(i, j) - phi(i - 1, j)) / hx;
            const double sL = std::sqrt(v(i - 1, j)), sR = std::sqrt(v(i, j));
            const double tL = std::sqrt(w(i - 1, j)), tR = std::sqrt(w(i, j));
            const double dv = 2.0 * (sR - sL) / hx - 0.5 * (sL + sR) * gp;
            const double dw = 2.0 * (tR - tL) / hx + 0.5 * (tL + tR) * gp;
            total += (dv * dv + dw * dw) * area;
        }
    for (int j = 1; j < ny; ++j)
        for (int i = 0; i < nx; ++i) {
            const double gp = (phi(i, j) - phi(i, j - 1)) / hy;
            const double sL = std::sqrt(v(i, j - 1)), sR = std::sqrt(v(i, j));
            const double tL = std::sqrt(w(i, j - 1)), tR = std::sqrt(w(i, j));
            const double dv = 2.0 * (sR - sL) / hy - 0.5 * (sL + sR) * gp;
            const double dw = 2.0 * (tR - tL) / hy + 0.5 * (tL + tR) * gp;
            total += (dv * dv + dw * dw) * area;
        }
    return total + component_grad_sq(u);
}

double relative_entropy(const ScalarField& v, const ScalarField& w, const ScalarField& phi,
                        const ScalarField& V, const ScalarField& W, const ScalarField& Phi) {
    require_same_grid(v.grid, V.grid, "relative_entropy");
    require_same_grid(v.grid, w.grid, "relative_entropy");
    require_same_grid(v.grid, W.grid, "relative_entropy");
    require_same_grid(v.grid, phi.grid, "relative_entropy");
    require_same_grid(v.grid, Phi.grid, "relative_entropy");
    require_positive(V, "relative_entropy");
    require_positive(W, "relative_entropy");
    const double area = v.grid.cell_area();
    double total = 0.0;
    for (size_t k = 0; k < v.a.size(); ++k) {
        total += (xlogx(v.a[k], "relative_entropy") + xlogx(w.a[k], "relative_entropy")
                  - xlogx(V.a[k], "relative_entropy") - xlogx(W.a[k], "relative_entropy"))
                 * area;
    }
    return total - electrostatic_energy(phi) + electrostatic_energy(Phi);
}

double distance_squared(const ScalarField& v, const ScalarField& w, const ScalarField& phi,
                        const VectorField& u, const ScalarField& V, const ScalarField& W,
                        const ScalarField& Phi) {
    require_same_grid(v.grid, V.grid, "distance_squared");
    require_same_grid(v.grid, w.grid, "distance_squared");
    require_same_grid(v.grid, W.grid, "distance_squared");
    require_same_grid(v.grid, phi.grid, "distance_squared");
    require_same_grid(v.grid, Phi.grid, "distance_squared");
    require_same_grid(v.grid, u.grid, "distance_squared");
    const double area = v.grid.cell_area();
    double total = face_norm2(u);
    ScalarField dphi(v.grid);
    for (size_t k = 0; k < v.a.size(); ++k) {
        const double dv = v.a[k] - V.a[k];
        const double dw = w.a[k] - W.a[k];
        dphi.a[k] = phi.a[k] - Phi.a[k];
        total += (dv * dv + dw * dw + dphi.a[k] * dphi.a[k]) * area;
    }
    return total + face_norm2(gradient_dirichlet0(dphi));
}

} // namespace ehd
