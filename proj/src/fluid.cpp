/// @file fluid.cpp
/// @brief Velocity step: conservative advection, implicit diffusion by CG,
///        pressure projection through the mean-zero Neumann solver.

#include "ehd/fluid.hpp"

#include <cmath>
#include <vector>

#include "ehd/elliptic.hpp"
#include "ehd/errors.hpp"

namespace ehd {

namespace {

void require_noslip_normals(const VectorField& f, const char* what) {
    const GridSpec& g = f.grid;
    for (int j = 0; j < g.ny; ++j)
        if (f.xf(0, j) != 0.0 || f.xf(g.nx, j) != 0.0)
            throw ContractError(std::string(what) +
                                ": boundary-normal x-faces must be exactly zero at no-slip walls");
    for (int i = 0; i < g.nx; ++i)
        if (f.yf(i, 0) != 0.0 || f.yf(i, g.ny) != 0.0)
            throw ContractError(std::string(what) +
                                ": boundary-normal y-faces must be exactly zero at no-slip walls");
}

/// div(u (x) u) on faces, conservative form. Fluxes live at cell centres
/// (like-component) and at grid corners (cross-component); wall corners
/// carry an advecting normal velocity of exactly zero, so no ghost values
/// enter and the boundary contribution vanishes identically.
VectorField advective_flux_divergence(const VectorField& u, AdvectionScheme scheme) {
    const GridSpec& g = u.grid;
    const int nx = g.nx, ny = g.ny;
    const double hx = g.hx(), hy = g.hy();
    const bool upwind = scheme == AdvectionScheme::upwind;
    VectorField a(g, 0.0); // boundary-normal faces stay zero (pinned rows)

    // x-momentum control volume around x-face (i, j), 1 <= i <= nx-1
    for (int j = 0; j < ny; ++j) {
        for (int i = 1; i < nx; ++i) {
            // like-component fluxes at the centres of cells i and i-1
            const double ue = 0.5 * (u.xf(i, j) + u.xf(i + 1, j));
            const double uw = 0.5 * (u.xf(i - 1, j) + u.xf(i, j));
            double fe, fw;
            if (upwind) {
                fe = ue * (ue > 0.0 ? u.xf(i, j) : u.xf(i + 1, j));
                fw = uw * (uw > 0.0 ? u.xf(i - 1, j) : u.xf(i, j));
            } else {
                fe = ue * ue;
                fw = uw * uw;
            }
            // cross fluxes at corners (i, j) and (i, j+1); the advecting
            // velocity is the x-average of the two adjacent y-faces and is
            // exactly zero on the walls j = 0, ny
            double fn = 0.0, fs = 0.0;
            {
                const int jc = j + 1;
                const double vc = 0.5 * (u.yf(i - 1, jc) + u.yf(i, jc));
                if (vc != 0.0) {
                    const double ua = upwind ? (vc > 0.0 ? u.xf(i, jc - 1) : u.xf(i, jc))
                                             : 0.5 * (u.xf(i, jc - 1) + u.xf(i, jc));
                    fn = vc * ua;
                }
            }
            {
                const int jc = j;
                if (jc > 0) {
                    const double vc = 0.5 * (u.yf(i - 1, jc) + u.yf(i, jc));
                    if (vc != 0.0) {
                        const double ua = upwind ? (vc > 0.0 ? u.xf(i, jc - 1) : u.xf(i, jc))
                                                 : 0.5 * (u.xf(i, jc - 1) + u.xf(i, jc));
                        fs = vc * ua;
                    }
                }
            }
            a.xf(i, j) = (fe - fw) / hx + (fn - fs) / hy;
        }
    }

    // y-momentum control volume around y-face (i, j), 1 <= j <= ny-1
    for (int j = 1; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const double vn = 0.5 * (u.yf(i, j) + u.yf(i, j + 1));
            const double vs = 0.5 * (u.yf(i, j - 1) + u.yf(i, j));
            double fn, fs;
            if (upwind) {
                fn = vn * (vn > 0.0 ? u.yf(i, j) : u.yf(i, j + 1));
                fs = vs * (vs > 0.0 ? u.yf(i, j - 1) : u.yf(i, j));
            } else {
                fn = vn * vn;
                fs = vs * vs;
            }
            double fe = 0.0, fw = 0.0;
            {
                const int ic = i + 1;
                if (ic < nx) { // corner at x = ic*hx; walls ic = 0, nx carry u = 0
                    const double uc = 0.5 * (u.xf(ic, j - 1) + u.xf(ic, j));
                    if (uc != 0.0) {
                        const double va = upwind ? (uc > 0.0 ? u.yf(ic - 1, j) : u.yf(ic, j))
                                                 : 0.5 * (u.yf(ic - 1, j) + u.yf(ic, j));
                        fe = uc * va;
                    }
                }
            }
            {
                const int ic = i;
                if (ic > 0) {
                    const double uc = 0.5 * (u.xf(ic, j - 1) + u.xf(ic, j));
                    if (uc != 0.0) {
                        const double va = upwind ? (uc > 0.0 ? u.yf(ic - 1, j) : u.yf(ic, j))
                                                 : 0.5 * (u.yf(ic - 1, j) + u.yf(ic, j));
                        fw = uc * va;
                    }
                }
            }
            a.yf(i, j) = (fn - fs) / hy + (fe - fw) / hx;
        }
    }
    return a;
}

/// (I - dt*laplacian) applied to one velocity component stored in a full
/// face array. Boundary-normal faces are identity rows; tangential wall
/// ghosts reflect (value -interior), folding -3/h^2 into the wall-adjacent
/// diagonal. `xcomp` selects the x-face layout, otherwise y-face.
class ComponentHelmholtz {
public:
    ComponentHelmholtz(const GridSpec& g, double dt, bool xcomp)
        : g_(g), dt_(dt), xcomp_(xcomp) {}

    size_t size() const {
        return xcomp_ ? static_cast<size_t>(g_.nx + 1) * g_.ny
                      : static_cast<size_t>(g_.nx) * (g_.ny + 1);
    }

    void apply(const std::vector<double>& x, std::vector<double>& out) const {
        const int nx = g_.nx, ny = g_.ny;
        const double ax = 1.0 / (g_.hx() * g_.hx());
        const double ay = 1.0 / (g_.hy() * g_.hy());
        if (xcomp_) {
            auto at = [&](int i, int j) { return x[i + static_cast<size_t>(nx + 1) * j]; };
            for (int j = 0; j < ny; ++j) {
                for (int i = 0; i <= nx; ++i) {
                    const size_t k = i + static_cast<size_t>(nx + 1) * j;
                    if (i == 0 || i == nx) {
                        out[k] = x[k]; // pinned wall-normal face
                        continue;
                    }
                    double lap = (at(i - 1, j) - 2.0 * at(i, j) + at(i + 1, j)) * ax;
                    const double lo = (j > 0) ? at(i, j - 1) : -at(i, j);
                    const double hi = (j < ny - 1) ? at(i, j + 1) : -at(i, j);
                    lap += (lo - 2.0 * at(i, j) + hi) * ay;
                    out[k] = x[k] - dt_ * lap;
                }
            }
        } else {
            auto at = [&](int i, int j) { return x[i + static_cast<size_t>(nx) * j]; };
            for (int j = 0; j <= ny; ++j) {
                for (int i = 0; i < nx; ++i) {
                    const size_t k = i + static_cast<size_t>(nx) * j;
                    if (j == 0 || j == ny) {
                        out[k] = x[k];
                        continue;
                    }
                    double lap = (at(i, j - 1) - 2.0 * at(i, j) + at(i, j + 1)) * ay;
                    const double lo = (i > 0) ? at(i - 1, j) : -at(i, j);
                    const double hi = (i < nx - 1) ? at(i + 1, j) : -at(i, j);
                    lap += (lo - 2.0 * at(i, j) + hi) * ax;
                    out[k] = x[k] - dt_ * lap;
                }
            }
        }
    }

private:
    GridSpec g_;
    double dt_;
    bool xcomp_;
};

double inf_norm(const std::vector<double>& v) {
    double m = 0.0;
    for (double q : v) m = std::max(m, std::fabs(q));
    return m;
}

/// Plain CG for the SPD component operator. rhs must be zero on pinned
/// rows; the iterate then never leaves that subspace.
void solve_component(const ComponentHelmholtz& op, const std::vector<double>& rhs,
                     std::vector<double>& x, double tol) {
    const size_t n = rhs.size();
    x.assign(n, 0.0);
    const double target = tol * std::max(1.0, inf_norm(rhs));
    std::vector<double> r = rhs, p = rhs, ap(n);
    double rr = 0.0;
    for (double q : r) rr += q * q;
    if (inf_norm(r) <= target) return;
    const long cap = 10 * static_cast<long>(n) + 100;
    for (long it = 0; it < cap; ++it) {
        op.apply(p, ap);
        double pap = 0.0;
        for (size_t k = 0; k < n; ++k) pap += p[k] * ap[k];
        if (pap <= 0.0) break; // numerically exhausted
        const double alpha = rr / pap;
        for (size_t k = 0; k < n; ++k) x[k] += alpha * p[k];
        for (size_t k = 0; k < n; ++k) r[k] -= alpha * ap[k];
        double rr_new = 0.0;
        for (double q : r) rr_new += q * q;
        if (inf_norm(r) <= target) {
            // verify against the true residual before accepting
            op.apply(x, ap);
            double worst = 0.0;
            for (size_t k = 0; k < n; ++k) worst = std::max(worst, std::fabs(rhs[k] - ap[k]));
            if (worst <= target) return;
            for (size_t k = 0; k < n; ++k) r[k] = rhs[k] - ap[k];
            rr_new = 0.0;
            for (double q : r) rr_new += q * q;
            p = r; // restart the direction from the true residual
            rr = rr_new;
            continue;
        }
        const double beta = rr_new / rr;
        rr = rr_new;
        for (size_t k = 0; k < n; ++k) p[k] = r[k] + beta * p[k];
    }
    op.apply(x, ap);
    double worst = 0.0;
    for (size_t k = 0; k < n; ++k) worst = std::max(worst, std::fabs(rhs[k] - ap[k]));
    if (worst > target)
        throw ConvergenceError("velocity diffusion CG stalled", worst, target, cap);
}

} // namespace

VectorField lorentz_force(const ScalarField& v, const ScalarField& w, const ScalarField& phi) {
    require_same_grid(v.grid, w.grid, "lorentz_force");
    require_same_grid(v.grid, phi.grid, "lorentz_force");
    const GridSpec& g = v.grid;
    const VectorField grad = gradient_dirichlet0(phi);
    VectorField f(g, 0.0);
    for (int j = 0; j < g.ny; ++j)
        for (int i = 1; i < g.nx; ++i) {
            const double rho = 0.5 * ((v(i - 1, j) - w(i - 1, j)) + (v(i, j) - w(i, j)));
            f.xf(i, j) = rho * grad.xf(i, j);
        }
    for (int j = 1; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const double rho = 0.5 * ((v(i, j - 1) - w(i, j - 1)) + (v(i, j) - w(i, j)));
            f.yf(i, j) = rho * grad.yf(i, j);
        }
    return f;
}

VectorField project_divergence_free(const VectorField& f, double tol, ScalarField* pressure_out) {
    if (!(tol > 0.0)) throw ContractError("projection tolerance must be positive");
    require_noslip_normals(f, "project_divergence_free");
    const ScalarField rhs = divergence(f);
    // rhs is a discrete divergence of a zero-normal-flux field: compatible
    // by construction. Hand the solver the worst-case |div f| L1 bound so a
    // rounding-noise rhs is not mistaken for an incompatible source.
    const GridSpec& g = f.grid;
    const double scale =
        g.lx * g.ly * 2.0 * max_abs(f) * (1.0 / g.hx() + 1.0 / g.hy());
    const ScalarField p = solve_poisson_neumann_meanzero(rhs, tol, nullptr, scale);
    const VectorField gp = gradient_neumann(p);
    VectorField out(f.grid);
    for (size_t k = 0; k < f.x.size(); ++k) out.x[k] = f.x[k] - gp.x[k];
    for (size_t k = 0; k < f.y.size(); ++k) out.y[k] = f.y[k] - gp.y[k];
    if (pressure_out) *pressure_out = p;
    return out;
}

VelocityState advance_velocity(const VelocityState& state, const VectorField& force, double dt,
                               double tol, AdvectionScheme scheme, double* cfl_out) {
    const GridSpec& g = state.u.grid;
    require_same_grid(g, force.grid, "advance_velocity");
    require_same_grid(g, state.p.grid, "advance_velocity");
    if (!(dt > 0.0)) throw ContractError("velocity step size must be positive");
    if (!(tol > 0.0)) throw ContractError("velocity solver tolerance must be positive");
    require_noslip_normals(state.u, "advance_velocity(u)");
    require_noslip_normals(force, "advance_velocity(force)");
    if (cfl_out) *cfl_out = cfl_number(state.u, dt);

    const VectorField adv = advective_flux_divergence(state.u, scheme);
    const int nx = g.nx, ny = g.ny;

    // (I - dt*lap) u* = u + dt*(force - adv), componentwise
    VectorField ustar(g, 0.0);
    {
        ComponentHelmholtz op(g, dt, true);
        std::vector<double> rhs(op.size(), 0.0);
        for (int j = 0; j < ny; ++j)
            for (int i = 1; i < nx; ++i) {
                const size_t k = i + static_cast<size_t>(nx + 1) * j;
                rhs[k] = state.u.x[k] + dt * (force.x[k] - adv.x[k]);
            }
        solve_component(op, rhs, ustar.x, tol);
        for (int j = 0; j < ny; ++j) { ustar.xf(0, j) = 0.0; ustar.xf(nx, j) = 0.0; }
    }
    {
        ComponentHelmholtz op(g, dt, false);
        std::vector<double> rhs(op.size(), 0.0);
        for (int j = 1; j < ny; ++j)
            for (int i = 0; i < nx; ++i) {
                const size_t k = i + static_cast<size_t>(nx) * j;
                rhs[k] = state.u.y[k] + dt * (force.y[k] - adv.y[k]);
            }
        solve_component(op, rhs, ustar.y, tol);
        for (int i = 0; i < nx; ++i) { ustar.yf(i, 0) = 0.0; ustar.yf(i, ny) = 0.0; }
    }

    // projection; the Chorin pressure is the kernel-free solve scaled by 1/dt
    VelocityState out{VectorField(g), ScalarField(g)};
    ScalarField praw(g);
    out.u = project_divergence_free(ustar, tol, &praw);
    for (size_t k = 0; k < praw.a.size(); ++k) out.p.a[k] = praw.a[k] / dt;
    return out;
}

double cfl_number(const VectorField& u, double dt) {
    if (!(dt > 0.0)) throw ContractError("cfl_number: dt must be positive");
    const double hx = u.grid.hx(), hy = u.grid.hy();
    double m = 0.0;
    for (double q : u.x) m = std::max(m, std::fabs(q) / hx);
    for (double q : u.y) m = std::max(m, std::fabs(q) / hy);
    return m * dt;
}

} // namespace ehd
