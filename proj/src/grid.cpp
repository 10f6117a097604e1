/// @file grid.cpp

#include "ehd/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ehd/errors.hpp"

namespace ehd {

GridSpec make_grid(int nx, int ny, double lx, double ly) {
    if (nx < 3 || ny < 3)
        throw ContractError("make_grid: need nx, ny >= 3, got " + std::to_string(nx) + " x "
                            + std::to_string(ny));
    if (!(lx > 0.0) || !(ly > 0.0))
        throw ContractError("make_grid: need lx, ly > 0");
    return GridSpec{nx, ny, lx, ly};
}

void require_same_grid(const GridSpec& a, const GridSpec& b, const char* where) {
    if (!(a == b)) throw ContractError(std::string(where) + ": fields on different grids");
}

// ------------------------------------------------------------ operators ----

VectorField gradient_dirichlet0(const ScalarField& s) {
    const GridSpec& g = s.grid;
    const int nx = g.nx, ny = g.ny;
    const double ihx = 1.0 / g.hx(), ihy = 1.0 / g.hy();
    VectorField f(g);
    for (int j = 0; j < ny; ++j) {
        f.xf(0, j) = 2.0 * s(0, j) * ihx; // ghost = -s(0,j)
        for (int i = 1; i < nx; ++i) f.xf(i, j) = (s(i, j) - s(i - 1, j)) * ihx;
        f.xf(nx, j) = -2.0 * s(nx - 1, j) * ihx;
    }
    for (int i = 0; i < nx; ++i) f.yf(i, 0) = 2.0 * s(i, 0) * ihy;
    for (int j = 1; j < ny; ++j)
        for (int i = 0; i < nx; ++i) f.yf(i, j) = (s(i, j) - s(i, j - 1)) * ihy;
    for (int i = 0; i < nx; ++i) f.yf(i, ny) = -2.0 * s(i, ny - 1) * ihy;
    return f;
}

VectorField gradient_neumann(const ScalarField& s) {
    const GridSpec& g = s.grid;
    const int nx = g.nx, ny = g.ny;
    const double ihx = 1.0 / g.hx(), ihy = 1.0 / g.hy();
    VectorField f(g); // boundary faces stay exactly 0
    for (int j = 0; j < ny; ++j)
        for (int i = 1; i < nx; ++i) f.xf(i, j) = (s(i, j) - s(i - 1, j)) * ihx;
    for (int j = 1; j < ny; ++j)
        for (int i = 0; i < nx; ++i) f.yf(i, j) = (s(i, j) - s(i, j - 1)) * ihy;
    return f;
}

ScalarField divergence(const VectorField& f) {
    const GridSpec& g = f.grid;
    const int nx = g.nx, ny = g.ny;
    const double ihx = 1.0 / g.hx(), ihy = 1.0 / g.hy();
    ScalarField d(g);
    for (int j = 0; j < ny; ++j)
        for (int i = 0; i < nx; ++i)
            d(i, j) = (f.xf(i + 1, j) - f.xf(i, j)) * ihx + (f.yf(i, j + 1) - f.yf(i, j)) * ihy;
    return d;
}

ScalarField laplacian_dirichlet0(const ScalarField& s) {
    // Deliberately the literal composition; the identity is part of the
    // operator's contract and tests assert it bitwise.
    return divergence(gradient_dirichlet0(s));
}

ScalarField laplacian_neumann(const ScalarField& s) {
    return divergence(gradient_neumann(s));
}

// ----------------------------------------------------------- quadrature ----

double cell_integral(const ScalarField& s) {
    double acc = 0.0;
    for (double v : s.a) acc += v;
    return acc * s.grid.cell_area();
}

double cell_inner(const ScalarField& a, const ScalarField& b) {
    require_same_grid(a.grid, b.grid, "cell_inner");
    double acc = 0.0;
    for (size_t k = 0; k < a.a.size(); ++k) acc += a.a[k] * b.a[k];
    return acc * a.grid.cell_area();
}

double cell_norm2(const ScalarField& a) { return cell_inner(a, a); }

double face_inner(const VectorField& f, const VectorField& g) {
    require_same_grid(f.grid, g.grid, "face_inner");
    const GridSpec& gr = f.grid;
    const int nx = gr.nx, ny = gr.ny;
    double acc = 0.0;
    for (int j = 0; j < ny; ++j) {
        acc += 0.5 * f.xf(0, j) * g.xf(0, j);
        for (int i = 1; i < nx; ++i) acc += f.xf(i, j) * g.xf(i, j);
        acc += 0.5 * f.xf(nx, j) * g.xf(nx, j);
    }
    for (int i = 0; i < nx; ++i) acc += 0.5 * f.yf(i, 0) * g.yf(i, 0);
    for (int j = 1; j < ny; ++j)
        for (int i = 0; i < nx; ++i) acc += f.yf(i, j) * g.yf(i, j);
    for (int i = 0; i < nx; ++i) acc += 0.5 * f.yf(i, ny) * g.yf(i, ny);
    return acc * gr.cell_area();
}

double face_norm2(const VectorField& f) { return face_inner(f, f); }

double max_abs(const ScalarField& s) {
    double m = 0.0;
    for (double v : s.a) m = std::max(m, std::fabs(v));
    return m;
}

double max_abs(const VectorField& f) {
    double m = 0.0;
    for (double v : f.x) m = std::max(m, std::fabs(v));
    for (double v : f.y) m = std::max(m, std::fabs(v));
    return m;
}

double min_value(const ScalarField& s) {
    double m = s.a.empty() ? 0.0 : s.a[0];
    for (double v : s.a) m = std::min(m, v);
    return m;
}

} // namespace ehd
