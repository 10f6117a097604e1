/// @file grid.hpp
/// @brief Uniform staggered (MAC) grid on a rectangle: field containers plus
///        the discrete gradient / divergence / Laplacian everything builds on.
///
/// Layout. The rectangle (0,lx) x (0,ly) is split into nx x ny equal cells.
/// Scalars live at cell centres ((i+1/2)hx, (j+1/2)hy). A vector field keeps
/// its x component on the (nx+1) x ny vertical faces and its y component on
/// the nx x (ny+1) horizontal faces. Storage is row-major with x fastest
/// (y-outer), matching the on-disk snapshot layout.
///
/// Boundary conventions.
///  - "dirichlet0" operators extend a scalar by ghost = -interior, i.e. the
///    wall value (arithmetic mean across the wall) is exactly zero.
///  - "neumann" operators extend by ghost = interior, i.e. zero gradient
///    across every wall; boundary faces of gradient_neumann are exactly 0.
///
/// laplacian_dirichlet0 is *defined* as divergence(gradient_dirichlet0(s)),
/// and the implementation literally composes the two so the identity holds
/// bitwise.
///
/// Quadrature. cell_inner is the midpoint rule. face_inner gives boundary-
/// normal faces half weight; with that choice
///     -<s, laplacian_dirichlet0(s)>  ==  face_norm2(gradient_dirichlet0(s))
/// exactly (up to rounding), which the energy functionals rely on.

#pragma once

#include <vector>

namespace ehd {

struct GridSpec {
    int nx = 0, ny = 0;       ///< cells per direction, >= 3
    double lx = 0.0, ly = 0.0; ///< domain extents, > 0

    double hx() const { return lx / nx; }
    double hy() const { return ly / ny; }
    double cell_area() const { return hx() * hy(); }
    int cells() const { return nx * ny; }
    bool operator==(const GridSpec&) const = default;
};

/// Validated constructor; throws ContractError on nx,ny < 3 or lx,ly <= 0.
GridSpec make_grid(int nx, int ny, double lx, double ly);

/// Cell-centred scalar field.
struct ScalarField {
    GridSpec grid;
    std::vector<double> a; ///< size nx*ny, index i + nx*j

    ScalarField() = default;
    explicit ScalarField(const GridSpec& g, double fill = 0.0)
        : grid(g), a(static_cast<size_t>(g.nx) * g.ny, fill) {}

    double& operator()(int i, int j) { return a[i + static_cast<size_t>(grid.nx) * j]; }
    double operator()(int i, int j) const { return a[i + static_cast<size_t>(grid.nx) * j]; }
};

/// MAC vector field (face-centred components).
struct VectorField {
    GridSpec grid;
    std::vector<double> x; ///< size (nx+1)*ny, index i + (nx+1)*j
    std::vector<double> y; ///< size nx*(ny+1), index i + nx*j

    VectorField() = default;
    explicit VectorField(const GridSpec& g, double fill = 0.0)
        : grid(g),
          x(static_cast<size_t>(g.nx + 1) * g.ny, fill),
          y(static_cast<size_t>(g.nx) * (g.ny + 1), fill) {}

    double& xf(int i, int j) { return x[i + static_cast<size_t>(grid.nx + 1) * j]; }
    double xf(int i, int j) const { return x[i + static_cast<size_t>(grid.nx + 1) * j]; }
    double& yf(int i, int j) { return y[i + static_cast<size_t>(grid.nx) * j]; }
    double yf(int i, int j) const { return y[i + static_cast<size_t>(grid.nx) * j]; }
};

// ------------------------------------------------------------ operators ----

VectorField gradient_dirichlet0(const ScalarField& s);
ScalarField divergence(const VectorField& f);
ScalarField laplacian_dirichlet0(const ScalarField& s);

VectorField gradient_neumann(const ScalarField& s);
ScalarField laplacian_neumann(const ScalarField& s);

// ----------------------------------------------------------- quadrature ----

double cell_integral(const ScalarField& s);
double cell_inner(const ScalarField& a, const ScalarField& b);
double cell_norm2(const ScalarField& a); ///< = cell_inner(a, a)
double face_inner(const VectorField& f, const VectorField& g);
double face_norm2(const VectorField& f); ///< = face_inner(f, f)

double max_abs(const ScalarField& s);
double max_abs(const VectorField& f);
double min_value(const ScalarField& s);

/// Throws ContractError unless both fields live on the same grid.
void require_same_grid(const GridSpec& a, const GridSpec& b, const char* where);

} // namespace ehd
