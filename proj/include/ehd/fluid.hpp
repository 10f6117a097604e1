/// @file fluid.hpp
/// @brief Incompressible velocity update: explicit conservative advection,
///        implicit diffusion, Chorin pressure projection. No-slip walls.
///
/// One step of
///     du/dt + (u.grad)u = laplacian(u) + f,   div u = 0,   u = 0 on walls
/// in three stages:
///   1. a = -div(u u) assembled in conservative (energy-consistent) form
///      with centred face averages; an upwind variant is available;
///   2. (I - dt*laplacian) u* = u + dt*(a + f) componentwise by CG, with
///      boundary-normal faces pinned to zero and tangential ghosts
///      reflecting (-interior) for the wall;
///   3. p from the mean-zero Neumann Poisson problem of div(u*)/dt and
///      u = u* - dt * gradient_neumann(p).
/// The projection is orthogonal in the face inner product, so kinetic
/// energy never increases when f = 0.

#pragma once

#include "ehd/grid.hpp"

namespace ehd {

struct VelocityState {
    VectorField u;
    ScalarField p; ///< latest projection pressure, diagnostic only
};

enum class AdvectionScheme { centered, upwind };

/// Electric body force (v - w) * grad(phi) averaged onto faces; boundary-
/// normal faces are forced to zero to stay compatible with no-slip walls.
VectorField lorentz_force(const ScalarField& v, const ScalarField& w, const ScalarField& phi);

/// Remove the discrete-gradient part of f: returns f - dt-free projection
/// (zero boundary-normal components required). Used by the velocity step
/// and for preparing initial data.
VectorField project_divergence_free(const VectorField& f, double tol, ScalarField* pressure_out = nullptr);

/// Advance the velocity one step of size dt under body force `force`.
/// max|u|*dt/h > 1 is legal but reported through `cfl_out` (if non-null);
/// callers decide whether to warn.
VelocityState advance_velocity(const VelocityState& state, const VectorField& force, double dt,
                               double tol, AdvectionScheme scheme = AdvectionScheme::centered,
                               double* cfl_out = nullptr);

/// Advective CFL number max(|ux|/hx, |uy|/hy) * dt of a velocity field.
double cfl_number(const VectorField& u, double dt);

} // namespace ehd
