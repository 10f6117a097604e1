/// @file transport.hpp
/// @brief Charge transport: one backward-Euler step of the two-species
///        drift-diffusion system with Scharfetter-Gummel fluxes, upwind
///        advection and blocking (zero total flux) walls.
///
/// Species convention follows the governing system: the v species drifts
/// down the potential gradient (flux grad v - v grad phi), the w species up
/// (flux grad w + w grad phi); both are advected by u. The potential is the
/// lagged one supplied by the caller; each step solves
///     (I - dt*L_{phi,u}) n_new = n_old
/// for each species independently. The assembled matrix is an M-matrix with
/// unit column sums, so the direct banded solve preserves nonnegativity
/// exactly in floating point and conserves each species' mass to rounding.
///
/// A negative value in the result is impossible by that structure; if one
/// ever appears it is reported as InternalError, never clipped.

#pragma once

#include "ehd/grid.hpp"

namespace ehd {

/// Bernoulli function B(x) = x/(e^x - 1), B(0) = 1; series below |x|<1e-4.
double bernoulli(double x);

/// Scharfetter-Gummel flux density of (grad n - n grad phi) across one face,
/// positive from L to R: (B(s)*nR - B(-s)*nL)/h with s = phiR - phiL.
/// For the w species call with s negated.
double sg_face_flux(double nL, double nR, double s, double h);

/// The two densities plus their conserved masses (recorded at init).
struct ChargePair {
    ScalarField v, w;
    double mu_v = 0.0, mu_w = 0.0;
};

/// One implicit transport step for both species.
///
/// Preconditions: v, w nonnegative and finite; u discretely divergence-free
/// with zero boundary-normal components; dt > 0. `tol` bounds the accepted
/// linear residual ||(I - dt L) n_new - n_old||_inf relative to
/// max(1, ||n_old||_inf); the direct solve lands near machine precision and
/// the check is a guard, not a convergence knob.
ChargePair advance_charges(const ChargePair& charges, const VectorField& u,
                           const ScalarField& phi, double dt, double tol);

} // namespace ehd
