/// @file elliptic.hpp
/// @brief Poisson solves on the staggered grid: zero-Dirichlet and
///        mean-zero homogeneous-Neumann problems.
///
/// Both solvers run conjugate gradients preconditioned by a geometric
/// multigrid V-cycle (red-black Gauss-Seidel smoothing, piecewise-constant
/// prolongation, 4-point restriction, rediscretised coarse operators). The
/// stopping test is on the true residual:
///     || laplacian(phi) - rhs ||_inf  <=  tol * max(1, ||rhs||_inf).
/// Running past 10*(nx*ny) operator applications raises ConvergenceError
/// carrying the best residual reached; there is no silent cap.
///
/// The Neumann problem is singular (constants); the right-hand side must be
/// compatible, |sum rhs * cellarea| <= 1e-10 * ||rhs||_L1, or
/// CompatibilityError is thrown, and the returned potential has exactly
/// zero mean (projected every iteration). Callers whose rhs is a discrete
/// divergence (always compatible up to rounding, but possibly pure noise
/// that fails the relative test) pass the natural magnitude of that data
/// as `compat_scale`; the imbalance is then compared against
/// 1e-10 * max(||rhs||_L1, compat_scale).

#pragma once

#include "ehd/grid.hpp"

namespace ehd {

/// Solve laplacian_dirichlet0(phi) = rhs. `guess` (optional) seeds the
/// iteration; pass nullptr for a zero start.
ScalarField solve_poisson_dirichlet(const ScalarField& rhs, double tol,
                                    const ScalarField* guess = nullptr);

/// Solve laplacian_neumann(p) = rhs with mean(p) = 0.
ScalarField solve_poisson_neumann_meanzero(const ScalarField& rhs, double tol,
                                           const ScalarField* guess = nullptr,
                                           double compat_scale = 0.0);

} // namespace ehd
