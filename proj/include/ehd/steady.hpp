/// @file steady.hpp
/// @brief Boltzmann steady states: given masses (mu_v, mu_w), find the
///        self-consistent potential by damped Newton descent on the strictly
///        convex dual functional J.
///
/// The steady densities are V = mu_v e^Phi / int e^Phi and
/// W = mu_w e^{-Phi} / int e^{-Phi}; the potential solves the discrete
/// Poisson-Boltzmann equation laplacian(Phi) = V(Phi) - W(Phi) (zero walls),
/// which is the Euler-Lagrange equation of J. Newton's method starts at
/// Phi = 0, applies the Jacobian matrix-free (local diagonal plus two
/// nonlocal rank-one terms) inside preconditioned CG, and backtracks by
/// halving against the Armijo condition (c1 = 1e-4). J decreases strictly
/// across accepted iterates until convergence.

#pragma once

#include <vector>

#include "ehd/grid.hpp"

namespace ehd {

struct SteadyState {
    ScalarField V, W, Phi;
    double mu_v = 0.0, mu_w = 0.0;
    double residual = 0.0; ///< ||laplacian(Phi) - (V - W)||_inf at return
    int newton_iterations = 0;
};

/// Boltzmann densities for a given potential and masses (mu_v, mu_w >= 0).
void boltzmann_densities(const ScalarField& phi, double mu_v, double mu_w, ScalarField& V_out,
                         ScalarField& W_out);

/// Solve for the steady state on `grid`. tol bounds the Euler-Lagrange
/// residual in the max norm; max_iter caps Newton steps (ConvergenceError
/// beyond it, carrying the best residual). `guess` seeds the iteration
/// (default Phi = 0); `j_trace`, if given, receives the J value of every
/// accepted iterate including the start (strictly decreasing).
SteadyState solve_steady(const GridSpec& grid, double mu_v, double mu_w, double tol = 1e-10,
                         int max_iter = 50, const ScalarField* guess = nullptr,
                         std::vector<double>* j_trace = nullptr);

/// Max-norm residual of the steady pressure identity
/// (V - W) grad Phi = grad(V + W) over interior faces.
double pressure_identity_residual(const SteadyState& s);

} // namespace ehd
