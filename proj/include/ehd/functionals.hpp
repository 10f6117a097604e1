/// @file functionals.hpp
/// @brief The scalar diagnostics of the system: mixing entropy, free energy,
///        electro-kinetic Lyapunov distance, dual potential functional,
///        entropy-production rate, relative entropy.
///
/// Quadrature conventions (pinned here, used consistently everywhere):
///  - cell terms use the midpoint rule, sum * cellarea;
///  - x log x is continuously extended by 0 at x = 0, and densities below
///    1e-300 are treated as exact zeros;
///  - |grad phi|^2 uses gradient_dirichlet0 summed over faces with half
///    weight on boundary-normal faces, so that the electrostatic energy
///    equals -1/2 <phi, laplacian(phi)> exactly;
///  - |u|^2 per cell is the arithmetic mean of the squared adjacent face
///    values (equivalently: a face sum with the same half-weight rule);
///  - the entropy-production gradients (2 grad sqrt(n) -+ sqrt(n) grad phi)
///    are evaluated on interior faces only, with sqrt averaged arithmetically
///    to the face; the blocking walls leave no natural boundary-face value.

#pragma once

#include "ehd/grid.hpp"

namespace ehd {

/// sum (v log v + w log w) * cellarea; requires v, w >= 0.
double entropy(const ScalarField& v, const ScalarField& w);

/// Electrostatic energy 1/2 ||grad phi||^2 (half-weighted face sum).
double electrostatic_energy(const ScalarField& phi);

/// Kinetic energy 1/2 ||u||^2 in the face norm.
double kinetic_energy(const VectorField& u);

/// Free energy K = entropy + electrostatic + kinetic; nonincreasing along
/// the coupled dynamics.
double k_functional(const ScalarField& v, const ScalarField& w, const ScalarField& phi,
                    const VectorField& u);

/// Dual potential functional J(phi) = 1/2||grad phi||^2
/// + mu_v log int e^phi + mu_w log int e^{-phi}; strictly convex.
double j_functional(const ScalarField& phi, double mu_v, double mu_w);

/// Lyapunov distance to the steady state (V, W, Phi):
///   int theta/2 |u|^2 + (v-V)^2/(2V) + (w-W)^2/(2W) + |grad(phi-Phi)|^2.
/// The last term carries no 1/2, following the printed functional; set
/// `half_weight_potential` to use the 1/2-weighted variant instead.
/// Requires V, W > 0 everywhere.
double lyapunov(const ScalarField& v, const ScalarField& w, const ScalarField& phi,
                const VectorField& u, const ScalarField& V, const ScalarField& W,
                const ScalarField& Phi, double theta, bool half_weight_potential = false);

/// Entropy-production rate
///   int |2 grad sqrt(v) - sqrt(v) grad phi|^2
///     + |2 grad sqrt(w) + sqrt(w) grad phi|^2 + |grad u|^2.
double dissipation(const ScalarField& v, const ScalarField& w, const ScalarField& phi,
                   const VectorField& u);

/// Relative entropy against the steady state:
///   int v log v + w log w - V log V - W log W
///     - 1/2|grad phi|^2 + 1/2|grad Phi|^2.
double relative_entropy(const ScalarField& v, const ScalarField& w, const ScalarField& phi,
                        const ScalarField& V, const ScalarField& W, const ScalarField& Phi);

/// Squared distance to the steady state: ||u||^2 + ||v-V||^2 + ||w-W||^2
/// + ||phi-Phi||^2_H1 (L2 plus gradient seminorm). This is the quantity
/// whose exponential decay the convergence-rate fit measures.
double distance_squared(const ScalarField& v, const ScalarField& w, const ScalarField& phi,
                        const VectorField& u, const ScalarField& V, const ScalarField& W,
                        const ScalarField& Phi);

} // namespace ehd
