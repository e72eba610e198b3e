#pragma once

#include <functional>

#include "lwk/grid.hpp"

namespace lwk {

/// Cell-centered 5-point discretization of A(c) = -Laplace + diag(c) with
/// homogeneous Dirichlet boundary imposed through ghost cells
/// (u_ghost = -u_inner, so the face value vanishes). The stencil is
/// symmetric, and positive definite for c >= -0.5 (far above -lambda_1 of
/// the discrete Laplacian on the unit square).
GridFunction elliptic_apply_operator(const GridSpec& s, const GridFunction& c,
                                     const GridFunction& u);

/// Solve A(c) u = rhs by conjugate gradients with Jacobi scaling.
/// Throws SolverError if min(c) < -0.5 or the iteration cap is hit before
/// ||A u - rhs|| <= rtol * ||rhs||.
GridFunction elliptic_solve(const GridSpec& s, const GridFunction& c, const GridFunction& rhs,
                            double rtol = 1e-12, int max_iters = 20000);

/// Dirichlet lift: the ghost convention above represents boundary data g by
/// adding 2*g(face midpoint)/h^2 to the right-hand side of boundary cells.
/// Exact for solutions linear in the normal coordinate.
GridFunction dirichlet_rhs(const GridSpec& s, const GridFunction& f,
                           const std::function<double(double, double)>& g);

/// (I - Laplace) u with the same homogeneous Dirichlet stencil.
GridFunction helmholtz_apply(const GridSpec& s, const GridFunction& u);

/// Solve (I - Laplace) u = rhs, homogeneous Dirichlet.
GridFunction helmholtz_solve(const GridSpec& s, const GridFunction& rhs, double rtol = 1e-12,
                             int max_iters = 20000);

} // namespace lwk
