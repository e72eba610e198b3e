#pragma once

#include <vector>

#include "lwk/grid.hpp"

namespace lwk {

/// Discrete isotropic total variation:
///   sum over cells of hx*hy * sqrt(Dx^2 + Dy^2),
/// with forward differences Dx = (x_{i+1,j}-x_{i,j})/hx (zero at the last
/// column) and Dy analogous (zero at the last row).
double tv_value(const GridFunction& x);

struct TvProxDiag {
    int iterations = 0;
    /// False means the inner budget ran out before the tolerance was met
    /// (prox-inexact); the best iterate is still returned.
    bool converged = false;
    /// Objective 1/2*||z-v||^2 + lambda*TV(z) at the returned z, in the
    /// weighted (cell-area) norms.
    double objective = 0.0;
    /// Best objective after each outer iteration; nonincreasing.
    std::vector<double> trace;
};

/// argmin_z 1/2*||z-v||^2 + lambda*TV(z), both terms carrying the hx*hy
/// quadrature weight (the weight scales the objective uniformly, so the
/// minimizer matches the unweighted problem with 1/h-scaled differences).
///
/// Monotone dual scheme: gradient projection on the dual with FISTA
/// momentum, keeping the iterate with the best primal objective. The dual
/// step is 1/(lambda*(4/hx^2+4/hy^2)), the Lipschitz bound of the dual
/// gradient. Stops when the relative objective change falls below tol.
GridFunction tv_prox(const GridFunction& v, double lambda, int max_iters, double tol,
                     TvProxDiag* diag = nullptr);

} // namespace lwk
