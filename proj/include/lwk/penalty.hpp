#pragma once

#include "lwk/grid.hpp"
#include "lwk/tv.hpp"

namespace lwk {

enum class PenaltyKind { Quadratic, L1L2, TVL2 };

/// p-convex penalty Theta with p = 2 and c0 = 1/(2*beta) for every kind:
///   Quadratic: (1/(2b))*||x||^2
///   L1L2:      (1/(2b))*||x||^2 + ||x||_L1
///   TVL2:      (1/(2b))*||x||^2 + TV(x)
/// All terms use the cell-area quadrature weight. The solver formulas stay
/// written for general p and r even though every instance here has p = 2.
struct Penalty {
    PenaltyKind kind = PenaltyKind::Quadratic;
    double beta = 1.0;
    /// Inner budget of the TV prox; unused by the closed-form kinds.
    int tv_iters = 100;
    double tv_tol = 1e-6;

    double p() const { return 2.0; }
    double c0() const { return 1.0 / (2.0 * beta); }

    void validate() const;
};

/// Diagnostics of one conjugate-minimizer evaluation. Closed-form kinds are
/// always exact; TVL2 reports the inner solver's state.
struct ProxDiag {
    bool inexact = false;
    int tv_iterations = 0;
    double tv_objective = 0.0;
};

double penalty_value(const Penalty& theta, const GridFunction& x);

/// x = argmin_z { Theta(z) - <xi,z> }, the gradient of the conjugate
/// functional. Quadratic: beta*xi. L1L2: soft threshold. TVL2: reduces to
/// tv_prox(beta*xi, lambda=beta) since
///   (1/(2b))||z||^2 - <xi,z> + TV(z) = (1/(2b))||z - b*xi||^2 + TV(z) + const.
GridFunction conjugate_minimizer(const Penalty& theta, const GridFunction& xi,
                                 ProxDiag* diag = nullptr);

/// D_xi Theta(z, x) = Theta(z) - Theta(x) - <xi, z - x> for xi in the
/// subdifferential of Theta at x. Nonnegative for a valid pair; a value
/// below the kind's negativity slack signals a broken pair and throws.
double bregman_distance(const Penalty& theta, const GridFunction& z, const GridFunction& x,
                        const GridFunction& xi);

/// Same value without the subgradient validation. Trace recording wants the
/// raw number even when an inexact prox leaves it a prox-tolerance below 0.
double bregman_distance_raw(const Penalty& theta, const GridFunction& z, const GridFunction& x,
                            const GridFunction& xi);

/// Pointwise minimizer of (1/(2b))t^2 + |t| - xi*t:
///   b*(xi-1) if xi > 1,  0 if |xi| <= 1,  b*(xi+1) if xi < -1.
GridFunction soft_threshold(const GridFunction& xi, double beta);

} // namespace lwk
