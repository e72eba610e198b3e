#include "lwk/penalty.hpp"

#include <cmath>
#include <cstdio>

#include "lwk/errors.hpp"

namespace lwk {

void Penalty::validate() const {
    if (!(beta > 0.0))
        throw ParameterError("Penalty: beta must be > 0");
    if (tv_iters < 1)
        throw ParameterError("Penalty: tv_iters must be >= 1");
    if (!(tv_tol > 0.0))
        throw ParameterError("Penalty: tv_tol must be > 0");
}

double penalty_value(const Penalty& theta, const GridFunction& x) {
    theta.validate();
    const double quad = inner_product(x, x) / (2.0 * theta.beta);
    switch (theta.kind) {
        case PenaltyKind::Quadratic:
            return quad;
        case PenaltyKind::L1L2: {
            double l1 = 0.0;
            for (double v : x.values) l1 += std::abs(v);
            return quad + x.spec.cell_area() * l1;
        }
        case PenaltyKind::TVL2:
            return quad + tv_value(x);
    }
    throw ParameterError("penalty_value: unknown kind");
}

GridFunction conjugate_minimizer(const Penalty& theta, const GridFunction& xi, ProxDiag* diag) {
    theta.validate();
    if (diag) *diag = ProxDiag{};
    switch (theta.kind) {
        case PenaltyKind::Quadratic: {
            GridFunction x = xi;
            for (auto& v : x.values) v *= theta.beta;
            return x;
        }
        case PenaltyKind::L1L2:
            return soft_threshold(xi, theta.beta);
        case PenaltyKind::TVL2: {
            GridFunction v = xi;
            for (auto& w : v.values) w *= theta.beta;
            TvProxDiag tv;
            GridFunction x = tv_prox(v, theta.beta, theta.tv_iters, theta.tv_tol, &tv);
            if (diag) {
                diag->inexact = !tv.converged;
                diag->tv_iterations = tv.iterations;
                diag->tv_objective = tv.objective;
            }
            return x;
        }
    }
    throw ParameterError("conjugate_minimizer: unknown kind");
}

double bregman_distance_raw(const Penalty& theta, const GridFunction& z, const GridFunction& x,
                            const GridFunction& xi) {
    const GridFunction dzx = lin_comb(1.0, z, -1.0, x);
    return penalty_value(theta, z) - penalty_value(theta, x) - inner_product(xi, dzx);
}

double bregman_distance(const Penalty& theta, const GridFunction& z, const GridFunction& x,
                        const GridFunction& xi) {
    const double d = bregman_distance_raw(theta, z, x, xi);
    // A valid subgradient pair gives d >= 0. The TVL2 pair is produced by an
    // inexact prox, so its slack scales with the inner tolerance; the
    // closed-form kinds stay at the strict 1e-10.
    double slack = 1e-10;
    if (theta.kind == PenaltyKind::TVL2)
        slack += 10.0 * theta.tv_tol *
                 (1.0 + std::abs(penalty_value(theta, x)) + std::abs(inner_product(xi, x)));
    if (d < -slack) {
        char buf[160];
        std::snprintf(buf, sizeof buf,
                      "bregman_distance: negative value %.3e below slack %.3e "
                      "(xi is not a subgradient at x)",
                      d, slack);
        throw Error(buf);
    }
    return d;
}

GridFunction soft_threshold(const GridFunction& xi, double beta) {
    if (!(beta > 0.0))
        throw ParameterError("soft_threshold: beta must be > 0");
    GridFunction x = xi;
    for (auto& v : x.values) {
        if (v > 1.0)
            v = beta * (v - 1.0);
        else if (v < -1.0)
            v = beta * (v + 1.0);
        else
            v = 0.0;
    }
    return x;
}

} // namespace lwk
