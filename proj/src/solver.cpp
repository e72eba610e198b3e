#include "lwk/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "lwk/errors.hpp"

namespace lwk {

void SolverConfig::validate() const {
    if (!(tau > 1.0))
        throw ParameterError("SolverConfig: tau > 1 required");
    if (!(mu0 > 0.0) || !(mu1 > 0.0))
        throw ParameterError("SolverConfig: mu0 > 0 and mu1 > 0 required");
    if (!(r > 1.0))
        throw ParameterError("SolverConfig: r > 1 required");
    if (max_sweeps < 1)
        throw ParameterError("SolverConfig: max_sweeps >= 1 required");
    if (delta < 0.0)
        throw ParameterError("SolverConfig: delta >= 0 required");
    if (!(norm_bound > 0.0))
        throw ParameterError("SolverConfig: norm_bound > 0 required");
}

double Problem::max_eta() const {
    double eta = 0.0;
    for (const auto& op : operators)
        eta = std::max(eta, op->eta_bound());
    return eta;
}

void Problem::validate() const {
    if (operators.empty() || operators.size() != data.size())
        throw ShapeError("Problem: need N >= 1 operators with matching data");
    penalty.validate();
    for (std::size_t i = 0; i < operators.size(); ++i) {
        if (!operators[i])
            throw ParameterError("Problem: null operator");
        const auto& w = operators[i]->data_weights();
        if (data[i].values.size() != w.size() || data[i].weights != w) {
            char buf[96];
            std::snprintf(buf, sizeof buf, "Problem: data %zu does not match operator weights", i);
            throw ShapeError(buf);
        }
    }
    if (x_ref && !(x_ref->spec == xi0.spec))
        throw ShapeError("Problem: x_ref grid differs from xi0");
}

double step_length_scaled(double residual_norm, double tau_delta, double mu0, double p,
                          double r) {
    if (!(residual_norm > tau_delta))
        return 0.0;
    return mu0 * std::pow(residual_norm, p - r);
}

double step_length_adaptive(double residual_norm, double grad_dual_norm, double tau_delta,
                            double mu0, double mu1, double p, double r) {
    if (!(residual_norm > tau_delta))
        return 0.0;
    double mu_tilde = mu1;
    if (grad_dual_norm > 0.0) {
        const double candidate =
            mu0 * std::pow(residual_norm, p * (r - 1.0)) / std::pow(grad_dual_norm, p);
        mu_tilde = std::min(candidate, mu1);
    }
    return mu_tilde * std::pow(residual_norm, p - r);
}

double admissibility_constant(const SolverConfig& config, const Penalty& penalty, double eta) {
    const double p = penalty.p();
    const double c0 = penalty.c0();
    const double scaled = config.mu0 * std::pow(config.norm_bound, p) / (2.0 * c0);
    return 1.0 - eta - (1.0 + eta) / config.tau -
           (p - 1.0) / p * std::pow(scaled, 1.0 / (p - 1.0));
}

namespace {

// J_r in a discrete Hilbert data space: w -> ||w||^{r-2} w, with J_r(0) = 0.
void apply_duality_map(std::vector<double>& w, double w_norm, double r) {
    if (r == 2.0)
        return;
    if (w_norm == 0.0) {
        std::fill(w.begin(), w.end(), 0.0);
        return;
    }
    const double s = std::pow(w_norm, r - 2.0);
    for (auto& v : w) v *= s;
}

} // namespace

void inner_step(SolverState& state, const Problem& problem, const SolverConfig& config, int i) {
    const auto& op = *problem.operators[static_cast<std::size_t>(i)];
    const DataVector& y = problem.data[static_cast<std::size_t>(i)];

    DataVector residual = op.apply(state.x);
    for (std::size_t k = 0; k < residual.values.size(); ++k)
        residual.values[k] -= y.values[k];
    const double res_norm = data_norm(residual);

    const double threshold = config.skip_threshold();
    const double p = problem.penalty.p();

    StepRecord rec;
    rec.sweep = state.sweep;
    rec.index = i;
    rec.residual = res_norm;

    if (!(res_norm > threshold)) {
        rec.mu = 0.0;
        rec.skipped = true;
        state.steps.push_back(rec);
        return;
    }

    apply_duality_map(residual.values, res_norm, config.r);
    GridFunction grad = op.deriv_adjoint(state.x, residual);

    double mu = 0.0;
    if (config.step_rule == StepRule::Scaled) {
        mu = step_length_scaled(res_norm, threshold, config.mu0, p, config.r);
    } else {
        mu = step_length_adaptive(res_norm, op.x_norm(grad), threshold, config.mu0, config.mu1,
                                  p, config.r);
    }
    rec.mu = mu;
    rec.skipped = (mu == 0.0);
    state.steps.push_back(rec);
    if (mu == 0.0)
        return;

    add_scaled(state.xi, -mu, grad);
    ProxDiag diag;
    state.x = conjugate_minimizer(problem.penalty, state.xi, &diag);
    if (diag.inexact)
        state.prox_inexact = true;
}

void sweep(SolverState& state, const Problem& problem, const SolverConfig& config) {
    const std::size_t first = state.steps.size();
    for (std::size_t i = 0; i < problem.count(); ++i)
        inner_step(state, problem, config, static_cast<int>(i));

    SweepRecord rec;
    rec.sweep = state.sweep;
    rec.all_skipped = true;
    const double p = problem.penalty.p();
    for (std::size_t k = first; k < state.steps.size(); ++k) {
        rec.residual_sum_p += std::pow(state.steps[k].residual, p);
        if (!state.steps[k].skipped)
            rec.all_skipped = false;
    }
    if (problem.x_ref)
        rec.bregman = bregman_distance_raw(problem.penalty, *problem.x_ref, state.x, state.xi);
    state.sweeps.push_back(rec);
    ++state.sweep;
}

SolveResult run(const Problem& problem, const SolverConfig& config) {
    config.validate();
    problem.validate();

    SolverState state;
    state.xi = problem.xi0;
    ProxDiag diag;
    state.x = conjugate_minimizer(problem.penalty, state.xi, &diag);
    state.prox_inexact = diag.inexact;

    SolveResult result;
    if (problem.x_ref)
        result.initial_bregman =
            bregman_distance_raw(problem.penalty, *problem.x_ref, state.x, state.xi);

    const double n = static_cast<double>(problem.count());
    const double p = problem.penalty.p();
    const double residual_sum_stop =
        n * std::pow(config.tau, p) * std::pow(config.delta, p);

    bool stopped = false;
    while (state.sweep < config.max_sweeps) {
        sweep(state, problem, config);
        const SweepRecord& last = state.sweeps.back();
        if (config.stop_rule == StopRule::AllSkipped) {
            if (last.all_skipped) {
                result.reason = StopReason::AllSkipped;
                result.n_delta = last.sweep;
                stopped = true;
                break;
            }
        } else {
            if (last.residual_sum_p <= residual_sum_stop) {
                // the end-of-sweep iterate is returned; residuals were
                // measured at the intermediate x_{n,i}
                result.reason = StopReason::ResidualSum;
                result.n_delta = last.sweep;
                stopped = true;
                break;
            }
        }
    }
    if (!stopped) {
        result.reason = StopReason::BudgetExhausted;
        result.n_delta = state.sweep;
    }

    result.converged = stopped;
    result.x = std::move(state.x);
    result.xi = std::move(state.xi);
    result.steps = std::move(state.steps);
    result.sweeps = std::move(state.sweeps);
    result.prox_inexact = state.prox_inexact;
    result.c1 = admissibility_constant(config, problem.penalty, problem.max_eta());
    result.admissible = result.c1 > 0.0;
    return result;
}

MonotonicityReport verify_monotonicity(const SolveResult& result, const Problem& problem,
                                       const SolverConfig& config) {
    MonotonicityReport report;
    report.c1 = admissibility_constant(config, problem.penalty, problem.max_eta());
    if (!result.initial_bregman)
        return report;

    const double r = config.r;
    double before = *result.initial_bregman;
    std::size_t si = 0;  // steps are ordered by sweep
    for (const SweepRecord& sw : result.sweeps) {
        if (!sw.bregman)
            break;
        MonotonicityRow row;
        row.sweep = sw.sweep;
        row.bregman_before = before;
        row.bregman_after = *sw.bregman;
        row.decrease = before - *sw.bregman;

        double bound = 0.0;
        while (si < result.steps.size() && result.steps[si].sweep < sw.sweep)
            ++si;
        for (; si < result.steps.size() && result.steps[si].sweep == sw.sweep; ++si)
            bound += result.steps[si].mu * std::pow(result.steps[si].residual, r);
        row.bound = report.c1 * bound;

        row.violated = (row.decrease < row.bound - 1e-10) || (row.decrease < -1e-10);
        if (row.violated)
            ++report.violations;
        report.rows.push_back(row);
        before = *sw.bregman;
    }
    return report;
}

} // namespace lwk
