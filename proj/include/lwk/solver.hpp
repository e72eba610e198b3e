#pragma once

#include <memory>
#include <optional>
#include <vector>

#include "lwk/grid.hpp"
#include "lwk/operators.hpp"
#include "lwk/penalty.hpp"

namespace lwk {

enum class StepRule { Scaled, Adaptive };
enum class StopRule { AllSkipped, ResidualSum };
enum class StopReason { AllSkipped, ResidualSum, BudgetExhausted };

struct SolverConfig {
    double tau = 1.2;       // discrepancy parameter, > 1
    double mu0 = 1.0;       // base step constant
    double mu1 = 1000.0;    // cap of the adaptive rule
    double r = 2.0;         // duality-mapping exponent of the data spaces
    StepRule step_rule = StepRule::Scaled;
    StopRule stop_rule = StopRule::AllSkipped;
    int max_sweeps = 10000;
    double delta = 0.0;     // noise level; 0 selects the exact-data mode
    /// Exact-data runs have no discrepancy skip; this floor only guards the
    /// degenerate case of residuals at rounding level.
    double exact_data_floor = 1e-14;
    /// Bound B on the linearization norms, entering the admissibility
    /// constant as (mu0 * B^p / (2 c0))^{1/(p-1)}. The analysis normalizes
    /// B = 1; callers with unnormalized operators should supply their own.
    double norm_bound = 1.0;
    std::optional<double> trust_radius;  // declared, unenforced

    void validate() const;
    double skip_threshold() const { return delta > 0.0 ? tau * delta : exact_data_floor; }
};

struct Problem {
    std::vector<std::shared_ptr<const ForwardOperator>> operators;
    std::vector<DataVector> data;  // y_i^delta, weights matching the operators
    Penalty penalty;
    GridFunction xi0;
    /// Reference element (exact solution or phantom) for Bregman traces.
    std::optional<GridFunction> x_ref;

    std::size_t count() const { return operators.size(); }
    double max_eta() const;
    void validate() const;
};

struct StepRecord {
    int sweep = 0;
    int index = 0;
    double residual = 0.0;  // ||F_i(x_{n,i}) - y_i^delta||
    double mu = 0.0;
    bool skipped = false;
};

struct SweepRecord {
    int sweep = 0;
    double residual_sum_p = 0.0;           // R_n = sum_i residual_i^p
    std::optional<double> bregman;         // D_xi Theta(x_ref, x) after the sweep
    bool all_skipped = false;
};

struct SolverState {
    int sweep = 0;
    GridFunction xi;
    GridFunction x;
    std::vector<StepRecord> steps;
    std::vector<SweepRecord> sweeps;
    bool prox_inexact = false;
};

struct SolveResult {
    GridFunction x;
    GridFunction xi;
    int n_delta = 0;
    StopReason reason = StopReason::BudgetExhausted;
    bool converged = false;  // false exactly when the sweep budget ran out
    std::vector<StepRecord> steps;
    std::vector<SweepRecord> sweeps;
    std::optional<double> initial_bregman;  // D_{xi0} Theta(x_ref, x0)
    double c1 = 0.0;         // admissibility constant of the configuration
    bool admissible = false; // c1 > 0
    bool prox_inexact = false;
};

/// mu0 * residual^{p-r} above the discrepancy threshold, else 0.
double step_length_scaled(double residual_norm, double tau_delta, double mu0, double p, double r);

/// Adaptive variant: mu_tilde * residual^{p-r} with
/// mu_tilde = min{ mu0 * residual^{p(r-1)} / grad_dual_norm^p, mu1 };
/// a vanishing gradient saturates the min at mu1 (the update direction is
/// zero anyway).
double step_length_adaptive(double residual_norm, double grad_dual_norm, double tau_delta,
                            double mu0, double mu1, double p, double r);

/// c1 = 1 - eta - (1+eta)/tau - ((p-1)/p) * (mu0 B^p / (2 c0))^{1/(p-1)}.
double admissibility_constant(const SolverConfig& config, const Penalty& penalty, double eta);

/// One Kaczmarz sub-step for equation i: evaluate the residual, pick mu by
/// the configured rule, and if mu > 0 update
///   xi <- xi - mu * F_i'(x)^* J_r(F_i(x) - y_i),  x <- conjugate_minimizer(xi).
/// A skipped step leaves the state bitwise unchanged apart from the record.
void inner_step(SolverState& state, const Problem& problem, const SolverConfig& config, int i);

/// Applies inner_step for i = 0..N-1 in order and appends the sweep record
/// (R_n and, when x_ref is present, the Bregman distance after the sweep).
void sweep(SolverState& state, const Problem& problem, const SolverConfig& config);

SolveResult run(const Problem& problem, const SolverConfig& config);

struct MonotonicityRow {
    int sweep = 0;
    double bregman_before = 0.0;
    double bregman_after = 0.0;
    double decrease = 0.0;       // before - after
    double bound = 0.0;          // c1 * sum_i mu_{n,i} * residual^r
    bool violated = false;
};

struct MonotonicityReport {
    double c1 = 0.0;
    std::vector<MonotonicityRow> rows;
    int violations = 0;
};

/// Per-sweep check of the descent inequalities: the Bregman distance to
/// x_ref must not increase, and the decrease must dominate
/// c1 * sum_i mu * residual^r, both within 1e-10. Diagnostic only; an
/// inadmissible configuration still gets a report.
MonotonicityReport verify_monotonicity(const SolveResult& result, const Problem& problem,
                                       const SolverConfig& config);

} // namespace lwk
