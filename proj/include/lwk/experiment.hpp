#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "lwk/grid.hpp"
#include "lwk/penalty.hpp"
#include "lwk/phantoms.hpp"
#include "lwk/solver.hpp"

namespace lwk {

enum class PresetKind { Custom, PAT, EllipticID, Schlieren };

/// A full experiment description. Presets load the published parameter sets;
/// every field can be overridden afterwards (config file first, then command
/// line). mu0 left unset resolves to the preset's formula at the current tau
/// and beta, which is what makes a beta override recompute it.
struct ExperimentSpec {
    PresetKind preset = PresetKind::Custom;
    int grid_n = 64;
    int measurements = 10;
    PenaltyKind penalty = PenaltyKind::TVL2;
    double beta = 1.0;
    int tv_iters = 200;
    double tv_tol = 1e-8;
    double tau = 1.2;
    std::optional<double> mu0;  // unset: use mu0_formula()
    double mu1 = 1000.0;
    double r = 2.0;
    StepRule step_rule = StepRule::Scaled;
    StopRule stop_rule = StopRule::AllSkipped;
    int max_sweeps = 2000;
    NoiseMode noise_mode = NoiseMode::RelativePercent;
    double noise = 2.0;  // percent, or the absolute delta
    std::uint64_t seed = 1;
    std::string out_dir = ".";  // empty: skip the output stage
    double xi0_value = 0.0;
    double detector_radius = 0.96;
    /// Published noise level of the preset; echoed in reports. The solver
    /// always receives the achieved per-seed delta.
    double nominal_delta = 0.0;
    /// Estimate the linearization norm bound B by power iteration before
    /// solving (feeds the admissibility echo).
    bool estimate_norm = true;

    /// The preset's published step constant at the current tau/beta:
    /// (1-1/tau)/(beta*sqrt(pi)) for PAT, (1-1/tau)/beta otherwise.
    double mu0_formula() const;
    /// Explicit mu0 if set, else mu0_formula().
    double resolved_mu0() const;

    void validate() const;
};

ExperimentSpec make_preset(PresetKind kind);

const char* preset_name(PresetKind kind);
const char* penalty_name(PenaltyKind kind);

/// Flat key = value rendering of every field; parse_config_text on the
/// result reproduces the spec.
std::string config_echo(const ExperimentSpec& spec);

/// base, when given, supplies preset defaults for files that do not set a
/// preset key themselves; a preset key in the file wins.
ExperimentSpec parse_config(const std::string& path,
                            std::optional<PresetKind> base = std::nullopt);
ExperimentSpec parse_config_text(const std::string& text,
                                 std::optional<PresetKind> base = std::nullopt);

/// Applies one "key = value" override; the same keys the config file takes.
void apply_override(ExperimentSpec& spec, const std::string& key, const std::string& value);

/// Operators, ground truth, data and solver configuration assembled from a
/// spec, before running. achieved_delta is the largest per-measurement
/// perturbation norm; the solver config carries it as delta.
struct PreparedRun {
    ExperimentSpec spec;
    Problem problem;
    SolverConfig config;
    GridFunction x_true;
    double achieved_delta = 0.0;
    double norm_estimate = 0.0;  // 0 when estimation is disabled
};

PreparedRun prepare_run(const ExperimentSpec& spec);

struct RunReport {
    ExperimentSpec spec;  // finalized spec (validated, echo-ready)
    SolveResult result;
    GridFunction x_true;
    double mu0 = 0.0;  // resolved value used by the solver
    double achieved_delta = 0.0;
    double norm_estimate = 0.0;
    double relative_error = 0.0;  // ||x - x_true|| / ||x_true||
    double wall_seconds = 0.0;
};

/// prepare_run + solve + artifact emission (recon.pgm, phantom.pgm,
/// trace.csv, report.txt under spec.out_dir). Errors are rethrown with a
/// stage label (synthesis | solve | output).
RunReport run_experiment(const ExperimentSpec& spec);

std::string render_report(const RunReport& report);

} // namespace lwk
