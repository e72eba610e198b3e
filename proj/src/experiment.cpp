#include "lwk/experiment.hpp"

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "lwk/errors.hpp"
#include "lwk/io.hpp"
#include "lwk/operators.hpp"

namespace lwk {

double ExperimentSpec::mu0_formula() const {
    const double base = 1.0 - 1.0 / tau;
    if (preset == PresetKind::PAT)
        return base / (beta * std::sqrt(M_PI));
    return base / beta;
}

double ExperimentSpec::resolved_mu0() const { return mu0 ? *mu0 : mu0_formula(); }

void ExperimentSpec::validate() const {
    if (grid_n < 2)
        throw ConfigError("grid >= 2 violated");
    if (measurements < 1)
        throw ConfigError("measurements >= 1 violated");
    if (preset == PresetKind::EllipticID && measurements != 1)
        throw ConfigError("measurements = 1 required for EllipticID");
    if (!(beta > 0.0))
        throw ConfigError("beta > 0 violated");
    if (tv_iters < 1)
        throw ConfigError("tv_iters >= 1 violated");
    if (!(tv_tol > 0.0))
        throw ConfigError("tv_tol > 0 violated");
    if (!(tau > 1.0))
        throw ConfigError("tau > 1 violated");
    if (mu0 && !(*mu0 > 0.0))
        throw ConfigError("mu0 > 0 violated");
    if (!(mu1 > 0.0))
        throw ConfigError("mu1 > 0 violated");
    if (!(r > 1.0))
        throw ConfigError("r > 1 violated");
    if (max_sweeps < 1)
        throw ConfigError("max_sweeps >= 1 violated");
    if (noise < 0.0)
        throw ConfigError("noise >= 0 violated");
    if (!(detector_radius > 0.0))
        throw ConfigError("radius > 0 violated");
}

ExperimentSpec make_preset(PresetKind kind) {
    ExperimentSpec s;
    s.preset = kind;
    switch (kind) {
    case PresetKind::Custom:
        break;
    case PresetKind::PAT:
        s.grid_n = 160;
        s.measurements = 80;
        s.tau = 1.2;
        s.r = 2.0;
        s.step_rule = StepRule::Scaled;
        s.noise_mode = NoiseMode::RelativePercent;
        s.noise = 2.0;
        s.nominal_delta = 0.01;
        s.detector_radius = 0.96;
        s.xi0_value = 0.0;
        s.max_sweeps = 1000;
        break;
    case PresetKind::EllipticID:
        s.grid_n = 100;
        s.measurements = 1;
        s.tau = 1.1;
        s.r = 2.0;
        s.step_rule = StepRule::Adaptive;
        s.mu1 = 4000.0;
        s.noise_mode = NoiseMode::AbsoluteDelta;
        s.noise = 0.5e-4;
        s.nominal_delta = 0.5e-4;
        s.xi0_value = 0.0;
        break;
    case PresetKind::Schlieren:
        s.grid_n = 120;
        s.measurements = 100;
        s.tau = 1.5;
        s.r = 2.0;
        s.step_rule = StepRule::Adaptive;
        s.mu1 = 1000.0;
        s.noise_mode = NoiseMode::AbsoluteDelta;
        s.noise = 0.002;
        s.nominal_delta = 0.002;
        s.xi0_value = 0.01;
        break;
    }
    return s;
}

const char* preset_name(PresetKind kind) {
    switch (kind) {
    case PresetKind::Custom: return "Custom";
    case PresetKind::PAT: return "PAT";
    case PresetKind::EllipticID: return "EllipticID";
    case PresetKind::Schlieren: return "Schlieren";
    }
    return "?";
}

const char* penalty_name(PenaltyKind kind) {
    switch (kind) {
    case PenaltyKind::Quadratic: return "quad";
    case PenaltyKind::L1L2: return "l1l2";
    case PenaltyKind::TVL2: return "tvl2";
    }
    return "?";
}

namespace {

const char* step_rule_name(StepRule rule) {
    return rule == StepRule::Scaled ? "scaled" : "adaptive";
}

const char* stop_rule_name(StopRule rule) {
    return rule == StopRule::AllSkipped ? "all_skipped" : "residual_sum";
}

const char* noise_mode_name(NoiseMode mode) {
    return mode == NoiseMode::AbsoluteDelta ? "absolute" : "relative";
}

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos)
        return "";
    const auto b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}

double parse_double(const std::string& key, const std::string& value) {
    char* end = nullptr;
    const double v = std::strtod(value.c_str(), &end);
    if (end == value.c_str() || *end != '\0')
        throw ConfigError("key '" + key + "': expected a number, got '" + value + "'");
    return v;
}

long long parse_int(const std::string& key, const std::string& value) {
    char* end = nullptr;
    const long long v = std::strtoll(value.c_str(), &end, 10);
    if (end == value.c_str() || *end != '\0')
        throw ConfigError("key '" + key + "': expected an integer, got '" + value + "'");
    return v;
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(value.c_str(), &end, 10);
    if (end == value.c_str() || *end != '\0')
        throw ConfigError("key '" + key + "': expected an unsigned integer, got '" + value + "'");
    return v;
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1")
        return true;
    if (value == "false" || value == "0")
        return false;
    throw ConfigError("key '" + key + "': expected true/false, got '" + value + "'");
}

PresetKind parse_preset(const std::string& value) {
    if (value == "Custom") return PresetKind::Custom;
    if (value == "PAT") return PresetKind::PAT;
    if (value == "EllipticID") return PresetKind::EllipticID;
    if (value == "Schlieren") return PresetKind::Schlieren;
    throw ConfigError("key 'preset': expected PAT|EllipticID|Schlieren|Custom, got '" + value +
                      "'");
}

PenaltyKind parse_penalty(const std::string& value) {
    if (value == "quad") return PenaltyKind::Quadratic;
    if (value == "l1l2") return PenaltyKind::L1L2;
    if (value == "tvl2") return PenaltyKind::TVL2;
    throw ConfigError("key 'penalty': expected quad|l1l2|tvl2, got '" + value + "'");
}

} // namespace

void apply_override(ExperimentSpec& spec, const std::string& key, const std::string& value) {
    if (key == "preset") {
        spec = make_preset(parse_preset(value));
    } else if (key == "grid") {
        spec.grid_n = static_cast<int>(parse_int(key, value));
    } else if (key == "measurements") {
        spec.measurements = static_cast<int>(parse_int(key, value));
    } else if (key == "penalty") {
        spec.penalty = parse_penalty(value);
    } else if (key == "beta") {
        spec.beta = parse_double(key, value);
    } else if (key == "tv_iters") {
        spec.tv_iters = static_cast<int>(parse_int(key, value));
    } else if (key == "tv_tol") {
        spec.tv_tol = parse_double(key, value);
    } else if (key == "tau") {
        spec.tau = parse_double(key, value);
    } else if (key == "mu0") {
        spec.mu0 = parse_double(key, value);
    } else if (key == "mu1") {
        spec.mu1 = parse_double(key, value);
    } else if (key == "r") {
        spec.r = parse_double(key, value);
    } else if (key == "step_rule") {
        if (value == "scaled")
            spec.step_rule = StepRule::Scaled;
        else if (value == "adaptive")
            spec.step_rule = StepRule::Adaptive;
        else
            throw ConfigError("key 'step_rule': expected scaled|adaptive, got '" + value + "'");
    } else if (key == "stop_rule") {
        if (value == "all_skipped")
            spec.stop_rule = StopRule::AllSkipped;
        else if (value == "residual_sum")
            spec.stop_rule = StopRule::ResidualSum;
        else
            throw ConfigError("key 'stop_rule': expected all_skipped|residual_sum, got '" +
                              value + "'");
    } else if (key == "max_sweeps") {
        spec.max_sweeps = static_cast<int>(parse_int(key, value));
    } else if (key == "noise_mode") {
        if (value == "absolute")
            spec.noise_mode = NoiseMode::AbsoluteDelta;
        else if (value == "relative")
            spec.noise_mode = NoiseMode::RelativePercent;
        else
            throw ConfigError("key 'noise_mode': expected absolute|relative, got '" + value +
                              "'");
    } else if (key == "noise") {
        spec.noise = parse_double(key, value);
    } else if (key == "seed") {
        spec.seed = parse_u64(key, value);
    } else if (key == "out") {
        spec.out_dir = value;
    } else if (key == "xi0") {
        spec.xi0_value = parse_double(key, value);
    } else if (key == "radius") {
        spec.detector_radius = parse_double(key, value);
    } else if (key == "estimate_norm") {
        spec.estimate_norm = parse_bool(key, value);
    } else {
        throw ConfigError("unknown key '" + key + "'");
    }
}

ExperimentSpec parse_config_text(const std::string& text, std::optional<PresetKind> base) {
    struct Entry {
        int line;
        std::string key;
        std::string value;
    };
    std::vector<Entry> entries;
    std::istringstream in(text);
    std::string raw;
    int line_no = 0;
    bool saw_preset = false;
    PresetKind preset = PresetKind::Custom;
    int preset_line = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto hash = raw.find('#');
        if (hash != std::string::npos)
            raw = raw.substr(0, hash);
        const std::string stripped = trim(raw);
        if (stripped.empty())
            continue;
        const auto eq = stripped.find('=');
        if (eq == std::string::npos) {
            std::ostringstream msg;
            msg << "config line " << line_no << ": expected key = value";
            throw ConfigError(msg.str());
        }
        Entry e{line_no, trim(stripped.substr(0, eq)), trim(stripped.substr(eq + 1))};
        if (e.key.empty()) {
            std::ostringstream msg;
            msg << "config line " << line_no << ": empty key";
            throw ConfigError(msg.str());
        }
        if (e.key == "preset") {
            if (saw_preset) {
                std::ostringstream msg;
                msg << "config line " << line_no << ": duplicate key 'preset'";
                throw ConfigError(msg.str());
            }
            saw_preset = true;
            preset_line = e.line;
            try {
                preset = parse_preset(e.value);
            } catch (const ConfigError& err) {
                std::ostringstream msg;
                msg << "config line " << e.line << ": " << err.what();
                throw ConfigError(msg.str());
            }
            continue;
        }
        entries.push_back(std::move(e));
    }
    (void)preset_line;

    // preset defaults first, remaining keys in file order
    ExperimentSpec spec = saw_preset ? make_preset(preset)
                                     : (base ? make_preset(*base) : ExperimentSpec{});
    for (const Entry& e : entries) {
        try {
            apply_override(spec, e.key, e.value);
        } catch (const ConfigError& err) {
            std::ostringstream msg;
            msg << "config line " << e.line << ": " << err.what();
            throw ConfigError(msg.str());
        }
    }
    spec.validate();
    return spec;
}

ExperimentSpec parse_config(const std::string& path, std::optional<PresetKind> base) {
    std::ifstream in(path);
    if (!in)
        throw IoError("parse_config: cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str(), base);
}

std::string config_echo(const ExperimentSpec& spec) {
    std::ostringstream out;
    out << "preset = " << preset_name(spec.preset) << '\n'
        << "grid = " << spec.grid_n << '\n'
        << "measurements = " << spec.measurements << '\n'
        << "penalty = " << penalty_name(spec.penalty) << '\n'
        << "beta = " << format_g17(spec.beta) << '\n'
        << "tv_iters = " << spec.tv_iters << '\n'
        << "tv_tol = " << format_g17(spec.tv_tol) << '\n'
        << "tau = " << format_g17(spec.tau) << '\n'
        << "mu0 = " << format_g17(spec.resolved_mu0()) << '\n'
        << "mu1 = " << format_g17(spec.mu1) << '\n'
        << "r = " << format_g17(spec.r) << '\n'
        << "step_rule = " << step_rule_name(spec.step_rule) << '\n'
        << "stop_rule = " << stop_rule_name(spec.stop_rule) << '\n'
        << "max_sweeps = " << spec.max_sweeps << '\n'
        << "noise_mode = " << noise_mode_name(spec.noise_mode) << '\n'
        << "noise = " << format_g17(spec.noise) << '\n'
        << "seed = " << spec.seed << '\n'
        << "out = " << spec.out_dir << '\n'
        << "xi0 = " << format_g17(spec.xi0_value) << '\n'
        << "radius = " << format_g17(spec.detector_radius) << '\n'
        << "estimate_norm = " << (spec.estimate_norm ? "true" : "false") << '\n';
    return out.str();
}

namespace {

struct Assembled {
    GridSpec grid;
    std::vector<std::shared_ptr<const ForwardOperator>> operators;
    GridFunction x_true;
};

Assembled assemble(const ExperimentSpec& spec) {
    Assembled a;
    switch (spec.preset) {
    case PresetKind::EllipticID: {
        a.grid = square_grid(spec.grid_n, 0.0, 1.0);
        a.x_true = rasterize(pde_coefficient_phantom(), a.grid);
        GridFunction f = GridFunction::zeros(a.grid);
        for (int j = 0; j < a.grid.ny; ++j)
            for (int i = 0; i < a.grid.nx; ++i)
                f.at(i, j) = a.x_true.at(i, j) * (a.grid.x_center(i) + a.grid.y_center(j));
        auto g = [](double x, double y) { return x + y; };
        a.operators.push_back(std::make_shared<EllipticParamOp>(a.grid, std::move(f), g));
        break;
    }
    case PresetKind::Schlieren: {
        a.grid = square_grid(spec.grid_n, -1.0, 1.0);
        a.x_true = rasterize(imaging_phantom(), a.grid);
        const int n = spec.measurements;
        for (int i = 0; i < n; ++i) {
            const double angle = M_PI * static_cast<double>(i) / static_cast<double>(n);
            a.operators.push_back(
                std::make_shared<SchlierenOp>(a.grid, angle, spec.grid_n));
        }
        break;
    }
    case PresetKind::PAT:
    case PresetKind::Custom: {
        // detection points on the semicircle of radius R
        a.grid = square_grid(spec.grid_n, -1.0, 1.0);
        a.x_true = rasterize(imaging_phantom(), a.grid);
        const int n = spec.measurements;
        const double R = spec.detector_radius;
        for (int i = 0; i < n; ++i) {
            const double angle = M_PI * static_cast<double>(i) / static_cast<double>(n);
            const Vec2 center{R * std::cos(angle), R * std::sin(angle)};
            a.operators.push_back(
                std::make_shared<CircularMeanOp>(a.grid, center, spec.grid_n, R));
        }
        break;
    }
    }
    return a;
}

template <typename F>
auto staged(const char* stage, F&& fn) -> decltype(fn()) {
    try {
        return fn();
    } catch (const std::exception& e) {
        throw Error(std::string(stage) + ": " + e.what());
    }
}

} // namespace

PreparedRun prepare_run(const ExperimentSpec& raw) {
    raw.validate();

    PreparedRun prep;
    prep.spec = raw;

    Assembled a = staged("synthesis", [&] { return assemble(raw); });
    std::vector<DataVector> data =
        staged("synthesis", [&] { return synthesize(a.operators, a.x_true); });

    double achieved = 0.0;
    if (raw.noise > 0.0) {
        for (std::size_t i = 0; i < data.size(); ++i) {
            NoiseSpec ns{raw.noise_mode, raw.noise, sub_seed(raw.seed, i)};
            auto [noisy, d] = staged("synthesis", [&] { return add_noise(data[i], ns); });
            data[i] = std::move(noisy);
            achieved = std::max(achieved, d);
        }
    }
    prep.achieved_delta = achieved;

    prep.problem.operators = std::move(a.operators);
    prep.problem.data = std::move(data);
    prep.problem.penalty = Penalty{raw.penalty, raw.beta, raw.tv_iters, raw.tv_tol};
    prep.problem.xi0 = GridFunction::constant(a.grid, raw.xi0_value);
    prep.problem.x_ref = a.x_true;
    prep.x_true = std::move(a.x_true);

    prep.config.tau = raw.tau;
    prep.config.mu0 = raw.resolved_mu0();
    prep.config.mu1 = raw.mu1;
    prep.config.r = raw.r;
    prep.config.step_rule = raw.step_rule;
    prep.config.stop_rule = raw.stop_rule;
    prep.config.max_sweeps = raw.max_sweeps;
    prep.config.delta = achieved;

    if (raw.estimate_norm) {
        const GridFunction x0 = conjugate_minimizer(prep.problem.penalty, prep.problem.xi0);
        double bound = 0.0;
        for (const auto& op : prep.problem.operators)
            bound = std::max(bound, operator_norm_estimate(*op, x0, 25, 17));
        prep.norm_estimate = bound;
        if (bound > 0.0)
            prep.config.norm_bound = bound;
    } else {
        double declared = 0.0;
        bool all_declared = true;
        for (const auto& op : prep.problem.operators) {
            if (auto b = op->norm_bound())
                declared = std::max(declared, *b);
            else
                all_declared = false;
        }
        if (all_declared && declared > 0.0)
            prep.config.norm_bound = declared;
    }
    return prep;
}

RunReport run_experiment(const ExperimentSpec& spec) {
    PreparedRun prep = prepare_run(spec);

    RunReport report;
    report.spec = prep.spec;
    report.mu0 = prep.config.mu0;
    report.achieved_delta = prep.achieved_delta;
    report.norm_estimate = prep.norm_estimate;

    const auto t0 = std::chrono::steady_clock::now();
    report.result = staged("solve", [&] { return run(prep.problem, prep.config); });
    const auto t1 = std::chrono::steady_clock::now();
    report.wall_seconds = std::chrono::duration<double>(t1 - t0).count();

    const double ref_norm = norm(prep.x_true);
    GridFunction diff = lin_comb(1.0, report.result.x, -1.0, prep.x_true);
    report.relative_error = ref_norm > 0.0 ? norm(diff) / ref_norm : norm(diff);
    report.x_true = std::move(prep.x_true);

    if (!spec.out_dir.empty()) {
        staged("output", [&] {
            std::filesystem::create_directories(spec.out_dir);
            const std::filesystem::path dir(spec.out_dir);
            write_pgm(report.result.x, (dir / "recon.pgm").string());
            write_pgm(report.x_true, (dir / "phantom.pgm").string());
            write_trace_csv(report.result, (dir / "trace.csv").string());
            std::ofstream rep(dir / "report.txt");
            if (!rep)
                throw IoError("cannot open report.txt");
            rep << render_report(report);
            return 0;
        });
    }
    return report;
}

std::string render_report(const RunReport& report) {
    const SolveResult& res = report.result;
    std::ostringstream out;
    out << "# run report\n";
    out << "published_delta = " << format_g17(report.spec.nominal_delta) << '\n';
    out << "achieved_delta = " << format_g17(report.achieved_delta) << '\n';
    out << "n_delta = " << res.n_delta << '\n';
    out << "stop_reason = "
        << (res.reason == StopReason::AllSkipped
                ? "all_skipped"
                : res.reason == StopReason::ResidualSum ? "residual_sum" : "budget_exhausted")
        << '\n';
    out << "converged = " << (res.converged ? "true" : "false") << '\n';
    out << "sweeps = " << res.sweeps.size() << '\n';
    out << "relative_error = " << format_g17(report.relative_error) << '\n';
    if (res.initial_bregman)
        out << "initial_bregman = " << format_g17(*res.initial_bregman) << '\n';
    if (!res.sweeps.empty() && res.sweeps.back().bregman)
        out << "final_bregman = " << format_g17(*res.sweeps.back().bregman) << '\n';
    if (!res.sweeps.empty())
        out << "final_residual_sum = " << format_g17(res.sweeps.back().residual_sum_p) << '\n';
    out << "norm_estimate = " << format_g17(report.norm_estimate) << '\n';
    out << "c1 = " << format_g17(res.c1) << '\n';
    out << "admissible = " << (res.admissible ? "true" : "false") << '\n';
    out << "prox_inexact = " << (res.prox_inexact ? "true" : "false") << '\n';
    out << "wall_seconds = " << format_g17(report.wall_seconds) << '\n';
    out << "\n# configuration\n" << config_echo(report.spec);
    return out.str();
}

} // namespace lwk
