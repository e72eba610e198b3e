#include <atomic>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "lwk/experiment.hpp"
#include "lwk/io.hpp"

namespace {

lwk::PresetKind preset_from_flag(const std::string& name) {
    if (name == "PAT") return lwk::PresetKind::PAT;
    if (name == "EllipticID") return lwk::PresetKind::EllipticID;
    return lwk::PresetKind::Schlieren;
}

struct Job {
    std::string label;
    lwk::ExperimentSpec spec;
};

} // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "Iterative sweep solver for systems of ill-posed measurement equations.\n"
        "Runs one experiment per config file (or a bare preset) and writes\n"
        "recon.pgm, phantom.pgm, trace.csv and report.txt per run."};

    std::vector<std::string> configs;
    app.add_option("--config", configs, "config file(s), one 'key = value' per line")
        ->check(CLI::ExistingFile);
    std::string out_dir;
    app.add_option("--out", out_dir, "output directory (per-config subdirectories when several)");
    std::optional<std::uint64_t> seed;
    app.add_option("--seed", seed, "noise seed");
    std::string preset;
    app.add_option("--preset", preset,
                   "preset defaults; a preset key inside the config file wins")
        ->check(CLI::IsMember({"PAT", "EllipticID", "Schlieren"}));
    std::string penalty;
    app.add_option("--penalty", penalty, "penalty kind")
        ->check(CLI::IsMember({"quad", "l1l2", "tvl2"}));
    std::optional<double> beta;
    app.add_option("--beta", beta, "penalty weight; re-derives mu0 unless set explicitly");
    std::optional<int> grid;
    app.add_option("--grid", grid, "square grid size n (n x n cells)");
    std::optional<int> measurements;
    app.add_option("--measurements", measurements, "measurement count N");
    std::optional<int> max_sweeps;
    app.add_option("--max-sweeps", max_sweeps, "sweep budget");
    int jobs = 1;
    app.add_option("--jobs", jobs, "parallel runs across configs")->check(CLI::PositiveNumber);

    CLI11_PARSE(app, argc, argv);

    std::vector<Job> work;
    try {
        std::optional<lwk::PresetKind> base;
        if (!preset.empty())
            base = preset_from_flag(preset);

        if (configs.empty()) {
            Job job;
            job.label = base ? preset : "custom";
            job.spec = base ? lwk::make_preset(*base) : lwk::ExperimentSpec{};
            work.push_back(std::move(job));
        } else {
            for (const std::string& path : configs) {
                Job job;
                job.label = path;
                job.spec = lwk::parse_config(path, base);
                work.push_back(std::move(job));
            }
        }

        for (Job& job : work) {
            lwk::ExperimentSpec& spec = job.spec;
            if (!penalty.empty())
                lwk::apply_override(spec, "penalty", penalty);
            if (beta)
                lwk::apply_override(spec, "beta", lwk::format_g17(*beta));
            if (grid)
                lwk::apply_override(spec, "grid", std::to_string(*grid));
            if (measurements)
                lwk::apply_override(spec, "measurements", std::to_string(*measurements));
            if (max_sweeps)
                lwk::apply_override(spec, "max_sweeps", std::to_string(*max_sweeps));
            if (seed)
                lwk::apply_override(spec, "seed", std::to_string(*seed));
        }

        // every run gets its own directory when several are launched
        if (work.size() == 1) {
            if (!out_dir.empty())
                work[0].spec.out_dir = out_dir;
        } else {
            const std::string root = out_dir.empty() ? std::string(".") : out_dir;
            for (Job& job : work) {
                const std::string stem = std::filesystem::path(job.label).stem().string();
                job.spec.out_dir = (std::filesystem::path(root) / stem).string();
            }
        }
        for (Job& job : work)
            job.spec.validate();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }

    std::mutex io_mutex;
    std::atomic<std::size_t> next{0};
    std::atomic<int> failures{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t k = next.fetch_add(1);
            if (k >= work.size())
                return;
            const Job& job = work[k];
            try {
                lwk::RunReport report = lwk::run_experiment(job.spec);
                std::lock_guard<std::mutex> lock(io_mutex);
                std::cout << job.label << ": n_delta=" << report.result.n_delta
                          << " stop=" << (report.result.converged ? "converged" : "budget")
                          << " rel_err=" << report.relative_error
                          << " wall=" << report.wall_seconds << "s"
                          << " out=" << job.spec.out_dir << '\n';
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(io_mutex);
                std::cerr << job.label << ": error: " << e.what() << '\n';
                failures.fetch_add(1);
            }
        }
    };

    const std::size_t n_threads =
        std::min<std::size_t>(static_cast<std::size_t>(jobs), work.size());
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (std::size_t t = 0; t < n_threads; ++t)
            pool.emplace_back(worker);
        for (auto& th : pool)
            th.join();
    }
    return failures.load() == 0 ? 0 : 1;
}
