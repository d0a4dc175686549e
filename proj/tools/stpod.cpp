// stpod run: space-time POD experiments for the heat equation.

#include "stpod/experiment.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>

namespace {

enum ExitCode { kOk = 0, kBoundFailure = 1, kConfigError = 2, kIoError = 3 };

struct RunFlags {
    std::optional<std::string> example, config, n_time, n_space, mu, order, q_hat, s_hat, sweep_diagonal,
        quad_order, subdivide, out, cache_dir, jobs, stability_factor;
    bool full_sweep = false;
    bool no_cache = false;
};

void add(CLI::App* app, const std::string& name, std::optional<std::string>& target, const std::string& help) {
    app->add_option(name, target, help);
}

stpod::Settings flag_settings(const RunFlags& f) {
    stpod::Settings s;
    auto put = [&s](const char* key, const std::optional<std::string>& v) {
        if (v) s.emplace_back(key, *v);
    };
    put("example", f.example);
    put("n-time", f.n_time);
    put("n-space", f.n_space);
    put("mu", f.mu);
    put("order", f.order);
    put("q-hat", f.q_hat);
    put("s-hat", f.s_hat);
    put("sweep-diagonal", f.sweep_diagonal);
    put("quad-order", f.quad_order);
    put("subdivide", f.subdivide);
    put("out", f.out);
    put("cache-dir", f.cache_dir);
    put("jobs", f.jobs);
    put("stability-factor", f.stability_factor);
    if (f.full_sweep) s.emplace_back("full-sweep", "true");
    if (f.no_cache) s.emplace_back("no-cache", "true");
    return s;
}

int run(const RunFlags& flags) {
    stpod::ExperimentConfig config;
    try {
        const stpod::Settings file = flags.config ? stpod::read_config_file(*flags.config) : stpod::Settings{};
        config = stpod::make_config(file, flag_settings(flags));
    } catch (const stpod::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const stpod::IoError& e) {
        std::cerr << "i/o error: " << e.what() << '\n';
        return kIoError;
    }

    stpod::RunSummary summary;
    try {
        summary = stpod::run_example(config);
    } catch (const stpod::IoError& e) {
        std::cerr << "i/o error: " << e.what() << '\n';
        return kIoError;
    } catch (const stpod::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigError;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfigError;
    }

    std::printf("fom: %s\n", summary.cache_hit ? "cached" : "solved");
    std::printf("sweep points: %zu, hard bound failures: %lld\n", summary.outcomes.size(),
                static_cast<long long>(summary.hard_failures));
    if (summary.stability.used > 0) {
        std::printf("effective C: min %.6g max %.6g over %lld points\n", summary.stability.min_c,
                    summary.stability.max_c, static_cast<long long>(summary.stability.used));
    }
    std::printf("outputs written to %s\n", config.output_dir.string().c_str());
    return summary.exit_code == 0 ? kOk : kBoundFailure;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Space-time POD reduced order models for the heat equation"};
    app.require_subcommand(1);
    RunFlags flags;
    CLI::App* run_cmd = app.add_subcommand("run", "run Example 1 or 2 with a (q_hat, s_hat) sweep");
    add(run_cmd, "--example", flags.example, "1 (manufactured solution) or 2 (ring forcing)");
    add(run_cmd, "--config", flags.config, "key = value settings file");
    add(run_cmd, "--n-time", flags.n_time, "time grid nodes (default 101)");
    add(run_cmd, "--n-space", flags.n_space, "space grid nodes including boundary (default 101)");
    add(run_cmd, "--mu", flags.mu, "diffusion coefficient");
    add(run_cmd, "--order", flags.order, "space-first, time-first or both");
    add(run_cmd, "--q-hat", flags.q_hat, "reduced space dimension");
    add(run_cmd, "--s-hat", flags.s_hat, "reduced time dimension");
    add(run_cmd, "--sweep-diagonal", flags.sweep_diagonal, "A:B or A:B:step, q_hat = s_hat");
    run_cmd->add_flag("--full-sweep", flags.full_sweep, "add the rectangle {5,...,60}^2");
    add(run_cmd, "--quad-order", flags.quad_order, "Gauss points per direction for the RHS");
    add(run_cmd, "--subdivide", flags.subdivide, "RHS cell subdivision per direction");
    add(run_cmd, "--out", flags.out, "output directory");
    run_cmd->add_flag("--no-cache", flags.no_cache, "always solve the FOM");
    add(run_cmd, "--cache-dir", flags.cache_dir, "FOM cache directory (default <out>/cache)");
    add(run_cmd, "--jobs", flags.jobs, "worker threads for the sweep (0 = auto)");
    add(run_cmd, "--stability-factor", flags.stability_factor, "allowed max/min ratio of effective C");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kConfigError;
    }
    return run(flags);
}
