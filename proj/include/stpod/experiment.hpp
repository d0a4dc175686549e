#pragma once

#include "stpod/error_analysis.hpp"

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace stpod {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

enum class Example { Example1, Example2, Custom };

struct SweepPoint {
    Index q_hat = 0;
    Index s_hat = 0;
    bool operator==(const SweepPoint&) const = default;
};

struct ExperimentConfig {
    Example example = Example::Example1;
    Index n_time = 101;   // time nodes
    Index n_space = 101;  // space nodes including the two boundary nodes
    double mu = 0.4;
    std::vector<ProjectionOrder> orders{ProjectionOrder::SpaceFirst};
    Index q_hat = 20;  // dimensions for singular values, bases and fields
    Index s_hat = 20;
    std::vector<SweepPoint> sweep;
    int quad_order = 3;
    int subdivision = 1;
    std::filesystem::path output_dir = "stpod_out";
    std::filesystem::path cache_dir;  // empty: <output_dir>/cache
    bool cache = true;
    int jobs = 0;  // 0: hardware concurrency, at most 8
    double stability_factor = 1e6;
    std::optional<ProblemSpec> custom_problem;  // used with Example::Custom
};

/// Ordered key/value settings; keys use the long flag names ("n-time", "q-hat", ...).
using Settings = std::vector<std::pair<std::string, std::string>>;

/// Example defaults: Example 1 mu = 0.4, one sweep point (q_hat, s_hat);
/// Example 2 mu = 1, 4x4 subdivided RHS quadrature, diagonal sweep 2..60 step 2.
ExperimentConfig default_config(Example example);

/// "A:B" or "A:B:step" -> diagonal points q_hat = s_hat.
std::vector<SweepPoint> parse_diagonal(const std::string& range);
/// Every (q_hat, s_hat) in {5, 10, ..., 60}^2.
std::vector<SweepPoint> full_rectangle();

/// Flat "key = value" lines; '#' starts a comment. Throws IoError / ConfigError.
Settings read_config_file(const std::filesystem::path& path);

/// Defaults of the selected example, then file settings, then flag settings.
/// Unknown keys and invalid values throw ConfigError.
ExperimentConfig make_config(const Settings& file_settings, const Settings& flag_settings);

/// Throws ConfigError when the configuration cannot be run.
void validate(const ExperimentConfig& config);

ProblemSpec problem_for(const ExperimentConfig& config);

/// FNV-1a over the parameters that determine the FOM solution.
std::string fom_cache_key(const ExperimentConfig& config);

struct SweepOutcome {
    ErrorReport report;
    std::vector<CheckResult> checks;
};

struct RunSummary {
    int exit_code = 0;
    bool cache_hit = false;
    Index hard_failures = 0;
    std::vector<SweepOutcome> outcomes;
    StabilityResult stability;
};

/// Solves (or loads) the FOM, runs every sweep point for every order, and writes
/// singular_values.csv, errors.csv, bases_time.csv, bases_space.csv, fields.csv, diagnostics.log.
/// Exit code 0 on success, 1 on a violated hard bound. I/O failures throw IoError.
RunSummary run_example(const ExperimentConfig& config);

}  // namespace stpod
