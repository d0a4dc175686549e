#include "stpod/experiment.hpp"

#include "stpod/csv.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cstdint>
#include <exception>
#include <fstream>
#include <mutex>
#include <thread>

namespace stpod {

namespace fs = std::filesystem;

ExperimentConfig default_config(Example example) {
    ExperimentConfig c;
    c.example = example;
    if (example == Example::Example2) {
        c.mu = 1.0;
        c.subdivision = 4;
        c.sweep = parse_diagonal("2:60:2");
    } else {
        c.mu = 0.4;
        c.sweep = {{c.q_hat, c.s_hat}};
    }
    return c;
}

namespace {

std::string trim(const std::string& s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return "";
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

std::string normalize_key(std::string key) {
    key = trim(key);
    while (!key.empty() && key.front() == '-') key.erase(key.begin());
    std::replace(key.begin(), key.end(), '_', '-');
    return key;
}

long long parse_int(const std::string& key, const std::string& text) {
    long long value = 0;
    const std::string t = trim(text);
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
    if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
        throw ConfigError(key + ": expected an integer, got '" + text + "'");
    }
    return value;
}

double parse_double(const std::string& key, const std::string& text) {
    double value = 0.0;
    const std::string t = trim(text);
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), value);
    if (ec != std::errc() || ptr != t.data() + t.size() || t.empty()) {
        throw ConfigError(key + ": expected a number, got '" + text + "'");
    }
    return value;
}

bool parse_bool(const std::string& key, const std::string& text) {
    const std::string t = trim(text);
    if (t == "1" || t == "true" || t == "yes" || t == "on" || t.empty()) return true;
    if (t == "0" || t == "false" || t == "no" || t == "off") return false;
    throw ConfigError(key + ": expected a boolean, got '" + text + "'");
}

Example parse_example(const std::string& text) {
    const std::string t = trim(text);
    if (t == "1") return Example::Example1;
    if (t == "2") return Example::Example2;
    throw ConfigError("example: expected 1 or 2, got '" + text + "'");
}

std::vector<ProjectionOrder> parse_orders(const std::string& text) {
    const std::string t = trim(text);
    if (t == "space-first") return {ProjectionOrder::SpaceFirst};
    if (t == "time-first") return {ProjectionOrder::TimeFirst};
    if (t == "both") return {ProjectionOrder::SpaceFirst, ProjectionOrder::TimeFirst};
    throw ConfigError("order: expected space-first, time-first or both, got '" + text + "'");
}

const std::vector<std::string>& known_keys() {
    static const std::vector<std::string> keys = {
        "example",     "n-time",    "n-space", "mu",       "order", "q-hat",     "s-hat",
        "sweep-diagonal", "full-sweep", "quad-order", "subdivide", "out", "no-cache", "cache-dir",
        "jobs",        "stability-factor"};
    return keys;
}

}  // namespace

std::vector<SweepPoint> parse_diagonal(const std::string& range) {
    const auto parts = csv::split(trim(range), ':');
    if (parts.size() != 2 && parts.size() != 3) {
        throw ConfigError("sweep-diagonal: expected A:B or A:B:step, got '" + range + "'");
    }
    const long long a = parse_int("sweep-diagonal", parts[0]);
    const long long b = parse_int("sweep-diagonal", parts[1]);
    const long long step = parts.size() == 3 ? parse_int("sweep-diagonal", parts[2]) : 1;
    if (a < 1 || b < a || step < 1) throw ConfigError("sweep-diagonal: need 1 <= A <= B and step >= 1");
    std::vector<SweepPoint> out;
    for (long long k = a; k <= b; k += step) out.push_back({k, k});
    return out;
}

std::vector<SweepPoint> full_rectangle() {
    std::vector<SweepPoint> out;
    for (Index s_hat = 5; s_hat <= 60; s_hat += 5) {
        for (Index q_hat = 5; q_hat <= 60; q_hat += 5) out.push_back({q_hat, s_hat});
    }
    return out;
}

Settings read_config_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file " + path.string());
    Settings out;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
        if (trim(line).empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": expected key = value");
        }
        out.emplace_back(normalize_key(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return out;
}

ExperimentConfig make_config(const Settings& file_settings, const Settings& flag_settings) {
    Example example = Example::Example1;
    for (const Settings* settings : {&file_settings, &flag_settings}) {
        for (const auto& [key, value] : *settings) {
            if (normalize_key(key) == "example") example = parse_example(value);
        }
    }
    ExperimentConfig c = default_config(example);

    std::optional<std::string> diagonal;
    bool full_sweep = false;
    bool q_hat_set = false;
    bool s_hat_set = false;
    for (const Settings* settings : {&file_settings, &flag_settings}) {
        for (const auto& [raw_key, value] : *settings) {
            const std::string key = normalize_key(raw_key);
            if (key == "example") {
                continue;
            } else if (key == "n-time") {
                c.n_time = parse_int(key, value);
            } else if (key == "n-space") {
                c.n_space = parse_int(key, value);
            } else if (key == "mu") {
                c.mu = parse_double(key, value);
            } else if (key == "order") {
                c.orders = parse_orders(value);
            } else if (key == "q-hat") {
                c.q_hat = parse_int(key, value);
                q_hat_set = true;
            } else if (key == "s-hat") {
                c.s_hat = parse_int(key, value);
                s_hat_set = true;
            } else if (key == "sweep-diagonal") {
                diagonal = value;
            } else if (key == "full-sweep") {
                full_sweep = parse_bool(key, value);
            } else if (key == "quad-order") {
                c.quad_order = static_cast<int>(parse_int(key, value));
            } else if (key == "subdivide") {
                c.subdivision = static_cast<int>(parse_int(key, value));
            } else if (key == "out") {
                c.output_dir = trim(value);
            } else if (key == "no-cache") {
                c.cache = !parse_bool(key, value);
            } else if (key == "cache-dir") {
                c.cache_dir = trim(value);
            } else if (key == "jobs") {
                c.jobs = static_cast<int>(parse_int(key, value));
            } else if (key == "stability-factor") {
                c.stability_factor = parse_double(key, value);
            } else {
                std::string valid;
                for (const auto& k : known_keys()) valid += (valid.empty() ? "" : ", ") + k;
                throw ConfigError("unknown setting '" + raw_key + "'; valid keys: " + valid);
            }
        }
    }

    // default reduced dimensions shrink with small grids
    const Index q = c.n_space - 2;
    const Index s = c.n_time;
    if (!q_hat_set && q >= 1) c.q_hat = std::min(c.q_hat, q);
    if (!s_hat_set && s >= 1) c.s_hat = std::min(c.s_hat, s);

    if (diagonal) {
        c.sweep = parse_diagonal(*diagonal);
    } else if (example == Example::Example1) {
        c.sweep = {{c.q_hat, c.s_hat}};
    }
    if (full_sweep) {
        for (const SweepPoint& p : full_rectangle()) {
            if (std::find(c.sweep.begin(), c.sweep.end(), p) == c.sweep.end()) c.sweep.push_back(p);
        }
    }
    validate(c);
    return c;
}

void validate(const ExperimentConfig& c) {
    if (c.n_time < 2) throw ConfigError("n-time must be at least 2");
    if (c.n_space < 3) throw ConfigError("n-space must be at least 3");
    if (!(c.mu > 0.0)) throw ConfigError("mu must be positive");
    if (c.orders.empty()) throw ConfigError("no projection order selected");
    if (c.quad_order < 2 || c.quad_order > 32) throw ConfigError("quad-order must lie in [2, 32]");
    if (c.subdivision < 1 || c.subdivision > 64) throw ConfigError("subdivide must lie in [1, 64]");
    if (c.jobs < 0) throw ConfigError("jobs must be non-negative");
    if (!(c.stability_factor >= 1.0)) throw ConfigError("stability-factor must be at least 1");
    if (c.output_dir.empty()) throw ConfigError("out must not be empty");
    if (c.example == Example::Custom && !c.custom_problem) throw ConfigError("custom example without a problem");
    const Index q = c.n_space - 2;
    const Index s = c.n_time;
    auto check_point = [&](Index q_hat, Index s_hat, const std::string& what) {
        if (q_hat < 1 || q_hat > q) {
            throw ConfigError(what + ": q-hat = " + std::to_string(q_hat) + " outside [1, " + std::to_string(q) + "]");
        }
        if (s_hat < 1 || s_hat > s) {
            throw ConfigError(what + ": s-hat = " + std::to_string(s_hat) + " outside [1, " + std::to_string(s) + "]");
        }
    };
    check_point(c.q_hat, c.s_hat, "reduced dimensions");
    if (c.sweep.empty()) throw ConfigError("empty sweep");
    for (const SweepPoint& p : c.sweep) check_point(p.q_hat, p.s_hat, "sweep point");
}

ProblemSpec problem_for(const ExperimentConfig& c) {
    switch (c.example) {
    case Example::Example1:
        return example1_problem(c.mu);
    case Example::Example2:
        return example2_problem(c.mu);
    case Example::Custom:
        break;
    }
    ProblemSpec p = *c.custom_problem;
    p.mu = c.mu;
    return p;
}

std::string fom_cache_key(const ExperimentConfig& c) {
    const std::string text = "example=" + std::to_string(static_cast<int>(c.example)) + ";mu=" + csv::fmt(c.mu) +
                             ";n_time=" + std::to_string(c.n_time) + ";n_space=" + std::to_string(c.n_space) +
                             ";quad=" + std::to_string(c.quad_order) + ";sub=" + std::to_string(c.subdivision);
    std::uint64_t hash = 14695981039346656037ull;
    for (const unsigned char ch : text) {
        hash ^= ch;
        hash *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
    return buf;
}

namespace {

std::ofstream open_output(const fs::path& path) {
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    return out;
}

void close_output(std::ofstream& out, const fs::path& path) {
    out.close();
    if (!out) throw IoError("error while writing " + path.string());
}

void write_singular_values(const fs::path& path, const CompositeProjection& space_first,
                           const CompositeProjection& time_first) {
    std::ofstream out = open_output(path);
    out << "k,q_hat,s_hat,sigma_x,sigma_ring_x_space_projected,sigma_ring_x,sigma_x_time_projected\n";
    const Vector& a = space_first.space_basis.sigma;
    const Vector& b = space_first.time_basis.sigma_ic;
    const Vector& c = time_first.time_basis.sigma_ic;
    const Vector& d = time_first.space_basis.sigma;
    for (Index k = 0; k < a.size(); ++k) {
        out << (k + 1) << ',' << space_first.space_basis.q_hat << ',' << space_first.time_basis.s_hat << ','
            << csv::fmt(a(k)) << ',' << csv::fmt(b(k)) << ',' << csv::fmt(c(k)) << ',' << csv::fmt(d(k)) << '\n';
    }
    close_output(out, path);
}

// Nodal value at (time node j, space node k); zero on the Dirichlet boundary.
double nodal(const Matrix& x, Index j, Index k, Index n_space) {
    return (k == 0 || k == n_space - 1) ? 0.0 : x(k - 1, j);
}

void write_fields(const fs::path& path, const CoefficientField& fom, const CoefficientField& projected,
                  const CoefficientField& rom) {
    std::ofstream out = open_output(path);
    out << "tau,xi,fom,projection_error,rom_error\n";
    const Grid1D& tg = fom.time_grid();
    const Grid1D& sg = fom.space_grid();
    for (Index j = 0; j < tg.n_nodes(); ++j) {
        for (Index k = 0; k < sg.n_nodes(); ++k) {
            const double x = nodal(fom.coeffs(), j, k, sg.n_nodes());
            const double p = nodal(projected.coeffs(), j, k, sg.n_nodes());
            const double r = nodal(rom.coeffs(), j, k, sg.n_nodes());
            out << csv::fmt(tg.node(j)) << ',' << csv::fmt(sg.node(k)) << ',' << csv::fmt(x) << ','
                << csv::fmt(x - p) << ',' << csv::fmt(x - r) << '\n';
        }
    }
    close_output(out, path);
}

struct Task {
    ProjectionOrder order;
    SweepPoint point;
};

SweepOutcome run_point(const Task& task, const CoefficientField& fom, const SpaceTimeSystem& fom_system,
                       const GramianSet& g, double c_rho_t_value) {
    const CompositeProjection proj = project_composite(fom, task.order, task.point.q_hat, task.point.s_hat, g);
    const SpaceTimeSystem rom_system =
        assemble_rom(g, proj.space_basis, proj.time_basis, fom_system.rhs, fom_system.initial);
    const RomSolution rom =
        solve_rom(rom_system, proj.space_basis, proj.time_basis, fom.time_grid(), fom.space_grid());
    SweepOutcome out;
    out.report = make_report(fom, proj, &rom, fom_system.initial, g, c_rho_t_value);
    out.checks = verify_bounds(out.report);
    return out;
}

int worker_count(int requested, size_t tasks) {
    int n = requested;
    if (n == 0) n = static_cast<int>(std::min(8u, std::max(1u, std::thread::hardware_concurrency())));
    return static_cast<int>(std::min<size_t>(static_cast<size_t>(n), std::max<size_t>(tasks, 1)));
}

}  // namespace

RunSummary run_example(const ExperimentConfig& config) {
    validate(config);
    const ProblemSpec problem = problem_for(config);
    const Grid1D tg = build_uniform_grid(0.0, problem.final_time, config.n_time, BoundaryMode::AllNodes);
    const Grid1D sg = build_uniform_grid(problem.omega_a, problem.omega_b, config.n_space, BoundaryMode::ZeroDirichlet);
    const GramianSet g = assemble_gramians(tg, sg, problem.mu);

    const fs::path out_dir = config.output_dir;
    const fs::path cache_dir = config.cache_dir.empty() ? out_dir / "cache" : config.cache_dir;
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());

    FomOptions fom_options;
    fom_options.quad_order = config.quad_order;
    fom_options.subdivision = config.subdivision;
    const SpaceTimeSystem fom_system = assemble_fom(problem, g, tg, sg, fom_options);

    RunSummary summary;
    const bool cacheable = config.cache && config.example != Example::Custom;
    const fs::path cache_file = cache_dir / ("fom_" + fom_cache_key(config) + ".csv");
    CoefficientField fom;
    double fom_condition = 0.0;
    if (cacheable && fs::exists(cache_file)) {
        try {
            fom = load_field_csv(cache_file);
            summary.cache_hit = fom.time_grid() == tg && fom.space_grid() == sg;
        } catch (const std::exception&) {
            summary.cache_hit = false;
        }
    }
    if (!summary.cache_hit) {
        const SolveResult solved = solve_space_time(fom_system, SolverKind::Modal, true);
        fom = CoefficientField(solved.coeffs, tg, sg);
        fom_condition = solved.condition_estimate;
        if (cacheable) {
            fs::create_directories(cache_dir, ec);
            if (ec) throw IoError("cannot create " + cache_dir.string() + ": " + ec.message());
            try {
                save_field_csv(cache_file, fom);
            } catch (const std::exception& e) {
                throw IoError(e.what());
            }
        }
    }
    const double fom_residual = fom_system.residual_max(fom.coeffs());
    const double c_value = c_rho_t(g);

    // sweep
    std::vector<Task> tasks;
    for (ProjectionOrder order : config.orders) {
        for (const SweepPoint& p : config.sweep) tasks.push_back({order, p});
    }
    summary.outcomes.resize(tasks.size());
    std::atomic<size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto work = [&] {
        for (size_t i = next++; i < tasks.size(); i = next++) {
            try {
                summary.outcomes[i] = run_point(tasks[i], fom, fom_system, g, c_value);
            } catch (...) {
                std::lock_guard<std::mutex> lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    const int workers = worker_count(config.jobs, tasks.size());
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (std::thread& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);

    std::vector<ErrorReport> reports;
    for (const SweepOutcome& o : summary.outcomes) {
        reports.push_back(o.report);
        if (!hard_checks_pass(o.checks)) ++summary.hard_failures;
    }
    summary.stability = effective_c_stability(reports, config.stability_factor);

    {
        const fs::path path = out_dir / "errors.csv";
        std::ofstream out = open_output(path);
        out << report_csv_header() << '\n';
        for (const ErrorReport& r : reports) out << report_csv_row(r) << '\n';
        close_output(out, path);
    }

    // single configured point: singular values, bases, fields
    const CompositeProjection space_first =
        project_composite(fom, ProjectionOrder::SpaceFirst, config.q_hat, config.s_hat, g);
    const CompositeProjection time_first =
        project_composite(fom, ProjectionOrder::TimeFirst, config.q_hat, config.s_hat, g);
    write_singular_values(out_dir / "singular_values.csv", space_first, time_first);
    const CompositeProjection& main =
        config.orders.front() == ProjectionOrder::SpaceFirst ? space_first : time_first;
    {
        const fs::path path = out_dir / "bases_space.csv";
        std::ofstream out = open_output(path);
        write_space_basis_csv(out, main.space_basis, sg);
        close_output(out, path);
    }
    {
        const fs::path path = out_dir / "bases_time.csv";
        std::ofstream out = open_output(path);
        write_time_basis_csv(out, main.time_basis, tg);
        close_output(out, path);
    }
    const RomSolution main_rom =
        solve_rom(assemble_rom(g, main.space_basis, main.time_basis, fom_system.rhs, fom_system.initial),
                  main.space_basis, main.time_basis, tg, sg);
    write_fields(out_dir / "fields.csv", fom, main.projected, main_rom.lifted);

    summary.exit_code = summary.hard_failures > 0 ? 1 : 0;

    const fs::path log_path = out_dir / "diagnostics.log";
    std::ofstream log = open_output(log_path);
    const char* example_name = config.example == Example::Example1   ? "1"
                               : config.example == Example::Example2 ? "2"
                                                                     : "custom";
    log << "example=" << example_name << '\n'
        << "mu=" << csv::fmt(problem.mu) << '\n'
        << "n_time=" << config.n_time << '\n'
        << "n_space=" << config.n_space << '\n'
        << "q=" << g.q() << '\n'
        << "s=" << g.s() << '\n'
        << "quad_order=" << config.quad_order << '\n'
        << "subdivision=" << config.subdivision << '\n'
        << "fom_cache=" << (!cacheable ? "disabled" : summary.cache_hit ? "hit" : "miss") << '\n'
        << "fom_cache_file=" << (cacheable ? cache_file.string() : "") << '\n';
    if (!summary.cache_hit) log << "fom_condition_estimate=" << csv::fmt(fom_condition) << '\n';
    log << "fom_residual_max=" << csv::fmt(fom_residual) << '\n'
        << "rhs_max=" << csv::fmt(fom_system.rhs.cwiseAbs().maxCoeff()) << '\n'
        << "fom_norm=" << csv::fmt(sty_norm(fom, g)) << '\n'
        << "c_rho_t=" << csv::fmt(c_value) << '\n'
        << "c_rho_t_from_factor=" << csv::fmt(c_rho_t_from_factor(g)) << '\n';
    if (problem.exact_solution) log << "fom_l2_error=" << csv::fmt(l2_error(fom, *problem.exact_solution)) << '\n';
    for (const SweepOutcome& o : summary.outcomes) {
        const ErrorReport& r = o.report;
        log << "point=" << to_string(r.order) << ':' << r.q_hat << ':' << r.s_hat
            << " rom_condition_estimate=" << csv::fmt(r.flags.rom_condition) << " flags=" << r.flags.to_string();
        for (const CheckResult& c : o.checks) {
            log << ' ' << c.name << '=' << (!c.evaluated ? "skipped" : c.passed ? "pass" : "FAIL");
        }
        log << '\n';
    }
    log << "effective_C_points=" << summary.stability.used << '\n'
        << "effective_C_min=" << csv::fmt(summary.stability.min_c) << '\n'
        << "effective_C_max=" << csv::fmt(summary.stability.max_c) << '\n'
        << "effective_C_ratio=" << csv::fmt(summary.stability.ratio) << '\n'
        << "effective_C_stable=" << (summary.stability.passed ? "true" : "false") << '\n'
        << "hard_failures=" << summary.hard_failures << '\n'
        << "exit_code=" << summary.exit_code << '\n';
    close_output(log, log_path);
    return summary;
}

}  // namespace stpod
