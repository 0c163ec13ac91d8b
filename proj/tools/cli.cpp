#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <ctime>
#include <fstream>
#include <iostream>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "CLI11.hpp"
#include "json.hpp"
#include "selfsim/errors.hpp"
#include "selfsim/evolve.hpp"
#include "selfsim/exact.hpp"
#include "selfsim/format.hpp"
#include "selfsim/hilbert.hpp"
#include "selfsim/solver.hpp"
#include "suites.hpp"

namespace selfsim::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Common {
    int threads = 0;
};

struct ExactArgs {
    double alpha = 0.5;
    std::size_t grid_n = kDefaultGridNodes;
    double y_min = kDefaultYMin;
    double y_max = kDefaultYMax;
    std::string out = "exact.csv";
};

struct SolveArgs {
    double alpha = 0.5;
    double a = 0.0;
    double tol = 1e-10;
    std::size_t grid_n = kDefaultGridNodes;
    int max_iterations = 50;
    std::string out = "solve.json";
};

struct ContinueArgs {
    double alpha = 0.5;
    double a_max = 0.04;
    int steps = 4;
    double step = 0.005;
    double tol = 1e-10;
    std::size_t grid_n = kDefaultGridNodes;
    std::string out = "continue.csv";
};

struct EvolveArgs {
    double alpha = 0.5;
    double a = 0.0;
    double t_end = 0.5;
    double dt_max = 0.005;
    std::vector<double> snapshots;
    std::size_t n = kDefaultEvolutionNodes;
    std::size_t grid_n = kDefaultGridNodes;
    double tol = 1e-10;
    std::string out_dir = "evolve_out";
};

struct VerifyArgs {
    std::string suite;
    std::uint64_t seed = 7;
    std::size_t grid_n = kDefaultGridNodes;
    std::size_t samples = 10000;
    std::size_t probes = 20;
    std::size_t count = 0;  // 0: suite default
    std::string out;
};

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

fs::path directory_of(const fs::path& file) {
    const fs::path dir = file.parent_path();
    return dir.empty() ? fs::path(".") : dir;
}

std::ofstream open_output(const fs::path& path) {
    fs::create_directories(directory_of(path));
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
    return out;
}

void write_json(const fs::path& path, const json& j) { open_output(path) << j.dump(2) << '\n'; }

void write_table(const fs::path& path, const Table& table) {
    std::ofstream out = open_output(path);
    for (std::size_t i = 0; i < table.header.size(); ++i) out << (i ? "," : "") << table.header[i];
    out << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
        out << '\n';
    }
}

json log_grid(double alpha, std::size_t n, double y_min, double y_max) {
    return {{"kind", "log_uniform_tilde"}, {"alpha", alpha}, {"n", n}, {"y_min", y_min}, {"y_max", y_max}};
}

// One manifest per output directory, overwritten by later runs into the same directory.
void write_manifest(const fs::path& dir, const std::string& command, const json& flags, const json& seed,
                    const json& grid) {
    json m = {{"command", command}, {"flags", flags}, {"seed", seed},          {"grid", grid},
              {"version", kToolVersion}, {"timestamp", timestamp()}};
    write_json(dir / "manifest.json", m);
}

int cmd_exact(const ExactArgs& o, const Common& c) {
    const GridPtr grid = make_grid(o.alpha, o.grid_n, o.y_min, o.y_max);
    const ExactProfile ex = exact_profile(o.alpha, grid);
    Table t{{"y", "W", "HW"}, {}};
    for (std::size_t i = 0; i < grid->size(); ++i) {
        t.rows.push_back({format_double(grid->nodes[i]), format_double(ex.w[i]), format_double(ex.hw[i])});
    }
    write_table(o.out, t);
    const json flags = {{"alpha", o.alpha}, {"grid-n", o.grid_n}, {"y-min", o.y_min},
                        {"y-max", o.y_max}, {"out", o.out},       {"threads", c.threads}};
    write_manifest(directory_of(o.out), "exact", flags, nullptr, log_grid(o.alpha, o.grid_n, o.y_min, o.y_max));
    return kSuccess;
}

void write_profile_csv(const fs::path& path, const ProfileSolution& p) {
    const GridFunction w = p.alpha * p.omega;
    const GridFunction hw = apply_fractional_hilbert(w, 1.0 / p.alpha);
    Table t{{"y", "W", "HW"}, {}};
    const Grid& g = w.grid();
    for (std::size_t i = 0; i < g.size(); ++i) {
        t.rows.push_back({format_double(g.nodes[i]), format_double(w[i]), format_double(hw[i])});
    }
    write_table(path, t);
}

int cmd_solve(const SolveArgs& o, const Common& c) {
    SolverConfig cfg;
    cfg.grid_n = o.grid_n;
    cfg.tolerance = o.tol;
    cfg.max_iterations = o.max_iterations;
    const ProfileSolution p = solve_profile(o.a, o.alpha, cfg);

    const fs::path out(o.out);
    fs::path csv = out;
    csv.replace_extension(".profile.csv");
    write_profile_csv(csv, p);
    const json report = {{"alpha", p.alpha},
                         {"a", p.a},
                         {"lambda", p.lambda},
                         {"residual_l2", p.residual_l2},
                         {"iterations", p.iterations},
                         {"status", to_string(p.status)},
                         {"history", p.history},
                         {"W_slope_at_zero", p.alpha * p.omega.slope_at_zero()},
                         {"grid", log_grid(o.alpha, cfg.grid_n, cfg.y_min, cfg.y_max)},
                         {"profile_csv", csv.string()}};
    write_json(out, report);
    const json flags = {{"alpha", o.alpha}, {"a", o.a},     {"tol", o.tol},        {"grid-n", o.grid_n},
                        {"max-iterations", o.max_iterations}, {"out", o.out}, {"threads", c.threads}};
    write_manifest(directory_of(out), "solve", flags, nullptr, log_grid(o.alpha, cfg.grid_n, cfg.y_min, cfg.y_max));
    if (!p.ok()) {
        std::cerr << "solve: " << to_string(p.status) << ": " << p.message << '\n';
        return kVerificationFailure;
    }
    return kSuccess;
}

int cmd_continue(const ContinueArgs& o, const Common& c) {
    if (o.steps < 1) throw ParameterError("continue: --steps must be >= 1");
    if (!(o.a_max > 0.0)) throw ParameterError("continue: --a-max must be positive");
    SolverConfig cfg;
    cfg.grid_n = o.grid_n;
    cfg.tolerance = o.tol;
    cfg.step = o.step;
    std::vector<double> targets{0.0};
    for (int k = 1; k <= o.steps; ++k) {
        const double a = o.a_max * k / o.steps;
        targets.push_back(a);
        targets.push_back(-a);
    }
    std::vector<ProfileSolution> sols = continuation(targets, o.alpha, cfg);
    std::sort(sols.begin(), sols.end(), [](const auto& l, const auto& r) { return l.a < r.a; });

    Table t{{"a", "lambda", "residual", "iterations"}, {}};
    bool all_ok = sols.size() == targets.size();
    for (const auto& s : sols) {
        t.rows.push_back({format_double(s.a), format_double(s.lambda), format_double(s.residual_l2),
                          std::to_string(s.iterations)});
        all_ok = all_ok && s.ok();
    }
    write_table(o.out, t);
    const json flags = {{"alpha", o.alpha}, {"a-max", o.a_max}, {"steps", o.steps},   {"step", o.step},
                        {"tol", o.tol},     {"grid-n", o.grid_n}, {"out", o.out}, {"threads", c.threads}};
    write_manifest(directory_of(o.out), "continue", flags, nullptr,
                   log_grid(o.alpha, cfg.grid_n, cfg.y_min, cfg.y_max));
    if (!all_ok) {
        std::cerr << "continue: sweep stopped before reaching every target\n";
        return kVerificationFailure;
    }
    return kSuccess;
}

std::string snapshot_name(std::size_t i) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "snapshot_%03zu.csv", i);
    return buf;
}

int cmd_evolve(const EvolveArgs& o, const Common& c) {
    SolverConfig sc;
    sc.grid_n = o.grid_n;
    sc.tolerance = o.tol;
    const ProfileSolution p = solve_profile(o.a, o.alpha, sc);
    if (!p.ok()) {
        std::cerr << "evolve: profile solve failed: " << p.message << '\n';
        return kVerificationFailure;
    }

    EvolveConfig ec;
    ec.n = o.n;
    ec.dt_max = o.dt_max;
    ec.snapshot_times = o.snapshots;
    ec.alpha = o.alpha;
    ec.decay = profile_decay(p);
    const EvolutionGridPtr grid = make_evolution_grid(o.n);
    const std::vector<double> w0 = sample_on(*grid, [&p](double x) { return profile_value(p, x); });
    const Trajectory traj = evolve(grid, w0, o.a, o.t_end, ec);
    const CollapseReport collapse = check_self_similar_collapse(traj, p);
    const BlowupEstimate blowup = detect_blowup(traj);

    const fs::path dir(o.out_dir);
    fs::create_directories(dir);
    json table = json::array();
    for (std::size_t s = 0; s < traj.times.size(); ++s) {
        Table t{{"x", "w"}, {}};
        for (std::size_t j = 0; j < grid->size(); ++j) {
            t.rows.push_back({format_double(grid->x[j]), format_double(traj.snapshots[s][j])});
        }
        write_table(dir / snapshot_name(s), t);
        table.push_back({{"t", traj.times[s]},
                         {"sup_norm", traj.sup_norms[s]},
                         {"collapse_deviation", collapse.deviations[s]},
                         {"file", snapshot_name(s)}});
    }
    const json summary = {{"alpha", o.alpha},
                          {"a", o.a},
                          {"lambda", p.lambda},
                          {"t_end", o.t_end},
                          {"steps", traj.steps},
                          {"termination", traj.termination},
                          {"sup_norm", table},
                          {"T_star", blowup.conclusive ? json(blowup.t_star) : json(nullptr)},
                          {"T_star_fit_quality", blowup.fit_quality},
                          {"T_star_note", blowup.reason},
                          {"grid", {{"kind", "tan_theta"}, {"n", o.n}}}};
    write_json(dir / "summary.json", summary);
    const json flags = {{"alpha", o.alpha},   {"a", o.a},     {"t-end", o.t_end},   {"dt-max", o.dt_max},
                        {"snapshots", o.snapshots}, {"n", o.n}, {"grid-n", o.grid_n}, {"tol", o.tol},
                        {"out-dir", o.out_dir}, {"threads", c.threads}};
    const json grids = {{"evolution", {{"kind", "tan_theta"}, {"n", o.n}}},
                        {"profile", log_grid(o.alpha, sc.grid_n, sc.y_min, sc.y_max)}};
    write_manifest(dir, "evolve", flags, nullptr, grids);
    return kSuccess;
}

int cmd_verify(const VerifyArgs& o, const Common& c) {
    SuiteResult res;
    json grid = nullptr;
    if (o.suite == "kernel") {
        res = run_kernel_suite(o.seed, o.samples);
    } else if (o.suite == "hilbert") {
        res = run_hilbert_suite(o.seed, o.grid_n, o.probes);
        grid = {{"kind", "log_uniform_tilde"}, {"n", o.grid_n}, {"y_min", kDefaultYMin}, {"y_max", kDefaultYMax}};
    } else if (o.suite == "hardy") {
        res = run_hardy_suite(o.seed, o.grid_n, o.count ? o.count : 50);
        grid = log_grid(1.0, o.grid_n, kDefaultYMin, kDefaultYMax);
    } else {
        res = run_linop_suite(o.seed, o.grid_n, o.count ? o.count : 10);
        grid = {{"kind", "log_uniform_tilde"}, {"n", o.grid_n}, {"y_min", kDefaultYMin}, {"y_max", kDefaultYMax}};
    }
    const fs::path out = o.out.empty() ? fs::path(o.suite + ".csv") : fs::path(o.out);
    write_table(out, res.table);
    const json flags = {{"suite", o.suite}, {"seed", o.seed},   {"grid-n", o.grid_n}, {"samples", o.samples},
                        {"probes", o.probes}, {"count", o.count}, {"out", out.string()}, {"threads", c.threads}};
    write_manifest(directory_of(out), "verify", flags, o.seed, grid);

    const std::size_t failed = res.report.failures();
    std::cout << o.suite << ": " << res.report.entries.size() - failed << '/' << res.report.entries.size()
              << " checks passed\n";
    for (const auto& e : res.report.entries) {
        if (!e.passed) std::cout << "  FAIL " << e.name << " measured " << format_double(e.measured) << '\n';
    }
    return failed == 0 ? kSuccess : kVerificationFailure;
}

bool has_flag(const std::vector<std::string>& args, const std::string& flag) {
    return std::any_of(args.begin(), args.end(),
                       [&](const std::string& a) { return a == flag || a.rfind(flag + "=", 0) == 0; });
}

}  // namespace

std::map<std::string, std::string> read_config_file(const fs::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read config file " + path.string());
    std::map<std::string, std::string> out;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = trim(line.substr(0, line.find('#')));
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": expected key=value");
        }
        std::string key = trim(line.substr(0, eq));
        if (key.rfind("--", 0) == 0) key = key.substr(2);
        out[key] = trim(line.substr(eq + 1));
    }
    return out;
}

std::vector<std::string> merge_config(const std::vector<std::string>& args) {
    std::vector<std::string> rest;
    std::string config;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config") {
            if (i + 1 >= args.size()) throw CLI::ArgumentMismatch("--config needs a path");
            config = args[++i];
        } else if (args[i].rfind("--config=", 0) == 0) {
            config = args[i].substr(9);
        } else {
            rest.push_back(args[i]);
        }
    }
    if (config.empty()) return rest;
    for (const auto& [key, value] : read_config_file(config)) {
        if (has_flag(rest, "--" + key)) continue;
        rest.push_back("--" + key);
        rest.push_back(value);
    }
    return rest;
}

int run(const std::vector<std::string>& raw_args) {
    CLI::App app{"Self-similar blow-up profiles for the generalized De Gregorio model", "selfsim"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kToolVersion);
    app.footer("Global: --config <file> supplies key=value defaults; command-line flags win.");

    Common common;
    ExactArgs ex;
    SolveArgs so;
    ContinueArgs co;
    EvolveArgs ev;
    VerifyArgs ve;

    auto threads = [&](CLI::App* sub) {
        sub->add_option("--threads", common.threads, "Worker threads (0 = auto)")->check(CLI::NonNegativeNumber);
    };

    CLI::App* exact = app.add_subcommand("exact", "Write the explicit a = 0 profile as CSV y,W,HW");
    exact->add_option("--alpha", ex.alpha, "Hoelder exponent in (0, 1]")->required();
    exact->add_option("--grid-n", ex.grid_n, "Grid nodes")->capture_default_str();
    exact->add_option("--y-min", ex.y_min, "Smallest node")->capture_default_str();
    exact->add_option("--y-max", ex.y_max, "Largest node")->capture_default_str();
    exact->add_option("--out", ex.out, "Output CSV")->capture_default_str();
    threads(exact);

    CLI::App* solve = app.add_subcommand("solve", "Solve for the profile and lambda at one a");
    solve->add_option("--alpha", so.alpha, "Hoelder exponent in (0, 1]")->required();
    solve->add_option("--a", so.a, "Advection parameter")->required();
    solve->add_option("--tol", so.tol, "Residual tolerance (discrete L2)")->capture_default_str();
    solve->add_option("--grid-n", so.grid_n, "Grid nodes")->capture_default_str();
    solve->add_option("--max-iterations", so.max_iterations, "Chord iteration cap")->capture_default_str();
    solve->add_option("--out", so.out, "Output JSON; the profile goes to <stem>.profile.csv")->capture_default_str();
    threads(solve);

    CLI::App* cont = app.add_subcommand("continue", "Sweep a over [-a_max, a_max] by continuation");
    cont->add_option("--alpha", co.alpha, "Hoelder exponent in (0, 1]")->capture_default_str();
    cont->add_option("--a-max", co.a_max, "Largest |a|")->required();
    cont->add_option("--steps", co.steps, "Targets per sign")->required();
    cont->add_option("--step", co.step, "Largest continuation step in a*alpha")->capture_default_str();
    cont->add_option("--tol", co.tol, "Residual tolerance")->capture_default_str();
    cont->add_option("--grid-n", co.grid_n, "Grid nodes")->capture_default_str();
    cont->add_option("--out", co.out, "Output CSV a,lambda,residual,iterations")->capture_default_str();
    threads(cont);

    CLI::App* evo = app.add_subcommand("evolve", "Evolve the solved profile as initial datum");
    evo->add_option("--alpha", ev.alpha, "Hoelder exponent in (0, 1]")->required();
    evo->add_option("--a", ev.a, "Advection parameter")->required();
    evo->add_option("--t-end", ev.t_end, "Final time (< 1)")->capture_default_str();
    evo->add_option("--dt-max", ev.dt_max, "Largest RK4 step")->capture_default_str();
    evo->add_option("--snapshots", ev.snapshots, "Snapshot times t1,t2,...")->delimiter(',');
    evo->add_option("--n", ev.n, "Evolution lattice size (nodes n-1)")->capture_default_str();
    evo->add_option("--grid-n", ev.grid_n, "Profile grid nodes")->capture_default_str();
    evo->add_option("--tol", ev.tol, "Profile residual tolerance")->capture_default_str();
    evo->add_option("--out-dir", ev.out_dir, "Output directory")->capture_default_str();
    threads(evo);

    CLI::App* ver = app.add_subcommand("verify", "Run a verification suite and write its table");
    ver->add_option("--suite", ve.suite, "kernel, hilbert, hardy or linop")
        ->required()
        ->check(CLI::IsMember({"kernel", "hilbert", "hardy", "linop"}));
    ver->add_option("--seed", ve.seed, "Seed for the sampled functions")->capture_default_str();
    ver->add_option("--grid-n", ve.grid_n, "Grid nodes")->capture_default_str();
    ver->add_option("--samples", ve.samples, "Kernel samples")->capture_default_str();
    ver->add_option("--probes", ve.probes, "Probes per r for the L2 estimate")->capture_default_str();
    ver->add_option("--count", ve.count, "Functions per family (0 = suite default)")->capture_default_str();
    ver->add_option("--out", ve.out, "Output CSV (default <suite>.csv)");
    threads(ver);

    std::vector<std::string> args;
    try {
        args = merge_config(raw_args);
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "error: " << e.what() << "\n\n" << app.help();
        return kUsageError;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n\n" << app.help();
        return kUsageError;
    }

#ifdef _OPENMP
    if (common.threads > 0) omp_set_num_threads(common.threads);
#endif

    try {
        if (*exact) return cmd_exact(ex, common);
        if (*solve) return cmd_solve(so, common);
        if (*cont) return cmd_continue(co, common);
        if (*evo) return cmd_evolve(ev, common);
        return cmd_verify(ve, common);
    } catch (const ParameterError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsageError;
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kUsageError;
    } catch (const std::exception& e) {
        std::cerr << "failure: " << e.what() << '\n';
        return kVerificationFailure;
    }
}

}  // namespace selfsim::cli
