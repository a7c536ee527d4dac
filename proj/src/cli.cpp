#include "csfs/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "csfs/applications.hpp"
#include "csfs/io.hpp"

namespace csfs {

namespace {

using nlohmann::json;

struct CommonOpts {
    std::string kernel = "laplace";
    std::string method = "csfmm";
    double mac = 0.7;
    int degree = 6;
    int n0 = -1;
    int threads = 0;
    unsigned seed = 0;
    bool stats = false;
    SalParams sal;
};

void add_common(CLI::App* cmd, CommonOpts& opt, bool with_kernel = true) {
    if (with_kernel)
        cmd->add_option("--kernel", opt.kernel, "laplace|biharmonic|biot_savart|sal");
    cmd->add_option("--method", opt.method, "direct|cstc|csfmm");
    cmd->add_option("--mac", opt.mac, "multipole acceptance parameter in (0,1]");
    cmd->add_option("--degree", opt.degree, "interpolation degree n");
    cmd->add_option("--n0", opt.n0, "maximum leaf size (default 4n^2)");
    cmd->add_option("--threads", opt.threads, "worker threads, 0 = all, 1 = serial");
    cmd->add_option("--seed", opt.seed, "seed recorded in reports");
    cmd->add_flag("--stats", opt.stats, "include tree statistics in the report");
    cmd->add_option("--sal-a1", opt.sal.a1, "SAL fit coefficient a1");
    cmd->add_option("--sal-b0", opt.sal.b0, "SAL fit coefficient b0");
    cmd->add_option("--sal-b1", opt.sal.b1, "SAL fit coefficient b1");
    cmd->add_option("--rho-ratio", opt.sal.rho_ratio, "seawater/Earth mean density ratio");
}

Kernel make_kernel(const CommonOpts& opt) {
    try {
        return Kernel::parse(opt.kernel, opt.sal);
    } catch (const std::invalid_argument& e) {
        throw_cli("E_KERNEL", e.what());
    }
}

TraversalConfig make_config(const CommonOpts& opt) {
    TraversalConfig cfg;
    try {
        cfg.method = parse_method(opt.method);
    } catch (const std::invalid_argument& e) {
        throw_cli("E_CONFIG", e.what());
    }
    if (opt.mac <= 0.0 || opt.mac > 1.0) throw_cli("E_CONFIG", "mac must lie in (0, 1]");
    if (opt.degree < 1) throw_cli("E_CONFIG", "degree must be positive");
    cfg.mac = opt.mac;
    cfg.degree = opt.degree;
    cfg.n0 = opt.n0;
    cfg.threads = opt.threads;
    return cfg;
}

SphericalGrid parse_grid_spec(const std::string& spec) {
    const std::size_t colon = spec.find(':');
    if (colon == std::string::npos)
        throw_cli("E_CONFIG", "grid spec must look like kind:level, got '" + spec + "'");
    try {
        const GridKind kind = parse_grid_kind(spec.substr(0, colon));
        const int level = std::stoi(spec.substr(colon + 1));
        return build_grid(kind, level);
    } catch (const std::invalid_argument& e) {
        throw_cli("E_CONFIG", e.what());
    }
}

double y43(const Vec3& p) { return real_sph_harm(4, 3, p); }

// Band-limited synthetic sea surface height for demo runs without input data.
double synthetic_ssh(const Vec3& p) {
    return real_sph_harm(2, 1, p) + real_sph_harm(5, 3, p) + real_sph_harm(8, 2, p) +
           real_sph_harm(12, 4, p);
}

json timings_json(const SumStats& s) {
    return {{"tree_build", s.t_tree_build}, {"upward", s.t_upward}, {"traversal", s.t_traversal},
            {"downward", s.t_downward},     {"total", s.t_total}};
}

json interactions_json(const SumStats& s) {
    return {{"pp", s.pp}, {"pc", s.pc}, {"cp", s.cp}, {"cc", s.cc}};
}

json tree_json(const TreeStats& t) {
    return {{"depth", t.depth},
            {"cluster_count", t.cluster_count},
            {"leaf_count", t.leaf_count},
            {"leaf_size_histogram", t.leaf_size_histogram}};
}

json environment_json(const CommonOpts& opt) {
    json env = {{"compiler", __VERSION__}, {"seed", opt.seed}, {"threads", opt.threads}};
#ifdef _OPENMP
    env["openmp"] = true;
#else
    env["openmp"] = false;
#endif
    return env;
}

void emit_report(const json& report, const std::string& path) {
    if (!path.empty()) {
        std::ofstream out(path);
        if (!out) throw_cli("E_IO", "cannot open report file: " + path);
        out << report.dump(2) << '\n';
    }
    std::cout << report.dump(2) << std::endl;
}

int cmd_grid(const std::string& kind, int level, const std::string& out) {
    SphericalGrid grid;
    try {
        grid = build_grid(parse_grid_kind(kind), level);
    } catch (const std::invalid_argument& e) {
        throw_cli("E_CONFIG", e.what());
    }
    write_grid_csv(out, grid);
    json report = {{"subcommand", "grid"}, {"kind", kind}, {"level", level}, {"N", grid.size()}};
    std::cout << report.dump(2) << std::endl;
    return 0;
}

struct SumInputs {
    ParticleSet particles;
    std::vector<double> areas;  // quadrature weights for the error metric
};

SumInputs load_sum_inputs(const std::string& grid_spec, const std::string& particles_file) {
    if (grid_spec.empty() == particles_file.empty())
        throw_cli("E_FLAGS", "exactly one of --grid and --particles is required");
    SumInputs in;
    if (!grid_spec.empty()) {
        const SphericalGrid grid = parse_grid_spec(grid_spec);
        in.particles.positions = grid.centers;
        in.particles.weights.resize(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i)
            in.particles.weights[i] = y43(grid.centers[i]) * grid.areas[i];
        in.areas = grid.areas;
    } else {
        in.particles = read_particles_csv(particles_file);
        in.areas.assign(in.particles.size(), 1.0);
    }
    return in;
}

int cmd_sum(const CommonOpts& opt, const std::string& grid_spec, const std::string& particles_file,
            const std::string& reference, const std::string& out, const std::string& report_path) {
    const Kernel kernel = make_kernel(opt);
    const TraversalConfig cfg = make_config(opt);
    const SumInputs in = load_sum_inputs(grid_spec, particles_file);

    SumStats stats;
    const PotentialField phi = summed_potential(in.particles, in.particles, kernel, cfg, &stats);

    json report = {{"subcommand", "sum"},
                   {"N", in.particles.size()},
                   {"kernel", std::string(kernel.name())},
                   {"method", method_name(cfg.method)},
                   {"mac", cfg.mac},
                   {"degree", cfg.degree},
                   {"n0", cfg.resolved_n0()},
                   {"timings", timings_json(stats)},
                   {"interactions", interactions_json(stats)},
                   {"environment", environment_json(opt)}};
    if (opt.stats) {
        report["tree"] = tree_json(stats.source_tree);
        if (cfg.method == Method::Csfmm) report["target_tree"] = tree_json(stats.target_tree);
    }

    if (!reference.empty()) {
        PotentialField ref;
        if (reference == "direct") {
            ref = direct_sum(in.particles, in.particles, kernel, cfg.threads);
        } else {
            ref = read_potentials_csv(reference, in.particles.size());
            if (ref.out_dim != phi.out_dim)
                throw_cli("E_DIM", "reference output dimension does not match the kernel");
        }
        report["relative_l2_error"] =
            relative_l2_error(phi.values, ref.values, ref.values, in.areas, phi.out_dim);
    }

    if (!out.empty()) write_potentials_csv(out, in.particles.positions, phi);
    emit_report(report, report_path);
    return 0;
}

int cmd_solve(const CommonOpts& opt, const std::string& grid_spec, const std::string& field_file,
              const std::string& source, const std::string& out, const std::string& report_path) {
    const Kernel kernel = make_kernel(opt);
    if (kernel.kind != KernelKind::Laplace && kernel.kind != KernelKind::Biharmonic)
        throw_cli("E_KERNEL", "solve supports the laplace and biharmonic kernels");
    const TraversalConfig cfg = make_config(opt);

    ScalarFieldOnGrid field;
    bool have_exact = false;
    double eigenvalue = kernel.kind == KernelKind::Laplace ? 20.0 : 400.0;  // n(n+1), n^2(n+1)^2 at n=4
    if (grid_spec.empty() == field_file.empty())
        throw_cli("E_FLAGS", "exactly one of --grid and --field is required");
    if (!grid_spec.empty()) {
        if (source != "y43") throw_cli("E_CONFIG", "unknown built-in source: " + source);
        const SphericalGrid grid = parse_grid_spec(grid_spec);
        field.points = grid.centers;
        field.areas = grid.areas;
        field.values.resize(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i) field.values[i] = y43(grid.centers[i]);
        have_exact = true;
    } else {
        field = read_field_csv(field_file);
    }

    SolveReport solve_report;
    const ScalarFieldOnGrid phi = solve_greens(field, kernel, cfg, &solve_report);

    json report = {{"subcommand", "solve"},
                   {"N", field.size()},
                   {"kernel", std::string(kernel.name())},
                   {"method", method_name(cfg.method)},
                   {"mac", cfg.mac},
                   {"degree", cfg.degree},
                   {"input_mean", solve_report.input_mean},
                   {"mean_warning", solve_report.mean_warning},
                   {"timings", timings_json(solve_report.sum)},
                   {"interactions", interactions_json(solve_report.sum)},
                   {"environment", environment_json(opt)}};
    if (solve_report.mean_warning)
        std::cerr << "warning: Laplace data field has nonzero mean " << solve_report.input_mean
                  << std::endl;
    if (have_exact) {
        std::vector<double> exact(field.size());
        for (std::size_t i = 0; i < field.size(); ++i) exact[i] = field.values[i] / eigenvalue;
        report["relative_l2_error_vs_exact"] =
            relative_l2_error(phi.values, exact, exact, field.areas);
    }
    if (opt.stats) report["tree"] = tree_json(solve_report.sum.source_tree);

    if (!out.empty()) {
        PotentialField pf;
        pf.out_dim = 1;
        pf.values = phi.values;
        write_potentials_csv(out, phi.points, pf);
    }
    emit_report(report, report_path);
    return 0;
}

int cmd_bve(const CommonOpts& opt, const std::string& grid_spec, const std::string& initial,
            double dt, int steps, int cadence, bool tracer, bool no_remesh,
            const std::string& out_prefix, const std::string& report_path) {
    const TraversalConfig cfg = make_config(opt);
    if (dt <= 0.0 || steps < 0) throw_cli("E_CONFIG", "bve needs dt > 0 and steps >= 0");

    BveInit kind;
    if (initial == "rh" || initial == "rossby_haurwitz") kind = BveInit::RossbyHaurwitz;
    else if (initial == "gaussian") kind = BveInit::GaussianVortex;
    else throw_cli("E_CONFIG", "unknown initial condition: " + initial);

    const SphericalGrid grid = parse_grid_spec(grid_spec);
    BveState state = bve_initial(kind, grid, tracer);

    BveStepOptions step_opts;
    step_opts.traversal = cfg;
    step_opts.remesh = !no_remesh;

    const bool track_error = kind == BveInit::RossbyHaurwitz;
    json times = json::array(), errors = json::array();
    auto log_state = [&](int step) {
        if (track_error) {
            times.push_back(state.time);
            errors.push_back(bve_zeta_error(state));
        }
        if (!out_prefix.empty() && cadence > 0 && step % cadence == 0)
            write_bve_csv(out_prefix + "_" + std::to_string(step) + ".csv", state);
    };

    log_state(0);
    for (int s = 1; s <= steps; ++s) {
        bve_step(state, dt, step_opts);
        log_state(s);
    }

    json report = {{"subcommand", "bve"},
                   {"N", state.positions.size()},
                   {"initial", initial},
                   {"dt", dt},
                   {"steps", steps},
                   {"method", method_name(cfg.method)},
                   {"mac", cfg.mac},
                   {"degree", cfg.degree},
                   {"remesh", step_opts.remesh},
                   {"environment", environment_json(opt)}};
    if (track_error) {
        report["time"] = times;
        report["E_zeta"] = errors;
    }
    emit_report(report, report_path);
    return 0;
}

int cmd_sal(const CommonOpts& opt, const std::string& ssh_file, const std::string& grid_spec,
            const std::string& out, const std::string& report_path) {
    const TraversalConfig cfg = make_config(opt);
    if (ssh_file.empty() == grid_spec.empty())
        throw_cli("E_FLAGS", "exactly one of --ssh and --grid is required");

    ScalarFieldOnGrid ssh;
    if (!ssh_file.empty()) {
        ssh = read_field_csv(ssh_file);
    } else {
        const SphericalGrid grid = parse_grid_spec(grid_spec);
        ssh.points = grid.centers;
        ssh.areas = grid.areas;
        ssh.values.resize(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i) ssh.values[i] = synthetic_ssh(grid.centers[i]);
    }

    SumStats stats;
    const ScalarFieldOnGrid eta_sal = sal_potential(ssh, opt.sal, cfg, &stats);

    double in_norm = 0.0, out_norm = 0.0, total_area = 0.0;
    for (std::size_t i = 0; i < ssh.size(); ++i) {
        in_norm += ssh.values[i] * ssh.values[i] * ssh.areas[i];
        out_norm += eta_sal.values[i] * eta_sal.values[i] * ssh.areas[i];
        total_area += ssh.areas[i];
    }
    json report = {{"subcommand", "sal"},
                   {"N", ssh.size()},
                   {"method", method_name(cfg.method)},
                   {"mac", cfg.mac},
                   {"degree", cfg.degree},
                   {"rho_ratio", opt.sal.rho_ratio},
                   {"l2_norm_ratio", std::sqrt(out_norm / in_norm)},
                   {"timings", timings_json(stats)},
                   {"interactions", interactions_json(stats)},
                   {"environment", environment_json(opt)}};
    if (opt.stats) report["tree"] = tree_json(stats.source_tree);

    if (!out.empty()) write_field_csv(out, eta_sal);
    emit_report(report, report_path);
    return 0;
}

std::vector<int> parse_int_list(const std::string& csv, const char* what) {
    std::vector<int> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            out.push_back(std::stoi(item));
        } catch (const std::exception&) {
            throw_cli("E_FLAGS", std::string("bad ") + what + " list entry: " + item);
        }
    }
    if (out.empty()) throw_cli("E_FLAGS", std::string("empty ") + what + " list");
    return out;
}

int cmd_convergence(const CommonOpts& opt, const std::string& grid_kind,
                    const std::string& levels_csv, const std::string& degrees_csv,
                    const std::string& out_prefix) {
    const Kernel kernel = make_kernel(opt);
    if (kernel.kind != KernelKind::Laplace && kernel.kind != KernelKind::Biharmonic)
        throw_cli("E_KERNEL", "convergence supports the laplace and biharmonic kernels");
    const double eigenvalue = kernel.kind == KernelKind::Laplace ? 20.0 : 400.0;
    const std::vector<int> levels = parse_int_list(levels_csv, "level");
    GridKind kind;
    try {
        kind = parse_grid_kind(grid_kind);
    } catch (const std::invalid_argument& e) {
        throw_cli("E_CONFIG", e.what());
    }

    std::ofstream csv(out_prefix + ".csv");
    if (!csv) throw_cli("E_IO", "cannot open output file: " + out_prefix + ".csv");
    json report = {{"subcommand", "convergence"},
                   {"kernel", std::string(kernel.name())},
                   {"grid", grid_kind},
                   {"environment", environment_json(opt)}};

    if (!degrees_csv.empty()) {
        // Degree sweep at a fixed level: E_FS_DS as a function of n.
        if (levels.size() != 1) throw_cli("E_CONFIG", "degree sweep needs exactly one level");
        const std::vector<int> degrees = parse_int_list(degrees_csv, "degree");
        const SphericalGrid grid = build_grid(kind, levels[0]);
        ScalarFieldOnGrid field{grid.centers, grid.areas, {}};
        field.values.resize(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i) field.values[i] = y43(grid.centers[i]);

        TraversalConfig direct_cfg = make_config(opt);
        direct_cfg.method = Method::Direct;
        const ScalarFieldOnGrid ds = solve_greens(field, kernel, direct_cfg);
        std::vector<double> exact(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i) exact[i] = field.values[i] / eigenvalue;

        csv << "degree,N,E_FS_DS\n";
        json rows = json::array();
        for (int n : degrees) {
            TraversalConfig cfg = make_config(opt);
            cfg.degree = n;
            const ScalarFieldOnGrid fs = solve_greens(field, kernel, cfg);
            const double e_fs_ds = relative_l2_error(fs.values, ds.values, exact, grid.areas);
            csv << n << ',' << grid.size() << ',' << format_double(e_fs_ds) << '\n';
            rows.push_back({{"degree", n}, {"E_FS_DS", e_fs_ds}});
        }
        report["rows"] = rows;
        emit_report(report, out_prefix + ".json");
        return 0;
    }

    if (levels.size() < 2) throw_cli("E_CONFIG", "cannot fit a slope from fewer than 2 levels");
    csv << "level,N,E_DS_EX,E_FS_EX,E_FS_DS\n";
    std::vector<double> ns, e_ds, e_fs;
    json rows = json::array();
    for (int level : levels) {
        SphericalGrid grid;
        try {
            grid = build_grid(kind, level);
        } catch (const std::invalid_argument& e) {
            throw_cli("E_CONFIG", e.what());
        }
        ScalarFieldOnGrid field{grid.centers, grid.areas, {}};
        field.values.resize(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i) field.values[i] = y43(grid.centers[i]);
        std::vector<double> exact(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i) exact[i] = field.values[i] / eigenvalue;

        TraversalConfig direct_cfg = make_config(opt);
        direct_cfg.method = Method::Direct;
        const ScalarFieldOnGrid ds = solve_greens(field, kernel, direct_cfg);
        const ScalarFieldOnGrid fs = solve_greens(field, kernel, make_config(opt));

        const double e_ds_ex = relative_l2_error(ds.values, exact, exact, grid.areas);
        const double e_fs_ex = relative_l2_error(fs.values, exact, exact, grid.areas);
        const double e_fs_ds = relative_l2_error(fs.values, ds.values, exact, grid.areas);
        csv << level << ',' << grid.size() << ',' << format_double(e_ds_ex) << ','
            << format_double(e_fs_ex) << ',' << format_double(e_fs_ds) << '\n';
        rows.push_back({{"level", level},
                        {"N", grid.size()},
                        {"E_DS_EX", e_ds_ex},
                        {"E_FS_EX", e_fs_ex},
                        {"E_FS_DS", e_fs_ds}});
        ns.push_back(double(grid.size()));
        e_ds.push_back(e_ds_ex);
        e_fs.push_back(e_fs_ex);
    }
    report["rows"] = rows;
    report["E_DS_EX_slope"] = fit_loglog_slope(ns, e_ds);
    report["E_FS_EX_slope"] = fit_loglog_slope(ns, e_fs);
    emit_report(report, out_prefix + ".json");
    return 0;
}

int cmd_bench(const CommonOpts& opt, const std::string& grid_kind, const std::string& levels_csv,
              const std::string& methods_csv, const std::string& out_prefix) {
    const Kernel kernel = make_kernel(opt);
    const std::vector<int> levels = parse_int_list(levels_csv, "level");
    std::vector<std::string> methods;
    {
        std::stringstream ss(methods_csv);
        std::string item;
        while (std::getline(ss, item, ',')) methods.push_back(item);
    }
    GridKind kind;
    try {
        kind = parse_grid_kind(grid_kind);
    } catch (const std::invalid_argument& e) {
        throw_cli("E_CONFIG", e.what());
    }

    std::ofstream csv(out_prefix + ".csv");
    if (!csv) throw_cli("E_IO", "cannot open output file: " + out_prefix + ".csv");
    csv << "method,level,N,seconds\n";

    json rows = json::array();
    std::map<std::string, std::vector<double>> ns_by_method, t_by_method;
    for (int level : levels) {
        SphericalGrid grid;
        try {
            grid = build_grid(kind, level);
        } catch (const std::invalid_argument& e) {
            throw_cli("E_CONFIG", e.what());
        }
        ParticleSet particles;
        particles.positions = grid.centers;
        particles.weights.resize(grid.size());
        for (std::size_t i = 0; i < grid.size(); ++i)
            particles.weights[i] = y43(grid.centers[i]) * grid.areas[i];

        for (const std::string& m : methods) {
            TraversalConfig cfg = make_config(opt);
            try {
                cfg.method = parse_method(m);
            } catch (const std::invalid_argument& e) {
                throw_cli("E_CONFIG", e.what());
            }
            SumStats stats;
            summed_potential(particles, particles, kernel, cfg, &stats);  // warm-up
            std::vector<double> t(3);
            for (double& ti : t) {
                summed_potential(particles, particles, kernel, cfg, &stats);
                ti = stats.t_total;
            }
            std::sort(t.begin(), t.end());
            const double median = t[1];
            csv << m << ',' << level << ',' << grid.size() << ',' << format_double(median) << '\n';
            rows.push_back({{"method", m}, {"level", level}, {"N", grid.size()}, {"seconds", median}});
            ns_by_method[m].push_back(double(grid.size()));
            t_by_method[m].push_back(median);
        }
    }

    json report = {{"subcommand", "bench"},
                   {"kernel", std::string(kernel.name())},
                   {"grid", grid_kind},
                   {"rows", rows},
                   {"environment", environment_json(opt)}};
    json exponents;
    for (const auto& [m, ns] : ns_by_method)
        if (ns.size() >= 2) exponents[m] = fit_loglog_slope(ns, t_by_method[m]);
    report["exponents"] = exponents;
    emit_report(report, out_prefix + ".json");
    return 0;
}

}  // namespace

int cli_main(int argc, const char* const* argv) {
    CLI::App app{"Fast summation of pairwise particle interactions on the sphere"};
    app.require_subcommand(1);

    // grid
    std::string g_kind = "icosahedral", g_out;
    int g_level = 4;
    CLI::App* grid = app.add_subcommand("grid", "emit a sphere partition as CSV");
    grid->add_option("--kind", g_kind, "icosahedral|cubed_sphere|latlon");
    grid->add_option("--level", g_level, "refinement level");
    grid->add_option("-o,--out", g_out, "output CSV path")->required();

    // sum
    CommonOpts sum_opt;
    std::string s_grid, s_particles, s_reference, s_out, s_report;
    CLI::App* sum = app.add_subcommand("sum", "N-body summation benchmark");
    add_common(sum, sum_opt);
    sum->add_option("--grid", s_grid, "grid spec kind:level (weights from a built-in Y43 field)");
    sum->add_option("--particles", s_particles, "particle CSV (x,y,z,weight or lon,lat,area,value)");
    sum->add_option("--reference", s_reference, "'direct' or a potentials CSV to compare against");
    sum->add_option("-o,--out", s_out, "potentials CSV path");
    sum->add_option("--report", s_report, "report JSON path");

    // solve
    CommonOpts solve_opt;
    std::string v_grid, v_field, v_source = "y43", v_out, v_report;
    CLI::App* solve = app.add_subcommand("solve", "Green's-function Poisson/biharmonic solve");
    add_common(solve, solve_opt);
    solve->add_option("--grid", v_grid, "grid spec kind:level");
    solve->add_option("--field", v_field, "data field CSV (lon,lat,area,value)");
    solve->add_option("--source", v_source, "built-in data field (y43)");
    solve->add_option("-o,--out", v_out, "potentials CSV path");
    solve->add_option("--report", v_report, "report JSON path");

    // bve
    CommonOpts b_opt;
    std::string b_grid = "icosahedral:4", b_initial = "rh", b_prefix, b_report;
    double b_dt = 0.01;
    int b_steps = 100, b_cadence = 0;
    bool b_tracer = false, b_no_remesh = false;
    CLI::App* bve = app.add_subcommand("bve", "barotropic vorticity evolution (vortex method)");
    add_common(bve, b_opt, false);
    bve->add_option("--grid", b_grid, "grid spec kind:level");
    bve->add_option("--initial", b_initial, "rh|gaussian");
    bve->add_option("--dt", b_dt, "time step in days");
    bve->add_option("--steps", b_steps, "number of RK4 steps");
    bve->add_option("--cadence", b_cadence, "snapshot output cadence in steps (0 = none)");
    bve->add_flag("--tracer", b_tracer, "advect a passive tracer (initially the z-coordinate)");
    bve->add_flag("--no-remesh", b_no_remesh, "disable per-step remeshing");
    bve->add_option("--out-prefix", b_prefix, "snapshot CSV path prefix");
    bve->add_option("--report", b_report, "report JSON path");

    // sal
    CommonOpts sal_opt;
    std::string l_ssh, l_grid, l_out, l_report;
    CLI::App* sal = app.add_subcommand("sal", "self-attraction and loading convolution");
    add_common(sal, sal_opt, false);
    sal->add_option("--ssh", l_ssh, "sea surface height CSV (lon,lat,area,value)");
    sal->add_option("--grid", l_grid, "grid spec kind:level (synthetic band-limited field)");
    sal->add_option("-o,--out", l_out, "output field CSV path");
    sal->add_option("--report", l_report, "report JSON path");

    // convergence
    CommonOpts c_opt;
    std::string c_kind = "icosahedral", c_levels = "4,5,6", c_degrees, c_prefix = "convergence";
    CLI::App* conv = app.add_subcommand("convergence", "error versus particle count study");
    add_common(conv, c_opt);
    conv->add_option("--grid-kind", c_kind, "icosahedral|cubed_sphere|latlon");
    conv->add_option("--levels", c_levels, "comma-separated grid levels");
    conv->add_option("--degrees", c_degrees, "comma-separated degree sweep (single level)");
    conv->add_option("--out-prefix", c_prefix, "output path prefix (.csv and .json)");

    // bench
    CommonOpts e_opt;
    e_opt.threads = 1;
    std::string e_kind = "icosahedral", e_levels = "4,5", e_methods = "direct,cstc,csfmm",
                e_prefix = "bench";
    CLI::App* bench = app.add_subcommand("bench", "runtime versus particle count study");
    add_common(bench, e_opt);
    bench->add_option("--grid-kind", e_kind, "icosahedral|cubed_sphere|latlon");
    bench->add_option("--levels", e_levels, "comma-separated grid levels");
    bench->add_option("--methods", e_methods, "comma-separated methods subset");
    bench->add_option("--out-prefix", e_prefix, "output path prefix (.csv and .json)");

    try {
        try {
            app.parse(argc, argv);
        } catch (const CLI::ParseError& e) {
            if (e.get_exit_code() == 0) return app.exit(e);  // --help
            throw_cli("E_FLAGS", e.what());
        }
        if (grid->parsed()) return cmd_grid(g_kind, g_level, g_out);
        if (sum->parsed()) return cmd_sum(sum_opt, s_grid, s_particles, s_reference, s_out, s_report);
        if (solve->parsed()) return cmd_solve(solve_opt, v_grid, v_field, v_source, v_out, v_report);
        if (bve->parsed())
            return cmd_bve(b_opt, b_grid, b_initial, b_dt, b_steps, b_cadence, b_tracer,
                           b_no_remesh, b_prefix, b_report);
        if (sal->parsed()) return cmd_sal(sal_opt, l_ssh, l_grid, l_out, l_report);
        if (conv->parsed()) return cmd_convergence(c_opt, c_kind, c_levels, c_degrees, c_prefix);
        if (bench->parsed()) return cmd_bench(e_opt, e_kind, e_levels, e_methods, e_prefix);
        throw_cli("E_FLAGS", "no subcommand given");
    } catch (const CliError& e) {
        std::cerr << json{{"error", e.code}, {"message", e.message}}.dump() << std::endl;
        return exit_code_for(e.code);
    } catch (const std::exception& e) {
        std::cerr << json{{"error", "E_CONFIG"}, {"message", e.what()}}.dump() << std::endl;
        return exit_code_for("E_CONFIG");
    }
}

}  // namespace csfs
