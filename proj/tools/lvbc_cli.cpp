// Command-line front end: experiment configs in, CSV/JSON artifacts out.

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "lvbc/lvbc.hpp"

namespace fs = std::filesystem;
using namespace lvbc;

namespace {

struct GlobalFlags {
    std::optional<std::size_t> grid_n;
    std::optional<double> dt;
    std::optional<std::string> scheme;
    std::optional<double> t_end;
    std::string out_dir = ".";
    std::size_t threads = std::max(1u, std::thread::hardware_concurrency());
};

GlobalFlags g_flags;

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::InvalidArgument, "cannot open config file '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        fail(ErrorKind::InvalidArgument, "config '" + path + "' is not valid JSON: " + e.what());
    }
}

fs::path out_path(const std::string& name) {
    fs::create_directories(g_flags.out_dir);
    return fs::path(g_flags.out_dir) / name;
}

template <typename Writer>
void write_file(const std::string& name, Writer&& w) {
    const auto p = out_path(name);
    std::ofstream os(p);
    if (!os) fail(ErrorKind::InvalidArgument, "cannot write '" + p.string() + "'");
    w(os);
    std::cout << "wrote " << p.string() << "\n";
}

void write_json(const std::string& name, const json& j) {
    write_file(name, [&](std::ostream& os) { os << j.dump(2) << "\n"; });
}

/// Rebuilds a uniform state on a new grid; only constant profiles can be resampled.
SpeciesState resample(const SpeciesState& s, const Grid1D& g) {
    auto uniform = [](const std::vector<double>& y) {
        return std::all_of(y.begin(), y.end(), [&](double v) { return v == y.front(); });
    };
    if (!uniform(s.y1) || !uniform(s.y2)) {
        fail(ErrorKind::Incompatible, "--grid-n cannot resample a nonuniform initial profile");
    }
    return SpeciesState::constant(g, s.y1.front(), s.y2.front());
}

void apply_overrides(SimConfig& cfg) {
    if (g_flags.grid_n) {
        const Grid1D g(cfg.grid.length(), *g_flags.grid_n);
        cfg.init = resample(cfg.init, g);
        cfg.grid = g;
    }
    if (g_flags.dt) cfg.dt = *g_flags.dt;
    if (g_flags.scheme) cfg.scheme = parse_scheme(*g_flags.scheme);
    if (g_flags.t_end) cfg.t_end = *g_flags.t_end;
}

json final_summary(const SpeciesState& s, const BoundaryControl& control) {
    return {{"t", round_output(s.t)}, {"interior", extrema_json(s)}, {"classification", to_string(classify_profile(s, control))}};
}

// ---------------------------------------------------------------------------
// simulate / steady

void cmd_simulate(const std::string& config_path) {
    auto doc = parse_sim_document(read_json_file(config_path));
    apply_overrides(doc.config);
    const auto traj = simulate(doc.config);
    write_file("trajectory.csv", [&](std::ostream& os) { write_trajectory_csv(os, traj); });
    write_json("summary.json", {{"command", "simulate"}, {"config", to_json(doc.config)}, {"final", final_summary(traj.final, doc.config.control)}});
}

void cmd_steady(const std::string& config_path) {
    auto doc = parse_sim_document(read_json_file(config_path));
    apply_overrides(doc.config);
    const auto out = run_to_steady(doc.config, doc.tol, doc.t_max);
    Trajectory one{doc.config, {out.profile}, out.profile};
    write_file("steady_profile.csv", [&](std::ostream& os) { write_trajectory_csv(os, one); });
    json cfg = to_json(doc.config);
    cfg["tol"] = round_output(doc.tol);
    cfg["t_max"] = round_output(doc.t_max);
    write_json("steady.json", {{"command", "steady"}, {"config", cfg}, {"outcome", to_json(out)}});
    if (out.classification == SteadyClass::NonConverged) fail(ErrorKind::NonConvergence, "no steady state by t_max");
}

// ---------------------------------------------------------------------------
// barrier

struct BarrierArgs {
    double a = 1.5, b = 3.5, L = 8.0;
    std::size_t n = 401;
    std::string init = "one-zero";
};

void cmd_barrier(const BarrierArgs& args) {
    const Grid1D grid(args.L, g_flags.grid_n.value_or(args.n));
    double b = args.b;
    SpeciesState init = SpeciesState::constant(grid, 1.0, 0.0);
    json extra = json::object();
    if (args.init == "bbarrier") {
        const auto c = construct_bbarrier_subsolution(args.a, grid);
        init = c.pair;
        b = c.params.b();
        extra["recipe"] = to_json(c.recipe);
        extra["subsolution"] = to_json(c.verification);
        extra["note"] = "b replaced by the constructed b_bar";
    } else if (args.init == "asmall") {
        init = construct_a_small_subsolution(args.a, b, grid);
        extra["subsolution"] = to_json(verify_subsolution(init, CompetitionParams(args.a, b), grid));
    } else if (args.init != "one-zero") {
        fail(ErrorKind::InvalidArgument, "--init must be one-zero, bbarrier or asmall");
    }
    const CompetitionParams p(args.a, b);
    BarrierOptions opt;
    opt.dt = g_flags.dt;
    opt.audit_monotonicity = args.init != "one-zero";
    const auto res = solve_barrier(p, grid, init, opt);
    json out{{"command", "barrier"},
             {"config", {{"a", round_output(args.a)}, {"b", round_output(b)}, {"L", round_output(args.L)}, {"n", grid.size()}, {"init", args.init}, {"tol", round_output(opt.tol)}, {"t_max", round_output(opt.t_max)}}},
             {"outcome", to_json(res.outcome)},
             {"extra", extra}};
    if (opt.audit_monotonicity) {
        out["monotone"] = res.monotone;
        out["worst_monotone_violation"] = round_output(res.worst_monotone_violation);
    }
    if (const auto bp = to_barrier_profile(res.outcome, grid)) {
        if (p.a() > 1.0) out["exceeds_coexistence"] = exceeds_coexistence(*bp, p);
        write_file("barrier.csv", [&](std::ostream& os) { write_pair_csv(os, grid, bp->phi, bp->psi); });
    }
    write_json("barrier.json", out);
    if (res.outcome.classification == SteadyClass::NonConverged) fail(ErrorKind::NonConvergence, "barrier solve did not converge");
}

// ---------------------------------------------------------------------------
// thresholds

struct ThresholdArgs {
    double a = 1.5, b = 3.5, L = 8.0, lo = 0.0, hi = 0.0, tol = 0.05, dx = 0.05;
    std::string L_values = "4,6,8,10,12,14,16";
};

ProbeNumerics probe_numerics(const ThresholdArgs& args, double L) {
    ProbeNumerics num;
    num.dx = g_flags.grid_n ? L / static_cast<double>(*g_flags.grid_n - 1) : args.dx;
    num.dt = g_flags.dt;
    return num;
}

json numerics_json(const ProbeNumerics& num) {
    return {{"dx", round_output(num.dx)}, {"tol", round_output(num.tol)}, {"t_max", round_output(num.t_max)}, {"warm_start", num.warm_start}};
}

int finish_threshold(const ThresholdResult& r, json cfg) {
    json out = to_json(r);
    out["config"] = std::move(cfg);
    write_json("threshold.json", out);
    if (r.status != SearchStatus::Converged) {
        std::cerr << "threshold search ended with status " << to_string(r.status) << ": " << r.message << "\n";
        return 3;
    }
    return 0;
}

int cmd_threshold_b(const ThresholdArgs& args) {
    const auto num = probe_numerics(args, args.L);
    const auto r = find_b_star(args.a, args.L, {args.lo, args.hi}, args.tol, num);
    return finish_threshold(r, {{"a", round_output(args.a)}, {"L", round_output(args.L)}, {"lo", round_output(args.lo)}, {"hi", round_output(args.hi)}, {"tol", round_output(args.tol)}, {"numerics", numerics_json(num)}});
}

int cmd_threshold_a(const ThresholdArgs& args) {
    const auto num = probe_numerics(args, args.L);
    const auto r = find_a_star(args.b, args.L, {args.lo, args.hi}, args.tol, num);
    json cfg{{"b", round_output(args.b)}, {"L", round_output(args.L)}, {"lo", round_output(args.lo)}, {"hi", round_output(args.hi)}, {"tol", round_output(args.tol)}, {"numerics", numerics_json(num)}};
    cfg["analytic_lower_bound"] = round_output(1.0 - std::numbers::pi * std::numbers::pi / (args.L * args.L));
    return finish_threshold(r, cfg);
}

std::vector<double> parse_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        double v = 0.0;
        auto res = std::from_chars(item.data(), item.data() + item.size(), v);
        if (res.ec != std::errc{} || res.ptr != item.data() + item.size()) {
            fail(ErrorKind::InvalidArgument, "bad number '" + item + "' in list");
        }
        out.push_back(v);
    }
    return out;
}

int cmd_threshold_L(const ThresholdArgs& args) {
    ProbeNumerics num;
    num.dx = args.dx;
    num.dt = g_flags.dt;
    const auto Ls = parse_list(args.L_values);
    const auto r = sweep_L(args.a, args.b, Ls, num);
    json out = to_json(r);
    out["config"] = {{"a", round_output(args.a)}, {"b", round_output(args.b)}, {"L_values", num_array(Ls)}, {"numerics", numerics_json(num)}};
    write_json("sweep_L.json", out);
    return r.monotone ? 0 : 3;
}

// ---------------------------------------------------------------------------
// front, ode portrait

struct FrontArgs {
    double a = 1.5, b = 3.5, half_width = 50.0, T = 40.0, dx = 0.1;
};

void cmd_front(const FrontArgs& args) {
    FrontOptions opt;
    opt.dx = g_flags.grid_n ? 2.0 * args.half_width / static_cast<double>(*g_flags.grid_n - 1) : args.dx;
    opt.dt = g_flags.dt;
    if (g_flags.scheme) opt.scheme = parse_scheme(*g_flags.scheme);
    const double T = g_flags.t_end.value_or(args.T);
    const CompetitionParams p(args.a, args.b);
    const auto f = estimate_front(p, args.half_width, T, opt);
    write_file("front_track.csv", [&](std::ostream& os) { write_level_track_csv(os, f); });
    write_file("front_profile.csv", [&](std::ostream& os) { write_front_profile_csv(os, f); });
    json out = to_json(f);
    out["comoving_residual"] = round_output(comoving_residual(f, p));
    write_json("front.json", {{"command", "front"},
                              {"config", {{"a", round_output(args.a)}, {"b", round_output(args.b)}, {"half_width", round_output(args.half_width)}, {"T", round_output(T)}, {"dx", round_output(opt.dx)}, {"scheme", to_string(opt.scheme)}}},
                              {"estimate", out}});
}

struct PortraitArgs {
    double a = 1.5, b = 3.5;
    std::size_t density = 50;
};

void cmd_portrait(const PortraitArgs& args, const std::string& stem) {
    const CompetitionParams p(args.a, args.b);
    const auto pts = phase_portrait(p, args.density, g_flags.threads);
    write_file(stem + ".csv", [&](std::ostream& os) { write_portrait_csv(os, pts); });
    json cfg{{"a", round_output(args.a)}, {"b", round_output(args.b)}, {"density", args.density}};
    json out{{"command", "ode portrait"}, {"config", cfg}, {"equilibria", to_json(equilibria(p))}};
    if (p.a() > 1.0) {
        out["separatrix"] = {{"slope", round_output((p.b() - 1.0) / (p.a() - 1.0))}, {"extent", round_output(separatrix_extent(p))}};
    }
    write_json(stem + ".json", out);
}

// ---------------------------------------------------------------------------
// optimize

void run_optimization(const ControlProblem& pb, const std::vector<double>& start, OptOptions opt, const std::string& stem,
                      json extra = json::object()) {
    opt.threads = g_flags.threads;
    const auto r = optimize_controls(pb, start, opt);
    const auto traj = simulate(to_sim_config(pb, r.controls));
    write_file(stem + "_trajectory.csv", [&](std::ostream& os) { write_trajectory_csv(os, traj); });
    json cfg = to_json(pb);
    cfg["max_iters"] = opt.max_iters;
    cfg["step0"] = round_output(opt.step0);
    cfg["gradient"] = opt.gradient == GradientMethod::Adjoint ? "adjoint" : "fd";
    json out{{"command", "optimize"}, {"config", cfg}, {"result", to_json(r, pb)}};
    for (auto& [k, v] : extra.items()) out[k] = v;
    write_json(stem + ".json", out);
}

void cmd_optimize(const std::string& config_path, const std::string& gradient) {
    auto doc = parse_problem_document(read_json_file(config_path));
    if (g_flags.grid_n) {
        const Grid1D g(doc.problem.grid.length(), *g_flags.grid_n);
        doc.problem.init = resample(doc.problem.init, g);
        const auto tgt = resample(SpeciesState{0.0, doc.problem.target1, doc.problem.target2}, g);
        doc.problem.target1 = tgt.y1;
        doc.problem.target2 = tgt.y2;
        doc.problem.grid = g;
    }
    if (g_flags.dt) doc.problem.dt = *g_flags.dt;
    if (g_flags.scheme) doc.problem.scheme = parse_scheme(*g_flags.scheme);
    if (g_flags.t_end) doc.problem.T = *g_flags.t_end;
    if (gradient == "fd") doc.options.gradient = GradientMethod::FiniteDifference;
    else if (gradient == "adjoint") doc.options.gradient = GradientMethod::Adjoint;
    else if (!gradient.empty()) fail(ErrorKind::InvalidArgument, "--gradient must be fd or adjoint");
    run_optimization(doc.problem, doc.start, doc.options, "opt");
}

// ---------------------------------------------------------------------------
// verify

void emit_report(const CheckReport& r, json cfg) {
    json out = to_json(r);
    out["config"] = std::move(cfg);
    write_json("verify_" + r.check + ".json", out);
}

int report_status(const CheckReport& r) { return r.pass || !r.applicable ? 0 : 3; }

/// Barrier at (a, b, L) against the solution from (1,0) under random
/// admissible piecewise controls: y1 >= phi and y2 <= psi throughout.
int cmd_verify_comparison(double a, double b, double L, std::size_t n, unsigned seed) {
    const Grid1D grid(L, g_flags.grid_n.value_or(n));
    const CompetitionParams p(a, b);
    const auto bs = solve_barrier(p, grid, SpeciesState::constant(grid, 1.0, 0.0));
    const auto bp = to_barrier_profile(bs.outcome, grid);
    if (!bp) fail(ErrorKind::RegimeViolation, "no barrier at this configuration; nothing to compare against");
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    const double T = g_flags.t_end.value_or(45.0);
    std::vector<double> bps, v1l, v1r, v2l, v2r;
    for (int k = 0; k < 9; ++k) {
        bps.push_back(T * k / 9.0);
        v1l.push_back(U(rng));
        v1r.push_back(U(rng));
        v2l.push_back(U(rng));
        v2r.push_back(U(rng));
    }
    BoundaryControl ctl(DirichletPiecewise{bps, v1l}, DirichletPiecewise{bps, v1r}, DirichletPiecewise{bps, v2l}, DirichletPiecewise{bps, v2r});
    SimConfig cfg{grid, p, ctl, SpeciesState::constant(grid, 1.0, 0.0), Scheme::ImexCN, g_flags.dt, T, {}};
    if (g_flags.scheme) cfg.scheme = parse_scheme(*g_flags.scheme);
    const auto sol = simulate(cfg);
    const auto rep = check_comparison(stationary_trajectory(SpeciesState{0.0, bp->phi, bp->psi}, sol), sol, 1e-6);
    json c = to_json(cfg);
    c["seed"] = seed;
    emit_report(rep, c);
    return report_status(rep);
}

int cmd_verify_sum(const std::string& config_path) {
    SimConfig cfg{Grid1D(8.0, 81), CompetitionParams(1.5, 2.6), BoundaryControl::constant(0.0, 1.0),
                  SpeciesState::constant(Grid1D(8.0, 81), 1.0, 0.0), Scheme::Explicit, std::nullopt, 10.0, std::nullopt};
    if (!config_path.empty()) cfg = parse_sim_document(read_json_file(config_path)).config;
    apply_overrides(cfg);
    if (!cfg.snapshot_stride) cfg.snapshot_stride = resolved_dt(cfg);
    const auto traj = simulate(cfg);
    const auto rep = check_sum_supersolution(traj);
    emit_report(rep, to_json(cfg));
    return report_status(rep);
}

int cmd_verify_extinction(double a, double b, double L, std::size_t n) {
    const Grid1D grid(L, g_flags.grid_n.value_or(n));
    SimConfig cfg{grid, CompetitionParams(a, b), BoundaryControl::constant(0.0, 0.0), SpeciesState::constant(grid, 1.0, 1.0),
                  Scheme::ImexCN, g_flags.dt, g_flags.t_end.value_or(100.0), std::nullopt};
    if (g_flags.scheme) cfg.scheme = parse_scheme(*g_flags.scheme);
    const auto traj = simulate(cfg);
    const auto rep = check_no_joint_extinction(traj, grid);
    emit_report(rep, to_json(cfg));
    return report_status(rep);
}

int cmd_verify_neumann(double a, double b, double L, std::size_t n, double w1, double w2) {
    const Grid1D grid(L, g_flags.grid_n.value_or(n));
    const CompetitionParams p(a, b);
    NeumannCheckOptions opt;
    if (g_flags.t_end) opt.t_end = *g_flags.t_end;
    if (g_flags.scheme) opt.scheme = parse_scheme(*g_flags.scheme);
    const auto rep = check_neumann_basin(p, grid, SpeciesState::constant(grid, w1, w2), opt);
    emit_report(rep, {{"a", round_output(a)}, {"b", round_output(b)}, {"L", round_output(L)}, {"n", grid.size()},
                      {"init", {{"y1", round_output(w1)}, {"y2", round_output(w2)}}}, {"t_end", round_output(opt.t_end)},
                      {"scheme", to_string(opt.scheme)}, {"control", to_json(BoundaryControl::neumann())}});
    return report_status(rep);
}

// ---------------------------------------------------------------------------
// figures

void figure_simulation(const std::string& name) {
    const auto spec = figure_spec(name);
    SimConfig cfg = figure_config(spec, g_flags.grid_n.value_or(0));
    if (g_flags.dt) cfg.dt = *g_flags.dt;
    if (g_flags.scheme) cfg.scheme = parse_scheme(*g_flags.scheme);
    if (g_flags.t_end) cfg.t_end = *g_flags.t_end;
    const auto traj = simulate(cfg);
    write_file("figure_" + name + "_trajectory.csv", [&](std::ostream& os) { write_trajectory_csv(os, traj); });

    const SimConfig steady_cfg = figure_steady_config(cfg);
    const auto steady = run_to_steady(steady_cfg);
    json out{{"figure", name},
             {"params", {{"L", round_output(spec.L)}, {"a", round_output(spec.a)}, {"b", round_output(spec.b)}, {"T", round_output(cfg.t_end)}}},
             {"config", to_json(cfg)},
             {"final", final_summary(traj.final, cfg.control)},
             {"classification", to_string(steady.classification)},
             {"steady", to_json(steady)},
             {"steady_config", {{"scheme", "ImexCN"}, {"dt", round_output(resolved_dt(steady_cfg))}, {"tol", kSteadyTolerance}, {"t_max", 5000.0}}}};
    if (const auto bp = to_barrier_profile(steady, cfg.grid)) {
        write_file("figure_" + name + "_barrier.csv", [&](std::ostream& os) { write_pair_csv(os, cfg.grid, bp->phi, bp->psi); });
    }
    write_json("figure_" + name + "_summary.json", out);
}

void figure_coex() {
    auto pb = coex_problem(g_flags.grid_n.value_or(601), g_flags.t_end.value_or(100.0));
    if (g_flags.dt) pb.dt = *g_flags.dt;
    if (g_flags.scheme) pb.scheme = parse_scheme(*g_flags.scheme);
    const auto w = *coexistence_equilibrium(pb.params);
    run_optimization(pb, constant_controls(pb, w.w1, w.w2), coex_options(), "figure_coex",
                     {{"figure", "coex"}, {"target", {round_output(w.w1), round_output(w.w2)}}});
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Competition-diffusion Lotka-Volterra toolkit under constrained boundary controls"};
    app.require_subcommand(1);
    app.add_option("--grid-n", g_flags.grid_n, "Override the node count");
    app.add_option("--dt", g_flags.dt, "Override the time step");
    app.add_option("--scheme", g_flags.scheme, "Explicit or ImexCN");
    app.add_option("--t-end", g_flags.t_end, "Override the final time / horizon");
    app.add_option("--out-dir", g_flags.out_dir, "Output directory")->capture_default_str();
    app.add_option("--threads", g_flags.threads, "Worker threads")->capture_default_str();

    std::string config, gradient;
    auto* sim = app.add_subcommand("simulate", "Integrate a simulation config; writes trajectory.csv and summary.json");
    sim->add_option("--config", config, "Simulation JSON")->required();
    auto* steady = app.add_subcommand("steady", "March to a steady state; writes steady.json and steady_profile.csv");
    steady->add_option("--config", config, "Simulation JSON")->required();

    BarrierArgs bargs;
    auto* barrier = app.add_subcommand("barrier", "Solve the barrier problem; writes barrier.json and barrier.csv");
    barrier->add_option("--a", bargs.a)->capture_default_str();
    barrier->add_option("--b", bargs.b)->capture_default_str();
    barrier->add_option("--L", bargs.L)->capture_default_str();
    barrier->add_option("--n", bargs.n)->capture_default_str();
    barrier->add_option("--init", bargs.init, "one-zero, bbarrier or asmall")->capture_default_str();

    ThresholdArgs targs;
    auto* thr = app.add_subcommand("threshold", "Threshold searches");
    thr->require_subcommand(1);
    auto* thr_b = thr->add_subcommand("b", "Bisect b* at fixed a, L");
    thr_b->add_option("--a", targs.a)->capture_default_str();
    thr_b->add_option("--L", targs.L)->capture_default_str();
    thr_b->add_option("--lo", targs.lo)->required();
    thr_b->add_option("--hi", targs.hi)->required();
    thr_b->add_option("--tol", targs.tol)->capture_default_str();
    thr_b->add_option("--dx", targs.dx)->capture_default_str();
    auto* thr_a = thr->add_subcommand("a", "Bisect a* at fixed b, L");
    thr_a->add_option("--b", targs.b)->capture_default_str();
    thr_a->add_option("--L", targs.L)->capture_default_str();
    thr_a->add_option("--lo", targs.lo)->required();
    thr_a->add_option("--hi", targs.hi)->required();
    thr_a->add_option("--tol", targs.tol)->capture_default_str();
    thr_a->add_option("--dx", targs.dx)->capture_default_str();
    auto* thr_L = thr->add_subcommand("L", "Sweep L at fixed a, b");
    thr_L->add_option("--a", targs.a)->capture_default_str();
    thr_L->add_option("--b", targs.b)->capture_default_str();
    thr_L->add_option("--L-values", targs.L_values, "Comma-separated increasing lengths")->capture_default_str();
    thr_L->add_option("--dx", targs.dx)->capture_default_str();

    FrontArgs fargs;
    auto* front = app.add_subcommand("front", "Estimate the travelling-front speed");
    front->add_option("--a", fargs.a)->capture_default_str();
    front->add_option("--b", fargs.b)->capture_default_str();
    front->add_option("--half-width", fargs.half_width)->capture_default_str();
    front->add_option("--T", fargs.T)->capture_default_str();
    front->add_option("--dx", fargs.dx)->capture_default_str();

    PortraitArgs pargs;
    auto* ode = app.add_subcommand("ode", "Kinetic system tools");
    ode->require_subcommand(1);
    auto* portrait = ode->add_subcommand("portrait", "Basin classification on a lattice");
    portrait->add_option("--a", pargs.a)->capture_default_str();
    portrait->add_option("--b", pargs.b)->capture_default_str();
    portrait->add_option("--density", pargs.density)->capture_default_str();

    auto* optimize = app.add_subcommand("optimize", "Optimise boundary controls for a problem JSON");
    optimize->add_option("--config", config, "Problem JSON")->required();
    optimize->add_option("--gradient", gradient, "fd or adjoint (overrides the config)");

    double va = 1.5, vb = 3.5, vL = 8.0, vL_ext = 4.0, w1 = 0.05, w2 = 0.8;
    std::size_t vn = 161;
    unsigned seed = 1;
    auto* verify = app.add_subcommand("verify", "Structural checks");
    verify->require_subcommand(1);
    auto* v_cmp = verify->add_subcommand("comparison", "Barrier lower bound under random admissible controls");
    v_cmp->add_option("--a", va)->capture_default_str();
    v_cmp->add_option("--b", vb)->capture_default_str();
    v_cmp->add_option("--L", vL)->capture_default_str();
    v_cmp->add_option("--n", vn)->capture_default_str();
    v_cmp->add_option("--seed", seed)->capture_default_str();
    auto* v_sum = verify->add_subcommand("sum", "Weighted-sum supersolution inequality");
    v_sum->add_option("--config", config, "Simulation JSON (default: a short explicit run sampled every step)");
    auto* v_ext = verify->add_subcommand("extinction", "No joint extinction for L > pi with zero boundary data");
    v_ext->add_option("--a", va)->capture_default_str();
    v_ext->add_option("--b", vb)->capture_default_str();
    v_ext->add_option("--L", vL_ext)->capture_default_str();
    v_ext->add_option("--n", vn)->capture_default_str();
    auto* v_neu = verify->add_subcommand("neumann", "Zero-flux run from above the separatrix");
    v_neu->add_option("--a", va)->capture_default_str();
    v_neu->add_option("--b", vb)->capture_default_str();
    v_neu->add_option("--L", vL)->capture_default_str();
    v_neu->add_option("--n", vn)->capture_default_str();
    v_neu->add_option("--w1", w1)->capture_default_str();
    v_neu->add_option("--w2", w2)->capture_default_str();

    auto* figure = app.add_subcommand("figure", "Run a named figure configuration");
    figure->require_subcommand(1);
    auto* f_base = figure->add_subcommand("base", "L=8, a=1.5, b=2.6, T=60");
    auto* f_b = figure->add_subcommand("b", "L=8, a=1.5, b=3.5, T=45");
    auto* f_L = figure->add_subcommand("L", "L=16, a=1.5, b=2.6, T=45");
    auto* f_coex = figure->add_subcommand("coex", "Steer towards the coexistence state, L=24, T=100");
    auto* f_odes = figure->add_subcommand("odes", "Phase portrait, a=1.5, b=3.5");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*sim) cmd_simulate(config);
        else if (*steady) cmd_steady(config);
        else if (*barrier) cmd_barrier(bargs);
        else if (*thr_b) return cmd_threshold_b(targs);
        else if (*thr_a) return cmd_threshold_a(targs);
        else if (*thr_L) return cmd_threshold_L(targs);
        else if (*front) cmd_front(fargs);
        else if (*portrait) cmd_portrait(pargs, "portrait");
        else if (*optimize) cmd_optimize(config, gradient);
        else if (*v_cmp) return cmd_verify_comparison(va, vb, vL, vn, seed);
        else if (*v_sum) return cmd_verify_sum(config);
        else if (*v_ext) return cmd_verify_extinction(va, vb, vL_ext, vn);
        else if (*v_neu) return cmd_verify_neumann(va, vb, vL, vn, w1, w2);
        else if (*f_base) figure_simulation("base");
        else if (*f_b) figure_simulation("b");
        else if (*f_L) figure_simulation("L");
        else if (*f_coex) figure_coex();
        else if (*f_odes) cmd_portrait(PortraitArgs{1.5, 3.5, 50}, "figure_odes_portrait");
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.is_config_error() ? 2 : 3;
    } catch (const json::exception& e) {
        std::cerr << "error: config: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
