#pragma once

#include <charconv>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <ostream>
#include <set>
#include <string>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "lvbc/checks.hpp"
#include "lvbc/control_opt.hpp"
#include "lvbc/dynamics.hpp"
#include "lvbc/elliptic.hpp"
#include "lvbc/pde.hpp"
#include "lvbc/thresholds.hpp"
#include "lvbc/waves.hpp"

namespace lvbc {

using json = nlohmann::json;

inline constexpr int kOutputDigits = 12;

/// Decimal text with 12 significant digits, independent of the C locale.
inline std::string format_number(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, kOutputDigits);
    return std::string(buf, res.ptr);
}

/// v rounded to 12 significant digits, so that JSON output stays at that precision.
inline double round_output(double v) {
    if (!std::isfinite(v)) return v;
    const auto s = format_number(v);
    double out = v;
    std::from_chars(s.data(), s.data() + s.size(), out);
    return out;
}

inline json num_array(const std::vector<double>& v) {
    json a = json::array();
    for (double x : v) a.push_back(round_output(x));
    return a;
}

// ---------------------------------------------------------------------------
// CSV

inline void write_trajectory_csv(std::ostream& os, const Trajectory& traj) {
    os << "t,x,y1,y2\n";
    const auto& g = traj.config.grid;
    for (const auto& s : traj.snapshots) {
        const auto t = format_number(s.t);
        for (std::size_t i = 0; i < g.size(); ++i) {
            os << t << ',' << format_number(g.x(i)) << ',' << format_number(s.y1[i]) << ',' << format_number(s.y2[i])
               << '\n';
        }
    }
}

inline void write_pair_csv(std::ostream& os, const Grid1D& g, const std::vector<double>& phi,
                           const std::vector<double>& psi) {
    os << "x,phi,psi\n";
    for (std::size_t i = 0; i < g.size(); ++i) {
        os << format_number(g.x(i)) << ',' << format_number(phi[i]) << ',' << format_number(psi[i]) << '\n';
    }
}

inline void write_theta_csv(std::ostream& os, const LogisticProfile& p) {
    os << "x,theta\n";
    for (std::size_t i = 0; i < p.grid.size(); ++i) {
        os << format_number(p.grid.x(i)) << ',' << format_number(p.theta[i]) << '\n';
    }
}

inline void write_portrait_csv(std::ostream& os, const std::vector<PortraitPoint>& pts) {
    os << "w1_0,w2_0,class\n";
    for (const auto& p : pts) {
        os << format_number(p.w0.w1) << ',' << format_number(p.w0.w2) << ',' << to_string(p.cls) << '\n';
    }
}

inline void write_level_track_csv(std::ostream& os, const FrontEstimate& f) {
    os << "t,x_half\n";
    for (const auto& s : f.level_track) os << format_number(s.t) << ',' << format_number(s.x_half) << '\n';
}

inline void write_front_profile_csv(std::ostream& os, const FrontEstimate& f) {
    os << "xi,Y1,Y2\n";
    for (std::size_t i = 0; i < f.xi.size(); ++i) {
        os << format_number(f.xi[i]) << ',' << format_number(f.profile.y1[i]) << ','
           << format_number(f.profile.y2[i]) << '\n';
    }
}

// ---------------------------------------------------------------------------
// JSON output

inline json to_json(const ChannelControl& c) {
    if (const auto* d = std::get_if<DirichletConst>(&c)) return {{"mode", "dirichlet"}, {"value", round_output(d->value)}};
    if (const auto* p = std::get_if<DirichletPiecewise>(&c)) {
        return {{"mode", "piecewise"}, {"breakpoints", num_array(p->breakpoints)}, {"values", num_array(p->values)}};
    }
    return {{"mode", "neumann"}};
}

inline json to_json(const BoundaryControl& bc) {
    return {{"y1_left", to_json(bc.channel(1, Endpoint::Left))},
            {"y1_right", to_json(bc.channel(1, Endpoint::Right))},
            {"y2_left", to_json(bc.channel(2, Endpoint::Left))},
            {"y2_right", to_json(bc.channel(2, Endpoint::Right))}};
}

/// Initial profiles are echoed as constants when uniform, arrays otherwise.
inline json profile_json(const std::vector<double>& y) {
    if (std::all_of(y.begin(), y.end(), [&](double v) { return v == y.front(); })) return round_output(y.front());
    return num_array(y);
}

inline json to_json(const SimConfig& c) {
    return {{"L", round_output(c.grid.length())},
            {"n", c.grid.size()},
            {"a", round_output(c.params.a())},
            {"b", round_output(c.params.b())},
            {"scheme", to_string(c.scheme)},
            {"dt", round_output(resolved_dt(c))},
            {"dt_auto", !c.dt.has_value()},
            {"t_end", round_output(c.t_end)},
            {"snapshot_stride", round_output(c.snapshot_stride.value_or(c.t_end / 200.0))},
            {"init", {{"y1", profile_json(c.init.y1)}, {"y2", profile_json(c.init.y2)}}},
            {"control", to_json(c.control)}};
}

inline json extrema_json(const SpeciesState& s) {
    const auto e = extrema(s);
    return {{"sup_y1", round_output(e.max1)},
            {"inf_y1", round_output(e.min1)},
            {"sup_y2", round_output(e.max2)},
            {"inf_y2", round_output(e.min2)}};
}

inline json to_json(const SteadyOutcome& o) {
    return {{"classification", to_string(o.classification)},
            {"residual_sup", round_output(o.residual_sup)},
            {"t_reached", round_output(o.t_reached)},
            {"interior", extrema_json(o.profile)}};
}

inline json to_json(const ThresholdResult& r) {
    json evals = json::array();
    for (const auto& e : r.evaluations) evals.push_back({{"param", round_output(e.param)}, {"barrier", e.barrier}});
    return {{"which", to_string(r.which)},
            {"value", round_output(r.value)},
            {"bracket", {round_output(r.bracket.first), round_output(r.bracket.second)}},
            {"tol", round_output(r.tol)},
            {"evaluations", evals},
            {"grid", {{"L", round_output(r.L)}, {"n", r.n}}},
            {"runtime_s", round_output(r.runtime_s)},
            {"status", to_string(r.status)},
            {"message", r.message}};
}

inline json to_json(const SweepResult& s) {
    json rows = json::array();
    for (const auto& r : s.rows) rows.push_back({{"L", round_output(r.L)}, {"barrier", r.barrier}});
    json out{{"rows", rows}, {"monotone", s.monotone}, {"transition", nullptr}};
    if (s.transition) out["transition"] = {round_output(s.transition->first), round_output(s.transition->second)};
    return out;
}

inline json to_json(const CheckReport& r) {
    return {{"check", r.check},
            {"pass", r.pass},
            {"applicable", r.applicable},
            {"worst", {{"t", round_output(r.worst.t)}, {"x", round_output(r.worst.x)}, {"value", round_output(r.worst.value)}}},
            {"tolerance", round_output(r.tolerance)},
            {"note", r.note}};
}

inline json to_json(const ControlProblem& pb) {
    return {{"L", round_output(pb.grid.length())},
            {"n", pb.grid.size()},
            {"a", round_output(pb.params.a())},
            {"b", round_output(pb.params.b())},
            {"init", {{"y1", profile_json(pb.init.y1)}, {"y2", profile_json(pb.init.y2)}}},
            {"target", {{"y1", profile_json(pb.target1)}, {"y2", profile_json(pb.target2)}}},
            {"T", round_output(pb.T)},
            {"n_segments", pb.n_segments},
            {"w_terminal", round_output(pb.w_terminal)},
            {"w_running", round_output(pb.w_running)},
            {"scheme", to_string(pb.scheme)},
            {"dt", pb.dt ? json(round_output(*pb.dt)) : json("auto")}};
}

inline json to_json(const OptResult& r, const ControlProblem& pb) {
    json ch;
    const char* names[4] = {"y1_left", "y1_right", "y2_left", "y2_right"};
    for (std::size_t c = 0; c < 4; ++c) {
        ch[names[c]] = num_array(std::vector<double>(r.controls.begin() + static_cast<std::ptrdiff_t>(c * pb.n_segments),
                                                     r.controls.begin() + static_cast<std::ptrdiff_t>((c + 1) * pb.n_segments)));
    }
    return {{"controls", ch},
            {"J", round_output(r.J)},
            {"J_history", num_array(r.J_history)},
            {"iterations", r.iterations},
            {"stop_reason", r.stop_reason},
            {"terminal_misfit_sup", round_output(r.terminal_misfit_sup)}};
}

inline json to_json(const FrontEstimate& f) {
    return {{"c", round_output(f.c)},
            {"fit_r2", round_output(f.fit_r2)},
            {"monotone", f.monotone},
            {"worst_monotone_violation", round_output(f.worst_monotone_violation)},
            {"dx", round_output(f.dx)},
            {"samples", f.level_track.size()}};
}

inline json to_json(const std::vector<EquilibriumInfo>& eq) {
    json out = json::array();
    for (const auto& e : eq) {
        out.push_back({{"w1", round_output(e.point.w1)},
                       {"w2", round_output(e.point.w2)},
                       {"label", to_string(e.label)},
                       {"eigenvalues", {round_output(e.eigenvalues[0]), round_output(e.eigenvalues[1])}}});
    }
    return out;
}

inline json to_json(const SubsolutionRecipe& r) {
    return {{"epsilon", round_output(r.epsilon)}, {"R", round_output(r.R)},     {"M", round_output(r.M)},
            {"C", round_output(r.C)},             {"b_bar", round_output(r.b_bar)}, {"delta", round_output(r.delta)},
            {"theta_len", round_output(r.theta_len)}};
}

inline json to_json(const SubsolutionReport& r) {
    return {{"pass", r.pass},
            {"worst_violation", round_output(r.worst_violation)},
            {"worst_species", r.worst_species},
            {"worst_x", round_output(r.worst_x)},
            {"at_kink", r.at_kink},
            {"tolerance", round_output(r.tolerance)}};
}

// ---------------------------------------------------------------------------
// JSON input. Every object is checked against its allowed keys.

inline constexpr int kConfigVersion = 1;

inline void require_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
    if (!j.is_object()) fail(ErrorKind::InvalidArgument, where + " must be a JSON object");
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [key, _] : j.items()) {
        if (!ok.count(key)) fail(ErrorKind::InvalidArgument, "unknown key '" + key + "' in " + where);
    }
}

inline void require_version(const json& j) {
    if (!j.contains("version")) fail(ErrorKind::InvalidArgument, "config is missing the 'version' field");
    if (!j["version"].is_number_integer() || j["version"].get<int>() != kConfigVersion) {
        fail(ErrorKind::InvalidArgument, "unsupported config version (expected " + std::to_string(kConfigVersion) + ")");
    }
}

inline double get_number(const json& j, const char* key, const std::string& where) {
    if (!j.contains(key)) fail(ErrorKind::InvalidArgument, std::string("missing '") + key + "' in " + where);
    if (!j[key].is_number()) fail(ErrorKind::InvalidArgument, std::string("'") + key + "' in " + where + " must be a number");
    return j[key].get<double>();
}

inline double get_number_or(const json& j, const char* key, double fallback, const std::string& where) {
    return j.contains(key) ? get_number(j, key, where) : fallback;
}

inline std::size_t get_count(const json& j, const char* key, std::size_t fallback, const std::string& where) {
    if (!j.contains(key)) return fallback;
    if (!j[key].is_number_integer() || j[key].get<long long>() < 0) {
        fail(ErrorKind::InvalidArgument, std::string("'") + key + "' in " + where + " must be a nonnegative integer");
    }
    return j[key].get<std::size_t>();
}

inline Scheme parse_scheme(const std::string& s) {
    if (s == "Explicit" || s == "explicit") return Scheme::Explicit;
    if (s == "ImexCN" || s == "imexcn" || s == "imex") return Scheme::ImexCN;
    fail(ErrorKind::InvalidArgument, "unknown scheme '" + s + "' (expected Explicit or ImexCN)");
}

inline std::vector<double> parse_profile(const json& j, const Grid1D& g, const std::string& where) {
    if (j.is_number()) return std::vector<double>(g.size(), j.get<double>());
    if (j.is_array()) {
        auto v = j.get<std::vector<double>>();
        if (v.size() != g.size()) fail(ErrorKind::InvalidArgument, where + " has the wrong number of nodes");
        return v;
    }
    fail(ErrorKind::InvalidArgument, where + " must be a number or an array");
}

inline SpeciesState parse_state(const json& j, const Grid1D& g, const std::string& where) {
    require_keys(j, {"y1", "y2"}, where);
    if (!j.contains("y1") || !j.contains("y2")) fail(ErrorKind::InvalidArgument, where + " needs y1 and y2");
    return SpeciesState{0.0, parse_profile(j["y1"], g, where + ".y1"), parse_profile(j["y2"], g, where + ".y2")};
}

inline ChannelControl parse_channel(const json& j, const std::string& where) {
    if (j.is_number()) return DirichletConst{j.get<double>()};
    if (!j.is_object() || !j.contains("mode")) fail(ErrorKind::InvalidArgument, where + " needs a 'mode'");
    const auto mode = j["mode"].get<std::string>();
    if (mode == "dirichlet") {
        require_keys(j, {"mode", "value"}, where);
        return DirichletConst{get_number(j, "value", where)};
    }
    if (mode == "piecewise") {
        require_keys(j, {"mode", "breakpoints", "values"}, where);
        if (!j.contains("breakpoints") || !j.contains("values")) {
            fail(ErrorKind::InvalidArgument, where + " needs breakpoints and values");
        }
        return DirichletPiecewise{j["breakpoints"].get<std::vector<double>>(), j["values"].get<std::vector<double>>()};
    }
    if (mode == "neumann") {
        require_keys(j, {"mode"}, where);
        return NeumannZero{};
    }
    fail(ErrorKind::InvalidArgument, "unknown control mode '" + mode + "' in " + where);
}

/// Either {"u1": v, "u2": w} for constant data at both ends, {"mode": "neumann"},
/// or one entry per channel (y1_left, y1_right, y2_left, y2_right).
inline BoundaryControl parse_control(const json& j) {
    const std::string where = "control";
    if (j.contains("u1") || j.contains("u2")) {
        require_keys(j, {"u1", "u2"}, where);
        return BoundaryControl::constant(get_number(j, "u1", where), get_number(j, "u2", where));
    }
    if (j.contains("mode")) {
        require_keys(j, {"mode"}, where);
        if (j["mode"] != "neumann") fail(ErrorKind::InvalidArgument, "control.mode must be 'neumann'");
        return BoundaryControl::neumann();
    }
    require_keys(j, {"y1_left", "y1_right", "y2_left", "y2_right"}, where);
    for (const char* k : {"y1_left", "y1_right", "y2_left", "y2_right"}) {
        if (!j.contains(k)) fail(ErrorKind::InvalidArgument, std::string("control is missing ") + k);
    }
    return BoundaryControl(parse_channel(j["y1_left"], "control.y1_left"), parse_channel(j["y1_right"], "control.y1_right"),
                           parse_channel(j["y2_left"], "control.y2_left"), parse_channel(j["y2_right"], "control.y2_right"));
}

/// Simulation document:
/// {version, L, n, a, b, scheme, dt ("auto" or number), t_end, snapshot_stride,
///  init: {y1, y2}, control: {...}, tol, t_max}. tol and t_max matter only
/// for steady runs.
struct SimDocument {
    SimConfig config;
    double tol = kSteadyTolerance;
    double t_max = 5000.0;
};

inline SimDocument parse_sim_document(const json& j) {
    require_keys(j, {"version", "L", "n", "a", "b", "scheme", "dt", "t_end", "snapshot_stride", "init", "control", "tol", "t_max"},
                 "simulation config");
    require_version(j);
    const std::string w = "simulation config";
    const Grid1D grid(get_number(j, "L", w), get_count(j, "n", 401, w));
    const CompetitionParams params(get_number(j, "a", w), get_number(j, "b", w));
    SimDocument doc{SimConfig{grid, params, BoundaryControl::constant(0.0, 1.0), SpeciesState::constant(grid, 1.0, 0.0),
                              Scheme::Explicit, std::nullopt, get_number_or(j, "t_end", 1.0, w), std::nullopt}};
    if (j.contains("scheme")) doc.config.scheme = parse_scheme(j["scheme"].get<std::string>());
    if (j.contains("dt") && !(j["dt"].is_string() && j["dt"] == "auto")) doc.config.dt = get_number(j, "dt", w);
    if (j.contains("snapshot_stride")) doc.config.snapshot_stride = get_number(j, "snapshot_stride", w);
    if (j.contains("init")) doc.config.init = parse_state(j["init"], grid, "init");
    if (j.contains("control")) doc.config.control = parse_control(j["control"]);
    doc.tol = get_number_or(j, "tol", doc.tol, w);
    doc.t_max = get_number_or(j, "t_max", doc.t_max, w);
    return doc;
}

/// Optimisation document:
/// {version, L, n, a, b, init, target, T, n_segments, w_terminal, w_running,
///  scheme, dt, start: {u1, u2}, max_iters, step0, gradient ("fd"|"adjoint")}.
struct ProblemDocument {
    ControlProblem problem;
    std::vector<double> start;
    OptOptions options;
};

inline ProblemDocument parse_problem_document(const json& j) {
    const std::string w = "problem config";
    require_keys(j, {"version", "L", "n", "a", "b", "init", "target", "T", "n_segments", "w_terminal", "w_running",
                     "scheme", "dt", "start", "max_iters", "step0", "gradient"},
                 w);
    require_version(j);
    const Grid1D grid(get_number(j, "L", w), get_count(j, "n", 201, w));
    const CompetitionParams params(get_number(j, "a", w), get_number(j, "b", w));
    if (!j.contains("init") || !j.contains("target")) fail(ErrorKind::InvalidArgument, "problem needs init and target");
    const auto init = parse_state(j["init"], grid, "init");
    const auto target = parse_state(j["target"], grid, "target");
    ControlProblem pb{grid, params, init, target.y1, target.y2, get_number(j, "T", w), get_count(j, "n_segments", 10, w),
                      1.0, 0.1, Scheme::ImexCN, std::nullopt};
    pb.w_terminal = get_number_or(j, "w_terminal", pb.w_terminal, w);
    pb.w_running = get_number_or(j, "w_running", pb.w_running, w);
    if (j.contains("scheme")) pb.scheme = parse_scheme(j["scheme"].get<std::string>());
    if (j.contains("dt") && !(j["dt"].is_string() && j["dt"] == "auto")) pb.dt = get_number(j, "dt", w);
    validate(pb);
    ProblemDocument doc{pb, {}, {}};
    double u1 = 0.5, u2 = 0.5;
    if (j.contains("start")) {
        require_keys(j["start"], {"u1", "u2"}, "start");
        u1 = get_number(j["start"], "u1", "start");
        u2 = get_number(j["start"], "u2", "start");
    }
    doc.start = constant_controls(pb, u1, u2);
    doc.options.max_iters = get_count(j, "max_iters", doc.options.max_iters, w);
    doc.options.step0 = get_number_or(j, "step0", doc.options.step0, w);
    if (j.contains("gradient")) {
        const auto g = j["gradient"].get<std::string>();
        if (g == "fd") doc.options.gradient = GradientMethod::FiniteDifference;
        else if (g == "adjoint") doc.options.gradient = GradientMethod::Adjoint;
        else fail(ErrorKind::InvalidArgument, "gradient must be 'fd' or 'adjoint'");
    }
    return doc;
}

}  // namespace lvbc
