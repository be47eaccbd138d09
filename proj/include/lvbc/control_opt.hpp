#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <exception>
#include <functional>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "lvbc/pde.hpp"

namespace lvbc {

enum class GradientMethod { FiniteDifference, Adjoint };

inline const char* to_string(GradientMethod g) {
    return g == GradientMethod::FiniteDifference ? "FiniteDifference" : "Adjoint";
}

/// Finite-horizon tracking problem with piecewise-constant Dirichlet
/// controls. Controls are stored channel-major: entry c * n_segments + k is
/// channel c (y1 left, y1 right, y2 left, y2 right) on segment k.
struct ControlProblem {
    Grid1D grid;
    CompetitionParams params;
    SpeciesState init;
    std::vector<double> target1;  ///< one value per node
    std::vector<double> target2;
    double T = 1.0;
    std::size_t n_segments = 1;
    double w_terminal = 1.0;
    double w_running = 0.1;
    Scheme scheme = Scheme::ImexCN;
    std::optional<double> dt;

    static ControlProblem constant_target(const Grid1D& grid, const CompetitionParams& params, SpeciesState init,
                                          double target1, double target2, double T, std::size_t n_segments) {
        return ControlProblem{grid,
                              params,
                              std::move(init),
                              std::vector<double>(grid.size(), target1),
                              std::vector<double>(grid.size(), target2),
                              T,
                              n_segments,
                              1.0,
                              0.1,
                              Scheme::ImexCN,
                              std::nullopt};
    }

    std::size_t n_controls() const noexcept { return 4 * n_segments; }
};

inline void validate(const ControlProblem& pb) {
    if (pb.n_segments < 1) fail(ErrorKind::InvalidArgument, "need at least one control segment");
    if (!(pb.T > 0.0)) fail(ErrorKind::InvalidArgument, "horizon must be positive");
    if (!(pb.w_terminal >= 0.0) || !(pb.w_running >= 0.0)) fail(ErrorKind::InvalidArgument, "weights must be nonnegative");
    validate_state(pb.init, pb.grid, "initial state");
    validate_state(SpeciesState{0.0, pb.target1, pb.target2}, pb.grid, "target");
}

/// Controls equal to the constant pair (u1, u2) on every segment.
inline std::vector<double> constant_controls(const ControlProblem& pb, double u1, double u2) {
    std::vector<double> u(pb.n_controls());
    for (std::size_t c = 0; c < 4; ++c) {
        std::fill_n(u.begin() + static_cast<std::ptrdiff_t>(c * pb.n_segments), pb.n_segments, c < 2 ? u1 : u2);
    }
    return u;
}

inline BoundaryControl controls_to_boundary(const ControlProblem& pb, const std::vector<double>& u) {
    if (u.size() != pb.n_controls()) fail(ErrorKind::InvalidArgument, "control vector has the wrong length");
    std::vector<double> breaks(pb.n_segments);
    for (std::size_t k = 0; k < pb.n_segments; ++k) breaks[k] = pb.T * static_cast<double>(k) / static_cast<double>(pb.n_segments);
    std::array<ChannelControl, 4> ch;
    for (std::size_t c = 0; c < 4; ++c) {
        std::vector<double> vals(u.begin() + static_cast<std::ptrdiff_t>(c * pb.n_segments),
                                 u.begin() + static_cast<std::ptrdiff_t>((c + 1) * pb.n_segments));
        ch[c] = DirichletPiecewise{breaks, vals};
    }
    return BoundaryControl(ch[0], ch[1], ch[2], ch[3]);
}

inline SimConfig to_sim_config(const ControlProblem& pb, const std::vector<double>& u,
                               std::optional<double> snapshot_stride = std::nullopt) {
    return SimConfig{pb.grid, pb.params, controls_to_boundary(pb, u), pb.init, pb.scheme, pb.dt, pb.T, snapshot_stride};
}

namespace detail {

/// Uniform time grid aligned with the control segments, with the theta of
/// every step (backward-Euler damping after each segment start for ImexCN).
struct StepPlan {
    std::size_t steps_per_segment = 0;
    double dt = 0.0;
    std::vector<double> theta;
};

inline StepPlan plan_steps(const ControlProblem& pb) {
    const SimConfig probe{pb.grid, pb.params, BoundaryControl{}, pb.init, pb.scheme, pb.dt, pb.T, {}};
    const double dt_max = resolved_dt(probe);
    const double seg = pb.T / static_cast<double>(pb.n_segments);
    StepPlan plan;
    plan.steps_per_segment = std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(seg / dt_max - 1e-9)));
    plan.dt = seg / static_cast<double>(plan.steps_per_segment);
    for (std::size_t k = 0; k < pb.n_segments; ++k) {
        for (std::size_t j = 0; j < plan.steps_per_segment; ++j) {
            const bool damp = pb.scheme == Scheme::ImexCN && j < static_cast<std::size_t>(kDampingSteps);
            plan.theta.push_back(pb.scheme == Scheme::Explicit ? 0.0 : (damp ? 1.0 : 0.5));
        }
    }
    return plan;
}

/// Trapezoid weights in space.
inline std::vector<double> space_weights(const Grid1D& g) {
    std::vector<double> w(g.size(), g.dx());
    w.front() *= 0.5;
    w.back() *= 0.5;
    return w;
}

inline double misfit_sq(const SpeciesState& s, const ControlProblem& pb, const std::vector<double>& w) {
    double acc = 0.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double e1 = s.y1[i] - pb.target1[i], e2 = s.y2[i] - pb.target2[i];
        acc += w[i] * (e1 * e1 + e2 * e2);
    }
    return acc;
}

struct ForwardRun {
    double J = 0.0;
    std::vector<SpeciesState> states;  ///< every time level when recorded, else just the final one
};

inline ForwardRun forward(const ControlProblem& pb, const std::vector<double>& u, const StepPlan& plan, bool record) {
    const auto control = controls_to_boundary(pb, u);
    const auto w = space_weights(pb.grid);
    Stepper stepper(pb.grid, pb.params, control);
    SpeciesState s = pb.init;
    s.t = 0.0;
    ForwardRun run;
    if (record) run.states.reserve(plan.theta.size() + 1);
    if (record) run.states.push_back(s);
    const std::size_t N = plan.theta.size();
    double running = 0.5 * misfit_sq(s, pb, w);
    for (std::size_t n = 0; n < N; ++n) {
        stepper.advance(s, plan.dt, plan.theta[n]);
        if ((n + 1) % plan.steps_per_segment == 0) {
            s.t = pb.T * static_cast<double>((n + 1) / plan.steps_per_segment) / static_cast<double>(pb.n_segments);
        }
        const double m = misfit_sq(s, pb, w);
        running += (n + 1 == N ? 0.5 : 1.0) * m;
        if (record) run.states.push_back(s);
    }
    run.J = pb.w_terminal * misfit_sq(s, pb, w) + pb.w_running * plan.dt * running;
    if (!record) run.states.push_back(std::move(s));
    if (!std::isfinite(run.J)) fail(ErrorKind::Divergence, "objective is not finite");
    return run;
}

}  // namespace detail

/// J = w_T |y(T) - target|^2 + w_R * integral of |y(t) - target|^2 dt, with
/// trapezoid quadrature in space and time on the solver's own time levels.
inline double objective(const std::vector<double>& u, const ControlProblem& pb) {
    validate(pb);
    return detail::forward(pb, u, detail::plan_steps(pb), false).J;
}

/// Central differences with step h, one-sided where a central stencil would
/// leave [0,1]. Coordinates are split across `threads` workers.
inline std::vector<double> gradient_fd(const std::vector<double>& u, const ControlProblem& pb, double h = 1e-6,
                                       std::size_t threads = 1) {
    validate(pb);
    const auto plan = detail::plan_steps(pb);
    const std::size_t m = u.size();
    std::vector<double> g(m, 0.0);
    std::optional<double> J0;
    auto needs_base = [&](std::size_t k) { return u[k] - h < 0.0 || u[k] + h > 1.0; };
    for (std::size_t k = 0; k < m && !J0; ++k) {
        if (needs_base(k)) J0 = detail::forward(pb, u, plan, false).J;
    }
    threads = std::clamp<std::size_t>(threads, 1, m);
    std::vector<std::exception_ptr> errors(threads);
    auto work = [&](std::size_t begin) {
        try {
            std::vector<double> v = u;
            for (std::size_t k = begin; k < m; k += threads) {
                const double x = u[k];
                if (x - h < 0.0) {
                    v[k] = x + h;
                    g[k] = (detail::forward(pb, v, plan, false).J - *J0) / h;
                } else if (x + h > 1.0) {
                    v[k] = x - h;
                    g[k] = (*J0 - detail::forward(pb, v, plan, false).J) / h;
                } else {
                    v[k] = x + h;
                    const double jp = detail::forward(pb, v, plan, false).J;
                    v[k] = x - h;
                    const double jm = detail::forward(pb, v, plan, false).J;
                    g[k] = (jp - jm) / (2.0 * h);
                }
                v[k] = x;
            }
        } catch (...) {
            errors[begin] = std::current_exception();
        }
    };
    if (threads == 1) {
        work(0);
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(work, t);
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return g;
}

/// Exact gradient of the discrete objective by the adjoint of the theta
/// scheme. The clamp onto the box is treated as the identity, so the result
/// matches finite differences whenever the clamp is inactive.
inline std::vector<double> gradient_adjoint(const std::vector<double>& u, const ControlProblem& pb) {
    validate(pb);
    const auto plan = detail::plan_steps(pb);
    const auto run = detail::forward(pb, u, plan, true);
    const auto w = detail::space_weights(pb.grid);
    const std::size_t n = pb.grid.size();
    const std::size_t N = plan.theta.size();
    const double dt = plan.dt;
    const double r = dt / (pb.grid.dx() * pb.grid.dx());
    const double a = pb.params.a(), b = pb.params.b();

    std::vector<double> g(u.size(), 0.0);
    std::vector<double> lam1(n), lam2(n), mu1(n), mu2(n), next1(n), next2(n);
    auto cost_grad = [&](const SpeciesState& s, double weight, std::vector<double>& l1, std::vector<double>& l2) {
        for (std::size_t i = 0; i < n; ++i) {
            l1[i] += 2.0 * weight * w[i] * (s.y1[i] - pb.target1[i]);
            l2[i] += 2.0 * weight * w[i] * (s.y2[i] - pb.target2[i]);
        }
    };
    std::fill(lam1.begin(), lam1.end(), 0.0);
    std::fill(lam2.begin(), lam2.end(), 0.0);
    cost_grad(run.states[N], pb.w_terminal + 0.5 * pb.w_running * dt, lam1, lam2);

    Tridiagonal A(n);
    for (std::size_t step = N; step-- > 0;) {
        const double th = plan.theta[step];
        const double impl = th * r, expl = (1.0 - th) * r;
        for (std::size_t i = 1; i + 1 < n; ++i) {
            A.lower[i] = -impl;
            A.diag[i] = 1.0 + 2.0 * impl;
            A.upper[i] = -impl;
        }
        A.diag[0] = 1.0;
        A.upper[0] = 0.0;
        A.diag[n - 1] = 1.0;
        A.lower[n - 1] = 0.0;
        mu1 = lam1;
        mu2 = lam2;
        A.solve_transposed(mu1);
        A.solve_transposed(mu2);

        const std::size_t seg = step / plan.steps_per_segment;
        const std::size_t S = pb.n_segments;
        g[0 * S + seg] += mu1[0];
        g[1 * S + seg] += mu1[n - 1];
        g[2 * S + seg] += mu2[0];
        g[3 * S + seg] += mu2[n - 1];

        // Pull back through rhs_i = y_i + expl * lap(y)_i + dt * react_i on interior rows.
        const auto& y = run.states[step];
        std::fill(next1.begin(), next1.end(), 0.0);
        std::fill(next2.begin(), next2.end(), 0.0);
        for (std::size_t i = 1; i + 1 < n; ++i) {
            next1[i - 1] += expl * mu1[i];
            next1[i] += (1.0 - 2.0 * expl) * mu1[i];
            next1[i + 1] += expl * mu1[i];
            next2[i - 1] += expl * mu2[i];
            next2[i] += (1.0 - 2.0 * expl) * mu2[i];
            next2[i + 1] += expl * mu2[i];
            const double y1 = y.y1[i], y2 = y.y2[i];
            const double d11 = 1.0 - 2.0 * y1 - a * y2, d12 = -a * y1;
            const double d21 = -b * y2, d22 = 1.0 - b * y1 - 2.0 * y2;
            next1[i] += dt * (mu1[i] * d11 + mu2[i] * d21);
            next2[i] += dt * (mu1[i] * d12 + mu2[i] * d22);
        }
        if (step > 0) cost_grad(y, pb.w_running * dt, next1, next2);
        lam1.swap(next1);
        lam2.swap(next2);
    }
    return g;
}

struct OptOptions {
    std::size_t max_iters = 200;
    double step0 = 0.5;          ///< first trial step, in control units along the steepest coordinate
    double armijo_c = 1e-4;
    std::size_t max_backtracks = 30;
    double rel_tol = 1e-6;
    GradientMethod gradient = GradientMethod::FiniteDifference;
    double fd_h = 1e-6;
    std::size_t threads = 1;
    /// Called after every accepted iterate with (iteration, controls, J).
    std::function<void(std::size_t, const std::vector<double>&, double)> on_iterate;
};

struct OptResult {
    std::vector<double> controls;
    double J = 0.0;
    std::vector<double> J_history;
    SpeciesState final_state;
    double terminal_misfit_sup = 0.0;
    std::size_t iterations = 0;
    std::string stop_reason;
};

/// Largest deviation from the target at the final time over interior nodes
/// (endpoint values are the controls themselves).
inline double terminal_misfit_sup(const SpeciesState& s, const ControlProblem& pb) {
    double m = 0.0;
    for (std::size_t i = 1; i + 1 < s.size(); ++i) {
        m = std::max({m, std::abs(s.y1[i] - pb.target1[i]), std::abs(s.y2[i] - pb.target2[i])});
    }
    return m;
}

inline std::vector<double> project_box(std::vector<double> u) {
    for (double& v : u) v = std::clamp(v, 0.0, 1.0);
    return u;
}

/// Projected gradient descent with Armijo backtracking along the projection
/// arc. Stops after max_iters, when the relative decrease of J drops below
/// rel_tol, or when backtracking finds no decrease.
inline OptResult optimize_controls(const ControlProblem& pb, std::vector<double> u, const OptOptions& opt = {}) {
    validate(pb);
    if (u.size() != pb.n_controls()) fail(ErrorKind::InvalidArgument, "control vector has the wrong length");
    u = project_box(std::move(u));
    auto J_of = [&](const std::vector<double>& v) { return objective(v, pb); };
    auto grad_of = [&](const std::vector<double>& v) {
        return opt.gradient == GradientMethod::Adjoint ? gradient_adjoint(v, pb) : gradient_fd(v, pb, opt.fd_h, opt.threads);
    };

    OptResult res;
    double J = J_of(u);
    res.J_history.push_back(J);
    double alpha = -1.0;
    res.stop_reason = "max_iters";
    for (std::size_t it = 0; it < opt.max_iters; ++it) {
        const auto g = grad_of(u);
        double gmax = 0.0;
        for (double x : g) gmax = std::max(gmax, std::abs(x));
        if (gmax == 0.0) {
            res.stop_reason = "zero gradient";
            break;
        }
        if (alpha < 0.0) alpha = opt.step0 / gmax;
        bool accepted = false;
        std::vector<double> trial;
        double J_trial = 0.0;
        for (std::size_t bt = 0; bt <= opt.max_backtracks; ++bt) {
            trial = u;
            for (std::size_t k = 0; k < u.size(); ++k) trial[k] = std::clamp(u[k] - alpha * g[k], 0.0, 1.0);
            double decrease = 0.0;
            for (std::size_t k = 0; k < u.size(); ++k) decrease += g[k] * (u[k] - trial[k]);
            if (decrease <= 0.0) break;  // projected step is stationary
            J_trial = J_of(trial);
            if (J_trial <= J - opt.armijo_c * decrease) {
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if (!accepted) {
            res.stop_reason = "line search stalled";
            break;
        }
        const double rel = (J - J_trial) / std::max(std::abs(J), std::numeric_limits<double>::min());
        u = std::move(trial);
        J = J_trial;
        res.J_history.push_back(J);
        res.iterations = it + 1;
        if (opt.on_iterate) opt.on_iterate(it + 1, u, J);
        alpha *= 2.0;
        if (rel < opt.rel_tol) {
            res.stop_reason = "relative decrease below tolerance";
            break;
        }
    }
    const auto plan = detail::plan_steps(pb);
    res.final_state = detail::forward(pb, u, plan, false).states.back();
    res.controls = std::move(u);
    res.J = J;
    res.terminal_misfit_sup = terminal_misfit_sup(res.final_state, pb);
    return res;
}

}  // namespace lvbc
