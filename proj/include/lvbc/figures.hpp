#pragma once

#include <cmath>
#include <cstddef>
#include <string>

#include "lvbc/control_opt.hpp"
#include "lvbc/pde.hpp"

namespace lvbc {

/// Named experiment: init (1,0), boundary data (0,1), explicit scheme.
struct FigureSpec {
    std::string name;
    double L, a, b, T;
};

inline FigureSpec figure_spec(const std::string& name) {
    if (name == "base") return {name, 8.0, 1.5, 2.6, 60.0};
    if (name == "b") return {name, 8.0, 1.5, 3.5, 45.0};
    if (name == "L") return {name, 16.0, 1.5, 2.6, 45.0};
    fail(ErrorKind::InvalidArgument, "unknown figure '" + name + "'");
}

/// Default node count: spacing 0.02.
inline std::size_t figure_nodes(double L) { return static_cast<std::size_t>(std::llround(L / 0.02)) + 1; }

inline SimConfig figure_config(const FigureSpec& f, std::size_t n = 0) {
    const Grid1D grid(f.L, n ? n : figure_nodes(f.L));
    return SimConfig{grid, CompetitionParams(f.a, f.b), BoundaryControl::constant(0.0, 1.0),
                     SpeciesState::constant(grid, 1.0, 0.0), Scheme::Explicit, std::nullopt, f.T, std::nullopt};
}

/// Steady run paired with a figure: same data, ImexCN with automatic step.
inline SimConfig figure_steady_config(SimConfig cfg) {
    cfg.scheme = Scheme::ImexCN;
    cfg.dt.reset();
    return cfg;
}

/// Steering from (0,1) towards the coexistence state on (0,24), 10 segments.
inline ControlProblem coex_problem(std::size_t n = 601, double T = 100.0) {
    const Grid1D grid(24.0, n);
    const CompetitionParams p(1.5, 3.5);
    const auto w = *coexistence_equilibrium(p);
    return ControlProblem::constant_target(grid, p, SpeciesState::constant(grid, 0.0, 1.0), w.w1, w.w2, T, 10);
}

/// Optimizer settings of the coexistence experiment. The adjoint gradient
/// keeps 200 iterations inside the time budget at n = 601.
inline OptOptions coex_options() {
    OptOptions opt;
    opt.max_iters = 200;
    opt.gradient = GradientMethod::Adjoint;
    return opt;
}

}  // namespace lvbc
