#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "lvbc/elliptic.hpp"
#include "lvbc/pde.hpp"

namespace lvbc {

struct WorstPoint {
    double t = 0.0;
    double x = 0.0;
    double value = 0.0;
};

/// Outcome of one structural check. `worst.value` is the largest violation
/// (positive means the inequality failed by that much) or, for
/// lower-bound checks, the smallest observed margin.
struct CheckReport {
    std::string check;
    bool pass = false;
    bool applicable = true;
    WorstPoint worst;
    double tolerance = 0.0;
    std::string note;
};

/// A trajectory that sits at `state` for all the snapshot times of `like`.
inline Trajectory stationary_trajectory(const SpeciesState& state, const Trajectory& like) {
    Trajectory out{like.config, {}, state};
    for (const auto& s : like.snapshots) {
        SpeciesState c = state;
        c.t = s.t;
        out.snapshots.push_back(std::move(c));
    }
    out.final.t = like.final.t;
    return out;
}

/// Competitive ordering: y1_sub <= y1_super + tol and y2_super <= y2_sub + tol
/// at every node of every snapshot.
inline CheckReport check_comparison(const Trajectory& sub, const Trajectory& super, double tol = 1e-8) {
    CheckReport rep{"comparison", true, true, {}, tol, ""};
    if (!(sub.config.grid == super.config.grid) || sub.snapshots.size() != super.snapshots.size()) {
        fail(ErrorKind::Incompatible, "trajectories use different grids or snapshot counts");
    }
    const auto& grid = sub.config.grid;
    rep.worst.value = -std::numeric_limits<double>::infinity();
    for (std::size_t m = 0; m < sub.snapshots.size(); ++m) {
        const auto& a = sub.snapshots[m];
        const auto& b = super.snapshots[m];
        if (std::abs(a.t - b.t) > 1e-9 * std::max(1.0, a.t)) {
            fail(ErrorKind::Incompatible, "snapshot times differ");
        }
        for (std::size_t i = 0; i < grid.size(); ++i) {
            const double v = std::max(a.y1[i] - b.y1[i], b.y2[i] - a.y2[i]);
            if (v > rep.worst.value) rep.worst = {a.t, grid.x(i), v};
        }
    }
    rep.pass = rep.worst.value <= tol;
    return rep;
}

/// Checks that sigma = ((a+b+2)/4)(y1 + y2) is a supersolution of the
/// logistic equation: forward difference in time between snapshots, the
/// solver's Laplacian and the logistic term at the earlier snapshot, interior
/// nodes only. Exact up to round-off for Explicit runs sampled every step.
inline CheckReport check_sum_supersolution(const Trajectory& traj, double tol = 1e-8) {
    CheckReport rep{"sum_supersolution", true, true, {}, tol, ""};
    const auto& grid = traj.config.grid;
    const auto& p = traj.config.params;
    const double k = (p.a() + p.b() + 2.0) / 4.0;
    const double inv = 1.0 / (grid.dx() * grid.dx());
    rep.worst.value = -std::numeric_limits<double>::infinity();
    std::vector<double> s0(grid.size()), s1(grid.size());
    for (std::size_t m = 0; m + 1 < traj.snapshots.size(); ++m) {
        const auto& A = traj.snapshots[m];
        const auto& B = traj.snapshots[m + 1];
        const double dt = B.t - A.t;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            s0[i] = k * (A.y1[i] + A.y2[i]);
            s1[i] = k * (B.y1[i] + B.y2[i]);
        }
        for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
            const double lhs = (s1[i] - s0[i]) / dt - (s0[i - 1] - 2.0 * s0[i] + s0[i + 1]) * inv;
            const double rhs = s0[i] * (1.0 - s0[i]);
            const double violation = rhs - lhs;
            if (violation > rep.worst.value) rep.worst = {A.t, grid.x(i), violation};
        }
    }
    rep.pass = rep.worst.value <= tol;
    return rep;
}

/// Lower bound on the total mass for L > pi: over the second half of the
/// snapshots, sup_x (y1 + y2) stays above (4/(a+b+2)) (1 - delta) max Theta.
/// worst.value is the smallest margin observed (negative = failure).
inline CheckReport check_no_joint_extinction(const Trajectory& traj, const Grid1D& grid, double delta = 0.1) {
    CheckReport rep{"no_joint_extinction", true, true, {}, delta, ""};
    if (!(grid.length() > std::numbers::pi)) {
        rep.applicable = false;
        rep.note = "N/A: L <= pi, joint extinction is the expected outcome";
        return rep;
    }
    const auto& init = traj.snapshots.front();
    const bool zero_init = std::all_of(init.y1.begin(), init.y1.end(), [](double v) { return v == 0.0; }) &&
                           std::all_of(init.y2.begin(), init.y2.end(), [](double v) { return v == 0.0; });
    if (zero_init) {
        rep.note = "vacuous: the zero initial state is excluded";
        return rep;
    }
    const auto theta = solve_logistic_steady(grid);
    const double theta_max = *std::max_element(theta.theta.begin(), theta.theta.end());
    const auto& p = traj.config.params;
    const double bound = 4.0 / (p.a() + p.b() + 2.0) * (1.0 - delta) * theta_max;
    const double t_half = 0.5 * traj.snapshots.back().t;
    rep.worst.value = std::numeric_limits<double>::infinity();
    for (const auto& s : traj.snapshots) {
        if (s.t < t_half) continue;
        double best = -1.0;
        std::size_t arg = 0;
        for (std::size_t i = 0; i < s.size(); ++i) {
            if (s.y1[i] + s.y2[i] > best) {
                best = s.y1[i] + s.y2[i];
                arg = i;
            }
        }
        if (best - bound < rep.worst.value) rep.worst = {s.t, grid.x(arg), best - bound};
    }
    rep.pass = rep.worst.value >= 0.0;
    rep.note = "bound " + std::to_string(bound);
    return rep;
}

struct NeumannCheckOptions {
    double t_end = 200.0;
    double tol = 0.01;
    Scheme scheme = Scheme::ImexCN;
};

/// Zero-flux run from an initial state above the separatrix; passes when the
/// final state lies within `tol` of (0,1) at every node.
inline CheckReport check_neumann_basin(const CompetitionParams& params, const Grid1D& grid, const SpeciesState& init,
                                       const NeumannCheckOptions& opt = {}) {
    CheckReport rep{"neumann_basin", false, true, {}, opt.tol, ""};
    auto inapplicable = [&](std::string why) {
        rep.applicable = false;
        rep.pass = false;
        rep.note = "inapplicable: " + why;
        return rep;
    };
    if (!(params.a() > 1.0) || !(params.b() > 1.0)) return inapplicable("requires a > 1 and b > 1");
    validate_state(init, grid, "initial state");
    bool strict = false;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (init.y1[i] > separatrix_extent(params)) return inapplicable("y1 leaves the separatrix segment");
        const double h = separatrix_value(params, init.y1[i]);
        if (init.y2[i] < h) return inapplicable("initial state lies below the separatrix");
        strict = strict || init.y2[i] > h;
    }
    if (!strict) return inapplicable("initial state lies on the separatrix");

    SimConfig cfg{grid, params, BoundaryControl::neumann(), init, opt.scheme, std::nullopt, opt.t_end, opt.t_end};
    const auto traj = simulate(cfg);
    const auto& s = traj.final;
    rep.worst.value = -1.0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const double d = std::max(std::abs(s.y1[i]), std::abs(1.0 - s.y2[i]));
        if (d > rep.worst.value) rep.worst = {s.t, grid.x(i), d};
    }
    rep.pass = rep.worst.value <= opt.tol;
    return rep;
}

}  // namespace lvbc
