#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "lvbc/core.hpp"
#include "lvbc/tridiag.hpp"

namespace lvbc {

enum class Scheme { Explicit, ImexCN };

inline const char* to_string(Scheme s) { return s == Scheme::Explicit ? "Explicit" : "ImexCN"; }

/// Amplitude separating "extinct" from "present" when classifying steady states.
inline constexpr double kClassificationThreshold = 1e-3;

/// Default tolerance of the steady-state driver.
inline constexpr double kSteadyTolerance = 1e-8;

/// ImexCN takes this many backward-Euler steps after t = 0 and after every
/// control discontinuity to damp the oscillations Crank-Nicolson leaves on
/// non-smooth data.
inline constexpr int kDampingSteps = 4;

struct SimConfig {
    Grid1D grid;
    CompetitionParams params;
    BoundaryControl control;
    SpeciesState init;
    Scheme scheme = Scheme::Explicit;
    std::optional<double> dt;               ///< nullopt = automatic
    double t_end = 1.0;
    std::optional<double> snapshot_stride;  ///< nullopt = t_end / 200
};

/// Largest time step used when dt is "auto".
///
/// Explicit: min(0.4 dx^2, 0.1 / (1 + max(a, b))) keeps both the diffusion
/// update and the reaction update inside the box. ImexCN: dx, capped by
/// 0.5 / (1 + max(a, b)) because the reaction stays explicit.
inline double auto_dt(const Grid1D& grid, const CompetitionParams& p, Scheme scheme) {
    const double kinetic = 1.0 + std::max(p.a(), p.b());
    if (scheme == Scheme::ImexCN) return std::min(grid.dx(), 0.5 / kinetic);
    return std::min(0.4 * grid.dx() * grid.dx(), 0.1 / kinetic);
}

inline double explicit_dt_bound(const Grid1D& grid, const CompetitionParams& p) {
    return auto_dt(grid, p, Scheme::Explicit);
}

inline double resolved_dt(const SimConfig& cfg) {
    if (!cfg.dt) return auto_dt(cfg.grid, cfg.params, cfg.scheme);
    const double dt = *cfg.dt;
    if (!(dt > 0.0)) fail(ErrorKind::InvalidArgument, "time step must be positive");
    if (cfg.scheme == Scheme::Explicit && dt > explicit_dt_bound(cfg.grid, cfg.params) * (1.0 + 1e-12)) {
        std::ostringstream os;
        os.precision(6);
        os << "explicit time step " << dt << " exceeds stability bound " << explicit_dt_bound(cfg.grid, cfg.params);
        fail(ErrorKind::InvalidArgument, os.str());
    }
    return dt;
}

inline void validate_state(const SpeciesState& s, const Grid1D& grid, const char* what) {
    if (s.y1.size() != grid.size() || s.y2.size() != grid.size()) {
        fail(ErrorKind::InvalidArgument, std::string(what) + " does not match the grid size");
    }
    if (auto v = find_box_violation(s)) {
        std::ostringstream os;
        os << what << " leaves the box at y" << v->species << "[" << v->node << "] = " << v->value;
        fail(ErrorKind::InvalidArgument, os.str());
    }
}

inline void validate(const SimConfig& cfg) {
    validate_state(cfg.init, cfg.grid, "initial state");
    if (!(cfg.t_end > 0.0)) fail(ErrorKind::InvalidArgument, "t_end must be positive");
    if (cfg.snapshot_stride && !(*cfg.snapshot_stride > 0.0)) {
        fail(ErrorKind::InvalidArgument, "snapshot stride must be positive");
    }
    (void)resolved_dt(cfg);
}

/// Single-step integrator with preallocated workspaces.
///
/// Interior nodes get second-order central diffusion plus the reaction
/// evaluated at the old time level. Dirichlet endpoints take the control
/// value at the step midpoint (equal to the new-time value except across a
/// piecewise breakpoint, which steps never straddle inside `simulate`).
/// Zero-flux endpoints mirror the ghost node, y[-1] = y[1].
class Stepper {
public:
    Stepper(const Grid1D& grid, const CompetitionParams& params, const BoundaryControl& control)
        : grid_(grid), params_(params), control_(control), n_(grid.size()), matrix_(grid.size()),
          r1_(grid.size()), r2_(grid.size()), work_(grid.size()) {}

    /// Advances `s` by dt. theta = 0 is forward Euler, 0.5 Crank-Nicolson,
    /// 1 backward Euler on the diffusion; reaction is always explicit.
    void advance(SpeciesState& s, double dt, double theta) {
        const double t_mid = s.t + 0.5 * dt;
        for (std::size_t i = 0; i < n_; ++i) {
            r1_[i] = params_.reaction1(s.y1[i], s.y2[i]);
            r2_[i] = params_.reaction2(s.y1[i], s.y2[i]);
        }
        advance_species(s.y1, r1_, 1, dt, theta, t_mid);
        advance_species(s.y2, r2_, 2, dt, theta, t_mid);
        s.t += dt;
        // Explicit steps hold the box to kBoxTolerance. Implicit steps amplify
        // round-off near the box edges by up to 1 + 2r, so the guard scales with it.
        const double r = dt / (grid_.dx() * grid_.dx());
        enforce_box(s, grid_, theta > 0.0 ? kBoxTolerance * (1.0 + 2.0 * r) : kBoxTolerance);
    }

    const Grid1D& grid() const noexcept { return grid_; }

private:
    void advance_species(std::vector<double>& y, const std::vector<double>& react, int species, double dt,
                         double theta, double t_mid) {
        const double r = dt / (grid_.dx() * grid_.dx());
        const auto left = control_.value(species, Endpoint::Left, t_mid);
        const auto right = control_.value(species, Endpoint::Right, t_mid);

        // Explicit part of the update.
        const double expl = (1.0 - theta) * r;
        for (std::size_t i = 1; i + 1 < n_; ++i) {
            work_[i] = y[i] + expl * (y[i - 1] - 2.0 * y[i] + y[i + 1]) + dt * react[i];
        }
        work_[0] = left ? *left : y[0] + expl * 2.0 * (y[1] - y[0]) + dt * react[0];
        work_[n_ - 1] = right ? *right : y[n_ - 1] + expl * 2.0 * (y[n_ - 2] - y[n_ - 1]) + dt * react[n_ - 1];

        if (theta == 0.0) {
            y.swap(work_);
            return;
        }
        const double impl = theta * r;
        for (std::size_t i = 1; i + 1 < n_; ++i) {
            matrix_.lower[i] = -impl;
            matrix_.diag[i] = 1.0 + 2.0 * impl;
            matrix_.upper[i] = -impl;
        }
        if (left) {
            matrix_.diag[0] = 1.0;
            matrix_.upper[0] = 0.0;
        } else {
            matrix_.diag[0] = 1.0 + 2.0 * impl;
            matrix_.upper[0] = -2.0 * impl;
        }
        if (right) {
            matrix_.diag[n_ - 1] = 1.0;
            matrix_.lower[n_ - 1] = 0.0;
        } else {
            matrix_.diag[n_ - 1] = 1.0 + 2.0 * impl;
            matrix_.lower[n_ - 1] = -2.0 * impl;
        }
        matrix_.solve(work_);
        y.swap(work_);
    }

    Grid1D grid_;
    CompetitionParams params_;
    BoundaryControl control_;
    std::size_t n_;
    Tridiagonal matrix_;
    std::vector<double> r1_, r2_, work_;
};

inline double scheme_theta(Scheme s) { return s == Scheme::Explicit ? 0.0 : 0.5; }

/// One step of the configured scheme (Crank-Nicolson for ImexCN, no damping).
inline SpeciesState step(const SpeciesState& state, const SimConfig& cfg, double dt) {
    validate_state(state, cfg.grid, "state");
    if (!(dt > 0.0)) fail(ErrorKind::InvalidArgument, "time step must be positive");
    if (cfg.scheme == Scheme::Explicit && dt > explicit_dt_bound(cfg.grid, cfg.params) * (1.0 + 1e-12)) {
        fail(ErrorKind::InvalidArgument, "explicit time step exceeds stability bound");
    }
    SpeciesState next = state;
    Stepper stepper(cfg.grid, cfg.params, cfg.control);
    stepper.advance(next, dt, scheme_theta(cfg.scheme));
    return next;
}

struct Trajectory {
    SimConfig config;
    std::vector<SpeciesState> snapshots;  ///< includes t = 0 and t_end
    SpeciesState final;
};

/// Breakpoints of piecewise channels strictly inside (0, t_end).
inline std::vector<double> control_breakpoints(const BoundaryControl& control, double t_end) {
    std::set<double> out;
    for (const auto& c : control.channels()) {
        if (const auto* p = std::get_if<DirichletPiecewise>(&c)) {
            for (double b : p->breakpoints) {
                if (b > 0.0 && b < t_end) out.insert(b);
            }
        }
    }
    return {out.begin(), out.end()};
}

/// Drives a Stepper across a time grid that never straddles control
/// breakpoints, applying the ImexCN damping steps where needed.
class TimeMarcher {
public:
    TimeMarcher(const SimConfig& cfg)
        : stepper_(cfg.grid, cfg.params, cfg.control), scheme_(cfg.scheme), dt_max_(resolved_dt(cfg)),
          breakpoints_(control_breakpoints(cfg.control, std::numeric_limits<double>::infinity())) {}

    double dt_max() const noexcept { return dt_max_; }

    /// Integrates `s` from s.t to `t_target` in equal steps no larger than dt_max.
    void march_to(SpeciesState& s, double t_target) {
        while (s.t < t_target - 1e-12 * std::max(1.0, t_target)) {
            double stop = t_target;
            auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), s.t + 1e-12 * std::max(1.0, s.t));
            if (it != breakpoints_.end() && *it < stop) stop = *it;
            const double span = stop - s.t;
            const auto steps = static_cast<std::size_t>(std::ceil(span / dt_max_ - 1e-9));
            const double dt = span / static_cast<double>(std::max<std::size_t>(steps, 1));
            for (std::size_t k = 0; k < std::max<std::size_t>(steps, 1); ++k) {
                const double theta = scheme_ == Scheme::Explicit ? 0.0 : (damping_left_ > 0 ? 1.0 : 0.5);
                if (damping_left_ > 0) --damping_left_;
                stepper_.advance(s, dt, theta);
            }
            s.t = stop;  // remove accumulated round-off
            if (it != breakpoints_.end() && stop == *it) damping_left_ = kDampingSteps;
        }
    }

private:
    Stepper stepper_;
    Scheme scheme_;
    double dt_max_;
    std::vector<double> breakpoints_;
    int damping_left_ = kDampingSteps;
};

/// Integrates to t_end, recording snapshots every snapshot_stride (plus t_end).
inline Trajectory simulate(const SimConfig& cfg) {
    validate(cfg);
    const double stride = cfg.snapshot_stride.value_or(cfg.t_end / 200.0);
    Trajectory traj{cfg, {}, {}};
    SpeciesState s = cfg.init;
    s.t = 0.0;
    traj.snapshots.push_back(s);
    TimeMarcher marcher(cfg);
    for (std::size_t k = 1;; ++k) {
        double t_next = static_cast<double>(k) * stride;
        if (t_next > cfg.t_end - 1e-9 * stride) t_next = cfg.t_end;
        marcher.march_to(s, t_next);
        traj.snapshots.push_back(s);
        if (t_next == cfg.t_end) break;
    }
    traj.final = s;
    return traj;
}

/// Sup-norm over interior nodes of the discrete steady residuals
/// y'' + reaction for each species.
inline std::pair<double, double> residual(const SpeciesState& s, const Grid1D& grid, const CompetitionParams& p) {
    const double inv = 1.0 / (grid.dx() * grid.dx());
    double r1 = 0.0, r2 = 0.0;
    for (std::size_t i = 1; i + 1 < grid.size(); ++i) {
        const double d1 = (s.y1[i - 1] - 2.0 * s.y1[i] + s.y1[i + 1]) * inv + p.reaction1(s.y1[i], s.y2[i]);
        const double d2 = (s.y2[i - 1] - 2.0 * s.y2[i] + s.y2[i + 1]) * inv + p.reaction2(s.y1[i], s.y2[i]);
        r1 = std::max(r1, std::abs(d1));
        r2 = std::max(r2, std::abs(d2));
    }
    return {r1, r2};
}

/// Residual including mirrored-ghost stencils at zero-flux endpoints.
inline double residual_with_boundary(const SpeciesState& s, const Grid1D& grid, const CompetitionParams& p,
                                     const BoundaryControl& control) {
    auto [r1, r2] = residual(s, grid, p);
    double r = std::max(r1, r2);
    const double inv = 1.0 / (grid.dx() * grid.dx());
    const std::size_t n = grid.size();
    for (int species : {1, 2}) {
        const auto& y = species == 1 ? s.y1 : s.y2;
        auto react = [&](std::size_t i) {
            return species == 1 ? p.reaction1(s.y1[i], s.y2[i]) : p.reaction2(s.y1[i], s.y2[i]);
        };
        if (control.is_neumann(species, Endpoint::Left)) {
            r = std::max(r, std::abs(2.0 * (y[1] - y[0]) * inv + react(0)));
        }
        if (control.is_neumann(species, Endpoint::Right)) {
            r = std::max(r, std::abs(2.0 * (y[n - 2] - y[n - 1]) * inv + react(n - 1)));
        }
    }
    return r;
}

enum class SteadyClass { TrivialZeroOne, Barrier, OneZero, ZeroZero, Other, NonConverged };

inline const char* to_string(SteadyClass c) {
    switch (c) {
        case SteadyClass::TrivialZeroOne: return "TrivialZeroOne";
        case SteadyClass::Barrier: return "Barrier";
        case SteadyClass::OneZero: return "OneZero";
        case SteadyClass::ZeroZero: return "ZeroZero";
        case SteadyClass::Other: return "Other";
        case SteadyClass::NonConverged: return "NonConverged";
    }
    return "?";
}

struct SteadyOutcome {
    SpeciesState profile;
    double residual_sup = 0.0;
    SteadyClass classification = SteadyClass::NonConverged;
    double t_reached = 0.0;
};

struct InteriorExtrema {
    double max1, min1, max2, min2;
};

/// Extrema over interior nodes, or over all nodes when `all_nodes` is set.
inline InteriorExtrema extrema(const SpeciesState& s, bool all_nodes = false) {
    InteriorExtrema e{-std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
                      -std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
    const std::size_t n = s.size();
    const std::size_t lo = all_nodes ? 0 : 1;
    const std::size_t hi = all_nodes ? n : n - 1;
    for (std::size_t i = lo; i < hi; ++i) {
        e.max1 = std::max(e.max1, s.y1[i]);
        e.min1 = std::min(e.min1, s.y1[i]);
        e.max2 = std::max(e.max2, s.y2[i]);
        e.min2 = std::min(e.min2, s.y2[i]);
    }
    return e;
}

/// Classifies a converged profile. Dirichlet endpoint values are control
/// data, so only interior nodes are inspected unless all channels are zero-flux.
inline SteadyClass classify_profile(const SpeciesState& s, const BoundaryControl& control,
                                    double delta = kClassificationThreshold) {
    bool all_neumann = true;
    for (int sp : {1, 2}) {
        for (auto e : {Endpoint::Left, Endpoint::Right}) all_neumann = all_neumann && control.is_neumann(sp, e);
    }
    const auto e = extrema(s, all_neumann);
    if (e.max1 < delta && e.min2 > 1.0 - delta) return SteadyClass::TrivialZeroOne;
    if (control.is_constant(0.0, 1.0) && e.max1 >= delta) return SteadyClass::Barrier;
    if (e.min1 > 1.0 - delta && e.max2 < delta) return SteadyClass::OneZero;
    if (e.max1 < delta && e.max2 < delta) return SteadyClass::ZeroZero;
    return SteadyClass::Other;
}

/// Marches until the time-derivative proxy over one reporting interval and
/// the elliptic residual both drop below `tol`, then classifies.
///
/// `on_interval` (optional) is called with the state before and after each
/// reporting interval; used for monotonicity audits.
template <typename IntervalHook>
SteadyOutcome run_to_steady(const SimConfig& cfg, double tol, double t_max, IntervalHook&& on_interval,
                            double report_interval = 1.0) {
    validate(cfg);
    if (!(tol > 0.0)) fail(ErrorKind::InvalidArgument, "steady tolerance must be positive");
    SpeciesState s = cfg.init;
    s.t = 0.0;
    TimeMarcher marcher(cfg);
    const double interval = std::max(report_interval, 4.0 * marcher.dt_max());
    SteadyOutcome out;
    while (s.t < t_max) {
        SpeciesState prev = s;
        marcher.march_to(s, std::min(s.t + interval, t_max));
        on_interval(prev, s);
        double rate = 0.0;
        const double span = s.t - prev.t;
        for (std::size_t i = 0; i < s.size(); ++i) {
            rate = std::max(rate, std::abs(s.y1[i] - prev.y1[i]) / span);
            rate = std::max(rate, std::abs(s.y2[i] - prev.y2[i]) / span);
        }
        if (rate < tol) {
            const double res = residual_with_boundary(s, cfg.grid, cfg.params, cfg.control);
            if (res < tol) {
                out.profile = s;
                out.residual_sup = res;
                out.classification = classify_profile(s, cfg.control);
                out.t_reached = s.t;
                return out;
            }
        }
    }
    out.profile = s;
    out.residual_sup = residual_with_boundary(s, cfg.grid, cfg.params, cfg.control);
    out.classification = SteadyClass::NonConverged;
    out.t_reached = s.t;
    return out;
}

inline SteadyOutcome run_to_steady(const SimConfig& cfg, double tol = kSteadyTolerance, double t_max = 5000.0) {
    return run_to_steady(cfg, tol, t_max, [](const SpeciesState&, const SpeciesState&) {});
}

}  // namespace lvbc
