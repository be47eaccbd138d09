#pragma once

#include <chrono>
#include <cmath>
#include <cstddef>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "lvbc/elliptic.hpp"

namespace lvbc {

/// Discretisation used by every barrier probe. The node count follows the
/// length so that sweeps over L keep the spacing fixed.
struct ProbeNumerics {
    double dx = 0.05;
    double tol = kSteadyTolerance;
    double t_max = 20000.0;
    std::optional<double> dt;
    bool warm_start = true;

    Grid1D grid(double L) const {
        if (!(dx > 0.0)) fail(ErrorKind::InvalidArgument, "probe spacing must be positive");
        return Grid1D(L, static_cast<std::size_t>(std::llround(L / dx)) + 1);
    }
};

struct ProbeResult {
    bool barrier = false;
    SteadyOutcome outcome;
};

/// Marches from (1,0), or from `warm` when given, with boundary data (0,1)
/// and reports whether the limit is a barrier. `warm` must dominate the
/// maximal steady state in the competitive order (a barrier computed at a
/// larger b or a smaller a), otherwise the answer may be wrong.
inline ProbeResult probe_barrier(double a, double b, double L, const ProbeNumerics& num = {},
                                 const SpeciesState* warm = nullptr) {
    const CompetitionParams p(a, b);
    const Grid1D grid = num.grid(L);
    const SpeciesState init = warm ? *warm : SpeciesState::constant(grid, 1.0, 0.0);
    const auto solve = solve_barrier(p, grid, init, BarrierOptions{num.tol, num.t_max, num.dt, false, 1e-8});
    if (solve.outcome.classification == SteadyClass::NonConverged) {
        std::ostringstream os;
        os.precision(6);
        os << "no steady state by t=" << solve.outcome.t_reached << " at a=" << a << ", b=" << b << ", L=" << L
           << " (residual " << solve.outcome.residual_sup << ")";
        fail(ErrorKind::Indeterminate, os.str());
    }
    return {solve.outcome.classification == SteadyClass::Barrier, solve.outcome};
}

inline bool barrier_exists(double a, double b, double L, const ProbeNumerics& num = {}) {
    return probe_barrier(a, b, L, num).barrier;
}

enum class ThresholdKind { bStar, aStar };
enum class SearchStatus { Converged, Indeterminate, NonMonotone };

inline const char* to_string(ThresholdKind k) { return k == ThresholdKind::bStar ? "bStar" : "aStar"; }

inline const char* to_string(SearchStatus s) {
    switch (s) {
        case SearchStatus::Converged: return "Converged";
        case SearchStatus::Indeterminate: return "Indeterminate";
        case SearchStatus::NonMonotone: return "NonMonotone";
    }
    return "?";
}

struct Evaluation {
    double param;
    bool barrier;
};

struct ThresholdResult {
    ThresholdKind which = ThresholdKind::bStar;
    double value = 0.0;
    std::pair<double, double> bracket;
    double tol = 0.0;
    std::vector<Evaluation> evaluations;
    double L = 0.0;
    std::size_t n = 0;
    double runtime_s = 0.0;
    SearchStatus status = SearchStatus::Converged;
    std::string message;
};

/// True when the indicator is monotone in the parameter: nondecreasing if
/// `increasing`, nonincreasing otherwise.
inline bool indicator_monotone(std::vector<Evaluation> evals, bool increasing) {
    std::sort(evals.begin(), evals.end(), [](const Evaluation& x, const Evaluation& y) { return x.param < y.param; });
    for (std::size_t i = 1; i < evals.size(); ++i) {
        const bool prev = evals[i - 1].barrier, cur = evals[i].barrier;
        if (increasing ? (prev && !cur) : (!prev && cur)) return false;
    }
    return true;
}

namespace detail {

/// Bisection on an indicator that is false at `off` and true at `on`.
/// `probe(value, warm)` evaluates the indicator; the barrier state nearest
/// the transition seeds later probes when warm starts are enabled.
template <typename Probe>
ThresholdResult bisect_threshold(ThresholdKind which, double off, double on, double tol, double L,
                                 const ProbeNumerics& num, Probe&& probe) {
    const auto start = std::chrono::steady_clock::now();
    if (!(tol > 0.0)) fail(ErrorKind::InvalidArgument, "bisection tolerance must be positive");
    ThresholdResult res;
    res.which = which;
    res.tol = tol;
    res.L = L;
    res.n = num.grid(L).size();
    auto finish = [&](SearchStatus st, std::string msg) {
        res.status = st;
        res.message = std::move(msg);
        res.bracket = {std::min(off, on), std::max(off, on)};
        res.value = 0.5 * (off + on);
        res.runtime_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool increasing = which == ThresholdKind::bStar;
        if (st == SearchStatus::Converged && !indicator_monotone(res.evaluations, increasing)) {
            res.status = SearchStatus::NonMonotone;
            res.message = "barrier indicator is not monotone across the evaluations";
        }
        return res;
    };

    std::optional<SpeciesState> warm;
    auto eval = [&](double v) {
        const auto r = probe(v, num.warm_start && warm ? &*warm : nullptr);
        res.evaluations.push_back({v, r.barrier});
        if (r.barrier) warm = r.outcome.profile;
        return r.barrier;
    };

    try {
        const bool at_off = eval(off);
        warm.reset();
        const bool at_on = eval(on);
        if (at_off || !at_on) {
            std::ostringstream os;
            os << "bracket does not straddle the transition (barrier " << (at_off ? "present" : "absent") << " at "
               << off << ", " << (at_on ? "present" : "absent") << " at " << on << ")";
            fail(ErrorKind::Bracket, os.str());
        }
        while (std::abs(on - off) > tol) {
            const double mid = 0.5 * (off + on);
            if (eval(mid)) {
                on = mid;
            } else {
                off = mid;
            }
        }
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::Indeterminate) throw;
        return finish(SearchStatus::Indeterminate, e.what());
    }
    return finish(SearchStatus::Converged, "");
}

}  // namespace detail

/// Bisects b in [lo, hi]: no barrier at lo, barrier at hi.
inline ThresholdResult find_b_star(double a, double L, std::pair<double, double> bracket, double tol,
                                   const ProbeNumerics& num = {}) {
    if (!(bracket.first < bracket.second)) fail(ErrorKind::InvalidArgument, "bracket must satisfy lo < hi");
    return detail::bisect_threshold(ThresholdKind::bStar, bracket.first, bracket.second, tol, L, num,
                                    [&](double b, const SpeciesState* warm) { return probe_barrier(a, b, L, num, warm); });
}

/// Bisects a in [lo, hi]: barrier at lo, none at hi.
inline ThresholdResult find_a_star(double b, double L, std::pair<double, double> bracket, double tol,
                                   const ProbeNumerics& num = {}) {
    if (!(bracket.first < bracket.second)) fail(ErrorKind::InvalidArgument, "bracket must satisfy lo < hi");
    return detail::bisect_threshold(ThresholdKind::aStar, bracket.second, bracket.first, tol, L, num,
                                    [&](double a, const SpeciesState* warm) { return probe_barrier(a, b, L, num, warm); });
}

struct SweepRow {
    double L;
    bool barrier;
};

struct SweepResult {
    std::vector<SweepRow> rows;
    bool monotone = true;
    /// Last L without and first L with a barrier, when the sweep crosses.
    std::optional<std::pair<double, double>> transition;
};

inline SweepResult sweep_L(double a, double b, const std::vector<double>& L_values, const ProbeNumerics& num = {}) {
    for (std::size_t i = 1; i < L_values.size(); ++i) {
        if (!(L_values[i] > L_values[i - 1])) fail(ErrorKind::InvalidArgument, "L values must increase");
    }
    SweepResult out;
    std::vector<Evaluation> evals;
    for (double L : L_values) {
        const bool barrier = barrier_exists(a, b, L, num);
        out.rows.push_back({L, barrier});
        evals.push_back({L, barrier});
    }
    out.monotone = indicator_monotone(evals, true);
    for (std::size_t i = 1; i < out.rows.size(); ++i) {
        if (!out.rows[i - 1].barrier && out.rows[i].barrier) {
            out.transition = std::pair{out.rows[i - 1].L, out.rows[i].L};
            break;
        }
    }
    return out;
}

}  // namespace lvbc
