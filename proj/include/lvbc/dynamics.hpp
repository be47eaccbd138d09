#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <exception>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "lvbc/core.hpp"

namespace lvbc {

/// State of the diffusion-free kinetic system.
struct OdeState {
    double w1 = 0.0;
    double w2 = 0.0;
};

enum class EquilibriumLabel { Attractive, Saddle, Repulsive, GloballyAttractingOnBox };

inline const char* to_string(EquilibriumLabel l) {
    switch (l) {
        case EquilibriumLabel::Attractive: return "Attractive";
        case EquilibriumLabel::Saddle: return "Saddle";
        case EquilibriumLabel::Repulsive: return "Repulsive";
        case EquilibriumLabel::GloballyAttractingOnBox: return "GloballyAttractingOnBox";
    }
    return "?";
}

struct EquilibriumInfo {
    OdeState point;
    EquilibriumLabel label;
    std::array<double, 2> eigenvalues;  ///< real parts, descending
};

inline OdeState ode_rhs(const OdeState& w, const CompetitionParams& p) {
    return {p.reaction1(w.w1, w.w2), p.reaction2(w.w1, w.w2)};
}

/// Eigenvalues of the kinetic Jacobian at w, sorted descending. Both are real
/// for this system at every equilibrium; complex pairs report their real part.
inline std::array<double, 2> jacobian_eigenvalues(const OdeState& w, const CompetitionParams& p) {
    const double j11 = 1.0 - 2.0 * w.w1 - p.a() * w.w2;
    const double j12 = -p.a() * w.w1;
    const double j21 = -p.b() * w.w2;
    const double j22 = 1.0 - p.b() * w.w1 - 2.0 * w.w2;
    const double tr = j11 + j22;
    const double det = j11 * j22 - j12 * j21;
    const double disc = tr * tr / 4.0 - det;
    if (disc < 0.0) return {tr / 2.0, tr / 2.0};
    const double s = std::sqrt(disc);
    return {tr / 2.0 + s, tr / 2.0 - s};
}

/// Label implied by the eigenvalue signs. A zero eigenvalue next to a
/// negative one is read as attractive (the a = 1 merger at (0,1)).
inline EquilibriumLabel label_from_eigenvalues(const std::array<double, 2>& ev) {
    constexpr double tol = 1e-12;
    if (ev[0] > tol && ev[1] > tol) return EquilibriumLabel::Repulsive;
    if (ev[0] > tol) return EquilibriumLabel::Saddle;
    return EquilibriumLabel::Attractive;
}

/// Equilibria in the box with Jacobian-derived stability labels. (1,0) is
/// tagged GloballyAttractingOnBox when a < 1.
inline std::vector<EquilibriumInfo> equilibria(const CompetitionParams& p) {
    if (!(p.b() > 1.0)) fail(ErrorKind::RegimeViolation, "equilibrium list requires b > 1");
    std::vector<EquilibriumInfo> out;
    auto add = [&](OdeState w) {
        const auto ev = jacobian_eigenvalues(w, p);
        out.push_back({w, label_from_eigenvalues(ev), ev});
    };
    add({0.0, 0.0});
    add({1.0, 0.0});
    if (p.a() < 1.0) out.back().label = EquilibriumLabel::GloballyAttractingOnBox;
    add({0.0, 1.0});
    if (p.a() > 1.0) {
        const auto w = coexistence_equilibrium(p);
        add({w->w1, w->w2});
    }
    return out;
}

/// Classical RK4 orbit from w0 over [0, T] with step dt (the last step is
/// shortened to land on T). The returned orbit includes w0.
inline std::vector<OdeState> integrate_ode(const OdeState& w0, const CompetitionParams& p, double T, double dt) {
    constexpr double box_tol = 1e-9;
    auto in_box = [](const OdeState& w) {
        return w.w1 >= -box_tol && w.w1 <= 1.0 + box_tol && w.w2 >= -box_tol && w.w2 <= 1.0 + box_tol;
    };
    if (!in_box(w0)) fail(ErrorKind::InvalidArgument, "initial point outside the box");
    if (!(T >= 0.0) || !(dt > 0.0)) fail(ErrorKind::InvalidArgument, "T must be nonnegative and dt positive");
    const auto steps = static_cast<std::size_t>(std::ceil(T / dt - 1e-9));
    std::vector<OdeState> orbit;
    orbit.reserve(steps + 1);
    orbit.push_back(w0);
    OdeState w = w0;
    double t = 0.0;
    for (std::size_t k = 0; k < steps; ++k) {
        const double h = std::min(dt, T - t);
        const auto k1 = ode_rhs(w, p);
        const auto k2 = ode_rhs({w.w1 + 0.5 * h * k1.w1, w.w2 + 0.5 * h * k1.w2}, p);
        const auto k3 = ode_rhs({w.w1 + 0.5 * h * k2.w1, w.w2 + 0.5 * h * k2.w2}, p);
        const auto k4 = ode_rhs({w.w1 + h * k3.w1, w.w2 + h * k3.w2}, p);
        w.w1 += h / 6.0 * (k1.w1 + 2.0 * k2.w1 + 2.0 * k3.w1 + k4.w1);
        w.w2 += h / 6.0 * (k1.w2 + 2.0 * k2.w2 + 2.0 * k3.w2 + k4.w2);
        t += h;
        if (!in_box(w)) {
            std::ostringstream os;
            os << "orbit left the box at t=" << t << " (w=" << w.w1 << "," << w.w2 << "); reduce dt";
            fail(ErrorKind::Stability, os.str());
        }
        orbit.push_back(w);
    }
    return orbit;
}

enum class BasinClass { ToZeroOne, ToOneZero, Unresolved };

inline const char* to_string(BasinClass c) {
    switch (c) {
        case BasinClass::ToZeroOne: return "ToZeroOne";
        case BasinClass::ToOneZero: return "ToOneZero";
        case BasinClass::Unresolved: return "Unresolved";
    }
    return "?";
}

/// Lattice points this close to the separatrix line are treated as lying on
/// it; round-off in their coordinates decides their fate otherwise.
inline constexpr double kSeparatrixTolerance = 1e-12;

struct BasinOptions {
    double t_cap = 500.0;
    double radius = 1e-4;
    double dt = 0.02;
};

/// Which of the two corner attractors the orbit from w0 reaches.
///
/// For a <= 1 the answer follows from global attraction of (1,0) on
/// {w1 > 0}. For a > 1, points on the linear separatrix segment (to round-off) are
/// Unresolved; everything else is integrated until it lands within `radius`
/// of a corner or t_cap passes.
inline BasinClass classify_basin(const OdeState& w0, const CompetitionParams& p, const BasinOptions& opt = {}) {
    if (w0.w1 < 0.0 || w0.w1 > 1.0 || w0.w2 < 0.0 || w0.w2 > 1.0) {
        fail(ErrorKind::InvalidArgument, "basin query outside the box");
    }
    if (w0.w1 == 0.0 && w0.w2 == 0.0) return BasinClass::Unresolved;
    if (p.a() <= 1.0) return w0.w1 > 0.0 ? BasinClass::ToOneZero : BasinClass::ToZeroOne;
    if (p.b() > 1.0 && w0.w1 <= separatrix_extent(p) &&
        std::abs(w0.w2 - separatrix_value(p, w0.w1)) <= kSeparatrixTolerance) {
        return BasinClass::Unresolved;
    }
    OdeState w = w0;
    double t = 0.0;
    while (t < opt.t_cap) {
        if (std::hypot(w.w1, w.w2 - 1.0) < opt.radius) return BasinClass::ToZeroOne;
        if (std::hypot(w.w1 - 1.0, w.w2) < opt.radius) return BasinClass::ToOneZero;
        const double span = std::min(10.0, opt.t_cap - t);
        w = integrate_ode(w, p, span, opt.dt).back();
        t += span;
    }
    if (std::hypot(w.w1, w.w2 - 1.0) < opt.radius) return BasinClass::ToZeroOne;
    if (std::hypot(w.w1 - 1.0, w.w2) < opt.radius) return BasinClass::ToOneZero;
    return BasinClass::Unresolved;
}

struct PortraitPoint {
    OdeState w0;
    BasinClass cls;
};

/// Classifies the lattice (i/(d-1), j/(d-1)) with w1 varying slowest. Work is
/// split over `threads` workers; output order is independent of the split.
inline std::vector<PortraitPoint> phase_portrait(const CompetitionParams& p, std::size_t density,
                                                 std::size_t threads = 1, const BasinOptions& opt = {}) {
    if (density < 2) fail(ErrorKind::InvalidArgument, "portrait density must be at least 2");
    const std::size_t total = density * density;
    std::vector<PortraitPoint> out(total);
    const double h = 1.0 / static_cast<double>(density - 1);
    threads = std::clamp<std::size_t>(threads, 1, total);
    auto coord = [&](std::size_t k) { return k + 1 == density ? 1.0 : static_cast<double>(k) * h; };
    std::vector<std::exception_ptr> errors(threads);
    auto work = [&](std::size_t begin, std::size_t stride) {
        try {
            for (std::size_t k = begin; k < total; k += stride) {
                const OdeState w{coord(k / density), coord(k % density)};
                out[k] = {w, classify_basin(w, p, opt)};
            }
        } catch (...) {
            errors[begin] = std::current_exception();
        }
    };
    if (threads == 1) {
        work(0, 1);
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(work, t, threads);
    }
    for (const auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return out;
}

}  // namespace lvbc
