#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <sstream>
#include <utility>
#include <vector>

#include "lvbc/pde.hpp"

namespace lvbc {

struct FrontOptions {
    double dx = 0.1;                 ///< target spacing; n = round(2H/dx) + 1
    std::optional<double> dt;        ///< default: ImexCN automatic step
    Scheme scheme = Scheme::ImexCN;
    std::size_t samples = 200;       ///< level-set samples after burn-in
    double boundary_margin = 5.0;
    double min_r2 = 0.999;
    double monotone_tol = 1e-3;
};

struct LevelSample {
    double t;
    double x_half;
};

/// Front speed estimate. The profile is the final state on the shifted
/// abscissae xi = x - x_half(T).
struct FrontEstimate {
    double c = 0.0;
    double intercept = 0.0;
    double fit_r2 = 0.0;
    std::vector<LevelSample> level_track;
    std::vector<double> xi;
    SpeciesState profile;
    double dx = 0.0;
    bool monotone = false;
    double worst_monotone_violation = 0.0;
};

/// Abscissa (relative to the grid origin) where y1 first crosses 1/2 going
/// right, by linear interpolation between the bracketing nodes.
inline std::optional<double> level_crossing(const std::vector<double>& y1, double dx, double level = 0.5) {
    for (std::size_t i = 0; i + 1 < y1.size(); ++i) {
        if (y1[i] < level && y1[i + 1] >= level) {
            const double f = (level - y1[i]) / (y1[i + 1] - y1[i]);
            return (static_cast<double>(i) + f) * dx;
        }
    }
    return std::nullopt;
}

struct LineFit {
    double slope, intercept, r2;
};

inline LineFit least_squares(const std::vector<LevelSample>& pts) {
    const double n = static_cast<double>(pts.size());
    double st = 0, sx = 0;
    for (const auto& p : pts) {
        st += p.t;
        sx += p.x_half;
    }
    const double mt = st / n, mx = sx / n;
    double stt = 0, stx = 0, sxx = 0;
    for (const auto& p : pts) {
        stt += (p.t - mt) * (p.t - mt);
        stx += (p.t - mt) * (p.x_half - mx);
        sxx += (p.x_half - mx) * (p.x_half - mx);
    }
    const double slope = stx / stt;
    double ss_res = 0;
    for (const auto& p : pts) {
        const double e = p.x_half - (mx + slope * (p.t - mt));
        ss_res += e * e;
    }
    // A perfectly flat track is a perfect fit.
    const double r2 = sxx > 0.0 ? 1.0 - ss_res / sxx : 1.0;
    return {slope, mx - slope * mt, r2};
}

/// Simulates the front connecting (0,1) on the left to (1,0) on the right on
/// (-H, H) from step data, tracks the y1 = 1/2 level after a T/4 burn-in and
/// fits its speed. Negative c means the front moves left (species 1 invades).
inline FrontEstimate estimate_front(const CompetitionParams& params, double half_width, double T,
                                    const FrontOptions& opt = {}) {
    if (!(params.a() > 1.0 && params.b() > 1.0)) {
        fail(ErrorKind::RegimeViolation, "front estimation requires a > 1 and b > 1");
    }
    if (!(half_width >= 50.0)) fail(ErrorKind::InvalidArgument, "half width must be at least 50");
    if (!(T > 0.0)) fail(ErrorKind::InvalidArgument, "T must be positive");
    if (opt.samples < 3) fail(ErrorKind::InvalidArgument, "need at least 3 level samples");

    const double H = half_width;
    const auto n = static_cast<std::size_t>(std::llround(2.0 * H / opt.dx)) + 1;
    const Grid1D grid(2.0 * H, n);
    BoundaryControl control(DirichletConst{0.0}, DirichletConst{1.0}, DirichletConst{1.0}, DirichletConst{0.0});
    SpeciesState init = SpeciesState::constant(grid, 0.0, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
        if (grid.x(i) - H >= 0.0) {
            init.y1[i] = 1.0;
            init.y2[i] = 0.0;
        }
    }
    SimConfig cfg{grid, params, control, init, opt.scheme, opt.dt, T, {}};
    validate(cfg);

    FrontEstimate out;
    out.dx = grid.dx();
    SpeciesState s = init;
    TimeMarcher marcher(cfg);
    auto track = [&](double t) {
        const auto xh = level_crossing(s.y1, grid.dx());
        if (!xh) fail(ErrorKind::DomainTooSmall, "front left the window");
        const double x = *xh - H;
        if (x < -H + opt.boundary_margin || x > H - opt.boundary_margin) {
            std::ostringstream os;
            os << "front at x=" << x << " came within " << opt.boundary_margin << " of the boundary by t=" << t;
            fail(ErrorKind::DomainTooSmall, os.str());
        }
        return x;
    };
    const double burn = T / 4.0;
    marcher.march_to(s, burn);
    (void)track(burn);
    const double stride = (T - burn) / static_cast<double>(opt.samples - 1);
    for (std::size_t k = 0; k < opt.samples; ++k) {
        const double t = k + 1 == opt.samples ? T : burn + static_cast<double>(k) * stride;
        marcher.march_to(s, t);
        out.level_track.push_back({t, track(t)});
    }

    const auto fit = least_squares(out.level_track);
    out.c = fit.slope;
    out.intercept = fit.intercept;
    out.fit_r2 = fit.r2;
    if (!(fit.r2 >= opt.min_r2)) {
        std::ostringstream os;
        os << "level-set fit r2 = " << fit.r2 << " below " << opt.min_r2;
        fail(ErrorKind::UnreliableEstimate, os.str());
    }

    const double x_final = out.level_track.back().x_half;
    out.profile = s;
    out.xi.resize(n);
    for (std::size_t i = 0; i < n; ++i) out.xi[i] = grid.x(i) - H - x_final;
    for (std::size_t i = 0; i + 1 < n; ++i) {
        const double v = std::max(s.y1[i] - s.y1[i + 1], s.y2[i + 1] - s.y2[i]);
        out.worst_monotone_violation = std::max(out.worst_monotone_violation, v);
    }
    out.monotone = out.worst_monotone_violation <= opt.monotone_tol;
    return out;
}

/// Sup-norm of Y'' + c Y' + reaction over the central half of the window,
/// with centred differences on the estimate's own grid.
inline double comoving_residual(const FrontEstimate& f, const CompetitionParams& p) {
    const std::size_t n = f.profile.size();
    const double dx = f.dx;
    double worst = 0.0;
    for (std::size_t i = std::max<std::size_t>(1, n / 4); i < std::min(n - 1, 3 * n / 4); ++i) {
        const auto& y1 = f.profile.y1;
        const auto& y2 = f.profile.y2;
        const double r1 = (y1[i - 1] - 2 * y1[i] + y1[i + 1]) / (dx * dx) + f.c * (y1[i + 1] - y1[i - 1]) / (2 * dx) +
                          p.reaction1(y1[i], y2[i]);
        const double r2 = (y2[i - 1] - 2 * y2[i] + y2[i + 1]) / (dx * dx) + f.c * (y2[i + 1] - y2[i - 1]) / (2 * dx) +
                          p.reaction2(y1[i], y2[i]);
        worst = std::max({worst, std::abs(r1), std::abs(r2)});
    }
    return worst;
}

}  // namespace lvbc
