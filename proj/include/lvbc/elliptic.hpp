#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "lvbc/core.hpp"
#include "lvbc/pde.hpp"
#include "lvbc/tridiag.hpp"

namespace lvbc {

// ---------------------------------------------------------------------------
// Scalar two-point BVP  -u'' = u g(x, u),  u(0) = left, u(L) = right

/// A reaction of the form f(u) = u * growth(i, u), node-dependent.
template <typename R>
concept GrowthReaction = requires(const R r, std::size_t i, double u) {
    { r.growth(i, u) } -> std::convertible_to<double>;
    { r.growth_du(i, u) } -> std::convertible_to<double>;
};

struct BvpOptions {
    double newton_tol = 1e-10;
    int max_newton_iters = 50;
    int max_halvings = 30;
    double march_tol = 1e-7;
    double march_t_max = 1e5;
};

struct BvpSolution {
    std::vector<double> u;
    double residual = 0.0;
    bool converged = false;
    int newton_iters = 0;
    bool used_marching = false;
};

namespace detail {

template <GrowthReaction R>
double bvp_residual(const std::vector<double>& u, double inv_dx2, const R& react, std::vector<double>* out) {
    double sup = 0.0;
    const std::size_t n = u.size();
    for (std::size_t i = 1; i + 1 < n; ++i) {
        const double F = (u[i - 1] - 2.0 * u[i] + u[i + 1]) * inv_dx2 + u[i] * react.growth(i, u[i]);
        if (out) (*out)[i] = F;
        sup = std::max(sup, std::abs(F));
    }
    return std::isfinite(sup) ? sup : std::numeric_limits<double>::infinity();
}

/// Damped Newton with tridiagonal Jacobian; returns true on convergence.
template <GrowthReaction R>
bool bvp_newton(std::vector<double>& u, double inv_dx2, const R& react, const BvpOptions& opt, int& iters) {
    const std::size_t n = u.size();
    Tridiagonal jac(n);
    std::vector<double> F(n, 0.0), trial(n);
    double res = bvp_residual(u, inv_dx2, react, &F);
    for (iters = 0; iters < opt.max_newton_iters; ++iters) {
        if (res < opt.newton_tol) return true;
        jac.diag[0] = jac.diag[n - 1] = 1.0;
        jac.upper[0] = jac.lower[n - 1] = 0.0;
        std::vector<double> step(n, 0.0);
        for (std::size_t i = 1; i + 1 < n; ++i) {
            jac.lower[i] = jac.upper[i] = inv_dx2;
            jac.diag[i] = -2.0 * inv_dx2 + react.growth(i, u[i]) + u[i] * react.growth_du(i, u[i]);
            step[i] = -F[i];
        }
        try {
            jac.solve(step);
        } catch (const Error&) {
            return false;
        }
        double lambda = 1.0;
        bool accepted = false;
        for (int h = 0; h <= opt.max_halvings; ++h, lambda *= 0.5) {
            for (std::size_t i = 0; i < n; ++i) trial[i] = u[i] + lambda * step[i];
            const double trial_res = bvp_residual(trial, inv_dx2, react, nullptr);
            if (trial_res < res) {
                u.swap(trial);
                res = bvp_residual(u, inv_dx2, react, &F);
                accepted = true;
                break;
            }
        }
        if (!accepted) return res < opt.newton_tol;
    }
    return res < opt.newton_tol;
}

/// Pseudo-time marching  (u^{k+1} - u^k)/dt = D u^{k+1} + u^{k+1} g(u^k).
/// Every step solves an M-matrix system, so positivity is preserved and the
/// iteration converges monotonically from sub- or supersolutions.
template <GrowthReaction R>
bool bvp_march(std::vector<double>& u, double inv_dx2, double dx, const R& react, const BvpOptions& opt) {
    const std::size_t n = u.size();
    Tridiagonal m(n);
    std::vector<double> rhs(n);
    double t = 0.0;
    while (t < opt.march_t_max) {
        double gmax = 0.0;
        for (std::size_t i = 1; i + 1 < n; ++i) gmax = std::max(gmax, react.growth(i, u[i]));
        double dt = std::max(dx, 0.05);
        if (gmax > 0.0) dt = std::min(dt, 0.5 / gmax);
        for (int k = 0; k < 200; ++k) {
            m.diag[0] = m.diag[n - 1] = 1.0;
            m.upper[0] = m.lower[n - 1] = 0.0;
            rhs[0] = u[0];
            rhs[n - 1] = u[n - 1];
            for (std::size_t i = 1; i + 1 < n; ++i) {
                m.lower[i] = m.upper[i] = -dt * inv_dx2;
                m.diag[i] = 1.0 + 2.0 * dt * inv_dx2 - dt * react.growth(i, u[i]);
                rhs[i] = u[i];
            }
            m.solve(rhs);
            u.swap(rhs);
            t += dt;
        }
        if (bvp_residual(u, inv_dx2, react, nullptr) < opt.march_tol) return true;
    }
    return false;
}

}  // namespace detail

/// Solves -u'' = u g(i, u) with Dirichlet data taken from init's endpoints.
/// Damped Newton first; if it fails, or `accept` rejects its answer,
/// marches in pseudo-time from `init` and polishes with Newton.
template <GrowthReaction R, typename Accept>
BvpSolution solve_scalar_bvp(const Grid1D& grid, const R& react, std::vector<double> init, Accept&& accept,
                             const BvpOptions& opt = {}) {
    const double inv_dx2 = 1.0 / (grid.dx() * grid.dx());
    BvpSolution sol;
    sol.u = init;
    if (detail::bvp_newton(sol.u, inv_dx2, react, opt, sol.newton_iters) && accept(sol.u)) {
        sol.converged = true;
        sol.residual = detail::bvp_residual(sol.u, inv_dx2, react, nullptr);
        return sol;
    }
    sol.used_marching = true;
    sol.u = std::move(init);
    const bool marched = detail::bvp_march(sol.u, inv_dx2, grid.dx(), react, opt);
    int polish = 0;
    const bool polished = detail::bvp_newton(sol.u, inv_dx2, react, opt, polish);
    sol.newton_iters += polish;
    sol.residual = detail::bvp_residual(sol.u, inv_dx2, react, nullptr);
    sol.converged = (marched || polished) && sol.residual < opt.newton_tol && accept(sol.u);
    return sol;
}

/// Logistic growth 1 - u, optionally with a reduced intrinsic rate kappa.
struct LogisticGrowth {
    double kappa = 1.0;
    double growth(std::size_t, double u) const { return kappa - u; }
    double growth_du(std::size_t, double) const { return -1.0; }
};

/// Growth of the auxiliary psi problem: 1 - b_bar phi(x) - u.
struct ShadedLogisticGrowth {
    const std::vector<double>* phi;
    double b_bar;
    double growth(std::size_t i, double u) const { return 1.0 - b_bar * (*phi)[i] - u; }
    double growth_du(std::size_t, double) const { return -1.0; }
};

// ---------------------------------------------------------------------------
// Logistic steady state

struct LogisticProfile {
    Grid1D grid;
    std::vector<double> theta;
    bool trivial = true;
    double residual = 0.0;
};

/// Positive steady state of u_t = u_xx + u(kappa - u) with zero Dirichlet
/// data (kappa = 1 gives the logistic profile used throughout).
inline LogisticProfile solve_logistic_steady(const Grid1D& grid, double kappa = 1.0, const BvpOptions& opt = {}) {
    LogisticProfile out{grid, std::vector<double>(grid.size(), 0.0), true, 0.0};
    if (!(kappa > 0.0)) return out;
    // The linearisation at 0 is stable iff L <= pi / sqrt(kappa): only the trivial state exists.
    if (grid.length() * std::sqrt(kappa) <= std::numbers::pi) return out;

    std::vector<double> init(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        init[i] = 0.5 * kappa * std::sin(std::numbers::pi * grid.x(i) / grid.length());
    }
    init.front() = init.back() = 0.0;
    auto nontrivial = [&](const std::vector<double>& u) {
        return *std::max_element(u.begin(), u.end()) >= kClassificationThreshold * kappa;
    };
    BvpSolution sol = solve_scalar_bvp(grid, LogisticGrowth{kappa}, init, nontrivial, opt);
    if (!sol.converged) {
        // Discretely the bifurcation sits marginally above pi; a vanishing branch is still trivial.
        if (sol.residual < opt.newton_tol && !nontrivial(sol.u)) return out;
        std::ostringstream os;
        os << "logistic steady state did not converge on L=" << grid.length() << " (residual " << sol.residual << ")";
        fail(ErrorKind::NonConvergence, os.str());
    }
    out.theta = std::move(sol.u);
    out.trivial = false;
    out.residual = sol.residual;
    return out;
}

// ---------------------------------------------------------------------------
// Barrier steady states

struct BarrierProfile {
    Grid1D grid;
    std::vector<double> phi;
    std::vector<double> psi;
    double residual_sup = 0.0;
};

struct BarrierOptions {
    double tol = kSteadyTolerance;
    double t_max = 20000.0;
    std::optional<double> dt;          ///< ImexCN step; default dx
    bool audit_monotonicity = false;   ///< check y1 nondecreasing / y2 nonincreasing in time
    double monotone_tol = 1e-8;
};

struct BarrierSolve {
    SteadyOutcome outcome;
    bool monotone = true;
    double worst_monotone_violation = 0.0;
};

/// Marches the system with boundary data (0,1) from `init` until steady and
/// classifies the limit. A NonConverged classification is returned, not thrown.
inline BarrierSolve solve_barrier(const CompetitionParams& params, const Grid1D& grid, const SpeciesState& init,
                                  const BarrierOptions& opt = {}) {
    SimConfig cfg{grid, params, BoundaryControl::constant(0.0, 1.0), init, Scheme::ImexCN, opt.dt, opt.t_max, {}};
    BarrierSolve out;
    auto audit = [&](const SpeciesState& before, const SpeciesState& after) {
        if (!opt.audit_monotonicity) return;
        for (std::size_t i = 1; i + 1 < after.size(); ++i) {
            const double v = std::max(before.y1[i] - after.y1[i], after.y2[i] - before.y2[i]);
            out.worst_monotone_violation = std::max(out.worst_monotone_violation, v);
        }
    };
    out.outcome = run_to_steady(cfg, opt.tol, opt.t_max, audit);
    out.monotone = out.worst_monotone_violation <= opt.monotone_tol;
    return out;
}

inline std::optional<BarrierProfile> to_barrier_profile(const SteadyOutcome& outcome, const Grid1D& grid) {
    if (outcome.classification != SteadyClass::Barrier) return std::nullopt;
    return BarrierProfile{grid, outcome.profile.y1, outcome.profile.y2, outcome.residual_sup};
}

/// True when the profile leaves the coexistence level somewhere:
/// phi(x) > w1* or psi(x) < w2* at some node.
inline bool exceeds_coexistence(const BarrierProfile& bp, const CompetitionParams& params) {
    const auto w = coexistence_equilibrium(params);
    if (!w) fail(ErrorKind::RegimeViolation, "coexistence check requires a > 1");
    for (std::size_t i = 0; i < bp.phi.size(); ++i) {
        if (bp.phi[i] > w->w1 || bp.psi[i] < w->w2) return true;
    }
    return false;
}

// ---------------------------------------------------------------------------
// Sub/supersolution verification

struct SubsolutionReport {
    bool pass = true;
    double worst_violation = 0.0;  ///< max over checks of (violation); <= tolerance on pass
    int worst_species = 0;
    std::size_t worst_node = 0;
    double worst_x = 0.0;
    bool at_kink = false;
    double tolerance = 0.0;
};

/// Checks the steady subsolution inequalities
///   -y1'' <= y1 (1 - y1 - a y2),   -y2'' >= y2 (1 - b y1 - y2)
/// at interior nodes, and at each kink (a junction of a generalised
/// subsolution) that the y1 slope jumps up and the y2 slope jumps down.
inline SubsolutionReport verify_subsolution(const SpeciesState& pair, const CompetitionParams& params,
                                            const Grid1D& grid, const std::vector<double>& kinks = {}) {
    if (pair.y1.size() != grid.size() || pair.y2.size() != grid.size()) {
        fail(ErrorKind::Incompatible, "subsolution pair does not match grid");
    }
    SubsolutionReport rep;
    rep.tolerance = 1e-6 * (1.0 + grid.dx());
    rep.worst_violation = -std::numeric_limits<double>::infinity();
    const std::size_t n = grid.size();
    std::vector<bool> is_kink(n, false);
    for (double xk : kinks) {
        const auto k = static_cast<std::size_t>(std::llround(xk / grid.dx()));
        if (k == 0 || k + 1 >= n) fail(ErrorKind::InvalidArgument, "kink must lie at an interior node");
        is_kink[k] = true;
    }
    auto record = [&](double v, int species, std::size_t i, bool kink) {
        if (v > rep.worst_violation) {
            rep.worst_violation = v;
            rep.worst_species = species;
            rep.worst_node = i;
            rep.worst_x = grid.x(i);
            rep.at_kink = kink;
        }
    };
    const double inv = 1.0 / (grid.dx() * grid.dx());
    const auto& y1 = pair.y1;
    const auto& y2 = pair.y2;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (is_kink[i]) {
            const double jump1 = (y1[i + 1] - y1[i]) - (y1[i] - y1[i - 1]);
            const double jump2 = (y2[i + 1] - y2[i]) - (y2[i] - y2[i - 1]);
            record(-jump1 / grid.dx(), 1, i, true);
            record(jump2 / grid.dx(), 2, i, true);
            continue;
        }
        const double lap1 = (y1[i - 1] - 2.0 * y1[i] + y1[i + 1]) * inv;
        const double lap2 = (y2[i - 1] - 2.0 * y2[i] + y2[i + 1]) * inv;
        record(-lap1 - params.reaction1(y1[i], y2[i]), 1, i, false);
        record(lap2 + params.reaction2(y1[i], y2[i]), 2, i, false);
    }
    rep.pass = rep.worst_violation <= rep.tolerance;
    return rep;
}

// ---------------------------------------------------------------------------
// Constructive subsolutions

struct PsiLemmaResult {
    double b_bar = 0.0;
    std::vector<double> psi;
    double slope_left = 0.0;   ///< one-sided difference at x = 0
    double slope_right = 0.0;  ///< one-sided difference at x = R
    double psi_max = 0.0;      ///< max over interior nodes
    double delta = 0.0;        ///< audit: level the interior is pushed below
    double theta_len = 0.0;    ///< audit: boundary-layer length scale
};

/// Finds b_bar on a doubling schedule such that the solution of
///   -psi'' = psi (1 - b_bar phi - psi) on (0,R),  psi(0) = psi(R) = 1 - eps
/// satisfies psi < 1 - eps inside, psi'(0) < -C and psi'(R) > C.
inline PsiLemmaResult construct_psi_lemma(const Grid1D& grid, double eps, double C, const std::vector<double>& phi,
                                          double b_start = 2.0, const BvpOptions& opt = {}) {
    const double R = grid.length();
    if (!(R > std::numbers::pi)) fail(ErrorKind::Domain, "psi construction requires R > pi");
    if (!(eps > 0.0 && eps < 1.0)) fail(ErrorKind::Domain, "eps must lie in (0,1)");
    if (!(C > 0.0)) fail(ErrorKind::Domain, "slope bound C must be positive");
    if (phi.size() != grid.size()) fail(ErrorKind::Incompatible, "phi does not match grid");
    const std::size_t n = grid.size();
    if (std::abs(phi.front()) > kBoxTolerance || std::abs(phi.back()) > kBoxTolerance) {
        fail(ErrorKind::Domain, "phi must vanish at both endpoints");
    }
    for (std::size_t i = 1; i + 1 < n; ++i) {
        if (!(phi[i] > 0.0)) {
            fail(ErrorKind::Domain, "phi must be positive on the interior (node " + std::to_string(i) + ")");
        }
    }

    PsiLemmaResult out;
    out.delta = 0.5 * (1.0 - eps);
    out.theta_len = 0.5 * std::min({C / 3.0, (1.0 - eps - out.delta) / (6.0 * C), R / 3.0});

    const double edge = 1.0 - eps;
    std::vector<double> guess(n, edge);
    for (double b_bar = std::max(2.0, b_start); b_bar <= 1e6; b_bar *= 2.0) {
        ShadedLogisticGrowth react{&phi, b_bar};
        auto positive = [&](const std::vector<double>& u) {
            for (std::size_t i = 1; i + 1 < n; ++i) {
                if (!(u[i] > 0.0)) return false;
            }
            return true;
        };
        BvpSolution sol = solve_scalar_bvp(grid, react, guess, positive, opt);
        if (!sol.converged) continue;
        const auto& psi = sol.u;
        const double slope_left = (psi[1] - psi[0]) / grid.dx();
        const double slope_right = (psi[n - 1] - psi[n - 2]) / grid.dx();
        const double psi_max = *std::max_element(psi.begin() + 1, psi.end() - 1);
        guess = psi;
        if (psi_max < edge && slope_left < -C && slope_right > C) {
            out.b_bar = b_bar;
            out.psi = psi;
            out.slope_left = slope_left;
            out.slope_right = slope_right;
            out.psi_max = psi_max;
            return out;
        }
    }
    fail(ErrorKind::SearchFailure, "no b_bar <= 1e6 satisfies the psi conditions");
}

struct SubsolutionRecipe {
    double epsilon = 0.0;
    double R = 0.0;
    double M = 0.0;
    double C = 0.0;
    double b_bar = 0.0;
    double delta = 0.0;
    double theta_len = 0.0;
};

struct ConstructedSubsolution {
    SubsolutionRecipe recipe;
    SpeciesState pair;
    std::vector<double> kinks;      ///< abscissae of the two junctions
    CompetitionParams params;       ///< (a, b_bar)
    SubsolutionReport verification;
};

/// Builds a generalised subsolution of the barrier problem for (a, b_bar):
/// phi solves the reduced-rate logistic problem on (0,R), psi comes from
/// `construct_psi_lemma`, both are extended by zero / a parabola over
/// margins of width M = (L - R)/2 and shifted by M.
///
/// eps and R are the midpoints of their admissible intervals, with M snapped
/// to a whole number of cells so that the junctions fall on grid nodes;
/// C = 2 * 4 eps / (L - R).
inline ConstructedSubsolution construct_bbarrier_subsolution(double a, const Grid1D& grid,
                                                             const BvpOptions& opt = {}) {
    if (!(a > 0.0)) fail(ErrorKind::InvalidArgument, "a must be positive");
    const double L = grid.length();
    if (!(L > std::numbers::pi)) fail(ErrorKind::Domain, "L <= pi leaves no admissible R");

    SubsolutionRecipe rec;
    const double eps_lo = std::max((a - 1.0) / a, 0.0);
    rec.epsilon = 0.5 * (eps_lo + 1.0);
    const double R_lo = std::max(std::numbers::pi, L - 4.0 * std::sqrt(2.0 * rec.epsilon));
    const double M_target = 0.25 * (L - R_lo);  // half-width at the midpoint R
    const double dx = grid.dx();
    const double M_max = 0.5 * (L - R_lo);
    auto cells = static_cast<std::size_t>(std::llround(M_target / dx));
    while (cells > 0 && static_cast<double>(cells) * dx >= M_max) --cells;
    if (cells == 0) fail(ErrorKind::Domain, "grid too coarse to place the junctions inside the admissible R range");
    rec.M = static_cast<double>(cells) * dx;
    rec.R = L - 2.0 * rec.M;
    rec.C = 2.0 * 4.0 * rec.epsilon / (L - rec.R);

    const std::size_t n = grid.size();
    const std::size_t inner_n = n - 2 * cells;
    const Grid1D inner(rec.R, inner_n);
    const double kappa = 1.0 - a * (1.0 - rec.epsilon);
    const LogisticProfile phi = solve_logistic_steady(inner, kappa, opt);
    if (phi.trivial) {
        std::ostringstream os;
        os << "phi problem on (0," << rec.R << ") with rate " << kappa << " has only the trivial solution";
        fail(ErrorKind::Domain, os.str());
    }
    const PsiLemmaResult lemma = construct_psi_lemma(inner, rec.epsilon, rec.C, phi.theta, 2.0, opt);
    rec.b_bar = lemma.b_bar;
    rec.delta = lemma.delta;
    rec.theta_len = lemma.theta_len;

    SpeciesState pair = SpeciesState::constant(grid, 0.0, 1.0);
    const double eps_over_M2 = rec.epsilon / (rec.M * rec.M);
    for (std::size_t i = 0; i < n; ++i) {
        if (i < cells) {
            const double s = static_cast<double>(i) * dx;
            pair.y2[i] = 1.0 - eps_over_M2 * s * s;
        } else if (i >= n - cells) {
            const double s = static_cast<double>(n - 1 - i) * dx;
            pair.y2[i] = 1.0 - eps_over_M2 * s * s;
        } else {
            pair.y1[i] = phi.theta[i - cells];
            pair.y2[i] = lemma.psi[i - cells];
        }
    }
    std::vector<double> kinks{grid.x(cells), grid.x(n - 1 - cells)};
    const CompetitionParams params(a, rec.b_bar);
    SubsolutionReport rep = verify_subsolution(pair, params, grid, kinks);
    if (!rep.pass) {
        std::ostringstream os;
        os << "constructed pair fails the subsolution check (violation " << rep.worst_violation << " at x="
           << rep.worst_x << ")";
        fail(ErrorKind::NonConvergence, os.str());
    }
    return ConstructedSubsolution{rec, std::move(pair), std::move(kinks), params, rep};
}

/// Rescaled logistic subsolution (theta1, 1) with
/// theta1(x) = (1 - a) Theta_l(x sqrt(1 - a)),  l = sqrt(1 - a) L.
/// Requires 0 < a < 1 - pi^2 / L^2.
inline SpeciesState construct_a_small_subsolution(double a, double b, const Grid1D& grid,
                                                  const BvpOptions& opt = {}) {
    const double L = grid.length();
    const double bound = 1.0 - std::numbers::pi * std::numbers::pi / (L * L);
    if (!(a > 0.0) || !(a < bound)) {
        std::ostringstream os;
        os << "requires 0 < a < 1 - pi^2/L^2 = " << bound << ", got a=" << a;
        fail(ErrorKind::RegimeViolation, os.str());
    }
    const CompetitionParams params(a, b);
    const double scale = std::sqrt(1.0 - a);
    const Grid1D scaled(scale * L, grid.size());
    const LogisticProfile theta = solve_logistic_steady(scaled, 1.0, opt);
    if (theta.trivial) fail(ErrorKind::NonConvergence, "rescaled logistic profile is trivial on this grid");
    SpeciesState pair = SpeciesState::constant(grid, 0.0, 1.0);
    for (std::size_t i = 0; i < grid.size(); ++i) pair.y1[i] = (1.0 - a) * theta.theta[i];
    SubsolutionReport rep = verify_subsolution(pair, params, grid);
    if (!rep.pass) fail(ErrorKind::NonConvergence, "rescaled logistic pair fails the subsolution check");
    return pair;
}

}  // namespace lvbc
