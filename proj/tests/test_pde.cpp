#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "lvbc/pde.hpp"

using namespace lvbc;

namespace {

SpeciesState random_state(const Grid1D& g, std::mt19937& rng) {
    std::uniform_real_distribution<double> U(0.0, 1.0);
    SpeciesState s = SpeciesState::constant(g, 0.0, 0.0);
    for (std::size_t i = 0; i < g.size(); ++i) {
        s.y1[i] = U(rng);
        s.y2[i] = U(rng);
    }
    return s;
}

DirichletPiecewise random_piecewise(std::mt19937& rng, double t_end, int pieces) {
    std::uniform_real_distribution<double> U(0.0, 1.0);
    DirichletPiecewise p;
    for (int k = 0; k < pieces; ++k) {
        p.breakpoints.push_back(t_end * k / pieces);
        p.values.push_back(U(rng));
    }
    return p;
}

double sup_diff(const SpeciesState& a, const SpeciesState& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        d = std::max({d, std::abs(a.y1[i] - b.y1[i]), std::abs(a.y2[i] - b.y2[i])});
    }
    return d;
}

}  // namespace

TEST(AutoDt, Formulae) {
    const auto g = make_grid(8.0, 401);
    const CompetitionParams p(1.5, 3.5);
    EXPECT_DOUBLE_EQ(auto_dt(g, p, Scheme::Explicit), std::min(0.4 * 0.02 * 0.02, 0.1 / 4.5));
    EXPECT_DOUBLE_EQ(auto_dt(g, p, Scheme::ImexCN), std::min(0.02, 0.5 / 4.5));
    const auto coarse = make_grid(8.0, 11);
    EXPECT_DOUBLE_EQ(auto_dt(coarse, p, Scheme::Explicit), 0.1 / 4.5);
}

TEST(Validate, RejectsBadConfigs) {
    const auto g = make_grid(4.0, 41);
    const CompetitionParams p(1.5, 3.5);
    SimConfig ok{g, p, BoundaryControl::constant(0, 1), SpeciesState::constant(g, 0.2, 0.5), Scheme::Explicit, {}, 1.0, {}};
    EXPECT_NO_THROW(validate(ok));
    auto bad = ok;
    bad.t_end = 0.0;
    EXPECT_THROW(validate(bad), Error);
    bad = ok;
    bad.dt = 1.0;  // above the explicit bound
    EXPECT_THROW(validate(bad), Error);
    bad.scheme = Scheme::ImexCN;
    EXPECT_NO_THROW(validate(bad));
    bad = ok;
    bad.init.y1.pop_back();
    EXPECT_THROW(validate(bad), Error);
    bad = ok;
    bad.init.y2[3] = 1.1;
    EXPECT_THROW(validate(bad), Error);
    bad = ok;
    bad.snapshot_stride = -1.0;
    EXPECT_THROW(validate(bad), Error);
}

TEST(Simulate, ConstantEquilibriaAreFixedPoints) {
    const auto g = make_grid(6.0, 61);
    const CompetitionParams p(1.5, 3.5);
    for (auto scheme : {Scheme::Explicit, Scheme::ImexCN}) {
        for (auto [u1, u2] : {std::pair{0.0, 1.0}, std::pair{1.0, 0.0}, std::pair{0.0, 0.0}}) {
            SimConfig cfg{g, p, BoundaryControl::constant(u1, u2), SpeciesState::constant(g, u1, u2), scheme, {}, 5.0, {}};
            const auto traj = simulate(cfg);
            EXPECT_LT(sup_diff(traj.final, cfg.init), 1e-14) << to_string(scheme) << " (" << u1 << "," << u2 << ")";
        }
        SimConfig neu{g, p, BoundaryControl::neumann(), SpeciesState::constant(g, 0.0, 1.0), scheme, {}, 5.0, {}};
        EXPECT_LT(sup_diff(simulate(neu).final, neu.init), 1e-14);
    }
}

TEST(Simulate, SnapshotsCoverInterval) {
    const auto g = make_grid(4.0, 41);
    SimConfig cfg{g, CompetitionParams(1.5, 3.5), BoundaryControl::constant(0, 1), SpeciesState::constant(g, 0.1, 0.9),
                  Scheme::ImexCN, {}, 3.0, 0.7};
    const auto traj = simulate(cfg);
    ASSERT_EQ(traj.snapshots.size(), 6u);  // 0, .7, 1.4, 2.1, 2.8, 3
    EXPECT_EQ(traj.snapshots.front().t, 0.0);
    EXPECT_EQ(traj.snapshots.back().t, 3.0);
    EXPECT_NEAR(traj.snapshots[2].t, 1.4, 1e-12);
    EXPECT_EQ(traj.final.t, 3.0);
}

TEST(Simulate, BoxInvariantUnderRandomControls) {
    std::mt19937 rng(7);
    const auto g = make_grid(5.0, 51);
    for (int trial = 0; trial < 10; ++trial) {
        const CompetitionParams p(0.5 + 3.0 * trial / 10.0, 1.5 + 0.5 * trial);
        const BoundaryControl bc(random_piecewise(rng, 4.0, 5), random_piecewise(rng, 4.0, 3),
                                 random_piecewise(rng, 4.0, 4), trial % 2 ? ChannelControl(NeumannZero{})
                                                                         : ChannelControl(random_piecewise(rng, 4.0, 2)));
        for (auto scheme : {Scheme::Explicit, Scheme::ImexCN}) {
            SimConfig cfg{g, p, bc, random_state(g, rng), scheme, {}, 4.0, 0.1};
            const auto traj = simulate(cfg);  // enforce_box throws on excursions beyond 1e-12
            for (const auto& s : traj.snapshots) {
                for (std::size_t i = 0; i < g.size(); ++i) {
                    ASSERT_GE(s.y1[i], 0.0);
                    ASSERT_LE(s.y1[i], 1.0);
                    ASSERT_GE(s.y2[i], 0.0);
                    ASSERT_LE(s.y2[i], 1.0);
                }
            }
        }
    }
}

TEST(Simulate, DirichletEndpointsCarryControls) {
    const auto g = make_grid(4.0, 41);
    const BoundaryControl bc(DirichletPiecewise{{0.0, 1.0}, {0.2, 0.7}}, DirichletConst{0.4}, DirichletConst{0.9},
                             NeumannZero{});
    SimConfig cfg{g, CompetitionParams(1.5, 3.5), bc, SpeciesState::constant(g, 0.5, 0.5), Scheme::ImexCN, {}, 2.0, 0.5};
    const auto traj = simulate(cfg);
    EXPECT_EQ(traj.snapshots[1].y1.front(), 0.2);  // t = 0.5
    EXPECT_EQ(traj.snapshots[3].y1.front(), 0.7);  // t = 1.5
    EXPECT_EQ(traj.final.y1.back(), 0.4);
    EXPECT_EQ(traj.final.y2.front(), 0.9);
}

TEST(Simulate, ComparisonPrincipleRandomPairs) {
    std::mt19937 rng(21);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    const auto g = make_grid(5.0, 51);
    const CompetitionParams p(1.5, 3.5);
    for (int trial = 0; trial < 8; ++trial) {
        // Ordered data: y1 below, y2 above for the "sub" problem.
        auto sup = random_state(g, rng);
        auto sub = sup;
        for (std::size_t i = 0; i < g.size(); ++i) {
            sub.y1[i] = sup.y1[i] * U(rng);
            sub.y2[i] = sup.y2[i] + (1.0 - sup.y2[i]) * U(rng);
        }
        const double a1 = U(rng), a2 = U(rng);
        const BoundaryControl bsup = BoundaryControl::constant(a1, a2);
        const BoundaryControl bsub = BoundaryControl::constant(a1 * U(rng), a2 + (1.0 - a2) * U(rng));
        for (auto scheme : {Scheme::Explicit, Scheme::ImexCN}) {
            const auto t_sup = simulate({g, p, bsup, sup, scheme, {}, 3.0, 0.1});
            const auto t_sub = simulate({g, p, bsub, sub, scheme, {}, 3.0, 0.1});
            for (std::size_t m = 0; m < t_sup.snapshots.size(); ++m) {
                for (std::size_t i = 0; i < g.size(); ++i) {
                    ASSERT_LE(t_sub.snapshots[m].y1[i], t_sup.snapshots[m].y1[i] + 1e-8);
                    ASSERT_GE(t_sub.snapshots[m].y2[i], t_sup.snapshots[m].y2[i] - 1e-8);
                }
            }
        }
    }
}

TEST(Simulate, SchemesAgreeOnSmoothProblem) {
    const auto g = make_grid(8.0, 161);
    SpeciesState init = SpeciesState::constant(g, 0.0, 1.0);
    for (std::size_t i = 0; i < g.size(); ++i) {
        init.y1[i] = 0.5 * std::pow(std::sin(std::numbers::pi * g.x(i) / 8.0), 2);
        init.y2[i] = 1.0 - 0.5 * init.y1[i];
    }
    const CompetitionParams p(1.5, 3.5);
    const BoundaryControl bc = BoundaryControl::constant(0.0, 1.0);
    const auto e = simulate({g, p, bc, init, Scheme::Explicit, {}, 2.0, {}});
    const auto c = simulate({g, p, bc, init, Scheme::ImexCN, 0.005, 2.0, {}});
    EXPECT_LT(sup_diff(e.final, c.final), 1e-3);
}

TEST(Simulate, SchemesAgreeOnBaseConfiguration) {
    // Base experiment (L=8, a=1.5, b=2.6, T=60, init (1,0), controls (0,1)) at n=101.
    const auto g = make_grid(8.0, 101);
    const CompetitionParams p(1.5, 2.6);
    const SimConfig base{g, p, BoundaryControl::constant(0, 1), SpeciesState::constant(g, 1.0, 0.0), Scheme::Explicit,
                         {}, 60.0, 60.0};
    const auto e = simulate(base).final;
    for (double frac : {0.5, 0.25}) {
        auto c = base;
        c.scheme = Scheme::ImexCN;
        c.dt = frac * g.dx();
        EXPECT_LT(sup_diff(e, simulate(c).final), 1e-4) << "dt = " << frac << " dx";
    }
}

TEST(Simulate, SpatialOrderAtLeastOnePointSeven) {
    const double L = 8.0;
    const CompetitionParams p(1.5, 3.5);
    const BoundaryControl bc = BoundaryControl::constant(0.0, 1.0);
    auto run = [&](std::size_t n) {
        const auto g = make_grid(L, n);
        SpeciesState init = SpeciesState::constant(g, 0.0, 1.0);
        for (std::size_t i = 0; i < n; ++i) {
            const double s = std::sin(std::numbers::pi * g.x(i) / L);
            init.y1[i] = 0.6 * s * s;
            init.y2[i] = 1.0 - 0.3 * s;
        }
        return simulate({g, p, bc, init, Scheme::Explicit, 0.4 * 0.05 * 0.05 / 4.0, 1.0, {}}).final;
    };
    // Grids nest: node 2i of the finer grid coincides with node i.
    const auto c = run(41), m = run(81), f = run(161), ref = run(321);
    auto err = [&](const SpeciesState& s, std::size_t stride) {
        double e = 0.0;
        for (std::size_t i = 0; i < s.size(); ++i) {
            e = std::max({e, std::abs(s.y1[i] - ref.y1[i * stride]), std::abs(s.y2[i] - ref.y2[i * stride])});
        }
        return e;
    };
    const double e1 = err(c, 8), e2 = err(m, 4), e3 = err(f, 2);
    const double order = std::log2(e1 / e2);
    // Richardson estimate using the three coarsest levels is immune to the reference bias.
    const double order_r = std::log2((e1 - e2) / (e2 - e3));
    EXPECT_GE(order, 1.7);
    EXPECT_GE(order_r, 1.7);
}

TEST(Steady, ShortDomainTendsToTrivialState) {
    const auto g = make_grid(3.0, 61);
    SimConfig cfg{g, CompetitionParams(1.5, 3.5), BoundaryControl::constant(0, 1), SpeciesState::constant(g, 0.8, 0.2),
                  Scheme::ImexCN, {}, 1.0, {}};
    const auto out = run_to_steady(cfg);
    EXPECT_EQ(out.classification, SteadyClass::TrivialZeroOne);
    EXPECT_LT(out.residual_sup, 1e-8);
}

TEST(Steady, NonConvergedWhenTimeCapTooShort) {
    const auto g = make_grid(3.0, 31);
    SimConfig cfg{g, CompetitionParams(1.5, 3.5), BoundaryControl::constant(0, 1), SpeciesState::constant(g, 0.8, 0.2),
                  Scheme::ImexCN, {}, 1.0, {}};
    EXPECT_EQ(run_to_steady(cfg, 1e-8, 2.0).classification, SteadyClass::NonConverged);
}

TEST(Classify, UsesInteriorNodesUnderDirichletData) {
    const auto g = make_grid(3.0, 7);
    auto s = SpeciesState::constant(g, 0.0, 1.0);
    s.y1.front() = 1.0;  // endpoint is control data
    EXPECT_EQ(classify_profile(s, BoundaryControl::constant(0, 1)), SteadyClass::TrivialZeroOne);
    EXPECT_EQ(classify_profile(s, BoundaryControl::neumann()), SteadyClass::Other);
    s.y1[3] = 0.01;
    EXPECT_EQ(classify_profile(s, BoundaryControl::constant(0, 1)), SteadyClass::Barrier);
    EXPECT_EQ(classify_profile(SpeciesState::constant(g, 1.0, 0.0), BoundaryControl::constant(1, 0)),
              SteadyClass::OneZero);
    EXPECT_EQ(classify_profile(SpeciesState::constant(g, 0.0, 0.0), BoundaryControl::constant(0, 0)),
              SteadyClass::ZeroZero);
}

TEST(Residual, VanishesOnConstantEquilibria) {
    const auto g = make_grid(3.0, 31);
    const CompetitionParams p(1.5, 3.5);
    const auto w = *coexistence_equilibrium(p);
    auto [r1, r2] = residual(SpeciesState::constant(g, w.w1, w.w2), g, p);
    EXPECT_LT(std::max(r1, r2), 1e-15);
    EXPECT_LT(residual_with_boundary(SpeciesState::constant(g, 0.3, 0.3), g, p, BoundaryControl::neumann()), 1.0);
    EXPECT_GT(residual_with_boundary(SpeciesState::constant(g, 0.3, 0.3), g, p, BoundaryControl::neumann()), 0.0);
}

TEST(Breakpoints, CollectsInteriorDiscontinuities) {
    const BoundaryControl bc(DirichletPiecewise{{0.0, 1.0, 2.0}, {0.1, 0.2, 0.3}}, DirichletConst{0.4},
                             DirichletPiecewise{{0.0, 2.0, 5.0}, {0.1, 0.2, 0.3}}, NeumannZero{});
    const auto b = control_breakpoints(bc, 4.0);
    ASSERT_EQ(b.size(), 2u);
    EXPECT_EQ(b[0], 1.0);
    EXPECT_EQ(b[1], 2.0);
}
