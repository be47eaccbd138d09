#include <algorithm>
#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "lvbc/elliptic.hpp"

using namespace lvbc;

TEST(Logistic, TrivialAtOrBelowPi) {
    for (double L : {1.0, 3.0, std::numbers::pi}) {
        const auto th = solve_logistic_steady(make_grid(L, 101));
        EXPECT_TRUE(th.trivial) << L;
        EXPECT_EQ(*std::max_element(th.theta.begin(), th.theta.end()), 0.0);
    }
}

TEST(Logistic, NontrivialSymmetricProfileAbovePi) {
    for (double L : {4.0, 8.0, 20.0}) {
        const auto g = make_grid(L, 401);
        const auto th = solve_logistic_steady(g);
        ASSERT_FALSE(th.trivial) << L;
        EXPECT_LT(th.residual, 1e-8);
        const auto n = g.size();
        EXPECT_EQ(th.theta.front(), 0.0);
        EXPECT_EQ(th.theta.back(), 0.0);
        double asym = 0.0;
        for (std::size_t i = 0; i < n; ++i) asym = std::max(asym, std::abs(th.theta[i] - th.theta[n - 1 - i]));
        EXPECT_LT(asym, 1e-8);
        for (std::size_t i = 1; i + 1 < n; ++i) {
            EXPECT_GT(th.theta[i], 0.0);
            EXPECT_LT(th.theta[i], 1.0);
        }
        // Increasing up to the midpoint.
        for (std::size_t i = 1; i <= n / 2; ++i) EXPECT_GE(th.theta[i], th.theta[i - 1] - 1e-14);
    }
    // Longer domains give a taller profile.
    const auto t8 = solve_logistic_steady(make_grid(8.0, 401));
    const auto t20 = solve_logistic_steady(make_grid(20.0, 401));
    EXPECT_GT(*std::max_element(t20.theta.begin(), t20.theta.end()),
              *std::max_element(t8.theta.begin(), t8.theta.end()));
}

TEST(Logistic, ReducedRateScalesThreshold) {
    // kappa = 0.25 moves the threshold to 2 pi.
    EXPECT_TRUE(solve_logistic_steady(make_grid(6.0, 201), 0.25).trivial);
    const auto th = solve_logistic_steady(make_grid(8.0, 201), 0.25);
    EXPECT_FALSE(th.trivial);
    EXPECT_LT(*std::max_element(th.theta.begin(), th.theta.end()), 0.25);
}

TEST(Subsolution, VerifierFlagsViolations) {
    const auto g = make_grid(8.0, 201);
    const CompetitionParams p(1.5, 3.5);
    // (0,1) is an exact steady state: passes with zero violation.
    const auto rep = verify_subsolution(SpeciesState::constant(g, 0.0, 1.0), p, g);
    EXPECT_TRUE(rep.pass);
    EXPECT_LE(rep.worst_violation, 0.0);
    // A y1 bump well above 1 - a y2 cannot be a subsolution.
    auto bad = SpeciesState::constant(g, 0.0, 1.0);
    for (std::size_t i = 1; i + 1 < g.size(); ++i) bad.y1[i] = 0.9;
    const auto r2 = verify_subsolution(bad, p, g);
    EXPECT_FALSE(r2.pass);
    EXPECT_EQ(r2.worst_species, 1);
    EXPECT_THROW(verify_subsolution(SpeciesState::constant(make_grid(8.0, 11), 0, 1), p, g), Error);
    EXPECT_THROW(verify_subsolution(SpeciesState::constant(g, 0, 1), p, g, {0.0}), Error);
}

TEST(Subsolution, KinkOrientation) {
    const auto g = make_grid(4.0, 41);
    const CompetitionParams p(1.5, 3.5);
    auto s = SpeciesState::constant(g, 0.0, 1.0);
    // A y1 junction must be convex (slope jumps up); a tent is rejected at the kink.
    for (std::size_t i = 0; i < g.size(); ++i) s.y1[i] = 0.01 * std::min(g.x(i), 4.0 - g.x(i));
    const auto tent = verify_subsolution(s, p, g, {2.0});
    EXPECT_FALSE(tent.pass);
    EXPECT_TRUE(tent.at_kink);
    EXPECT_EQ(tent.worst_species, 1);
    for (std::size_t i = 0; i < g.size(); ++i) s.y1[i] = 0.01 * std::abs(g.x(i) - 2.0);
    EXPECT_LE(verify_subsolution(s, p, g, {2.0}).worst_violation, 1e-12 + verify_subsolution(s, p, g).worst_violation);
    // A y2 junction must be concave: a V in y2 is rejected.
    s = SpeciesState::constant(g, 0.0, 1.0);
    for (std::size_t i = 0; i < g.size(); ++i) s.y2[i] = 0.9 + 0.02 * std::abs(g.x(i) - 2.0);
    const auto v2 = verify_subsolution(s, p, g, {2.0});
    EXPECT_FALSE(v2.pass);
    EXPECT_EQ(v2.worst_species, 2);
}

TEST(Barrier, ConstructedSubsolutionIsValid) {
    const auto g = make_grid(8.0, 401);
    const auto cs = construct_bbarrier_subsolution(1.5, g);
    EXPECT_TRUE(cs.verification.pass);
    EXPECT_GT(cs.recipe.b_bar, 1.0);
    EXPECT_GT(cs.recipe.R, std::numbers::pi);
    EXPECT_LT(cs.recipe.R, 8.0);
    EXPECT_NEAR(cs.recipe.R + 2.0 * cs.recipe.M, 8.0, 1e-12);
    EXPECT_GT(cs.recipe.epsilon, 1.0 / 3.0);
    EXPECT_LT(cs.recipe.epsilon, 1.0);
    EXPECT_EQ(cs.kinks.size(), 2u);
    EXPECT_EQ(cs.params.b(), cs.recipe.b_bar);
    // Independent re-check at the recorded parameters.
    EXPECT_TRUE(verify_subsolution(cs.pair, cs.params, g, cs.kinks).pass);
    EXPECT_GT(*std::max_element(cs.pair.y1.begin(), cs.pair.y1.end()), 0.0);
}

TEST(Barrier, ConstructedSubsolutionRejectsShortDomain) {
    EXPECT_THROW(construct_bbarrier_subsolution(1.5, make_grid(3.0, 101)), Error);
}

TEST(Barrier, ASmallSubsolution) {
    const auto g = make_grid(8.0, 401);
    const auto pair = construct_a_small_subsolution(0.5, 3.5, g);
    EXPECT_TRUE(verify_subsolution(pair, CompetitionParams(0.5, 3.5), g).pass);
    EXPECT_GT(*std::max_element(pair.y1.begin(), pair.y1.end()), 0.0);
    EXPECT_LE(*std::max_element(pair.y1.begin(), pair.y1.end()), 0.5);
    try {
        construct_a_small_subsolution(0.9, 3.5, g);  // 1 - pi^2/64 ~ 0.846
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::RegimeViolation);
    }
}

TEST(Barrier, PsiLemmaSlopes) {
    const auto g = make_grid(6.0, 241);
    const auto phi = solve_logistic_steady(g, 0.5);
    ASSERT_FALSE(phi.trivial);
    const auto res = construct_psi_lemma(g, 0.6, 0.5, phi.theta);
    EXPECT_LT(res.slope_left, -0.5);
    EXPECT_GT(res.slope_right, 0.5);
    EXPECT_LT(res.psi_max, 0.4);
    EXPECT_THROW(construct_psi_lemma(make_grid(3.0, 31), 0.6, 0.5, std::vector<double>(31, 0.1)), Error);
    auto bad = phi.theta;
    bad[0] = 0.1;
    EXPECT_THROW(construct_psi_lemma(g, 0.6, 0.5, bad), Error);
}

TEST(Barrier, SolveFromOneZeroPastThreshold) {
    const auto g = make_grid(8.0, 161);
    const auto res = solve_barrier(CompetitionParams(1.5, 8.0), g, SpeciesState::constant(g, 1.0, 0.0));
    ASSERT_EQ(res.outcome.classification, SteadyClass::Barrier);
    const auto bp = to_barrier_profile(res.outcome, g);
    ASSERT_TRUE(bp);
    EXPECT_LT(bp->residual_sup, 1e-8);
    EXPECT_TRUE(exceeds_coexistence(*bp, CompetitionParams(1.5, 8.0)));
}

TEST(Barrier, MonotoneFromSubsolution) {
    const auto g = make_grid(8.0, 161);
    const auto pair = construct_a_small_subsolution(0.5, 3.5, g);
    BarrierOptions opt;
    opt.audit_monotonicity = true;
    const auto res = solve_barrier(CompetitionParams(0.5, 3.5), g, pair, opt);
    EXPECT_EQ(res.outcome.classification, SteadyClass::Barrier);
    EXPECT_TRUE(res.monotone) << res.worst_monotone_violation;
}

TEST(Barrier, NoneBelowThreshold) {
    const auto g = make_grid(8.0, 161);
    const auto res = solve_barrier(CompetitionParams(1.5, 2.0), g, SpeciesState::constant(g, 1.0, 0.0));
    EXPECT_EQ(res.outcome.classification, SteadyClass::TrivialZeroOne);
    EXPECT_FALSE(to_barrier_profile(res.outcome, g));
}
