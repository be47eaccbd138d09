#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "lvbc/core.hpp"
#include "lvbc/tridiag.hpp"

using namespace lvbc;

TEST(Grid, SpacingAndNodes) {
    const auto g = make_grid(8.0, 401);
    EXPECT_DOUBLE_EQ(g.dx(), 0.02);
    EXPECT_EQ(g.x(0), 0.0);
    EXPECT_EQ(g.x(400), 8.0);
    const auto pi_grid = make_grid(std::numbers::pi, 101);
    EXPECT_DOUBLE_EQ(pi_grid.dx(), std::numbers::pi / 100.0);
    const auto x = g.nodes();
    for (std::size_t i = 1; i < x.size(); ++i) EXPECT_GT(x[i], x[i - 1]);
    EXPECT_NEAR(g.dx() * 400.0, 8.0, 1e-12);
}

TEST(Grid, RejectsDegenerateInput) {
    EXPECT_THROW(make_grid(8.0, 1), Error);
    EXPECT_THROW(make_grid(8.0, 2), Error);
    EXPECT_THROW(make_grid(0.0, 11), Error);
    EXPECT_THROW(make_grid(-1.0, 11), Error);
    try {
        make_grid(8.0, 1);
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::InvalidArgument);
    }
}

TEST(Params, RegimeFlag) {
    EXPECT_TRUE(CompetitionParams(1.5, 3.5).strong_competition());
    EXPECT_TRUE(CompetitionParams(0.5, 2.0).strong_competition());
    EXPECT_FALSE(CompetitionParams(1.5, 1.2).strong_competition());
    EXPECT_FALSE(CompetitionParams(0.5, 0.9).strong_competition());
    EXPECT_THROW(CompetitionParams(0.0, 2.0), Error);
    EXPECT_THROW(CompetitionParams(1.0, -2.0), Error);
}

TEST(Coexistence, KnownValues) {
    const auto w = coexistence_equilibrium(CompetitionParams(1.5, 3.5));
    ASSERT_TRUE(w);
    EXPECT_NEAR(w->w1, 2.0 / 17.0, 1e-15);
    EXPECT_NEAR(w->w2, 10.0 / 17.0, 1e-15);
    EXPECT_NEAR(w->w1, 0.1176, 5e-5);
    EXPECT_NEAR(w->w2, 0.5882, 5e-5);

    const auto merged = coexistence_equilibrium(CompetitionParams(1.0, 3.5));
    ASSERT_TRUE(merged);
    EXPECT_EQ(merged->w1, 0.0);
    EXPECT_EQ(merged->w2, 1.0);

    EXPECT_FALSE(coexistence_equilibrium(CompetitionParams(0.5, 3.0)));
}

TEST(Coexistence, SingularProduct) {
    for (const auto& p : {CompetitionParams(0.5, 2.0), CompetitionParams(2.0, 0.5)}) {
        try {
            coexistence_equilibrium(p);
            FAIL() << "expected a singular-parameters error";
        } catch (const Error& e) {
            EXPECT_EQ(e.kind(), ErrorKind::SingularParameters);
        }
    }
}

TEST(Coexistence, AnnihilatesBothReactions) {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> A(1.01, 4.0), B(1.01, 6.0);
    for (int k = 0; k < 200; ++k) {
        const CompetitionParams p(A(rng), B(rng));
        if (std::abs(p.a() * p.b() - 1.0) < 1e-6) continue;
        const auto w = coexistence_equilibrium(p);
        ASSERT_TRUE(w);
        EXPECT_NEAR(p.reaction1(w->w1, w->w2), 0.0, 1e-12);
        EXPECT_NEAR(p.reaction2(w->w1, w->w2), 0.0, 1e-12);
    }
}

TEST(Separatrix, Values) {
    const CompetitionParams p(1.5, 3.5);
    EXPECT_NEAR(separatrix_value(p, 0.1), 0.5, 1e-15);
    EXPECT_EQ(separatrix_value(p, 0.0), 0.0);
    const auto w = coexistence_equilibrium(p);
    EXPECT_NEAR(separatrix_value(p, w->w1), w->w2, 1e-15);
    EXPECT_DOUBLE_EQ(separatrix_extent(p), 0.2);
}

TEST(Separatrix, Errors) {
    try {
        separatrix_value(CompetitionParams(0.5, 3.5), 0.1);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::RegimeViolation);
    }
    try {
        separatrix_value(CompetitionParams(1.5, 3.5), 0.3);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Domain);
    }
    EXPECT_THROW(separatrix_value(CompetitionParams(1.5, 3.5), -0.01), Error);
}

TEST(Control, Validation) {
    EXPECT_THROW(BoundaryControl::constant(1.5, 0.0), Error);
    EXPECT_THROW(BoundaryControl::constant(0.0, -0.1), Error);
    EXPECT_THROW(BoundaryControl(DirichletPiecewise{{0.5, 1.0}, {0.1, 0.2}}, DirichletConst{0}, DirichletConst{1},
                                 DirichletConst{1}),
                 Error);
    EXPECT_THROW(BoundaryControl(DirichletPiecewise{{0.0, 1.0, 1.0}, {0.1, 0.2, 0.3}}, DirichletConst{0},
                                 DirichletConst{1}, DirichletConst{1}),
                 Error);
    EXPECT_THROW(BoundaryControl(DirichletPiecewise{{0.0, 1.0}, {0.1, 1.2}}, DirichletConst{0}, DirichletConst{1},
                                 DirichletConst{1}),
                 Error);
    EXPECT_NO_THROW(BoundaryControl::neumann());
}

TEST(Control, PiecewiseValuesStayInBox) {
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    std::vector<double> br{0.0}, vals{U(rng)};
    for (int k = 1; k < 8; ++k) {
        br.push_back(br.back() + 0.1 + U(rng));
        vals.push_back(U(rng));
    }
    const BoundaryControl bc(DirichletPiecewise{br, vals}, DirichletConst{0.3}, NeumannZero{}, DirichletPiecewise{br, vals});
    for (int k = 0; k < 1000; ++k) {
        const double t = 12.0 * U(rng);
        for (int s : {1, 2}) {
            for (auto e : {Endpoint::Left, Endpoint::Right}) {
                const auto v = bc.value(s, e, t);
                if (v) {
                    EXPECT_GE(*v, 0.0);
                    EXPECT_LE(*v, 1.0);
                }
            }
        }
    }
    EXPECT_FALSE(bc.value(2, Endpoint::Left, 1.0));
    const DirichletPiecewise pw{br, vals};
    EXPECT_EQ(pw.at(0.0), vals[0]);
    EXPECT_EQ(pw.at(br[3]), vals[3]);
    EXPECT_EQ(pw.at(br[3] - 1e-9), vals[2]);
}

TEST(Box, ClampsRoundOffAndRejectsLargeExcursions) {
    const auto g = make_grid(1.0, 5);
    auto s = SpeciesState::constant(g, 0.5, 0.5);
    s.y1[2] = -1e-13;
    s.y2[3] = 1.0 + 5e-13;
    enforce_box(s, g);
    EXPECT_EQ(s.y1[2], 0.0);
    EXPECT_EQ(s.y2[3], 1.0);
    s.y2[1] = -1e-6;
    try {
        enforce_box(s, g);
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::Stability);
        EXPECT_NE(std::string(e.what()).find("y2[1]"), std::string::npos);
    }
    s.y2[1] = std::nan("");
    EXPECT_THROW(enforce_box(s, g), Error);
}

TEST(Tridiagonal, SolveAndTransposedSolve) {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    const std::size_t n = 37;
    Tridiagonal A(n);
    for (std::size_t i = 0; i < n; ++i) {
        A.lower[i] = U(rng);
        A.upper[i] = U(rng);
        A.diag[i] = 3.0 + U(rng);
    }
    std::vector<double> x(n), b(n), y(n);
    for (auto& v : x) v = U(rng);
    A.multiply(x, b);
    y = b;
    A.solve(y);
    for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(y[i], x[i], 1e-13);

    // Transposed: build A^T explicitly and compare.
    Tridiagonal At(n);
    for (std::size_t i = 0; i < n; ++i) {
        At.diag[i] = A.diag[i];
        if (i + 1 < n) {
            At.upper[i] = A.lower[i + 1];
            At.lower[i + 1] = A.upper[i];
        }
    }
    At.multiply(x, b);
    y = b;
    A.solve_transposed(y);
    for (std::size_t i = 0; i < n; ++i) EXPECT_NEAR(y[i], x[i], 1e-13);
}
