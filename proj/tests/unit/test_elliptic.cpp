#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "ksns/elliptic.hpp"
#include "ksns/errors.hpp"
#include "ksns/operators.hpp"
#include "dense_oracle.hpp"
#include "test_support.hpp"

namespace ksns {
namespace {

using testing::kPi;

using testing::assemble;
using testing::dense_solve;
using testing::DenseSystem;
using testing::relative_difference;

TEST(SolverConfig, Validation) {
    EXPECT_THROW((SolverConfig{0.0}).validate(), InvalidParameter);
    EXPECT_THROW((SolverConfig{1.0}).validate(), InvalidParameter);
    EXPECT_NO_THROW((SolverConfig{1e-8}).validate());
    auto g = Grid::rectangle(8, 6, 1.0, 1.0);
    EXPECT_EQ(SolverConfig{}.iteration_cap(*g), 140);
}

TEST(Helmholtz, ZeroThetaIsIdentity) {
    std::mt19937 rng(1);
    auto g = Grid::l_shape(8, 8, 1.0, 1.0);
    EllipticSolver solver(g);
    const ScalarField r = testing::random_field(g, rng);
    const ScalarField f = solve_helmholtz(solver, r, 0.0, BoundaryCondition::neumann());
    for (std::size_t k = 0; k < g->size(); ++k) EXPECT_EQ(f[k], r[k]);
}

TEST(Helmholtz, ConstantsAreInvariantUnderNeumann) {
    for (auto g : {Grid::rectangle(16, 16, 1.0, 1.0), Grid::l_shape(16, 16, 1.0, 1.0)}) {
        EllipticSolver solver(g);
        const ScalarField f =
            solve_helmholtz(solver, ScalarField::constant(g, 2.5), 0.3, BoundaryCondition::neumann());
        for (std::size_t k = 0; k < g->size(); ++k)
            if (g->inside(k)) EXPECT_NEAR(f[k], 2.5, 1e-10);
    }
}

TEST(Helmholtz, ManufacturedSolutionSecondOrder) {
    const double theta = 0.1;
    for (SolverMethod method : {SolverMethod::Auto, SolverMethod::MultigridPCG}) {
        std::vector<double> errors;
        for (int n : {16, 32, 64}) {
            auto g = Grid::rectangle(n, n, 1.0, 1.0);
            EllipticSolver solver(g, SolverConfig{1e-10, 0.0, 0, method});
            auto mode = [](double x, double y) { return std::cos(kPi * x) * std::cos(kPi * y); };
            const ScalarField rhs = ScalarField::sample(
                g, [&](double x, double y) { return (1 + 2 * kPi * kPi * theta) * mode(x, y); });
            const ScalarField f = solve_helmholtz(solver, rhs, theta, BoundaryCondition::neumann());
            errors.push_back(testing::l2_error(f, ScalarField::sample(g, mode)));
        }
        for (double p : testing::observed_orders(errors)) EXPECT_GT(p, 1.8);
    }
}

TEST(Helmholtz, MonotoneToIdentityAsThetaVanishes) {
    auto g = Grid::rectangle(32, 32, 1.0, 1.0);
    EllipticSolver solver(g);
    const ScalarField r = ScalarField::sample(
        g, [](double x, double y) { return std::exp(-40 * ((x - .3) * (x - .3) + (y - .6) * (y - .6))); });
    double previous = 1e300;
    for (double theta : {1e-1, 1e-2, 1e-3, 1e-4, 1e-5}) {
        const double d = testing::l2_error(
            solve_helmholtz(solver, r, theta, BoundaryCondition::neumann()), r);
        EXPECT_LT(d, previous);
        previous = d;
    }
    EXPECT_LT(previous, 1e-3);
}

TEST(Helmholtz, ResidualIsRecheckable) {
    std::mt19937 rng(5);
    for (auto g : {Grid::rectangle(24, 20, 1.0, 1.0), Grid::l_shape(24, 24, 1.0, 1.0)}) {
        for (SolverMethod method : {SolverMethod::ConjugateGradient, SolverMethod::MultigridPCG,
                                    SolverMethod::Auto}) {
            const SolverConfig cfg{1e-8, 0.0, 0, method};
            EllipticSolver solver(g, cfg);
            const ScalarField r = testing::random_field(g, rng);
            SolveStats stats;
            const ScalarField f =
                solve_helmholtz(solver, r, 0.05, BoundaryCondition::dirichlet(), &stats);
            ScalarField resid = r - (f - 0.05 * laplacian(f));
            EXPECT_LE(lp_norm(resid, 2.0), 1e-8 * lp_norm(r, 2.0) * (1 + 1e-9));
            EXPECT_LE(stats.residual, 1e-8 * stats.rhs_norm);
        }
    }
}

TEST(Helmholtz, DirichletValueIsHonoured) {
    auto g = Grid::l_shape(16, 16, 1.0, 1.0);
    EllipticSolver solver(g, SolverConfig{1e-12});
    // constant g solves (I - theta L) f = g with Dirichlet(g)
    const ScalarField f = solve_helmholtz(solver, ScalarField::constant(g, 4.0), 0.2,
                                          BoundaryCondition::dirichlet(4.0));
    for (std::size_t k = 0; k < g->size(); ++k)
        if (g->inside(k)) EXPECT_NEAR(f[k], 4.0, 1e-9);
}

TEST(Helmholtz, NonConvergenceReportsResidual) {
    auto g = Grid::rectangle(32, 32, 1.0, 1.0);
    EllipticSolver solver(g, SolverConfig{1e-12, 0.0, 2, SolverMethod::ConjugateGradient});
    std::mt19937 rng(2);
    const ScalarField r = testing::random_field(g, rng);
    try {
        solve_helmholtz(solver, r, 10.0, BoundaryCondition::neumann());
        FAIL() << "expected SolverDivergence";
    } catch (const SolverDivergence& e) {
        EXPECT_GT(e.residual(), 0.0);
        EXPECT_EQ(e.iterations(), 2);
    }
}

TEST(Poisson, ZeroRightHandSide) {
    auto g = Grid::l_shape(8, 8, 1.0, 1.0);
    EllipticSolver solver(g);
    const ScalarField f = solve_poisson_neumann(solver, ScalarField(g));
    for (std::size_t k = 0; k < g->size(); ++k) EXPECT_EQ(f[k], 0.0);
}

TEST(Poisson, ManufacturedSolutionSecondOrder) {
    for (SolverMethod method :
         {SolverMethod::Auto, SolverMethod::MultigridPCG, SolverMethod::ConjugateGradient}) {
        std::vector<double> errors;
        for (int n : {16, 32, 64}) {
            auto g = Grid::rectangle(n, n, 1.0, 1.0);
            EllipticSolver solver(g, SolverConfig{1e-10, 0.0, 0, method});
            auto mode = [](double x, double y) { return std::cos(kPi * x) * std::cos(kPi * y); };
            const ScalarField rhs = ScalarField::sample(
                g, [&](double x, double y) { return 2 * kPi * kPi * mode(x, y); });
            const ScalarField f = solve_poisson_neumann(solver, rhs);
            EXPECT_NEAR(mean(f), 0.0, 1e-13);
            errors.push_back(testing::l2_error(f, ScalarField::sample(g, mode)));
        }
        for (double p : testing::observed_orders(errors)) EXPECT_GT(p, 1.8);
    }
}

TEST(Poisson, MeanOfRightHandSideIsIgnored) {
    std::mt19937 rng(9);
    for (auto g : {Grid::rectangle(16, 16, 1.0, 1.0), Grid::l_shape(16, 16, 1.0, 1.0)}) {
        EllipticSolver solver(g, SolverConfig{1e-11});
        const ScalarField r = testing::random_field(g, rng);
        const ScalarField shifted = r + ScalarField::constant(g, 3.0);
        const ScalarField a = solve_poisson_neumann(solver, r);
        const ScalarField b = solve_poisson_neumann(solver, shifted);
        EXPECT_LT(testing::l2_error(a, b), 1e-9 * lp_norm(a, 2.0));
    }
}

TEST(Poisson, DivGradCompositionRecoversRightHandSide) {
    std::mt19937 rng(4);
    for (auto g : {Grid::rectangle(16, 12, 1.0, 1.0), Grid::l_shape(16, 16, 1.0, 1.0)}) {
        EllipticSolver solver(g, SolverConfig{1e-12});
        ScalarField rhs = testing::random_field(g, rng);
        rhs -= ScalarField::constant(g, mean(rhs));
        ScalarField f(g);
        solver.solve({StencilKind::DivGrad, BcKind::Neumann, 0.0, 1.0}, rhs.values(), f.values());
        const ScalarField back = -1.0 * divergence(gradient(f));
        EXPECT_LT(testing::l2_error(back, rhs), 1e-10 * lp_norm(rhs, 2.0));
    }
}

// Every solver path against the dense direct oracle on 4x4 grids.
TEST(DenseOracle, FourByFourAgreement) {
    std::mt19937 rng(12);
    const std::vector<EllipticOperator> ops = {
        {StencilKind::Compact, BcKind::Neumann, 1.0, 0.3},
        {StencilKind::Compact, BcKind::Dirichlet, 1.0, 0.3},
        {StencilKind::Compact, BcKind::Neumann, 0.0, 1.0},
        {StencilKind::Compact, BcKind::Dirichlet, 0.0, 1.0},
        {StencilKind::DivGrad, BcKind::Neumann, 0.0, 1.0},
        {StencilKind::DivGrad, BcKind::Neumann, 1.0, 0.2},
    };
    std::vector<std::uint8_t> lmask(16, 1);
    lmask[15] = 0;
    for (auto g : {Grid::rectangle(4, 4, 1.0, 1.0), Grid::masked(4, 4, 1.0, 1.0, lmask)}) {
        for (SolverMethod method : {SolverMethod::ConjugateGradient, SolverMethod::MultigridPCG,
                                    SolverMethod::FastDiagonalizationPCG}) {
            if (method == SolverMethod::FastDiagonalizationPCG && !g->full()) continue;
            EllipticSolver solver(g, SolverConfig{1e-13, 0.0, 0, method});
            for (const auto& op : ops) {
                std::vector<double> b(g->size(), 0.0);
                std::uniform_real_distribution<double> dist(-1.0, 1.0);
                for (std::size_t k = 0; k < g->size(); ++k)
                    if (g->inside(k)) b[k] = dist(rng);
                std::vector<double> x(g->size(), 0.0);
                solver.solve(op, b, x);
                const auto ref = dense_solve(*g, op, b);
                EXPECT_LE(relative_difference(ref, x), 1e-10)
                    << "method " << static_cast<int>(method) << " kind "
                    << static_cast<int>(op.kind);
            }
        }
    }
}

TEST(DenseOracle, ApplyMatchesAssembledMatrix) {
    std::mt19937 rng(21);
    auto g = Grid::l_shape(6, 6, 1.0, 1.5);
    EllipticSolver solver(g);
    for (const EllipticOperator op : {EllipticOperator{StencilKind::Compact, BcKind::Dirichlet, 1.0, 0.5},
                                      EllipticOperator{StencilKind::DivGrad, BcKind::Neumann, 0.0, 1.0}}) {
        const DenseSystem sys = assemble(*g, op);
        const ScalarField x = testing::random_field(g, rng);
        std::vector<double> y(g->size());
        solver.apply(op, x.values(), y);
        Eigen::VectorXd xv(sys.cells.size());
        for (std::size_t r = 0; r < sys.cells.size(); ++r) xv(r) = x[sys.cells[r]];
        const Eigen::VectorXd yv = sys.a * xv;
        for (std::size_t r = 0; r < sys.cells.size(); ++r)
            EXPECT_NEAR(y[sys.cells[r]], yv(r), 1e-10 * (1 + std::abs(yv(r))));
    }
}

TEST(EllipticSolver, FastDiagonalizationNeedsFullGrid) {
    EXPECT_THROW(EllipticSolver(Grid::l_shape(8, 8, 1.0, 1.0),
                                SolverConfig{1e-8, 0.0, 0, SolverMethod::FastDiagonalizationPCG}),
                 InvalidParameter);
}

}  // namespace
}  // namespace ksns
