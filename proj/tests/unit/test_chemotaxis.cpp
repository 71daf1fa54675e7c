#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "ksns/chemotaxis.hpp"
#include "ksns/errors.hpp"
#include "ksns/operators.hpp"
#include "test_support.hpp"

namespace ksns {
namespace {

using testing::kPi;

SensitivitySpec scalar_spec(double c_s, double alpha) {
    SensitivitySpec s;
    s.c_s = c_s;
    s.alpha = alpha;
    return s;
}

void expect_mat_near(const Mat2& a, const Mat2& b, double tol) {
    EXPECT_NEAR(a.a11, b.a11, tol);
    EXPECT_NEAR(a.a12, b.a12, tol);
    EXPECT_NEAR(a.a21, b.a21, tol);
    EXPECT_NEAR(a.a22, b.a22, tol);
}

TEST(Sensitivity, AlphaZeroIsIdentity) {
    const SensitivitySpec s = scalar_spec(1.0, 0.0);
    for (double n : {0.0, 0.3, 7.0, 1e4}) {
        for (double c : {0.0, 2.5}) {
            EXPECT_EQ(eval_sensitivity(s, {0.3, 0.4}, n, c, false), Mat2::identity());
        }
    }
}

TEST(Sensitivity, SaturatedScalarValue) {
    expect_mat_near(eval_sensitivity(scalar_spec(2.0, 1.0), {0.5, 0.5}, 1.0, 0.2, false),
                    Mat2::identity(), 1e-15);
}

TEST(Sensitivity, QuarterRotation) {
    SensitivitySpec s = scalar_spec(3.0, 0.7);
    s.form = SensitivityForm::Rotation;
    s.rotation_angle = kPi / 2;
    const Mat2 m = eval_sensitivity(s, {0.1, 0.9}, 0.0, 1.0, false);
    expect_mat_near(m, Mat2{0.0, -3.0, 3.0, 0.0}, 1e-14);
    EXPECT_NEAR(m.norm(), 3.0, 1e-14);
}

TEST(Sensitivity, NegativeArgumentsAreDomainErrors) {
    const SensitivitySpec s = scalar_spec(1.0, 0.5);
    EXPECT_THROW(eval_sensitivity(s, {0, 0}, -1e-9, 1.0, false), DomainError);
    EXPECT_THROW(eval_sensitivity(s, {0, 0}, 1.0, -1.0, true), DomainError);
    EXPECT_THROW(eval_sensitivity(s, {0, 0}, std::nan(""), 1.0, false), DomainError);
}

TEST(Sensitivity, ValidateRejectsBadParameters) {
    EXPECT_THROW(scalar_spec(0.0, 1.0).validate(), InvalidParameter);
    EXPECT_THROW(scalar_spec(1.0, -0.1).validate(), InvalidParameter);
    SensitivitySpec s;
    s.form = SensitivityForm::Custom;
    EXPECT_THROW(s.validate(), InvalidParameter);
    s = SensitivitySpec{};
    s.eps_reg = -1.0;
    EXPECT_THROW(s.validate(), InvalidParameter);
}

SensitivitySpec random_custom_spec(std::mt19937& rng) {
    std::uniform_real_distribution<double> u(0.2, 3.0);
    SensitivitySpec s = scalar_spec(u(rng), u(rng) - 0.2);
    s.form = SensitivityForm::Custom;
    s.custom = [](Point x, double n, double c) {
        return Mat2{5.0 * std::sin(3 * x.x + n), c - n, std::cos(x.y * c), 2.0 + x.x * n};
    };
    return s;
}

TEST(Sensitivity, OperatorNormBoundedBySaturationOnRandomSamples) {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::exponential_distribution<double> big(0.1);
    auto grid = Grid::l_shape(16, 16, 1.0, 1.0);
    for (int trial = 0; trial < 2000; ++trial) {
        SensitivitySpec s = random_custom_spec(rng);
        if (trial % 3 == 1) {
            s.form = SensitivityForm::Rotation;
            s.rotation_angle = 6.0 * unit(rng);
        } else if (trial % 3 == 2) {
            s.form = SensitivityForm::ScalarIdentity;
        }
        s.rho = SpatialCutoff::MollifiedIndicator;
        s.chi = AmplitudeCutoff::SmoothCap;
        s.eps_reg = 0.05 * unit(rng);
        const Point x{unit(rng), 0.5 * unit(rng)};
        const double n = big(rng);
        const double c = big(rng);
        const double bound = s.c_s * std::pow(1.0 + n, -s.alpha);
        const Mat2 plain = eval_sensitivity(s, x, n, c, false);
        const Mat2 reg = eval_sensitivity(s, x, n, c, true, grid.get());
        EXPECT_LE(plain.norm(), bound * (1 + 1e-12));
        EXPECT_LE(reg.norm(), plain.norm() * (1 + 1e-12));
    }
}

TEST(Sensitivity, RegularizedNormNonIncreasingInDensity) {
    std::mt19937 rng(11);
    auto grid = Grid::rectangle(16, 16, 1.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        SensitivitySpec s = scalar_spec(1.5, 0.1 + trial * 0.05);
        s.form = trial % 2 ? SensitivityForm::Rotation : SensitivityForm::ScalarIdentity;
        s.rotation_angle = 0.1 * trial;
        s.chi = AmplitudeCutoff::SmoothCap;
        s.rho = SpatialCutoff::MollifiedIndicator;
        s.eps_reg = 0.02;
        double previous = std::numeric_limits<double>::infinity();
        for (double n = 0.0; n < 150.0; n += 0.37) {
            const double norm = eval_sensitivity(s, {0.2, 0.6}, n, 0.5, true, grid.get()).norm();
            EXPECT_LE(norm, previous * (1 + 1e-14));
            previous = norm;
        }
        EXPECT_EQ(previous, 0.0);
    }
}

TEST(Sensitivity, IdentityCutoffsMatchUnregularizedBitwise) {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> u(0.0, 5.0);
    for (int trial = 0; trial < 200; ++trial) {
        SensitivitySpec s = random_custom_spec(rng);
        if (trial % 2) s.form = SensitivityForm::Rotation, s.rotation_angle = u(rng);
        const Point x{u(rng) / 5, u(rng) / 5};
        const double n = u(rng);
        const double c = u(rng);
        EXPECT_EQ(eval_sensitivity(s, x, n, c, true), eval_sensitivity(s, x, n, c, false));
    }
}

TEST(Sensitivity, CutoffShapes) {
    EXPECT_EQ(smooth_step(-0.5), 0.0);
    EXPECT_EQ(smooth_step(1.5), 1.0);
    EXPECT_DOUBLE_EQ(smooth_step(0.5), 0.5);
    SensitivitySpec s;
    s.chi = AmplitudeCutoff::SmoothCap;
    s.eps_reg = 0.1;
    EXPECT_EQ(s.amplitude_cutoff(9.99), 1.0);
    EXPECT_GT(s.amplitude_cutoff(15.0), 0.0);
    EXPECT_LT(s.amplitude_cutoff(15.0), 1.0);
    EXPECT_EQ(s.amplitude_cutoff(20.0), 0.0);

    auto grid = Grid::l_shape(8, 8, 1.0, 1.0);
    EXPECT_NEAR(distance_to_boundary(*grid, {0.5, 0.5}), 0.0, 1e-15);
    EXPECT_NEAR(distance_to_boundary(*grid, {0.25, 0.25}), 0.25, 1e-15);
    EXPECT_NEAR(distance_to_boundary(*grid, {0.75, 0.25}), 0.25, 1e-15);
    EXPECT_NEAR(distance_to_boundary(*grid, {0.4, 0.6}), 0.1, 1e-15);
}

ChemotaxisParams params_for(SensitivitySpec s) {
    ChemotaxisParams p;
    p.sensitivity = std::move(s);
    return p;
}

TEST(ChemotacticFlux, VanishesForConstantSignalOrZeroDensity) {
    auto grid = Grid::l_shape(16, 12, 1.0, 1.0);
    std::mt19937 rng(5);
    ChemotaxisModel model(grid, params_for(scalar_spec(2.0, 0.5)));
    const ScalarField n = testing::random_field(grid, rng, 0.0, 3.0);
    const ScalarField c = testing::random_field(grid, rng, 0.0, 3.0);
    const ScalarField flat = model.chemotactic_flux_div(n, ScalarField::constant(grid, 1.7));
    const ScalarField empty = model.chemotactic_flux_div(ScalarField(grid), c);
    for (std::size_t k = 0; k < grid->size(); ++k) {
        EXPECT_EQ(flat[k], 0.0);
        EXPECT_EQ(empty[k], 0.0);
    }
}

TEST(ChemotacticFlux, ConservativeOnMaskedDomain) {
    auto grid = Grid::l_shape(20, 20, 1.0, 1.0);
    std::mt19937 rng(9);
    SensitivitySpec s = scalar_spec(1.0, 0.3);
    s.form = SensitivityForm::Rotation;
    s.rotation_angle = 0.8;
    ChemotaxisModel model(grid, params_for(s));
    const ScalarField n = testing::random_field(grid, rng, 0.0, 3.0);
    const ScalarField c = testing::random_field(grid, rng, 0.0, 3.0);
    const ScalarField d = model.chemotactic_flux_div(n, c);
    double scale = 0.0;
    for (double v : d.values()) scale = std::max(scale, std::abs(v));
    EXPECT_LE(std::abs(kernels::sum(*grid, d.values())), 1e-13 * scale * grid->active_count());
}

TEST(ChemotacticFlux, UnitDensityReducesToLaplacianOfSignalAtFirstOrder) {
    std::vector<double> errors;
    for (int m : {16, 32, 64, 128}) {
        auto grid = Grid::rectangle(m, m, 1.0, 1.0);
        ChemotaxisModel model(grid, params_for(scalar_spec(1.0, 0.0)));
        const ScalarField c = ScalarField::sample(
            grid, [](double x, double y) { return 2.0 + std::cos(kPi * x) * std::cos(2 * kPi * y); });
        const ScalarField exact = ScalarField::sample(grid, [](double x, double y) {
            return -5.0 * kPi * kPi * std::cos(kPi * x) * std::cos(2 * kPi * y);
        });
        errors.push_back(
            testing::l2_error(model.chemotactic_flux_div(ScalarField::constant(grid, 1.0), c), exact));
    }
    for (double p : testing::observed_orders(errors)) EXPECT_GE(p, 1.0);
}

TEST(StepN, ConstantStateIsSteady) {
    auto grid = Grid::l_shape(16, 16, 1.0, 1.0);
    EllipticSolver solver(grid);
    ChemotaxisModel model(grid, params_for(scalar_spec(1.0, 0.5)));
    SimState st = SimState::zeros(grid);
    st.n = ScalarField::constant(grid, 1.0);
    st.c = ScalarField::constant(grid, 1.0);
    const ScalarField next = model.step_n(st, solver, 0.01);
    for (std::size_t k = 0; k < grid->size(); ++k) {
        if (grid->inside(k)) EXPECT_NEAR(next[k], 1.0, 1e-13);
    }
}

// Unweighted Neumann 5-point matrix on a full rectangle.
Eigen::MatrixXd neumann_laplacian(const Grid& g) {
    const int m = static_cast<int>(g.size());
    Eigen::MatrixXd lap = Eigen::MatrixXd::Zero(m, m);
    for (int j = 0; j < g.ny(); ++j) {
        for (int i = 0; i < g.nx(); ++i) {
            const int r = static_cast<int>(g.index(i, j));
            auto link = [&](int ii, int jj, double w) {
                if (ii < 0 || jj < 0 || ii >= g.nx() || jj >= g.ny()) return;
                lap(r, static_cast<int>(g.index(ii, jj))) += w;
                lap(r, r) -= w;
            };
            link(i + 1, j, 1 / (g.hx() * g.hx()));
            link(i - 1, j, 1 / (g.hx() * g.hx()));
            link(i, j + 1, 1 / (g.hy() * g.hy()));
            link(i, j - 1, 1 / (g.hy() * g.hy()));
        }
    }
    return lap;
}

TEST(StepN, PureDiffusionMatchesMatrixExponential) {
    auto grid = Grid::rectangle(4, 4, 1.0, 1.0);
    EllipticSolver solver(grid);
    SensitivitySpec s = scalar_spec(1.0, 0.0);
    s.form = SensitivityForm::Custom;
    s.custom = [](Point, double, double) { return Mat2{}; };
    ChemotaxisModel model(grid, params_for(s));
    std::mt19937 rng(1);
    SimState st = SimState::zeros(grid);
    st.n = testing::random_field(grid, rng, 0.5, 1.5);
    st.c = testing::random_field(grid, rng, 0.0, 2.0);

    const Eigen::MatrixXd lap = neumann_laplacian(*grid);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(lap);
    Eigen::VectorXd n0(grid->size());
    for (std::size_t k = 0; k < grid->size(); ++k) n0[k] = st.n[k];

    for (double dt : {1e-5, 1e-4}) {
        const Eigen::VectorXd decay = (eig.eigenvalues() * dt).array().exp();
        const Eigen::VectorXd exact =
            eig.eigenvectors() * decay.asDiagonal() * eig.eigenvectors().transpose() * n0;
        const Eigen::VectorXd implicit =
            (Eigen::MatrixXd::Identity(16, 16) - dt * lap).fullPivLu().solve(n0);
        const ScalarField next = model.step_n(st, solver, dt);
        for (std::size_t k = 0; k < grid->size(); ++k) {
            EXPECT_NEAR(next[k], implicit[k], 1e-12);
            if (dt == 1e-5) EXPECT_NEAR(next[k], exact[k], 1e-6);
        }
    }
}

TEST(StepN, ConservesMassAndPositivity) {
    auto grid = Grid::l_shape(24, 24, 1.0, 1.0);
    EllipticSolver solver(grid);
    SensitivitySpec s = scalar_spec(1.0, 0.5);
    s.form = SensitivityForm::Rotation;
    s.rotation_angle = 0.4;
    ChemotaxisModel model(grid, params_for(s));
    SimState st = SimState::zeros(grid);
    st.n = ScalarField::sample(grid, [](double x, double y) {
        return 8.0 * std::exp(-40.0 * ((x - 0.3) * (x - 0.3) + (y - 0.3) * (y - 0.3)));
    });
    st.c = ScalarField::sample(grid, [](double x, double y) { return 1.0 + x * x + std::sin(3 * y); });
    st.u = VectorField::sample(
        grid, [](double x, double y) { return std::sin(kPi * x) * std::sin(kPi * y); },
        [](double x, double) { return std::sin(2 * kPi * x); });
    const double m0 = integrate(st.n);
    for (int step = 0; step < 50; ++step) {
        const double dt = 0.9 * model.params().transport_cfl / model.density_transport_rate(st);
        const double before = integrate(st.n);
        st.n = model.step_n(st, solver, std::min(dt, 2e-3));
        EXPECT_LE(std::abs(integrate(st.n) - before) / before, 1e-12);
        EXPECT_GE(st.n.min(), 0.0);
    }
    EXPECT_LE(std::abs(integrate(st.n) - m0) / m0, 1e-12);
}

TEST(StepN, RejectsStepsBeyondTransportLimit) {
    auto grid = Grid::rectangle(16, 16, 1.0, 1.0);
    EllipticSolver solver(grid);
    ChemotaxisModel model(grid, params_for(scalar_spec(1.0, 0.0)));
    SimState st = SimState::zeros(grid);
    st.n = ScalarField::constant(grid, 1.0);
    st.c = ScalarField::sample(grid, [](double x, double) { return 10.0 * x * x; });
    const double rate = model.density_transport_rate(st);
    ASSERT_GT(rate, 0.0);
    try {
        model.step_n(st, solver, 2.0 / rate);
        FAIL() << "expected StepRejected";
    } catch (const StepRejected& e) {
        EXPECT_NEAR(e.dt_limit(), 1.0 / rate, 1e-12 / rate);
    }
    EXPECT_NO_THROW(model.step_n(st, solver, 0.99 / rate));
}

TEST(StepC, EquilibriumIsSteady) {
    auto grid = Grid::rectangle(12, 12, 1.0, 1.0);
    EllipticSolver solver(grid);
    ChemotaxisModel model(grid, params_for(scalar_spec(1.0, 0.0)));
    SimState st = SimState::zeros(grid);
    st.n = ScalarField::constant(grid, 1.0);
    st.c = ScalarField::constant(grid, 1.0);
    const ScalarField next = model.step_c(st, solver, 0.05);
    for (std::size_t k = 0; k < grid->size(); ++k) EXPECT_NEAR(next[k], 1.0, 1e-14);
}

TEST(StepC, UniformSignalTracksRelaxationOde) {
    auto grid = Grid::l_shape(12, 12, 1.0, 1.0);
    EllipticSolver solver(grid);
    ChemotaxisModel model(grid, params_for(scalar_spec(1.0, 0.0)));
    SimState st = SimState::zeros(grid);
    st.n = ScalarField::constant(grid, 1.0);
    const double dt = 1e-3;
    for (int step = 0; step < 1000; ++step) st.c = model.step_c(st, solver, dt);
    const double exact = 1.0 - std::exp(-1.0);
    for (std::size_t k = 0; k < grid->size(); ++k) {
        if (grid->inside(k)) EXPECT_NEAR(st.c[k], exact, 1e-4);
    }
}

TEST(StepC, MeanDecaysExponentiallyWithoutSource) {
    auto grid = Grid::l_shape(16, 16, 1.0, 1.0);
    EllipticSolver solver(grid);
    ChemotaxisModel model(grid, params_for(scalar_spec(1.0, 0.0)));
    std::mt19937 rng(2);
    for (double dt : {0.02, 0.01, 0.005}) {
        SimState st = SimState::zeros(grid);
        st.c = testing::random_field(grid, rng, 0.0, 2.0);
        const double l1 = lp_norm(st.c, 1.0);
        const int steps = static_cast<int>(std::lround(1.0 / dt));
        for (int s = 0; s < steps; ++s) {
            st.c = model.step_c(st, solver, dt);
            EXPECT_GE(st.c.min(), 0.0);
        }
        EXPECT_LE(std::abs(lp_norm(st.c, 1.0) - std::exp(-1.0) * l1) / l1, dt);
    }
}

TEST(StepC, SignalMassStaysBelowSourceEnvelope) {
    auto grid = Grid::l_shape(16, 16, 1.0, 1.0);
    EllipticSolver solver(grid);
    ChemotaxisModel model(grid, params_for(scalar_spec(1.0, 0.0)));
    SimState st = SimState::zeros(grid);
    st.n = ScalarField::sample(grid, [](double x, double) { return 2.0 + std::cos(kPi * x); });
    st.c = ScalarField::sample(grid, [](double, double y) { return 0.5 * y; });
    st.u = VectorField::sample(
        grid, [](double, double y) { return std::sin(kPi * y); }, [](double, double) { return 0.0; });
    const double dt = 0.01;
    const double envelope = std::max(integrate(st.n), integrate(st.c));
    for (int step = 0; step < 200; ++step) {
        st.c = model.step_c(st, solver, dt);
        EXPECT_LE(integrate(st.c), envelope + dt * envelope);
        EXPECT_GE(st.c.min(), 0.0);
    }
}

}  // namespace
}  // namespace ksns
