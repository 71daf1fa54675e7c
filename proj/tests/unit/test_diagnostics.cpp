#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "ksns/chemotaxis.hpp"
#include "ksns/diagnostics.hpp"
#include "ksns/errors.hpp"
#include "test_support.hpp"

namespace ksns {
namespace {

using testing::kPi;

SimState uniform_state(const GridPtr& grid, double n, double c) {
    SimState s = SimState::zeros(grid);
    s.n = ScalarField::constant(grid, n);
    s.c = ScalarField::constant(grid, c);
    return s;
}

TEST(Record, StationaryState) {
    auto grid = Grid::rectangle(16, 16, 1.0, 1.0);
    const DiagnosticsRecord r = compute_record(uniform_state(grid, 1.0, 1.0), 0.5);
    EXPECT_NEAR(r.mass_n, 1.0, 1e-14);
    EXPECT_NEAR(r.mass_c, 1.0, 1e-14);
    EXPECT_NEAR(r.norm_n_1pa, 1.0, 1e-14);
    EXPECT_EQ(r.grad_c_sq, 0.0);
    EXPECT_EQ(r.energy, r.norm_n_1pa + r.grad_c_sq);
    EXPECT_EQ(r.kinetic, 0.0);
    EXPECT_EQ(r.enstrophy, 0.0);
    EXPECT_EQ(r.sup_n, 1.0);
    EXPECT_EQ(r.min_c, 1.0);
}

TEST(Record, ZeroStateGivesZeroRecord) {
    auto grid = Grid::l_shape(16, 16, 1.0, 1.0);
    const DiagnosticsRecord r = compute_record(SimState::zeros(grid), 0.3);
    for (double v : r.values()) EXPECT_EQ(v, 0.0);
}

TEST(Record, GaussianEnergyMatchesQuadratureReference) {
    const double alpha = 0.5;
    const double w = 0.05;
    auto bump = [w](double x, double y) {
        return 4.0 * std::exp(-((x - 0.5) * (x - 0.5) + (y - 0.5) * (y - 0.5)) / (w * w));
    };
    // Whole-plane integral of bump^(1 + alpha); the tails outside the square are below 1e-60.
    const double analytic = std::pow(4.0, 1.0 + alpha) * kPi * w * w / (1.0 + alpha);
    double reference = 0.0;
    for (int m : {128, 512}) {
        auto grid = Grid::rectangle(m, m, 1.0, 1.0);
        SimState s = SimState::zeros(grid);
        s.n = ScalarField::sample(grid, bump);
        const DiagnosticsRecord r = compute_record(s, alpha);
        EXPECT_EQ(r.energy, r.norm_n_1pa);
        if (m == 512) {
            reference = r.energy;
        } else {
            EXPECT_NEAR(r.energy, analytic, 1e-6 * analytic);
            reference = r.energy;
        }
    }
    EXPECT_NEAR(reference, analytic, 1e-6 * analytic);
}

TEST(Record, GradientFunctionalsConvergeToContinuousValues) {
    std::vector<double> errors;
    for (int m : {32, 64, 128}) {
        auto grid = Grid::rectangle(m, m, 1.0, 1.0);
        SimState s = SimState::zeros(grid);
        s.c = ScalarField::sample(grid, [](double x, double y) {
            return 1.0 + std::cos(kPi * x) * std::cos(kPi * y);
        });
        // integral of |grad c|^2 = pi^2 / 2
        errors.push_back(std::abs(compute_record(s, 0.0).grad_c_sq - kPi * kPi / 2));
    }
    for (double p : testing::observed_orders(errors)) EXPECT_GT(p, 1.8);
}

TEST(Record, NonFiniteFieldIsNamed) {
    auto grid = Grid::rectangle(8, 8, 1.0, 1.0);
    SimState s = uniform_state(grid, 1.0, 1.0);
    s.c[10] = std::numeric_limits<double>::quiet_NaN();
    try {
        compute_record(s, 0.5);
        FAIL();
    } catch (const NumericalBreakdown& e) {
        EXPECT_EQ(e.field(), "c");
    }
    s = uniform_state(grid, 1.0, 1.0);
    s.u.y()[3] = std::numeric_limits<double>::infinity();
    EXPECT_THROW(compute_record(s, 0.5), NumericalBreakdown);
}

TEST(Record, DeterministicAndPure) {
    std::mt19937 rng(3);
    auto grid = Grid::l_shape(20, 20, 1.0, 1.0);
    SimState s = SimState::zeros(grid);
    s.n = testing::random_field(grid, rng, 0.0, 2.0);
    s.c = testing::random_field(grid, rng, 0.0, 2.0);
    s.u = VectorField(testing::random_field(grid, rng, -1, 1, BoundaryCondition::dirichlet()),
                      testing::random_field(grid, rng, -1, 1, BoundaryCondition::dirichlet()));
    const SimState copy = s;
    const DiagnosticsRecord a = compute_record(s, 0.5);
    const DiagnosticsRecord b = compute_record(copy, 0.5);
    EXPECT_EQ(a, b);
    for (double v : {a.mass_n, a.norm_n_1pa, a.grad_c_sq, a.kinetic, a.enstrophy, a.div_residual})
        EXPECT_GE(v, 0.0);
}

TEST(Record, EnergyNonIncreasingUnderPureDiffusion) {
    auto grid = Grid::l_shape(24, 24, 1.0, 1.0);
    EllipticSolver solver(grid);
    ChemotaxisParams p;
    p.sensitivity.form = SensitivityForm::Custom;
    p.sensitivity.custom = [](Point, double, double) { return Mat2{}; };
    ChemotaxisModel model(grid, p);
    SimState s = uniform_state(grid, 0.0, 1.0);
    s.n = ScalarField::sample(grid, [](double x, double y) {
        return 5.0 * std::exp(-30 * ((x - .3) * (x - .3) + (y - .7) * (y - .7)));
    });
    for (double alpha : {0.0, 0.5, 1.0}) {
        SimState st = s;
        double e = compute_record(st, alpha).energy;
        for (int step = 0; step < 30; ++step) {
            st.n = model.step_n(st, solver, 2e-3);
            const double next = compute_record(st, alpha).energy;
            EXPECT_LE(next, e * (1 + 1e-14));
            e = next;
        }
    }
}

GronwallInput sampled(double t_end, std::size_t m, double a, double sigma,
                      const std::function<double(double)>& y,
                      const std::function<double(double)>& h) {
    GronwallInput in;
    in.a = a;
    in.sigma = sigma;
    for (std::size_t i = 0; i < m; ++i) {
        const double t = t_end * static_cast<double>(i) / static_cast<double>(m - 1);
        in.t.push_back(t);
        in.y.push_back(y(t));
        in.h.push_back(h(t));
    }
    return in;
}

TEST(Gronwall, ConstantSourceExample) {
    const GronwallInput in =
        sampled(5.0, 501, 1.0, 1.0, [](double) { return 0.0; }, [](double) { return 1.0; });
    EXPECT_NEAR(gronwall_window_sup(in), 1.0, 1e-12);
    EXPECT_NEAR(gronwall_bound(in, 1.0), 3.0, 1e-12);
    EXPECT_NEAR(gronwall_bound(in), 3.0, 1e-12);
}

TEST(Gronwall, ZeroSourceGivesInitialValue) {
    const GronwallInput in =
        sampled(3.0, 31, 2.0, 0.5, [](double t) { return 4.0 * std::exp(-2 * t); },
                [](double) { return 0.0; });
    EXPECT_EQ(gronwall_bound(in, 0.5), 4.0);
}

TEST(Gronwall, OdeSolutionHoldsAndScaledCopyIsViolated) {
    for (double t_end : {0.5, 2.0, 10.0, 40.0}) {
        const GronwallInput in = sampled(
            t_end, 2001, 1.0, std::min(1.0, t_end), [](double t) { return 1.0 - std::exp(-t); },
            [](double) { return 1.0; });
        const GronwallVerdict v = check_gronwall(in, in.sigma);
        EXPECT_TRUE(v.holds);
        EXPECT_LE(1.0 - std::exp(-t_end), v.bound);
    }
    GronwallInput in = sampled(10.0, 1001, 1.0, 1.0, [](double t) { return 1.0 - std::exp(-t); },
                               [](double) { return 1.0; });
    for (double& y : in.y) y *= 10.0;
    const GronwallVerdict v = check_gronwall(in, 1.0);
    ASSERT_FALSE(v.holds);
    std::size_t first = 0;
    while (in.y[first] <= v.bound) ++first;
    EXPECT_EQ(v.index, first);
    EXPECT_EQ(v.violation_time, in.t[first]);
}

TEST(Gronwall, EqualityCountsAsHolding) {
    GronwallInput in =
        sampled(4.0, 41, 1.5, 1.0, [](double) { return 0.0; }, [](double t) { return 1.0 + t; });
    const double bound = gronwall_bound(in, 1.0);
    for (double& y : in.y) y = bound;
    EXPECT_TRUE(check_gronwall(in, 1.0, 0.0).holds);
}

TEST(Gronwall, BoundMonotoneInSourceAndRate) {
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        GronwallInput in = sampled(
            5.0, 101, 0.1 + 2 * u(rng), 0.5 + u(rng), [&](double) { return 3 * u(rng); },
            [&](double) { return 2 * u(rng); });
        const double base = gronwall_bound(in);
        GronwallInput more = in;
        for (double& h : more.h) h *= 1.5;
        EXPECT_GE(gronwall_bound(more), base);
        GronwallInput faster = in;
        faster.a *= 2.0;
        EXPECT_LE(gronwall_bound(faster), base);
    }
}

TEST(Gronwall, ExplicitEulerTrajectoriesAlwaysHold) {
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        const double a = 0.05 + 5 * u(rng);
        const double y0 = 10 * u(rng);
        const double freq = 10 * u(rng);
        const double amp = 5 * u(rng);
        const std::size_t m = 4001;
        const double t_end = 20.0;
        const double dt = t_end / (m - 1);
        GronwallInput in;
        in.a = a;
        in.sigma = 0.2 + 2 * u(rng);
        double y = y0;
        for (std::size_t i = 0; i < m; ++i) {
            const double t = i * dt;
            const double h = amp * (1 + std::sin(freq * t)) * (u(rng) < 0.9 ? 1.0 : 4.0);
            in.t.push_back(t);
            in.y.push_back(y);
            in.h.push_back(h);
            y += dt * (-a * y + h);
        }
        EXPECT_TRUE(check_gronwall(in, in.sigma).holds) << "trial " << trial;
    }
}

TEST(Gronwall, InvalidInputs) {
    GronwallInput empty;
    EXPECT_THROW(gronwall_bound(empty, 1.0), InvalidInput);
    GronwallInput in =
        sampled(2.0, 21, 1.0, 1.0, [](double) { return 0.0; }, [](double) { return 1.0; });
    EXPECT_THROW(gronwall_bound(in, 0.0), InvalidInput);
    GronwallInput bad = in;
    bad.a = 0.0;
    EXPECT_THROW(gronwall_bound(bad, 1.0), InvalidInput);
    bad = in;
    bad.sigma = 3.0;
    EXPECT_THROW(gronwall_bound(bad, 1.0), InvalidInput);
    bad = in;
    bad.t[5] += 0.03;
    EXPECT_THROW(gronwall_bound(bad, 1.0), InvalidInput);
    bad = in;
    bad.h[2] = -1.0;
    EXPECT_THROW(gronwall_bound(bad, 1.0), InvalidInput);
}

std::vector<DiagnosticsRecord> series(std::size_t m, double dt,
                                      const std::function<double(double)>& energy,
                                      const std::function<double(double)>& enstrophy) {
    std::vector<DiagnosticsRecord> out;
    for (std::size_t i = 0; i < m; ++i) {
        DiagnosticsRecord r;
        r.t = i * dt;
        r.energy = energy(r.t);
        r.enstrophy = enstrophy(r.t);
        out.push_back(r);
    }
    return out;
}

TEST(EnergyMonitor, StationarySeriesFitsWithZeroOffset) {
    const auto recs = series(20, 0.1, [](double) { return 1.0; }, [](double) { return 0.0; });
    const EnergyReport rep = energy_inequality_monitor(recs);
    EXPECT_EQ(rep.c_b, 0.0);
    EXPECT_EQ(rep.fraction_interior, 1.0);
    EXPECT_EQ(rep.fraction_all, 1.0);
}

TEST(EnergyMonitor, DecayingEnergyNeedsNoConstants) {
    const auto recs = series(50, 0.02, [](double t) { return 3.0 * std::exp(-t) + 1.0; },
                             [](double t) { return 1.0 + t; });
    const EnergyReport rep = energy_inequality_monitor(recs);
    EXPECT_EQ(rep.c_a, 0.0);
    EXPECT_EQ(rep.c_b, 0.0);
    EXPECT_EQ(rep.fraction_interior, 1.0);
}

TEST(EnergyMonitor, RecoversExactLinearRelation) {
    // E' = 2 X + 1 with X = enstrophy * E on interior samples: the tightest cover is (2, 1).
    std::vector<DiagnosticsRecord> recs;
    const double dt = 0.01;
    double e = 1.0;
    for (int i = 0; i < 200; ++i) {
        DiagnosticsRecord r;
        r.t = i * dt;
        r.energy = e;
        recs.push_back(r);
        e += dt * (1.0 + 0.5 * std::sin(i * 0.3));
    }
    for (std::size_t i = 0; i < recs.size(); ++i) {
        const double de = i == 0 ? (recs[1].energy - recs[0].energy) / dt
                          : i + 1 == recs.size()
                              ? (recs[i].energy - recs[i - 1].energy) / dt
                              : (recs[i + 1].energy - recs[i - 1].energy) / (2 * dt);
        recs[i].enstrophy = (de - 1.0) / (2.0 * recs[i].energy);
    }
    for (auto& r : recs) r.enstrophy = std::max(r.enstrophy, 0.0);
    const EnergyReport rep = energy_inequality_monitor(recs);
    EXPECT_EQ(rep.fraction_all, 1.0);
    EXPECT_NEAR(rep.c_a, 2.0, 1e-6);
    EXPECT_NEAR(rep.c_b, 1.0, 1e-6);
}

TEST(EnergyMonitor, FitCoversGrowingSeries) {
    const auto recs = series(100, 0.05, [](double t) { return 1.0 + t * t + 0.1 * std::sin(5 * t); },
                             [](double t) { return 0.5 + std::cos(t) * std::cos(t); });
    const EnergyReport rep = energy_inequality_monitor(recs);
    EXPECT_TRUE(std::isfinite(rep.c_a));
    EXPECT_TRUE(std::isfinite(rep.c_b));
    EXPECT_GE(rep.c_a, 0.0);
    EXPECT_GE(rep.c_b, 0.0);
    EXPECT_EQ(rep.fraction_interior, 1.0);
    EXPECT_EQ(rep.fraction_all, 1.0);
}

TEST(EnergyMonitor, RejectsShortOrIrregularSeries) {
    auto recs = series(2, 0.1, [](double) { return 1.0; }, [](double) { return 0.0; });
    EXPECT_THROW(energy_inequality_monitor(recs), InvalidInput);
    recs = series(5, 0.1, [](double) { return 1.0; }, [](double) { return 0.0; });
    recs[2].t = 0.25;
    EXPECT_THROW(energy_inequality_monitor(recs), InvalidInput);
}

TEST(Blowup, Verdicts) {
    BlowupThresholds th;
    th.sup_n_max = 100.0;
    th.sup_grad_c_max = 1e3;
    DiagnosticsRecord calm;
    calm.sup_n = 1.0;
    calm.sup_grad_c = 0.0;
    EXPECT_EQ(blowup_detector(calm, th), BlowupVerdict::Ok);
    EXPECT_EQ(blowup_detector(calm, th, &calm), BlowupVerdict::Ok);

    DiagnosticsRecord inf = calm;
    inf.sup_n = std::numeric_limits<double>::infinity();
    EXPECT_EQ(blowup_detector(inf, th), BlowupVerdict::SuspectedBlowup);
    DiagnosticsRecord nan = calm;
    nan.sup_grad_c = std::numeric_limits<double>::quiet_NaN();
    EXPECT_EQ(blowup_detector(nan, th), BlowupVerdict::SuspectedBlowup);

    DiagnosticsRecord high = calm;
    high.sup_n = 101.0;
    EXPECT_EQ(blowup_detector(high, th), BlowupVerdict::SuspectedBlowup);
    high = calm;
    high.sup_grad_c = 2e3;
    EXPECT_EQ(blowup_detector(high, th), BlowupVerdict::SuspectedBlowup);

    DiagnosticsRecord jump = calm;
    jump.sup_n = 1.6;
    EXPECT_EQ(blowup_detector(jump, th, &calm), BlowupVerdict::SuspectedBlowup);
    jump.sup_n = 1.4;
    EXPECT_EQ(blowup_detector(jump, th, &calm), BlowupVerdict::Ok);

    th.growth_ratio_max = 1.0;
    EXPECT_THROW(blowup_detector(calm, th), InvalidParameter);
}

}  // namespace
}  // namespace ksns
