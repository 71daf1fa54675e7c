#include "ksns/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <sstream>

#include "ksns/chemotaxis.hpp"
#include "ksns/errors.hpp"
#include "ksns/fluid.hpp"
#include "ksns/io.hpp"
#include "ksns/operators.hpp"

namespace ksns {

std::string to_string(TerminationReason r) {
    switch (r) {
        case TerminationReason::Completed: return "completed";
        case TerminationReason::BlowupDetected: return "blowup-detected";
        case TerminationReason::SolverDivergence: return "solver-divergence";
        case TerminationReason::StepRejectedLimit: return "step-rejected-limit";
    }
    return "unknown";
}

GridPtr make_grid(const GridSpec& spec) {
    if (spec.shape == DomainShape::LShape) return Grid::l_shape(spec.nx, spec.ny, spec.lx, spec.ly);
    return Grid::rectangle(spec.nx, spec.ny, spec.lx, spec.ly);
}

SimState make_initial_state(const InitialSpec& spec, const GridPtr& grid) {
    if (spec.kind == InitialKind::File) {
        SimState s = state_from_snapshot(read_snapshot(spec.file), grid);
        s.p = ScalarField(grid);
        if (!s.n.all_finite() || !s.c.all_finite() || !s.u.all_finite()) {
            throw ConfigError("initial.file", "snapshot holds non-finite values");
        }
        if (s.n.min() < 0.0 || s.c.min() < 0.0) {
            throw ConfigError("initial.file", "snapshot holds negative n or c");
        }
        return s;
    }
    SimState s = SimState::zeros(grid);
    s.n = ScalarField::constant(grid, spec.n0);
    s.c = ScalarField::constant(grid, spec.c0);
    if (spec.kind == InitialKind::Gaussian && spec.mass > 0.0) {
        const double w2 = 2.0 * spec.width * spec.width;
        ScalarField bump = ScalarField::sample(grid, [&](double x, double y) {
            const double dx = x - spec.center_x;
            const double dy = y - spec.center_y;
            return std::exp(-(dx * dx + dy * dy) / w2);
        });
        const double m = integrate(bump);
        if (!(m > 0.0)) throw ConfigError("initial.width", "bump has no mass on the grid");
        s.n.axpy(spec.mass / m, bump);
    }
    return s;
}

ScalarField make_potential(const PotentialSpec& spec, const GridPtr& grid) {
    switch (spec.kind) {
        case PotentialKind::Constant: return ScalarField::constant(grid, spec.value);
        case PotentialKind::Linear:
            return ScalarField::sample(grid, [&](double x, double y) { return spec.a * x + spec.b * y; });
        case PotentialKind::Tabulated: {
            std::istringstream in(read_text_file(spec.file));
            std::vector<double> v;
            double x = 0.0;
            while (in >> x) v.push_back(x);
            if (!in.eof()) throw ConfigError("potential.file", "non-numeric entry");
            if (v.size() != grid->size()) {
                throw ConfigError("potential.file", "expected nx * ny values, got " +
                                                        std::to_string(v.size()));
            }
            ScalarField phi(grid, std::move(v));
            phi.clean_outside();
            return phi;
        }
    }
    return ScalarField(grid);
}

namespace {

struct Models {
    EllipticSolver solver;
    ChemotaxisModel chemo;
    FluidParams fluid;
};

ChemotaxisParams chemotaxis_params(const SimConfig& cfg) {
    ChemotaxisParams p;
    p.sensitivity.c_s = cfg.physics.c_s;
    p.sensitivity.alpha = cfg.physics.alpha;
    p.sensitivity.form = cfg.physics.sensitivity;
    p.sensitivity.rotation_angle = cfg.physics.rotation_angle;
    p.sensitivity.rho = cfg.physics.rho;
    p.sensitivity.rho_margin = cfg.physics.rho_margin;
    p.sensitivity.chi = cfg.physics.chi;
    p.sensitivity.eps_reg = cfg.physics.eps_reg;
    p.regularized = cfg.physics.regularized;
    p.transport_cfl = cfg.numerics.transport_cfl;
    p.solver.tol_rel = cfg.numerics.transport_tol;
    p.solver.method = cfg.numerics.solver;
    return p;
}

FluidParams fluid_params(const SimConfig& cfg, const GridPtr& grid) {
    FluidParams p;
    p.kappa = cfg.physics.kappa;
    p.eps_reg = cfg.physics.eps_reg;
    p.phi = make_potential(cfg.potential, grid);
    p.yosida_order = cfg.physics.yosida_order;
    p.convection = cfg.physics.convection;
    p.cfl = cfg.numerics.fluid_cfl;
    p.viscous.tol_rel = cfg.numerics.solver_tol;
    p.viscous.method = cfg.numerics.solver;
    p.projection.tol_rel = cfg.numerics.projection_tol;
    p.projection.method = cfg.numerics.solver;
    p.validate(*grid);
    return p;
}

SimState advance(const Models& m, const SimState& state, double dt, bool strang) {
    SimState s = state;
    const double first = strang ? 0.5 * dt : dt;
    s.c = m.chemo.step_c(s, m.solver, first);
    s.n = m.chemo.step_n(s, m.solver, first);
    FluidStep f = fluid_step(m.solver, s.u, s.n, m.fluid, dt);
    s.u = std::move(f.u);
    s.p = std::move(f.p);
    if (strang) {
        s.n = m.chemo.step_n(s, m.solver, 0.5 * dt);
        s.c = m.chemo.step_c(s, m.solver, 0.5 * dt);
    }
    s.t = state.t + dt;
    return s;
}

bool state_finite(const SimState& s) {
    return s.n.all_finite() && s.c.all_finite() && s.u.all_finite() && s.p.all_finite();
}

double stability_limit(const Models& m, const SimState& s, const NumericsSpec& num) {
    double limit = std::numeric_limits<double>::infinity();
    const double rn = m.chemo.density_transport_rate(s);
    const double rc = m.chemo.signal_transport_rate(s.u);
    if (rn > 0.0) limit = std::min(limit, num.transport_cfl / rn);
    if (rc > 0.0) limit = std::min(limit, num.transport_cfl / rc);
    limit = std::min(limit, fluid_dt_limit(s.u, m.fluid));
    return limit;
}

DiagnosticsRecord nan_record(double t) {
    std::array<double, DiagnosticsRecord::kColumns> v;
    v.fill(std::numeric_limits<double>::quiet_NaN());
    v[0] = t;
    return DiagnosticsRecord::from_values(v);
}

std::string snapshot_name(long index) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "snapshot_%06ld.bin", index);
    return buf;
}

// Event times next * cadence; multiplying avoids the drift of repeated addition.
struct Schedule {
    double cadence = 0.0;
    long next = 1;
    double time() const { return static_cast<double>(next) * cadence; }
    bool active() const { return cadence > 0.0; }
};

}  // namespace

RunResult run_simulation(const SimConfig& config, const RunOptions& options) {
    config.validate();
    const GridPtr grid = options.grid ? options.grid : make_grid(config.grid);
    if (grid->nx() != config.grid.nx || grid->ny() != config.grid.ny ||
        grid->lx() != config.grid.lx || grid->ly() != config.grid.ly) {
        throw ConfigError("grid", "override grid does not match the configured dimensions");
    }
    const NumericsSpec& num = config.numerics;

    SolverConfig scfg;
    scfg.tol_rel = num.solver_tol;
    scfg.method = num.solver;
    Models m{EllipticSolver(grid, scfg), ChemotaxisModel(grid, chemotaxis_params(config)),
             fluid_params(config, grid)};

    BlowupThresholds th;
    th.sup_n_max = config.detector.sup_n_max;
    th.sup_grad_c_max = config.detector.sup_grad_c_max;
    th.growth_ratio_max = config.detector.growth_ratio;
    th.growth_floor = config.detector.growth_floor;
    th.validate();

    const bool write_files = !config.output.directory.empty();
    const std::filesystem::path dir(config.output.directory);
    if (write_files) std::filesystem::create_directories(dir);

    RunResult res;
    SimState state = make_initial_state(config.initial, grid);
    const double alpha = config.physics.alpha;
    res.records.push_back(compute_record(state, alpha));
    const double sup_n0 = res.records.front().sup_n;
    res.sup_n_max = sup_n0;
    const double factor_limit = config.detector.sup_n_factor > 0.0
                                    ? config.detector.sup_n_factor * std::max(sup_n0, 1.0)
                                    : std::numeric_limits<double>::infinity();

    Schedule records{config.output.cadence};
    Schedule snapshots{write_files ? config.output.snapshot_cadence : 0.0};
    long snapshot_index = 0;
    if (write_files) write_snapshot((dir / snapshot_name(snapshot_index++)).string(), state);

    const double t_end = num.t_end;
    const double t_eps = 1e-12 * t_end;
    double dt_try = num.dt;
    int rejected_in_row = 0;
    bool done = false;

    auto finish = [&](TerminationReason reason, std::string message) {
        res.reason = reason;
        res.message = std::move(message);
        done = true;
    };

    while (!done && state.t < t_end - t_eps) {
        double target = t_end;
        if (records.active()) target = std::min(target, records.time());
        if (snapshots.active()) target = std::min(target, snapshots.time());

        double dt = num.adaptive ? std::min(num.dt, num.safety * stability_limit(m, state, num)) : num.dt;
        dt = std::min(dt, dt_try);
        bool lands = false;
        if (state.t + dt >= target - t_eps) {
            dt = target - state.t;
            lands = true;
        }

        SimState next;
        try {
            next = advance(m, state, dt, num.strang);
        } catch (const StepRejected& e) {
            dt_try = std::min(0.5 * dt, num.safety * e.dt_limit());
        } catch (const PositivityFailure&) {
            dt_try = 0.5 * dt;
        } catch (const SolverDivergence& e) {
            finish(TerminationReason::SolverDivergence, e.what());
            break;
        } catch (const NumericalBreakdown& e) {
            res.records.push_back(nan_record(state.t + dt));
            finish(TerminationReason::BlowupDetected, e.what());
            break;
        }
        if (next.n.grid_ptr() == nullptr) {
            ++res.rejections;
            if (++rejected_in_row > num.max_rejections || dt_try < num.dt_min) {
                finish(TerminationReason::StepRejectedLimit,
                       "step rejected " + std::to_string(rejected_in_row) + " times at t = " +
                           format_double(state.t));
            }
            continue;
        }
        rejected_in_row = 0;
        dt_try = std::min(num.dt, 2.0 * dt_try);
        if (lands) next.t = target;
        if (!state_finite(next)) {
            res.records.push_back(nan_record(next.t));
            state = std::move(next);
            finish(TerminationReason::BlowupDetected, "non-finite field values");
            break;
        }
        state = std::move(next);
        ++res.steps;
        if (options.observer) options.observer(state, StepInfo{res.steps, dt});

        const double sup_n = lp_norm(state.n, kInfNorm);
        res.sup_n_max = std::max(res.sup_n_max, sup_n);

        const bool at_record = !records.active() || (lands && target == records.time());
        const bool at_end = state.t >= t_end - t_eps;
        const bool tripped = sup_n > th.sup_n_max || sup_n > factor_limit;
        if (records.active() && lands && target == records.time()) ++records.next;
        if (snapshots.active() && lands && target == snapshots.time()) {
            ++snapshots.next;
            write_snapshot((dir / snapshot_name(snapshot_index++)).string(), state);
        }
        if (at_record || at_end || tripped) {
            DiagnosticsRecord rec = compute_record(state, alpha);
            const DiagnosticsRecord prev = res.records.back();
            res.records.push_back(rec);
            if (tripped || blowup_detector(rec, th, &prev) == BlowupVerdict::SuspectedBlowup) {
                finish(TerminationReason::BlowupDetected,
                       "blow-up suspected at t = " + format_double(state.t) +
                           " (sup n = " + format_double(rec.sup_n) + ")");
            }
        }
    }
    if (!done) res.reason = TerminationReason::Completed;

    res.final_state = std::move(state);
    if (write_files) {
        write_text_file((dir / "series.csv").string(), records_to_csv(res.records));
        std::string cfg_text = "# initial data family: " +
                               std::string(config.initial.kind == InitialKind::File
                                               ? "file"
                                               : "synthetic (uniform/gaussian experiment family)") +
                               "\n# termination: " + to_string(res.reason) + "\n" +
                               serialize_config(config);
        write_text_file((dir / "config.cfg").string(), cfg_text);
        if (res.final_state.n.all_finite()) {
            write_snapshot((dir / "final.bin").string(), res.final_state);
        }
    }
    return res;
}

}  // namespace ksns
