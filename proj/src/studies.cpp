#include "ksns/studies.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <limits>
#include <thread>

#include "ksns/chemotaxis.hpp"
#include "ksns/elliptic.hpp"
#include "ksns/errors.hpp"
#include "ksns/io.hpp"
#include "ksns/operators.hpp"

namespace ksns {

int sweep_threads() {
    const char* env = std::getenv("KSNS_THREADS");
    if (!env) return 1;
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || v <= 0) return 1;
    return static_cast<int>(std::min<long>(v, 256));
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kPi = 3.14159265358979323846;

struct SweepRun {
    RunSummary summary;
    std::optional<SimState> final_state;
};

SweepRun run_one(const SimConfig& cfg, double parameter, bool keep_state) {
    SweepRun out;
    out.summary.parameter = parameter;
    try {
        RunResult r = run_simulation(cfg);
        out.summary.reason = r.reason;
        out.summary.steps = r.steps;
        out.summary.sup_n = r.sup_n_max;
        double e = 0.0;
        for (const DiagnosticsRecord& rec : r.records) {
            if (std::isfinite(rec.energy)) e = std::max(e, rec.energy);
        }
        out.summary.sup_energy = e;
        if (!r.message.empty() && r.reason != TerminationReason::Completed) {
            out.summary.error = r.message;
        }
        if (keep_state && r.reason == TerminationReason::Completed) out.final_state = std::move(r.final_state);
    } catch (const std::exception& e) {
        out.summary.sup_n = kNaN;
        out.summary.sup_energy = kNaN;
        out.summary.error = e.what();
    }
    return out;
}

// Runs every job on `threads` workers; results keep job order.
std::vector<SweepRun> run_all(const std::vector<std::function<SweepRun()>>& jobs, int threads) {
    std::vector<SweepRun> results(jobs.size());
    const int workers = std::max(1, std::min<int>(threads > 0 ? threads : sweep_threads(),
                                                  static_cast<int>(jobs.size())));
    std::atomic<std::size_t> next{0};
    auto work = [&] {
        for (std::size_t i = next++; i < jobs.size(); i = next++) results[i] = jobs[i]();
    };
    if (workers == 1) {
        work();
        return results;
    }
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (std::thread& t : pool) t.join();
    return results;
}

std::string subdirectory(const SimConfig& base, const std::string& name) {
    if (base.output.directory.empty()) return {};
    return (std::filesystem::path(base.output.directory) / name).string();
}

std::string summary_header(const char* parameter) {
    return std::string(parameter) + ",sup_n,sup_energy,termination,steps,message\n";
}

std::string summary_row(const RunSummary& r) {
    std::string msg = r.error;
    std::replace(msg.begin(), msg.end(), ',', ';');
    std::replace(msg.begin(), msg.end(), '\n', ' ');
    return format_double(r.parameter) + "," + format_double(r.sup_n) + "," +
           format_double(r.sup_energy) + "," + r.status() + "," + std::to_string(r.steps) + "," +
           msg + "\n";
}

}  // namespace

AlphaSweep alpha_sweep(const SimConfig& base, const std::vector<double>& alphas, int threads) {
    if (alphas.empty()) throw InvalidInput("alpha sweep needs at least one alpha");
    std::vector<std::function<SweepRun()>> jobs;
    for (double a : alphas) {
        SimConfig cfg = base;
        cfg.physics.alpha = a;
        cfg.output.directory = subdirectory(base, "alpha_" + format_double(a));
        cfg.output.label = base.output.label + "-alpha-" + format_double(a);
        jobs.push_back([cfg, a] { return run_one(cfg, a, false); });
    }
    AlphaSweep sweep;
    for (SweepRun& r : run_all(jobs, threads)) sweep.rows.push_back(std::move(r.summary));
    return sweep;
}

std::string to_csv(const AlphaSweep& sweep) {
    std::string out = summary_header("alpha");
    for (const RunSummary& r : sweep.rows) out += summary_row(r);
    return out;
}

RegularizationStudy regularization_study(const SimConfig& base, const std::vector<double>& eps_list,
                                         int threads) {
    if (eps_list.empty()) throw InvalidInput("regularization study needs at least one eps");
    for (std::size_t i = 0; i < eps_list.size(); ++i) {
        const double e = eps_list[i];
        const bool last = i + 1 == eps_list.size();
        if (!std::isfinite(e) || e < 0.0 || (e == 0.0 && !last)) {
            throw InvalidInput("eps values must be positive (zero only as the last entry)");
        }
        if (i > 0 && !(e < eps_list[i - 1])) throw InvalidInput("eps values must strictly decrease");
    }
    std::vector<std::function<SweepRun()>> jobs;
    for (double e : eps_list) {
        SimConfig cfg = base;
        cfg.physics.eps_reg = e;
        cfg.output.directory = subdirectory(base, "eps_" + format_double(e));
        cfg.output.label = base.output.label + "-eps-" + format_double(e);
        jobs.push_back([cfg, e] { return run_one(cfg, e, true); });
    }
    std::vector<SweepRun> runs = run_all(jobs, threads);
    RegularizationStudy study;
    for (std::size_t i = 0; i < runs.size(); ++i) {
        if (i > 0) {
            EpsDistance d{eps_list[i - 1], eps_list[i], kNaN, kNaN, kNaN};
            if (runs[i - 1].final_state && runs[i].final_state) {
                const SimState& a = *runs[i - 1].final_state;
                const SimState& b = *runs[i].final_state;
                d.dist_n = lp_norm(a.n - b.n, 2.0);
                d.dist_c = lp_norm(a.c - b.c, 2.0);
                d.dist_u = l2_norm(a.u - b.u);
            }
            study.distances.push_back(d);
        }
        study.rows.push_back(std::move(runs[i].summary));
    }
    return study;
}

std::string to_csv(const RegularizationStudy& study) {
    std::string out = summary_header("eps");
    for (const RunSummary& r : study.rows) out += summary_row(r);
    out += "\neps_from,eps_to,dist_n,dist_c,dist_u\n";
    for (const EpsDistance& d : study.distances) {
        out += format_double(d.eps_from) + "," + format_double(d.eps_to) + "," +
               format_double(d.dist_n) + "," + format_double(d.dist_c) + "," +
               format_double(d.dist_u) + "\n";
    }
    return out;
}

double OrderEstimate::min_order() const {
    double m = std::numeric_limits<double>::infinity();
    for (double o : orders) m = std::min(m, o);
    return m;
}

const OrderEstimate& ConvergenceReport::find(const std::string& name) const {
    for (const OrderEstimate& e : estimates) {
        if (e.name == name) return e;
    }
    throw InvalidInput("no estimate named '" + name + "'");
}

namespace {

double relative_l2(const ScalarField& a, const ScalarField& exact) {
    return lp_norm(a - exact, 2.0) / lp_norm(exact, 2.0);
}

// Mode-(1,1) cosine: Neumann-compatible on the rectangle and on the L-shape, whose
// re-entrant edges sit on x = lx/2 and y = ly/2.
struct Manufactured {
    double kx;
    double ky;
    double f(double x, double y) const { return std::cos(kx * x) * std::cos(ky * y); }
    double k2() const { return kx * kx + ky * ky; }
};

double diffusion_error(const EllipticSolver& solver, const Manufactured& m, const SolverConfig& cfg) {
    const GridPtr& g = solver.grid_ptr();
    const double h = std::min(g->hx(), g->hy());
    const double t_end = 0.01;
    const int steps = static_cast<int>(std::ceil(t_end / (h * h)));
    const double dt = t_end / steps;
    ScalarField u = ScalarField::sample(g, [&](double x, double y) { return m.f(x, y); });
    for (int s = 0; s < steps; ++s) u = solve_helmholtz(solver, u, dt, BoundaryCondition::neumann(), cfg);
    const double decay = std::exp(-m.k2() * t_end);
    ScalarField exact = ScalarField::sample(g, [&](double x, double y) { return decay * m.f(x, y); });
    return relative_l2(u, exact);
}

double poisson_error(const EllipticSolver& solver, const Manufactured& m) {
    const GridPtr& g = solver.grid_ptr();
    ScalarField exact = ScalarField::sample(g, [&](double x, double y) { return m.f(x, y); });
    const double mu = mean(exact);
    for (std::size_t k = 0; k < g->size(); ++k) {
        if (g->inside(k)) exact[k] -= mu;
    }
    ScalarField rhs = ScalarField::sample(g, [&](double x, double y) { return m.k2() * m.f(x, y); });
    return relative_l2(solve_poisson_neumann(solver, rhs), exact);
}

double helmholtz_error(const EllipticSolver& solver, const Manufactured& m, const SolverConfig& cfg) {
    const GridPtr& g = solver.grid_ptr();
    const double theta = 0.1;
    ScalarField exact = ScalarField::sample(g, [&](double x, double y) { return m.f(x, y); });
    ScalarField rhs = (1.0 + theta * m.k2()) * exact;
    return relative_l2(solve_helmholtz(solver, rhs, theta, BoundaryCondition::neumann(), cfg), exact);
}

// Steady transport f = 2 + F of a stream-function flow that vanishes on every boundary
// edge, with source w . grad F. Face speeds are stream-function differences, so the
// discrete velocity is exactly divergence free.
double advection_error(const GridPtr& g, const Manufactured& m) {
    const double amp = 0.1;
    auto psi = [&](double x, double y) {
        const double sx = std::sin(m.kx * x);
        const double sy = std::sin(m.ky * y);
        return amp * sx * sx * sy * sy;
    };
    auto wx = [&](double x, double y) {
        return amp * std::pow(std::sin(m.kx * x), 2) * m.ky * std::sin(2.0 * m.ky * y);
    };
    auto wy = [&](double x, double y) {
        return -amp * std::pow(std::sin(m.ky * y), 2) * m.kx * std::sin(2.0 * m.kx * x);
    };
    const double hx = g->hx();
    const double hy = g->hy();
    std::vector<double> fx(g->size(), 0.0);
    std::vector<double> fy(g->size(), 0.0);
    for (int j = 0; j < g->ny(); ++j) {
        for (int i = 0; i < g->nx(); ++i) {
            const std::size_t k = g->index(i, j);
            const double xe = (i + 1) * hx;
            const double yn = (j + 1) * hy;
            fx[k] = (psi(xe, yn) - psi(xe, j * hy)) / hy;
            fy[k] = -(psi(xe, yn) - psi(i * hx, yn)) / hx;
        }
    }
    ScalarField exact = ScalarField::sample(g, [&](double x, double y) { return 2.0 + m.f(x, y); });
    ScalarField source = ScalarField::sample(g, [&](double x, double y) {
        const double gx = -m.kx * std::sin(m.kx * x) * std::cos(m.ky * y);
        const double gy = -m.ky * std::cos(m.kx * x) * std::sin(m.ky * y);
        return wx(x, y) * gx + wy(x, y) * gy;
    });
    const double t_end = 0.5;
    const int steps = static_cast<int>(std::ceil(t_end * outflow_rate(*g, fx, fy) / 0.5));
    const double dt = t_end / steps;
    ScalarField f = exact;
    for (int s = 0; s < steps; ++s) {
        ScalarField rate = source - upwind_flux_divergence(f, fx, fy);
        f.axpy(dt, rate);
    }
    return relative_l2(f, exact);
}

}  // namespace

ConvergenceReport convergence_study(const SimConfig& base, const std::vector<int>& resolutions) {
    if (resolutions.size() < 3) throw InvalidInput("convergence study needs at least three resolutions");
    for (std::size_t i = 0; i < resolutions.size(); ++i) {
        if (resolutions[i] < 4) throw InvalidInput("resolutions must be at least 4");
        if (i > 0 && resolutions[i] != 2 * resolutions[i - 1]) {
            throw InvalidInput("resolutions must be nested: each twice the previous");
        }
    }
    if (base.grid.shape == DomainShape::LShape && resolutions.front() % 2 != 0) {
        throw InvalidInput("l-shape resolutions must be even");
    }
    const Manufactured m{2.0 * kPi / base.grid.lx, 2.0 * kPi / base.grid.ly};
    SolverConfig cfg;
    cfg.tol_rel = 1e-12;
    cfg.method = base.numerics.solver;

    ConvergenceReport rep;
    rep.resolutions = resolutions;
    OrderEstimate diffusion{"diffusion", {}, {}};
    OrderEstimate poisson{"poisson", {}, {}};
    OrderEstimate helmholtz{"helmholtz", {}, {}};
    OrderEstimate advection{"advection", {}, {}};
    for (int n : resolutions) {
        GridSpec spec = base.grid;
        spec.nx = n;
        spec.ny = n;
        const GridPtr g = make_grid(spec);
        const EllipticSolver solver(g, cfg);
        diffusion.errors.push_back(diffusion_error(solver, m, cfg));
        poisson.errors.push_back(poisson_error(solver, m));
        helmholtz.errors.push_back(helmholtz_error(solver, m, cfg));
        advection.errors.push_back(advection_error(g, m));
    }
    for (OrderEstimate* e : {&diffusion, &poisson, &helmholtz, &advection}) {
        for (std::size_t k = 1; k < e->errors.size(); ++k) {
            e->orders.push_back(std::log2(e->errors[k - 1] / e->errors[k]));
        }
        rep.estimates.push_back(std::move(*e));
    }
    return rep;
}

std::string to_csv(const ConvergenceReport& report) {
    std::string out = "solver,resolution,error,order\n";
    for (const OrderEstimate& e : report.estimates) {
        for (std::size_t k = 0; k < e.errors.size(); ++k) {
            out += e.name + "," + std::to_string(report.resolutions[k]) + "," +
                   format_double(e.errors[k]) + "," +
                   (k > 0 ? format_double(e.orders[k - 1]) : std::string()) + "\n";
        }
    }
    return out;
}

}  // namespace ksns
