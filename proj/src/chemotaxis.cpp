#include "ksns/chemotaxis.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "ksns/errors.hpp"
#include "ksns/operators.hpp"

namespace ksns {

namespace {

double upwind(double w, double left, double right) { return w > 0.0 ? w * left : w * right; }

void check_finite(const ScalarField& f, const char* name) {
    if (!f.all_finite()) throw NumericalBreakdown(name);
}

}  // namespace

void ChemotaxisParams::validate() const {
    sensitivity.validate();
    if (!(transport_cfl > 0.0 && transport_cfl <= 1.0)) {
        throw InvalidParameter("transport_cfl must lie in (0, 1]");
    }
    if (!(negativity_tolerance >= 0.0)) {
        throw InvalidParameter("negativity_tolerance must be >= 0");
    }
    solver.validate();
}

void face_velocity(const VectorField& u, std::vector<double>& ux, std::vector<double>& uy) {
    const Grid& g = u.grid();
    const int nx = g.nx();
    ux.assign(g.size(), 0.0);
    uy.assign(g.size(), 0.0);
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (!g.inside(k)) continue;
        const std::uint8_t b = g.neighbors(k);
        if (b & kEast) ux[k] = 0.5 * (u.x()[k] + u.x()[k + 1]);
        if (b & kNorth) uy[k] = 0.5 * (u.y()[k] + u.y()[k + nx]);
    }
}

ScalarField upwind_flux_divergence(const ScalarField& f, const std::vector<double>& wx,
                                   const std::vector<double>& wy) {
    const Grid& g = f.grid();
    const int nx = g.nx();
    const double ihx = 1.0 / g.hx();
    const double ihy = 1.0 / g.hy();
    std::vector<double> fx(g.size(), 0.0);
    std::vector<double> fy(g.size(), 0.0);
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (!g.inside(k)) continue;
        const std::uint8_t b = g.neighbors(k);
        if (b & kEast) fx[k] = upwind(wx[k], f[k], f[k + 1]);
        if (b & kNorth) fy[k] = upwind(wy[k], f[k], f[k + nx]);
    }
    ScalarField out(f.grid_ptr(), f.bc());
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (!g.inside(k)) continue;
        const std::uint8_t b = g.neighbors(k);
        const double west = (b & kWest) ? fx[k - 1] : 0.0;
        const double south = (b & kSouth) ? fy[k - nx] : 0.0;
        out[k] = (fx[k] - west) * ihx + (fy[k] - south) * ihy;
    }
    return out;
}

double outflow_rate(const Grid& g, const std::vector<double>& wx, const std::vector<double>& wy) {
    const int nx = g.nx();
    const double ihx = 1.0 / g.hx();
    const double ihy = 1.0 / g.hy();
    double rate = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (!g.inside(k)) continue;
        const std::uint8_t b = g.neighbors(k);
        double out = std::max(0.0, wx[k]) * ihx + std::max(0.0, wy[k]) * ihy;
        if (b & kWest) out += std::max(0.0, -wx[k - 1]) * ihx;
        if (b & kSouth) out += std::max(0.0, -wy[k - nx]) * ihy;
        rate = std::max(rate, out);
    }
    return rate;
}

ChemotaxisModel::ChemotaxisModel(GridPtr grid, ChemotaxisParams params)
    : grid_(std::move(grid)), params_(std::move(params)) {
    params_.validate();
    const Grid& g = *grid_;
    rho_x_.assign(g.size(), 1.0);
    rho_y_.assign(g.size(), 1.0);
    if (params_.sensitivity.rho == SpatialCutoff::MollifiedIndicator) {
        for (int j = 0; j < g.ny(); ++j) {
            for (int i = 0; i < g.nx(); ++i) {
                const std::size_t k = g.index(i, j);
                if (!g.inside(k)) continue;
                const Point east{(i + 1) * g.hx(), g.y(j)};
                const Point north{g.x(i), (j + 1) * g.hy()};
                rho_x_[k] = spatial_cutoff(params_.sensitivity, &g, east);
                rho_y_[k] = spatial_cutoff(params_.sensitivity, &g, north);
            }
        }
    }
}

void ChemotaxisModel::chemotactic_velocity(const ScalarField& n, const ScalarField& c,
                                           std::vector<double>& vx,
                                           std::vector<double>& vy) const {
    const Grid& g = *grid_;
    const int nx = g.nx();
    const SensitivitySpec& spec = params_.sensitivity;
    std::vector<double> gx(g.size());
    std::vector<double> gy(g.size());
    kernels::gradient(g, BoundaryCondition::neumann(), c.values(), gx, gy);
    vx.assign(g.size(), 0.0);
    vy.assign(g.size(), 0.0);
    for (int j = 0; j < g.ny(); ++j) {
        for (int i = 0; i < nx; ++i) {
            const std::size_t k = g.index(i, j);
            if (!g.inside(k)) continue;
            const std::uint8_t b = g.neighbors(k);
            if (b & kEast) {
                const std::size_t e = k + 1;
                const double nf = std::max(0.0, 0.5 * (n[k] + n[e]));
                const double cf = std::max(0.0, 0.5 * (c[k] + c[e]));
                Mat2 s = eval_sensitivity(spec, {(i + 1) * g.hx(), g.y(j)}, nf, cf, false);
                if (params_.regularized) {
                    const double factor = rho_x_[k] * spec.amplitude_cutoff(nf);
                    if (factor != 1.0) s = s * factor;
                }
                const double dcx = (c[e] - c[k]) / g.hx();
                const double dcy = 0.5 * (gy[k] + gy[e]);
                vx[k] = s.a11 * dcx + s.a12 * dcy;
            }
            if (b & kNorth) {
                const std::size_t nn = k + nx;
                const double nf = std::max(0.0, 0.5 * (n[k] + n[nn]));
                const double cf = std::max(0.0, 0.5 * (c[k] + c[nn]));
                Mat2 s = eval_sensitivity(spec, {g.x(i), (j + 1) * g.hy()}, nf, cf, false);
                if (params_.regularized) {
                    const double factor = rho_y_[k] * spec.amplitude_cutoff(nf);
                    if (factor != 1.0) s = s * factor;
                }
                const double dcx = 0.5 * (gx[k] + gx[nn]);
                const double dcy = (c[nn] - c[k]) / g.hy();
                vy[k] = s.a21 * dcx + s.a22 * dcy;
            }
        }
    }
}

ScalarField ChemotaxisModel::chemotactic_flux_div(const ScalarField& n,
                                                  const ScalarField& c) const {
    std::vector<double> vx;
    std::vector<double> vy;
    chemotactic_velocity(n, c, vx, vy);
    return upwind_flux_divergence(n, vx, vy);
}

double ChemotaxisModel::density_transport_rate(const SimState& state) const {
    std::vector<double> ux, uy, vx, vy;
    face_velocity(state.u, ux, uy);
    chemotactic_velocity(state.n, state.c, vx, vy);
    for (std::size_t k = 0; k < ux.size(); ++k) {
        ux[k] += vx[k];
        uy[k] += vy[k];
    }
    return outflow_rate(*grid_, ux, uy);
}

double ChemotaxisModel::signal_transport_rate(const VectorField& u) const {
    std::vector<double> ux, uy;
    face_velocity(u, ux, uy);
    return outflow_rate(*grid_, ux, uy);
}

ScalarField ChemotaxisModel::step_n(const SimState& state, const EllipticSolver& solver,
                                    double dt) const {
    if (!(dt > 0.0)) throw InvalidParameter("step_n requires dt > 0");
    const Grid& g = *grid_;
    std::vector<double> wx, wy, vx, vy;
    face_velocity(state.u, wx, wy);
    chemotactic_velocity(state.n, state.c, vx, vy);
    for (std::size_t k = 0; k < wx.size(); ++k) {
        wx[k] += vx[k];
        wy[k] += vy[k];
    }
    const double rate = outflow_rate(g, wx, wy);
    if (dt * rate > params_.transport_cfl) {
        throw StepRejected("density transport CFL violated (dt " + std::to_string(dt) +
                               ", limit " + std::to_string(params_.transport_cfl / rate) + ")",
                           params_.transport_cfl / rate);
    }
    ScalarField explicit_part = state.n;
    explicit_part.axpy(-dt, upwind_flux_divergence(state.n, wx, wy));
    explicit_part.set_bc(BoundaryCondition::neumann());
    check_finite(explicit_part, "n");

    ScalarField next =
        solve_helmholtz(solver, explicit_part, dt, BoundaryCondition::neumann(), params_.solver);
    // The exact implicit solve conserves the sum; remove the solver's residual drift
    // multiplicatively so signs are untouched.
    const double target = kernels::sum(g, explicit_part.values());
    const double actual = kernels::sum(g, next.values());
    if (actual > 0.0 && target > 0.0) next *= target / actual;
    check_finite(next, "n");

    const double lowest = next.min();
    if (lowest < -params_.negativity_tolerance) {
        throw PositivityFailure("negative cell density " + std::to_string(lowest), lowest);
    }
    if (params_.clip_negative) {
        for (double& v : next.values()) v = std::max(v, 0.0);
    }
    return next;
}

ScalarField ChemotaxisModel::step_c(const SimState& state, const EllipticSolver& solver,
                                    double dt) const {
    if (!(dt > 0.0)) throw InvalidParameter("step_c requires dt > 0");
    const Grid& g = *grid_;
    std::vector<double> ux, uy;
    face_velocity(state.u, ux, uy);
    const double rate = outflow_rate(g, ux, uy);
    if (dt * rate > params_.transport_cfl) {
        throw StepRejected("signal advection CFL violated", params_.transport_cfl / rate);
    }
    // Reaction coefficient expm1(dt) instead of dt: the linear decay towards n is then
    // exact for spatially uniform data and the operator keeps its M-matrix structure.
    const double gamma = std::expm1(dt);
    ScalarField rhs = state.c;
    rhs.axpy(-dt, upwind_flux_divergence(state.c, ux, uy));
    rhs.axpy(gamma, state.n);
    rhs *= 1.0 / (1.0 + gamma);
    rhs.set_bc(BoundaryCondition::neumann());
    check_finite(rhs, "c");

    ScalarField next =
        solve_helmholtz(solver, rhs, dt / (1.0 + gamma), BoundaryCondition::neumann(), params_.solver);
    check_finite(next, "c");
    const double lowest = next.min();
    if (lowest < -params_.negativity_tolerance) {
        throw PositivityFailure("negative signal " + std::to_string(lowest), lowest);
    }
    if (params_.clip_negative) {
        for (double& v : next.values()) v = std::max(v, 0.0);
    }
    return next;
}

}  // namespace ksns
