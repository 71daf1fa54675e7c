#include "ksns/fluid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "ksns/errors.hpp"
#include "ksns/operators.hpp"

namespace ksns {

void FluidParams::validate(const Grid& grid) const {
    if (!std::isfinite(kappa)) throw InvalidParameter("kappa must be finite");
    if (!(eps_reg >= 0.0) || !std::isfinite(eps_reg)) {
        throw InvalidParameter("eps_reg must be >= 0");
    }
    if (!(cfl > 0.0 && cfl <= 1.0)) throw InvalidParameter("fluid cfl must lie in (0, 1]");
    if (phi.grid_ptr()) {
        if (!(phi.grid() == grid)) throw InvalidParameter("phi lives on a different grid");
        if (!phi.all_finite()) throw InvalidParameter("phi must be finite");
    }
    viscous.validate();
    projection.validate();
}

Projection leray_project(const EllipticSolver& solver, const VectorField& v,
                         const SolverConfig& config, const ScalarField* guess) {
    const Grid& g = v.grid();
    const ScalarField div = divergence(v);
    Projection out{v, guess ? *guess : ScalarField(v.grid_ptr()), {}};
    out.q.set_bc(BoundaryCondition::neumann());

    std::vector<double> b(g.size());
    for (std::size_t k = 0; k < g.size(); ++k) b[k] = -div[k];
    SolverConfig cfg = config;
    cfg.tol_abs = std::max(config.tol_abs, config.tol_rel * l2_norm(v));
    cfg.tol_rel = std::numeric_limits<double>::min();
    const EllipticOperator op{StencilKind::DivGrad, BcKind::Neumann, 0.0, 1.0};
    out.stats = solver.solve(op, b, out.q.values(), cfg);

    std::vector<double> gx(g.size());
    std::vector<double> gy(g.size());
    kernels::gradient(g, BoundaryCondition::neumann(), out.q.values(), gx, gy);
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (!g.inside(k)) continue;
        out.u.x()[k] -= gx[k];
        out.u.y()[k] -= gy[k];
    }
    return out;
}

namespace {

VectorField helmholtz_components(const EllipticSolver& solver, const VectorField& u, double eps,
                                 const SolverConfig& config) {
    const BoundaryCondition wall = BoundaryCondition::dirichlet(0.0);
    return VectorField(solve_helmholtz(solver, u.x(), eps, wall, config),
                       solve_helmholtz(solver, u.y(), eps, wall, config));
}

}  // namespace

VectorField yosida_apply(const EllipticSolver& solver, const VectorField& u, double eps,
                         const FluidParams& params) {
    if (!(eps >= 0.0) || !std::isfinite(eps)) {
        throw InvalidParameter("Yosida parameter must be >= 0");
    }
    if (eps == 0.0) return u;
    if (params.yosida_order == YosidaOrder::SolveThenProject) {
        return leray_project(solver, helmholtz_components(solver, u, eps, params.viscous),
                             params.projection)
            .u;
    }
    return helmholtz_components(solver, leray_project(solver, u, params.projection).u, eps,
                                params.viscous);
}

VectorField yosida_apply(const EllipticSolver& solver, const VectorField& u, double eps) {
    return yosida_apply(solver, u, eps, FluidParams{});
}

VectorField advect_velocity(const VectorField& w, const VectorField& u, ConvectionScheme scheme) {
    const Grid& g = u.grid();
    const int nx = g.nx();
    const double ihx = 1.0 / g.hx();
    const double ihy = 1.0 / g.hy();
    VectorField out(u.grid_ptr());
    for (int comp = 0; comp < 2; ++comp) {
        const ScalarField& f = u.component(comp);
        ScalarField& r = out.component(comp);
        for (std::size_t k = 0; k < g.size(); ++k) {
            if (!g.inside(k)) continue;
            const std::uint8_t b = g.neighbors(k);
            const double fc = f[k];
            const double fe = (b & kEast) ? f[k + 1] : -fc;
            const double fw = (b & kWest) ? f[k - 1] : -fc;
            const double fn = (b & kNorth) ? f[k + nx] : -fc;
            const double fs = (b & kSouth) ? f[k - nx] : -fc;
            const double wx = w.x()[k];
            const double wy = w.y()[k];
            double dx;
            double dy;
            if (scheme == ConvectionScheme::Upwind) {
                dx = wx > 0.0 ? (fc - fw) * ihx : (fe - fc) * ihx;
                dy = wy > 0.0 ? (fc - fs) * ihy : (fn - fc) * ihy;
            } else {
                dx = 0.5 * (fe - fw) * ihx;
                dy = 0.5 * (fn - fs) * ihy;
            }
            r[k] = wx * dx + wy * dy;
        }
    }
    return out;
}

VectorField convective_term(const EllipticSolver& solver, const VectorField& u,
                            const FluidParams& params) {
    if (params.kappa == 0.0) return VectorField(u.grid_ptr());
    VectorField out = advect_velocity(yosida_apply(solver, u, params.eps_reg, params), u,
                                      params.convection);
    out *= params.kappa;
    return out;
}

VectorField buoyancy(const ScalarField& n, const ScalarField& phi) {
    const Grid& g = n.grid();
    VectorField out(n.grid_ptr());
    kernels::gradient(g, BoundaryCondition::neumann(), phi.values(), out.x().values(),
                      out.y().values());
    for (std::size_t k = 0; k < g.size(); ++k) {
        out.x()[k] *= n[k];
        out.y()[k] *= n[k];
    }
    return out;
}

double fluid_dt_limit(const VectorField& u, const FluidParams& params) {
    const double speed = u.max_magnitude();
    if (speed == 0.0) return std::numeric_limits<double>::infinity();
    const Grid& g = u.grid();
    return params.cfl * std::min(g.hx(), g.hy()) / speed;
}

FluidStep fluid_step(const EllipticSolver& solver, const VectorField& u, const ScalarField& n,
                     const FluidParams& params, double dt) {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidParameter("fluid_step requires dt > 0");
    const double limit = fluid_dt_limit(u, params);
    if (dt > limit) {
        throw StepRejected("fluid CFL violated (dt " + std::to_string(dt) + ", limit " +
                               std::to_string(limit) + ")",
                           limit);
    }
    const GridPtr& grid = u.grid_ptr();
    VectorField forcing(grid);
    bool forced = false;
    if (params.kappa != 0.0) {
        forcing -= convective_term(solver, u, params);
        forced = true;
    }
    if (params.phi.grid_ptr()) {
        forcing += buoyancy(n, params.phi);
        forced = true;
    }

    ScalarField pressure(grid);
    VectorField rhs = u;
    if (forced) {
        if (!forcing.all_finite()) throw NumericalBreakdown("fluid forcing");
        Projection split = leray_project(solver, forcing, params.projection);
        rhs.axpy(dt, split.u);
        pressure = std::move(split.q);
    }
    const VectorField provisional = helmholtz_components(solver, rhs, dt, params.viscous);
    Projection proj = leray_project(solver, provisional, params.projection);
    pressure.axpy(1.0 / dt, proj.q);
    if (!proj.u.all_finite()) throw NumericalBreakdown("u");
    return FluidStep{std::move(proj.u), std::move(pressure)};
}

}  // namespace ksns
