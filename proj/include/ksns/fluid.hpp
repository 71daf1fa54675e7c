#pragma once

#include "ksns/elliptic.hpp"
#include "ksns/field.hpp"

namespace ksns {

enum class YosidaOrder {
    SolveThenProject,  ///< P (I - eps Lap)^(-1) u
    ProjectThenSolve,  ///< (I - eps Lap)^(-1) P u
};

enum class ConvectionScheme { Upwind, Central };

struct FluidParams {
    /// Convection strength; any real value, zero gives the Stokes limit.
    double kappa = 0.0;
    /// Yosida parameter of the convecting velocity; zero disables the smoothing.
    double eps_reg = 0.0;
    /// Time-independent potential; an empty field means phi = 0.
    ScalarField phi;
    YosidaOrder yosida_order = YosidaOrder::SolveThenProject;
    ConvectionScheme convection = ConvectionScheme::Upwind;
    /// dt <= cfl * min(hx, hy) / max|u|
    double cfl = 0.5;
    SolverConfig viscous{1e-10};
    /// The projected field satisfies ||div||_2 <= projection.tol_rel * ||input||_2.
    SolverConfig projection{1e-10};

    void validate(const Grid& grid) const;
};

struct Projection {
    VectorField u;
    ScalarField q;  ///< zero-mean potential with u = v - grad q
    SolveStats stats;
};

/// Discrete Leray projection. q solves div grad q = div v with the wide stencil, so the
/// returned field has divergence equal to the solver residual.
Projection leray_project(const EllipticSolver& solver, const VectorField& v,
                         const SolverConfig& config, const ScalarField* guess = nullptr);

/// Componentwise no-slip Helmholtz solve (I - eps Lap) combined with the projection in the
/// chosen order. eps = 0 returns u unchanged.
VectorField yosida_apply(const EllipticSolver& solver, const VectorField& u, double eps,
                         const FluidParams& params);
VectorField yosida_apply(const EllipticSolver& solver, const VectorField& u, double eps);

/// kappa (w . grad) u with w = Y_eps u; zero (no work) when kappa = 0.
VectorField convective_term(const EllipticSolver& solver, const VectorField& u,
                            const FluidParams& params);

/// (w . grad) u for a given advecting field w with no-slip ghosts on u.
VectorField advect_velocity(const VectorField& w, const VectorField& u, ConvectionScheme scheme);

/// n grad phi with mirror ghosts for phi.
VectorField buoyancy(const ScalarField& n, const ScalarField& phi);

/// Largest dt admitted by the advective CFL; infinity for u = 0.
double fluid_dt_limit(const VectorField& u, const FluidParams& params);

struct FluidStep {
    VectorField u;
    ScalarField p;  ///< zero-mean pressure
};

/// One step of u_t + grad P = Lap u - kappa (Y u . grad) u + n grad phi.
///
/// The explicit forcing is projected first (its gradient part goes straight into P), the
/// viscous part is implicit with no-slip walls, and the provisional field is projected.
FluidStep fluid_step(const EllipticSolver& solver, const VectorField& u, const ScalarField& n,
                     const FluidParams& params, double dt);

}  // namespace ksns
