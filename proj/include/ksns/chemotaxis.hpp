#pragma once

#include <vector>

#include "ksns/elliptic.hpp"
#include "ksns/sensitivity.hpp"
#include "ksns/state.hpp"

namespace ksns {

struct ChemotaxisParams {
    SensitivitySpec sensitivity;
    /// Use S_eps (cutoffs applied) rather than S in the flux.
    bool regularized = true;
    /// Largest admissible dt * (outflow rate) for the explicit transport part. One is the
    /// exact positivity bound of the upwind update.
    double transport_cfl = 1.0;
    /// Clip negative densities to zero after a step. Off by default.
    bool clip_negative = false;
    /// Minimum accepted after a step before PositivityFailure is raised.
    double negativity_tolerance = 1e-10;
    /// Implicit diffusion solves; tight so solver error stays below the positivity tolerance.
    SolverConfig solver{1e-12};

    void validate() const;
};

/// Face-centred transport operators and the IMEX steps of the n and c equations.
///
/// Fluxes live on faces between inside cells and vanish on boundary faces, so the
/// discrete sum of every flux divergence is zero up to round-off. Face values of n are
/// upwinded in the direction of the face velocity.
class ChemotaxisModel {
public:
    ChemotaxisModel(GridPtr grid, ChemotaxisParams params);

    const ChemotaxisParams& params() const { return params_; }
    const Grid& grid() const { return *grid_; }

    /// Normal components of S grad c on x-faces (east of cell k) and y-faces (north of k).
    void chemotactic_velocity(const ScalarField& n, const ScalarField& c, std::vector<double>& vx,
                              std::vector<double>& vy) const;

    /// div(n S grad c) with upwinded face densities.
    ScalarField chemotactic_flux_div(const ScalarField& n, const ScalarField& c) const;

    /// Largest outflow rate of the explicit transport of n (velocity u plus S grad c).
    double density_transport_rate(const SimState& state) const;
    /// Largest outflow rate of the explicit advection of c by u.
    double signal_transport_rate(const VectorField& u) const;

    /// n_new = (I - dt Lap)^(-1) (n - dt div(n (u + S grad c))).
    ScalarField step_n(const SimState& state, const EllipticSolver& solver, double dt) const;
    /// c_new = ((1 + g) I - dt Lap)^(-1) (c - dt div(c u) + g n) with g = exp(dt) - 1.
    ScalarField step_c(const SimState& state, const EllipticSolver& solver, double dt) const;

private:
    GridPtr grid_;
    ChemotaxisParams params_;
    std::vector<double> rho_x_;  ///< spatial cutoff at x-faces
    std::vector<double> rho_y_;  ///< spatial cutoff at y-faces
};

/// Face velocities obtained by averaging the cell velocity; zero on boundary faces.
void face_velocity(const VectorField& u, std::vector<double>& ux, std::vector<double>& uy);

/// Conservative upwind div(f w) for face velocities wx (east faces) and wy (north faces).
ScalarField upwind_flux_divergence(const ScalarField& f, const std::vector<double>& wx,
                                   const std::vector<double>& wy);

/// Largest sum of outgoing face speeds divided by spacing over inside cells.
double outflow_rate(const Grid& grid, const std::vector<double>& wx, const std::vector<double>& wy);

}  // namespace ksns
