#pragma once

#include <memory>
#include <span>
#include <vector>

#include "ksns/field.hpp"

namespace ksns {

enum class SolverMethod {
    Auto,                    ///< fast diagonalization on full rectangles, else multigrid-PCG
    ConjugateGradient,       ///< unpreconditioned CG
    MultigridPCG,            ///< CG with a geometric multigrid V-cycle
    FastDiagonalizationPCG,  ///< CG with an exact separable inverse (full rectangles only)
};

struct SolverConfig {
    double tol_rel = 1e-8;
    /// Absolute floor on the residual norm; zero disables it.
    double tol_abs = 0.0;
    /// Zero selects the default 10 * (nx + ny).
    int max_iter = 0;
    SolverMethod method = SolverMethod::Auto;

    void validate() const;
    int iteration_cap(const Grid& grid) const;
};

enum class StencilKind {
    Compact,  ///< 5-point Laplacian
    DivGrad,  ///< divergence(gradient(.)) with Neumann scalar / no-slip vector ghosts
};

/// A x = shift * x - scale * L x, with L the chosen stencil and boundary kind.
struct EllipticOperator {
    StencilKind kind = StencilKind::Compact;
    BcKind bc = BcKind::Neumann;
    double shift = 1.0;
    double scale = 0.0;

    /// Constants are in the kernel (pure Neumann, no shift).
    bool singular() const {
        return shift == 0.0 && (kind == StencilKind::DivGrad || bc == BcKind::Neumann);
    }
};

struct SolveStats {
    int iterations = 0;
    double residual = 0.0;  ///< discrete L2 norm of the final true residual
    double rhs_norm = 0.0;
};

/// Krylov solver for the symmetric (semi-)definite stencil operators on one grid.
///
/// Preconditioner data (separable eigenbases, multigrid levels) is built once at
/// construction; solve() is const and may be called concurrently.
class EllipticSolver {
public:
    explicit EllipticSolver(GridPtr grid, SolverConfig config = {});
    ~EllipticSolver();
    EllipticSolver(EllipticSolver&&) noexcept;
    EllipticSolver& operator=(EllipticSolver&&) noexcept;

    const Grid& grid() const { return *grid_; }
    const GridPtr& grid_ptr() const { return grid_; }
    const SolverConfig& config() const { return config_; }

    void apply(const EllipticOperator& op, std::span<const double> x, std::span<double> out) const;

    /// Solves A x = b. x carries the initial guess in and the solution out. For singular
    /// operators the mean of b is removed first and x is returned with zero mean.
    /// Throws SolverDivergence if the tolerance is not met within the iteration cap.
    SolveStats solve(const EllipticOperator& op, std::span<const double> b, std::span<double> x,
                     const SolverConfig& config) const;
    SolveStats solve(const EllipticOperator& op, std::span<const double> b,
                     std::span<double> x) const {
        return solve(op, b, x, config_);
    }

    /// Method actually used for op under config (resolves Auto and unsupported pairs).
    SolverMethod resolve(const EllipticOperator& op, const SolverConfig& config) const;

private:
    struct Separable;
    struct Multigrid;

    void precondition(SolverMethod method, const EllipticOperator& op, std::span<const double> r,
                      std::span<double> z) const;

    GridPtr grid_;
    SolverConfig config_;
    std::unique_ptr<Separable> separable_;
    std::unique_ptr<Multigrid> multigrid_;
};

/// Solves (I - theta * Laplacian) f = rhs with boundary condition bc.
ScalarField solve_helmholtz(const EllipticSolver& solver, const ScalarField& rhs, double theta,
                            BoundaryCondition bc, SolveStats* stats = nullptr);
ScalarField solve_helmholtz(const EllipticSolver& solver, const ScalarField& rhs, double theta,
                            BoundaryCondition bc, const SolverConfig& config,
                            SolveStats* stats = nullptr);

/// Zero-mean f with -Laplacian f = rhs - mean(rhs), Neumann-zero boundary.
ScalarField solve_poisson_neumann(const EllipticSolver& solver, const ScalarField& rhs,
                                  SolveStats* stats = nullptr);

}  // namespace ksns
