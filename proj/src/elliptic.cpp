#include "ksns/elliptic.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <string>

#include "ksns/errors.hpp"
#include "ksns/operators.hpp"

namespace ksns {

namespace {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

double l2(const Grid& grid, std::span<const double> a) {
    return std::sqrt(grid.cell_area() * kernels::dot(grid, a, a));
}

void remove_mean(const Grid& grid, std::span<double> a) {
    const double m = kernels::sum(grid, a) / static_cast<double>(grid.active_count());
    for (std::size_t k = 0; k < a.size(); ++k) {
        if (grid.inside(k)) {
            a[k] -= m;
        }
    }
}

/// shift*x - scale*L x for the compact stencil on an arbitrary grid.
void apply_compact(const Grid& grid, BcKind bc, double shift, double scale,
                   std::span<const double> x, std::span<double> out) {
    kernels::laplacian(grid, bc, x, out);
    for (std::size_t k = 0; k < out.size(); ++k) {
        out[k] = grid.inside(k) ? shift * x[k] - scale * out[k] : 0.0;
    }
}

/// Diagonal of -L for the compact stencil at cell k.
double compact_diagonal(const Grid& grid, BcKind bc, std::size_t k) {
    const std::uint8_t b = grid.neighbors(k);
    const double missing = bc == BcKind::Neumann ? 0.0 : 2.0;
    const double ex = (b & kEast) ? 1.0 : missing;
    const double wx = (b & kWest) ? 1.0 : missing;
    const double ny = (b & kNorth) ? 1.0 : missing;
    const double sy = (b & kSouth) ? 1.0 : missing;
    return (ex + wx) / (grid.hx() * grid.hx()) + (ny + sy) / (grid.hy() * grid.hy());
}

/// 1D matrix of -L along one axis for the requested stencil.
Eigen::MatrixXd axis_matrix(StencilKind kind, BcKind bc, int n, double h) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    if (kind == StencilKind::Compact) {
        const double end = bc == BcKind::Neumann ? 1.0 : 3.0;
        for (int i = 0; i < n; ++i) {
            m(i, i) = (i == 0 || i == n - 1) ? end : 2.0;
            if (i > 0) m(i, i - 1) = -1.0;
            if (i + 1 < n) m(i, i + 1) = -1.0;
        }
        return m / (h * h);
    }
    // -D G with mirror ghosts for G and negated ghosts for D.
    Eigen::MatrixXd g = Eigen::MatrixXd::Zero(n, n);
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        const int e = std::min(i + 1, n - 1);
        const int w = std::max(i - 1, 0);
        g(i, e) += 1.0;
        g(i, w) -= 1.0;
        if (i + 1 < n) d(i, i + 1) += 1.0; else d(i, i) -= 1.0;
        if (i > 0) d(i, i - 1) -= 1.0; else d(i, i) += 1.0;
    }
    g /= 2.0 * h;
    d /= 2.0 * h;
    return -d * g;
}

struct AxisBasis {
    Eigen::MatrixXd vectors;
    Eigen::VectorXd values;
};

AxisBasis decompose(const Eigen::MatrixXd& m) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(0.5 * (m + m.transpose()));
    return {es.eigenvectors(), es.eigenvalues()};
}

}  // namespace

void SolverConfig::validate() const {
    if (!(tol_rel > 0.0 && tol_rel < 1.0)) {
        throw InvalidParameter("tol_rel must lie in (0, 1)");
    }
    if (!(tol_abs >= 0.0)) {
        throw InvalidParameter("tol_abs must be non-negative");
    }
    if (max_iter < 0) {
        throw InvalidParameter("max_iter must be >= 1 (or 0 for the default)");
    }
}

int SolverConfig::iteration_cap(const Grid& grid) const {
    return max_iter > 0 ? max_iter : 10 * (grid.nx() + grid.ny());
}

// Fast diagonalization: on a full rectangle -L = Mx (x) I + I (x) My, so the inverse of
// shift + scale * (-L) is diagonal in the product eigenbasis.
struct EllipticSolver::Separable {
    struct Pair {
        AxisBasis x;
        AxisBasis y;
    };
    Pair compact_neumann;
    Pair compact_dirichlet;
    Pair div_grad;

    const Pair& select(const EllipticOperator& op) const {
        if (op.kind == StencilKind::DivGrad) return div_grad;
        return op.bc == BcKind::Neumann ? compact_neumann : compact_dirichlet;
    }

    void apply_inverse(const Grid& grid, const EllipticOperator& op, std::span<const double> r,
                       std::span<double> z) const {
        const Pair& p = select(op);
        const int nx = grid.nx();
        const int ny = grid.ny();
        Eigen::Map<const RowMatrix> rm(r.data(), ny, nx);
        RowMatrix t = p.y.vectors.transpose() * rm * p.x.vectors;
        const double top = std::abs(op.shift) +
                           std::abs(op.scale) * (p.x.values.maxCoeff() + p.y.values.maxCoeff());
        for (int j = 0; j < ny; ++j) {
            for (int i = 0; i < nx; ++i) {
                const double denom = op.shift + op.scale * (p.x.values(i) + p.y.values(j));
                t(j, i) = std::abs(denom) > 1e-13 * top ? t(j, i) / denom : 0.0;
            }
        }
        Eigen::Map<RowMatrix> zm(z.data(), ny, nx);
        zm.noalias() = p.y.vectors * t * p.x.vectors.transpose();
    }
};

// Cell-centred geometric multigrid for the compact stencil: 2x2 agglomeration, a coarse
// cell is inside if any child is, piecewise-constant prolongation and averaging
// restriction, damped Jacobi smoothing. Pre and post smoothing match, so the V-cycle is
// a symmetric preconditioner.
struct EllipticSolver::Multigrid {
    std::vector<GridPtr> levels;
    static constexpr int kSweeps = 2;
    static constexpr int kCoarseSweeps = 40;
    static constexpr double kOmega = 0.8;

    explicit Multigrid(const GridPtr& fine) {
        levels.push_back(fine);
        while (true) {
            const Grid& g = *levels.back();
            if (g.nx() % 2 != 0 || g.ny() % 2 != 0 || g.nx() / 2 < 4 || g.ny() / 2 < 4) {
                break;
            }
            const int cnx = g.nx() / 2;
            const int cny = g.ny() / 2;
            std::vector<std::uint8_t> mask(static_cast<std::size_t>(cnx) * cny, 0);
            for (int j = 0; j < g.ny(); ++j) {
                for (int i = 0; i < g.nx(); ++i) {
                    if (g.inside(i, j)) {
                        mask[static_cast<std::size_t>(j / 2) * cnx + i / 2] = 1;
                    }
                }
            }
            try {
                levels.push_back(Grid::masked(cnx, cny, g.lx(), g.ly(), std::move(mask)));
            } catch (const InvalidParameter&) {
                break;
            }
        }
    }

    void smooth(const Grid& g, const EllipticOperator& op, std::span<const double> r,
                std::span<double> z, std::span<double> work, int sweeps) const {
        for (int s = 0; s < sweeps; ++s) {
            apply_compact(g, op.bc, op.shift, op.scale, z, work);
            for (std::size_t k = 0; k < g.size(); ++k) {
                if (g.inside(k)) {
                    const double diag = op.shift + op.scale * compact_diagonal(g, op.bc, k);
                    z[k] += kOmega * (r[k] - work[k]) / diag;
                }
            }
        }
    }

    void vcycle(std::size_t level, const EllipticOperator& op, std::span<const double> r,
                std::span<double> z) const {
        const Grid& g = *levels[level];
        std::fill(z.begin(), z.end(), 0.0);
        std::vector<double> work(g.size());
        if (level + 1 == levels.size()) {
            smooth(g, op, r, z, work, kCoarseSweeps);
            return;
        }
        smooth(g, op, r, z, work, kSweeps);
        apply_compact(g, op.bc, op.shift, op.scale, z, work);
        const Grid& c = *levels[level + 1];
        std::vector<double> rc(c.size(), 0.0);
        std::vector<double> zc(c.size(), 0.0);
        for (int j = 0; j < g.ny(); ++j) {
            for (int i = 0; i < g.nx(); ++i) {
                const std::size_t k = g.index(i, j);
                if (g.inside(k)) {
                    rc[c.index(i / 2, j / 2)] += 0.25 * (r[k] - work[k]);
                }
            }
        }
        vcycle(level + 1, op, rc, zc);
        for (int j = 0; j < g.ny(); ++j) {
            for (int i = 0; i < g.nx(); ++i) {
                const std::size_t k = g.index(i, j);
                if (g.inside(k)) {
                    z[k] += zc[c.index(i / 2, j / 2)];
                }
            }
        }
        smooth(g, op, r, z, work, kSweeps);
    }
};

EllipticSolver::EllipticSolver(GridPtr grid, SolverConfig config)
    : grid_(std::move(grid)), config_(config) {
    config_.validate();
    if (config_.method == SolverMethod::FastDiagonalizationPCG && !grid_->full()) {
        throw InvalidParameter("fast diagonalization requires a full rectangular grid");
    }
    if (grid_->full()) {
        separable_ = std::make_unique<Separable>();
        const int nx = grid_->nx();
        const int ny = grid_->ny();
        const double hx = grid_->hx();
        const double hy = grid_->hy();
        auto pair = [&](StencilKind kind, BcKind bc) {
            return Separable::Pair{decompose(axis_matrix(kind, bc, nx, hx)),
                                   decompose(axis_matrix(kind, bc, ny, hy))};
        };
        separable_->compact_neumann = pair(StencilKind::Compact, BcKind::Neumann);
        separable_->compact_dirichlet = pair(StencilKind::Compact, BcKind::Dirichlet);
        separable_->div_grad = pair(StencilKind::DivGrad, BcKind::Neumann);
    }
    multigrid_ = std::make_unique<Multigrid>(grid_);
}

EllipticSolver::~EllipticSolver() = default;
EllipticSolver::EllipticSolver(EllipticSolver&&) noexcept = default;
EllipticSolver& EllipticSolver::operator=(EllipticSolver&&) noexcept = default;

void EllipticSolver::apply(const EllipticOperator& op, std::span<const double> x,
                           std::span<double> out) const {
    const Grid& g = *grid_;
    if (op.kind == StencilKind::Compact) {
        apply_compact(g, op.bc, op.shift, op.scale, x, out);
        return;
    }
    std::vector<double> gx(g.size());
    std::vector<double> gy(g.size());
    kernels::div_grad(g, x, out, gx, gy);
    for (std::size_t k = 0; k < out.size(); ++k) {
        out[k] = g.inside(k) ? op.shift * x[k] - op.scale * out[k] : 0.0;
    }
}

SolverMethod EllipticSolver::resolve(const EllipticOperator& op,
                                     const SolverConfig& config) const {
    switch (config.method) {
        case SolverMethod::Auto:
            if (separable_) return SolverMethod::FastDiagonalizationPCG;
            return op.kind == StencilKind::Compact ? SolverMethod::MultigridPCG
                                                   : SolverMethod::ConjugateGradient;
        case SolverMethod::MultigridPCG:
            // The V-cycle is built for the compact stencil only.
            return op.kind == StencilKind::Compact ? SolverMethod::MultigridPCG
                                                   : SolverMethod::ConjugateGradient;
        case SolverMethod::FastDiagonalizationPCG:
            if (!separable_) {
                throw InvalidParameter("fast diagonalization requires a full rectangular grid");
            }
            return SolverMethod::FastDiagonalizationPCG;
        case SolverMethod::ConjugateGradient:
            break;
    }
    return SolverMethod::ConjugateGradient;
}

void EllipticSolver::precondition(SolverMethod method, const EllipticOperator& op,
                                  std::span<const double> r, std::span<double> z) const {
    switch (method) {
        case SolverMethod::FastDiagonalizationPCG:
            separable_->apply_inverse(*grid_, op, r, z);
            break;
        case SolverMethod::MultigridPCG:
            multigrid_->vcycle(0, op, r, z);
            break;
        default:
            std::copy(r.begin(), r.end(), z.begin());
            break;
    }
    if (!grid_->full()) {
        for (std::size_t k = 0; k < z.size(); ++k) {
            if (!grid_->inside(k)) z[k] = 0.0;
        }
    }
}

SolveStats EllipticSolver::solve(const EllipticOperator& op, std::span<const double> b,
                                 std::span<double> x, const SolverConfig& config) const {
    config.validate();
    const Grid& g = *grid_;
    const std::size_t n = g.size();
    if (b.size() != n || x.size() != n) {
        throw InvalidParameter("solve: vector size does not match grid");
    }
    const bool singular = op.singular();
    const SolverMethod method = resolve(op, config);

    std::vector<double> rhs(b.begin(), b.end());
    for (std::size_t k = 0; k < n; ++k) {
        if (!g.inside(k)) rhs[k] = 0.0;
        if (!std::isfinite(rhs[k])) throw InvalidParameter("solve: right-hand side is not finite");
    }
    if (singular) remove_mean(g, rhs);

    SolveStats stats;
    stats.rhs_norm = l2(g, rhs);
    if (stats.rhs_norm == 0.0) {
        std::fill(x.begin(), x.end(), 0.0);
        return stats;
    }
    const double target = std::max(config.tol_rel * stats.rhs_norm, config.tol_abs);
    const int cap = config.iteration_cap(g);

    std::vector<double> r(n), z(n), p(n), ap(n);
    for (std::size_t k = 0; k < n; ++k) {
        if (!g.inside(k) || !std::isfinite(x[k])) x[k] = 0.0;
    }

    auto true_residual = [&]() {
        apply(op, x, ap);
        for (std::size_t k = 0; k < n; ++k) r[k] = rhs[k] - ap[k];
        if (singular) remove_mean(g, r);
        return l2(g, r);
    };

    double rnorm = true_residual();
    int it = 0;
    while (rnorm > target && it < cap) {
        // (Re)start from the true residual.
        precondition(method, op, r, z);
        if (singular) remove_mean(g, z);
        std::copy(z.begin(), z.end(), p.begin());
        double rz = kernels::dot(g, r, z);
        bool restart = false;
        while (it < cap) {
            apply(op, p, ap);
            const double pap = kernels::dot(g, p, ap);
            if (!(pap > 0.0)) {
                restart = true;
                break;
            }
            const double alpha = rz / pap;
            for (std::size_t k = 0; k < n; ++k) {
                x[k] += alpha * p[k];
                r[k] -= alpha * ap[k];
            }
            ++it;
            rnorm = l2(g, r);
            if (rnorm <= target) break;
            precondition(method, op, r, z);
            if (singular) remove_mean(g, z);
            const double rz_new = kernels::dot(g, r, z);
            const double beta = rz_new / rz;
            rz = rz_new;
            for (std::size_t k = 0; k < n; ++k) p[k] = z[k] + beta * p[k];
        }
        rnorm = true_residual();
        if (restart) break;
    }
    if (singular) remove_mean(g, x);
    stats.iterations = it;
    stats.residual = singular ? true_residual() : rnorm;
    if (!(stats.residual <= target)) {
        throw SolverDivergence("elliptic solve did not reach tolerance (residual " +
                                   std::to_string(stats.residual) + ", target " +
                                   std::to_string(target) + ", " + std::to_string(it) +
                                   " iterations)",
                               stats.residual, it);
    }
    return stats;
}

ScalarField solve_helmholtz(const EllipticSolver& solver, const ScalarField& rhs, double theta,
                            BoundaryCondition bc, const SolverConfig& config, SolveStats* stats) {
    if (!(theta >= 0.0) || !std::isfinite(theta)) {
        throw InvalidParameter("solve_helmholtz requires theta >= 0");
    }
    if (!rhs.all_finite()) {
        throw InvalidParameter("solve_helmholtz: right-hand side is not finite");
    }
    ScalarField out(rhs.grid_ptr(), std::vector<double>(rhs.values().begin(), rhs.values().end()),
                    bc);
    if (theta == 0.0) {
        if (stats) *stats = SolveStats{};
        return out;
    }
    const Grid& g = rhs.grid();
    std::vector<double> b(rhs.values().begin(), rhs.values().end());
    if (bc.kind == BcKind::Dirichlet && bc.value != 0.0) {
        std::vector<double> lift(g.size());
        kernels::dirichlet_lift(g, bc.value, lift);
        for (std::size_t k = 0; k < g.size(); ++k) b[k] += theta * lift[k];
    }
    const EllipticOperator op{StencilKind::Compact, bc.kind, 1.0, theta};
    SolveStats s = solver.solve(op, b, out.values(), config);
    if (stats) *stats = s;
    return out;
}

ScalarField solve_helmholtz(const EllipticSolver& solver, const ScalarField& rhs, double theta,
                            BoundaryCondition bc, SolveStats* stats) {
    return solve_helmholtz(solver, rhs, theta, bc, solver.config(), stats);
}

ScalarField solve_poisson_neumann(const EllipticSolver& solver, const ScalarField& rhs,
                                  SolveStats* stats) {
    if (!rhs.all_finite()) {
        throw InvalidParameter("solve_poisson_neumann: right-hand side is not finite");
    }
    ScalarField out(rhs.grid_ptr(), BoundaryCondition::neumann());
    const EllipticOperator op{StencilKind::Compact, BcKind::Neumann, 0.0, 1.0};
    SolveStats s = solver.solve(op, rhs.values(), out.values());
    if (stats) *stats = s;
    return out;
}

}  // namespace ksns
