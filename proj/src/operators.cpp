#include "ksns/operators.hpp"

#include <algorithm>
#include <cmath>

#include "ksns/errors.hpp"

namespace ksns {

namespace kernels {

void laplacian(const Grid& grid, BcKind bc, std::span<const double> x, std::span<double> out) {
    const int nx = grid.nx();
    const int ny = grid.ny();
    const double ihx2 = 1.0 / (grid.hx() * grid.hx());
    const double ihy2 = 1.0 / (grid.hy() * grid.hy());
    const double sign = bc == BcKind::Neumann ? 1.0 : -1.0;
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const std::size_t k = grid.index(i, j);
            if (!grid.inside(k)) {
                out[k] = 0.0;
                continue;
            }
            const std::uint8_t b = grid.neighbors(k);
            const double xc = x[k];
            const double ghost = sign * xc;
            const double xe = (b & kEast) ? x[k + 1] : ghost;
            const double xw = (b & kWest) ? x[k - 1] : ghost;
            const double xn = (b & kNorth) ? x[k + nx] : ghost;
            const double xs = (b & kSouth) ? x[k - nx] : ghost;
            out[k] = (xe - 2.0 * xc + xw) * ihx2 + (xn - 2.0 * xc + xs) * ihy2;
        }
    }
}

void dirichlet_lift(const Grid& grid, double g, std::span<double> out) {
    const double ihx2 = 1.0 / (grid.hx() * grid.hx());
    const double ihy2 = 1.0 / (grid.hy() * grid.hy());
    for (std::size_t k = 0; k < grid.size(); ++k) {
        if (!grid.inside(k)) {
            out[k] = 0.0;
            continue;
        }
        const std::uint8_t b = grid.neighbors(k);
        double lift = 0.0;
        if (!(b & kEast)) lift += 2.0 * g * ihx2;
        if (!(b & kWest)) lift += 2.0 * g * ihx2;
        if (!(b & kNorth)) lift += 2.0 * g * ihy2;
        if (!(b & kSouth)) lift += 2.0 * g * ihy2;
        out[k] = lift;
    }
}

void gradient(const Grid& grid, const BoundaryCondition& bc, std::span<const double> f,
              std::span<double> gx, std::span<double> gy) {
    const int nx = grid.nx();
    const double i2hx = 0.5 / grid.hx();
    const double i2hy = 0.5 / grid.hy();
    for (std::size_t k = 0; k < grid.size(); ++k) {
        if (!grid.inside(k)) {
            gx[k] = 0.0;
            gy[k] = 0.0;
            continue;
        }
        const std::uint8_t b = grid.neighbors(k);
        const double ghost = bc.ghost(f[k]);
        const double fe = (b & kEast) ? f[k + 1] : ghost;
        const double fw = (b & kWest) ? f[k - 1] : ghost;
        const double fn = (b & kNorth) ? f[k + nx] : ghost;
        const double fs = (b & kSouth) ? f[k - nx] : ghost;
        gx[k] = (fe - fw) * i2hx;
        gy[k] = (fn - fs) * i2hy;
    }
}

void divergence(const Grid& grid, std::span<const double> vx, std::span<const double> vy,
                std::span<double> out) {
    const int nx = grid.nx();
    const double i2hx = 0.5 / grid.hx();
    const double i2hy = 0.5 / grid.hy();
    for (std::size_t k = 0; k < grid.size(); ++k) {
        if (!grid.inside(k)) {
            out[k] = 0.0;
            continue;
        }
        const std::uint8_t b = grid.neighbors(k);
        const double ve = (b & kEast) ? vx[k + 1] : -vx[k];
        const double vw = (b & kWest) ? vx[k - 1] : -vx[k];
        const double vn = (b & kNorth) ? vy[k + nx] : -vy[k];
        const double vs = (b & kSouth) ? vy[k - nx] : -vy[k];
        out[k] = (ve - vw) * i2hx + (vn - vs) * i2hy;
    }
}

void div_grad(const Grid& grid, std::span<const double> q, std::span<double> out,
              std::span<double> gx, std::span<double> gy) {
    gradient(grid, BoundaryCondition::neumann(), q, gx, gy);
    divergence(grid, gx, gy, out);
}

double dot(const Grid& grid, std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    if (grid.full()) {
        for (std::size_t k = 0; k < a.size(); ++k) {
            s += a[k] * b[k];
        }
        return s;
    }
    for (std::size_t k = 0; k < a.size(); ++k) {
        if (grid.inside(k)) {
            s += a[k] * b[k];
        }
    }
    return s;
}

double sum(const Grid& grid, std::span<const double> a) {
    double s = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        if (grid.inside(k)) {
            s += a[k];
        }
    }
    return s;
}

}  // namespace kernels

ScalarField laplacian(const ScalarField& f) {
    const Grid& g = f.grid();
    ScalarField out(f.grid_ptr(), f.bc());
    kernels::laplacian(g, f.bc().kind, f.values(), out.values());
    if (f.bc().kind == BcKind::Dirichlet && f.bc().value != 0.0) {
        std::vector<double> lift(g.size());
        kernels::dirichlet_lift(g, f.bc().value, lift);
        for (std::size_t k = 0; k < g.size(); ++k) {
            out[k] += lift[k];
        }
    }
    return out;
}

VectorField gradient(const ScalarField& f) {
    VectorField out(f.grid_ptr());
    kernels::gradient(f.grid(), f.bc(), f.values(), out.x().values(), out.y().values());
    return out;
}

ScalarField divergence(const VectorField& v) {
    ScalarField out(v.grid_ptr());
    kernels::divergence(v.grid(), v.x().values(), v.y().values(), out.values());
    return out;
}

double integrate(const ScalarField& f) {
    return f.grid().cell_area() * kernels::sum(f.grid(), f.values());
}

double domain_area(const Grid& grid) {
    return grid.cell_area() * static_cast<double>(grid.active_count());
}

double mean(const ScalarField& f) { return integrate(f) / domain_area(f.grid()); }

double lp_norm(const ScalarField& f, double p) {
    if (std::isnan(p) || p < 1.0) {
        throw InvalidParameter("lp_norm requires p >= 1 or p = infinity");
    }
    const Grid& g = f.grid();
    if (std::isinf(p)) {
        double m = 0.0;
        for (std::size_t k = 0; k < g.size(); ++k) {
            if (g.inside(k)) {
                m = std::max(m, std::abs(f[k]));
            }
        }
        return m;
    }
    double s = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (g.inside(k)) {
            const double a = std::abs(f[k]);
            s += p == 1.0 ? a : (p == 2.0 ? a * a : std::pow(a, p));
        }
    }
    s *= g.cell_area();
    return p == 1.0 ? s : (p == 2.0 ? std::sqrt(s) : std::pow(s, 1.0 / p));
}

double inner(const ScalarField& a, const ScalarField& b) {
    return a.grid().cell_area() * kernels::dot(a.grid(), a.values(), b.values());
}

double inner(const VectorField& a, const VectorField& b) {
    return inner(a.x(), b.x()) + inner(a.y(), b.y());
}

double l2_norm(const VectorField& v) { return std::sqrt(inner(v, v)); }

}  // namespace ksns
