#pragma once

#include <limits>
#include <span>

#include "ksns/field.hpp"

namespace ksns {

inline constexpr double kInfNorm = std::numeric_limits<double>::infinity();

/// 5-point Laplacian honouring f.bc() through per-face ghost values.
ScalarField laplacian(const ScalarField& f);

/// Centred differences; the returned field carries the no-slip tag of VectorField.
VectorField gradient(const ScalarField& f);

/// Centred divergence with no-slip ghosts (ghost = -inside). Together with gradient()
/// on a Neumann field this gives divergence = -gradient^T in the cell inner product.
ScalarField divergence(const VectorField& v);

/// Midpoint quadrature over inside cells.
double integrate(const ScalarField& f);
double mean(const ScalarField& f);
double domain_area(const Grid& grid);

/// (integral |f|^p)^(1/p) for p >= 1, max |f| over inside cells for p = infinity.
double lp_norm(const ScalarField& f, double p);

double inner(const ScalarField& a, const ScalarField& b);
double inner(const VectorField& a, const VectorField& b);
/// (integral |v|^2)^(1/2)
double l2_norm(const VectorField& v);

namespace kernels {

/// out = L x with homogeneous ghosts (Neumann mirror or Dirichlet negation).
void laplacian(const Grid& grid, BcKind bc, std::span<const double> x, std::span<double> out);

/// Boundary contribution of Dirichlet(g) to the Laplacian: L f = L_hom f + lift.
void dirichlet_lift(const Grid& grid, double g, std::span<double> out);

/// out = D G q with G using Neumann mirror ghosts and D using no-slip ghosts.
/// gx, gy are scratch of grid size.
void div_grad(const Grid& grid, std::span<const double> q, std::span<double> out,
              std::span<double> gx, std::span<double> gy);

void gradient(const Grid& grid, const BoundaryCondition& bc, std::span<const double> f,
              std::span<double> gx, std::span<double> gy);

void divergence(const Grid& grid, std::span<const double> vx, std::span<const double> vy,
                std::span<double> out);

/// Plain sum over inside cells of a*b (no cell-area weight).
double dot(const Grid& grid, std::span<const double> a, std::span<const double> b);
double sum(const Grid& grid, std::span<const double> a);

}  // namespace kernels

}  // namespace ksns
