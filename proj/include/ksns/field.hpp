#pragma once

#include <functional>
#include <span>
#include <vector>

#include "ksns/grid.hpp"

namespace ksns {

enum class BcKind { Neumann, Dirichlet };

/// Boundary condition of a scalar grid function.
///
/// Ghost values are defined per boundary face: Neumann-zero mirrors the inside value,
/// Dirichlet(g) uses 2g - value so that the face average equals g.
struct BoundaryCondition {
    BcKind kind = BcKind::Neumann;
    double value = 0.0;

    static BoundaryCondition neumann() { return {BcKind::Neumann, 0.0}; }
    static BoundaryCondition dirichlet(double g = 0.0) { return {BcKind::Dirichlet, g}; }

    double ghost(double inside) const {
        return kind == BcKind::Neumann ? inside : 2.0 * value - inside;
    }

    bool operator==(const BoundaryCondition&) const = default;
};

/// Cell-centred scalar grid function. Values outside the mask are held at zero.
class ScalarField {
public:
    ScalarField() = default;
    explicit ScalarField(GridPtr grid, BoundaryCondition bc = BoundaryCondition::neumann());
    ScalarField(GridPtr grid, std::vector<double> values,
                BoundaryCondition bc = BoundaryCondition::neumann());

    /// Samples f at cell centres of inside cells.
    static ScalarField sample(GridPtr grid, const std::function<double(double, double)>& f,
                              BoundaryCondition bc = BoundaryCondition::neumann());
    static ScalarField constant(GridPtr grid, double value,
                                BoundaryCondition bc = BoundaryCondition::neumann());

    const Grid& grid() const { return *grid_; }
    const GridPtr& grid_ptr() const { return grid_; }
    const BoundaryCondition& bc() const { return bc_; }
    void set_bc(BoundaryCondition bc) { bc_ = bc; }

    std::span<double> values() { return values_; }
    std::span<const double> values() const { return values_; }
    double& operator[](std::size_t k) { return values_[k]; }
    double operator[](std::size_t k) const { return values_[k]; }
    double& operator()(int i, int j) { return values_[grid_->index(i, j)]; }
    double operator()(int i, int j) const { return values_[grid_->index(i, j)]; }

    /// Forces masked-out entries back to zero.
    void clean_outside();

    ScalarField& operator+=(const ScalarField& other);
    ScalarField& operator-=(const ScalarField& other);
    ScalarField& operator*=(double s);
    /// this += a * x
    ScalarField& axpy(double a, const ScalarField& x);

    double min() const;  ///< over inside cells
    double max() const;  ///< over inside cells
    bool all_finite() const;

private:
    GridPtr grid_;
    std::vector<double> values_;
    BoundaryCondition bc_;
};

ScalarField operator+(ScalarField a, const ScalarField& b);
ScalarField operator-(ScalarField a, const ScalarField& b);
ScalarField operator*(double s, ScalarField a);

/// Two-component cell-centred field with no-slip (both components Dirichlet-zero) boundary.
class VectorField {
public:
    VectorField() = default;
    explicit VectorField(const GridPtr& grid);
    VectorField(ScalarField x, ScalarField y);

    static VectorField sample(const GridPtr& grid,
                              const std::function<double(double, double)>& fx,
                              const std::function<double(double, double)>& fy);

    const Grid& grid() const { return x_.grid(); }
    const GridPtr& grid_ptr() const { return x_.grid_ptr(); }

    ScalarField& x() { return x_; }
    const ScalarField& x() const { return x_; }
    ScalarField& y() { return y_; }
    const ScalarField& y() const { return y_; }
    ScalarField& component(int k) { return k == 0 ? x_ : y_; }
    const ScalarField& component(int k) const { return k == 0 ? x_ : y_; }

    VectorField& operator+=(const VectorField& other);
    VectorField& operator-=(const VectorField& other);
    VectorField& operator*=(double s);
    VectorField& axpy(double a, const VectorField& v);

    /// Largest Euclidean magnitude over inside cells.
    double max_magnitude() const;
    bool all_finite() const { return x_.all_finite() && y_.all_finite(); }

private:
    ScalarField x_;
    ScalarField y_;
};

VectorField operator+(VectorField a, const VectorField& b);
VectorField operator-(VectorField a, const VectorField& b);
VectorField operator*(double s, VectorField a);

}  // namespace ksns
