#include "ksns/field.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "ksns/errors.hpp"

namespace ksns {

namespace {

void require_same_grid(const ScalarField& a, const ScalarField& b) {
    if (&a.grid() != &b.grid() && !(a.grid() == b.grid())) {
        throw InvalidParameter("fields live on different grids");
    }
}

}  // namespace

ScalarField::ScalarField(GridPtr grid, BoundaryCondition bc)
    : grid_(std::move(grid)), values_(grid_->size(), 0.0), bc_(bc) {}

ScalarField::ScalarField(GridPtr grid, std::vector<double> values, BoundaryCondition bc)
    : grid_(std::move(grid)), values_(std::move(values)), bc_(bc) {
    if (values_.size() != grid_->size()) {
        throw InvalidParameter("field size does not match grid");
    }
    clean_outside();
}

ScalarField ScalarField::sample(GridPtr grid, const std::function<double(double, double)>& f,
                                BoundaryCondition bc) {
    ScalarField out(std::move(grid), bc);
    const Grid& g = out.grid();
    for (int j = 0; j < g.ny(); ++j) {
        for (int i = 0; i < g.nx(); ++i) {
            if (g.inside(i, j)) {
                out(i, j) = f(g.x(i), g.y(j));
            }
        }
    }
    return out;
}

ScalarField ScalarField::constant(GridPtr grid, double value, BoundaryCondition bc) {
    ScalarField out(std::move(grid), bc);
    const Grid& g = out.grid();
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (g.inside(k)) {
            out.values_[k] = value;
        }
    }
    return out;
}

void ScalarField::clean_outside() {
    if (grid_->full()) {
        return;
    }
    for (std::size_t k = 0; k < values_.size(); ++k) {
        if (!grid_->inside(k)) {
            values_[k] = 0.0;
        }
    }
}

ScalarField& ScalarField::operator+=(const ScalarField& other) {
    require_same_grid(*this, other);
    for (std::size_t k = 0; k < values_.size(); ++k) {
        values_[k] += other.values_[k];
    }
    return *this;
}

ScalarField& ScalarField::operator-=(const ScalarField& other) {
    require_same_grid(*this, other);
    for (std::size_t k = 0; k < values_.size(); ++k) {
        values_[k] -= other.values_[k];
    }
    return *this;
}

ScalarField& ScalarField::operator*=(double s) {
    for (double& v : values_) {
        v *= s;
    }
    return *this;
}

ScalarField& ScalarField::axpy(double a, const ScalarField& x) {
    require_same_grid(*this, x);
    for (std::size_t k = 0; k < values_.size(); ++k) {
        values_[k] += a * x.values_[k];
    }
    return *this;
}

double ScalarField::min() const {
    double m = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < values_.size(); ++k) {
        if (grid_->inside(k)) {
            m = std::min(m, values_[k]);
        }
    }
    return m;
}

double ScalarField::max() const {
    double m = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < values_.size(); ++k) {
        if (grid_->inside(k)) {
            m = std::max(m, values_[k]);
        }
    }
    return m;
}

bool ScalarField::all_finite() const {
    return std::all_of(values_.begin(), values_.end(), [](double v) { return std::isfinite(v); });
}

ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
ScalarField operator*(double s, ScalarField a) { return a *= s; }

VectorField::VectorField(const GridPtr& grid)
    : x_(grid, BoundaryCondition::dirichlet()), y_(grid, BoundaryCondition::dirichlet()) {}

VectorField::VectorField(ScalarField x, ScalarField y) : x_(std::move(x)), y_(std::move(y)) {
    require_same_grid(x_, y_);
    x_.set_bc(BoundaryCondition::dirichlet());
    y_.set_bc(BoundaryCondition::dirichlet());
}

VectorField VectorField::sample(const GridPtr& grid,
                                const std::function<double(double, double)>& fx,
                                const std::function<double(double, double)>& fy) {
    return VectorField(ScalarField::sample(grid, fx, BoundaryCondition::dirichlet()),
                       ScalarField::sample(grid, fy, BoundaryCondition::dirichlet()));
}

VectorField& VectorField::operator+=(const VectorField& other) {
    x_ += other.x_;
    y_ += other.y_;
    return *this;
}

VectorField& VectorField::operator-=(const VectorField& other) {
    x_ -= other.x_;
    y_ -= other.y_;
    return *this;
}

VectorField& VectorField::operator*=(double s) {
    x_ *= s;
    y_ *= s;
    return *this;
}

VectorField& VectorField::axpy(double a, const VectorField& v) {
    x_.axpy(a, v.x_);
    y_.axpy(a, v.y_);
    return *this;
}

double VectorField::max_magnitude() const {
    const Grid& g = grid();
    double m = 0.0;
    for (std::size_t k = 0; k < g.size(); ++k) {
        if (g.inside(k)) {
            m = std::max(m, std::hypot(x_[k], y_[k]));
        }
    }
    return m;
}

VectorField operator+(VectorField a, const VectorField& b) { return a += b; }
VectorField operator-(VectorField a, const VectorField& b) { return a -= b; }
VectorField operator*(double s, VectorField a) { return a *= s; }

}  // namespace ksns
