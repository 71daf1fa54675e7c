#pragma once

#include "ksns/field.hpp"

namespace ksns {

/// Full evolving unknown: cell density n, signal c, velocity u, pressure p at time t.
struct SimState {
    double t = 0.0;
    ScalarField n;
    ScalarField c;
    VectorField u;
    ScalarField p;

    static SimState zeros(const GridPtr& grid) {
        return SimState{0.0, ScalarField(grid), ScalarField(grid), VectorField(grid),
                        ScalarField(grid)};
    }

    const Grid& grid() const { return n.grid(); }
    const GridPtr& grid_ptr() const { return n.grid_ptr(); }
};

}  // namespace ksns
