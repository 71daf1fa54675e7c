#include "ksns/grid.hpp"

#include <cmath>
#include <queue>
#include <string>

#include "ksns/errors.hpp"

namespace ksns {

Grid::Grid(int nx, int ny, double lx, double ly, std::vector<std::uint8_t> mask)
    : nx_(nx), ny_(ny), lx_(lx), ly_(ly), mask_(std::move(mask)) {
    if (nx < 4 || ny < 4) {
        throw InvalidParameter("grid needs nx, ny >= 4");
    }
    if (!(lx > 0.0) || !(ly > 0.0) || !std::isfinite(lx) || !std::isfinite(ly)) {
        throw InvalidParameter("grid extent must be positive and finite");
    }
    if (mask_.size() != size()) {
        throw InvalidParameter("mask size " + std::to_string(mask_.size()) +
                               " does not match grid " + std::to_string(size()));
    }
    hx_ = lx / nx;
    hy_ = ly / ny;

    neighbors_.assign(size(), 0);
    std::size_t first = size();
    for (int j = 0; j < ny_; ++j) {
        for (int i = 0; i < nx_; ++i) {
            const std::size_t k = index(i, j);
            if (mask_[k] == 0) {
                continue;
            }
            mask_[k] = 1;
            ++active_;
            if (first == size()) {
                first = k;
            }
            std::uint8_t bits = 0;
            if (inside(i + 1, j)) bits |= kEast;
            if (inside(i - 1, j)) bits |= kWest;
            if (inside(i, j + 1)) bits |= kNorth;
            if (inside(i, j - 1)) bits |= kSouth;
            if (bits == 0) {
                throw InvalidParameter("masked-in cell (" + std::to_string(i) + ", " +
                                       std::to_string(j) + ") has no masked-in neighbour");
            }
            neighbors_[k] = bits;
        }
    }
    if (active_ == 0) {
        throw InvalidParameter("mask selects no cells");
    }

    // Connectivity: flood fill from the first inside cell.
    std::vector<std::uint8_t> seen(size(), 0);
    std::queue<std::size_t> queue;
    queue.push(first);
    seen[first] = 1;
    std::size_t reached = 0;
    while (!queue.empty()) {
        const std::size_t k = queue.front();
        queue.pop();
        ++reached;
        const std::uint8_t bits = neighbors_[k];
        const std::size_t candidates[4] = {k + 1, k - 1, k + nx_, k - nx_};
        const std::uint8_t flags[4] = {kEast, kWest, kNorth, kSouth};
        for (int d = 0; d < 4; ++d) {
            if ((bits & flags[d]) && !seen[candidates[d]]) {
                seen[candidates[d]] = 1;
                queue.push(candidates[d]);
            }
        }
    }
    if (reached != active_) {
        throw InvalidParameter("mask is not a single connected region");
    }
}

std::shared_ptr<const Grid> Grid::rectangle(int nx, int ny, double lx, double ly) {
    if (nx < 4 || ny < 4) {
        throw InvalidParameter("grid needs nx, ny >= 4");
    }
    return std::shared_ptr<const Grid>(
        new Grid(nx, ny, lx, ly, std::vector<std::uint8_t>(static_cast<std::size_t>(nx) * ny, 1)));
}

std::shared_ptr<const Grid> Grid::l_shape(int nx, int ny, double lx, double ly) {
    if (nx < 4 || ny < 4) {
        throw InvalidParameter("grid needs nx, ny >= 4");
    }
    std::vector<std::uint8_t> mask(static_cast<std::size_t>(nx) * ny, 1);
    for (int j = ny / 2; j < ny; ++j) {
        for (int i = nx / 2; i < nx; ++i) {
            mask[static_cast<std::size_t>(j) * nx + i] = 0;
        }
    }
    return std::shared_ptr<const Grid>(new Grid(nx, ny, lx, ly, std::move(mask)));
}

std::shared_ptr<const Grid> Grid::masked(int nx, int ny, double lx, double ly,
                                         std::vector<std::uint8_t> mask) {
    return std::shared_ptr<const Grid>(new Grid(nx, ny, lx, ly, std::move(mask)));
}

bool Grid::operator==(const Grid& other) const {
    return nx_ == other.nx_ && ny_ == other.ny_ && lx_ == other.lx_ && ly_ == other.ly_ &&
           mask_ == other.mask_;
}

}  // namespace ksns
