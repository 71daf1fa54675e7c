#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <vector>

namespace ksns {

/// Neighbour flags stored per cell; a set bit means the neighbour is inside the domain.
enum NeighborBit : std::uint8_t {
    kEast = 1u << 0,
    kWest = 1u << 1,
    kNorth = 1u << 2,
    kSouth = 1u << 3,
};

/// Uniform cell-centred grid on [0, Lx] x [0, Ly], optionally restricted by a cell mask.
///
/// Cells are stored row-major, index = j * nx + i, with i along x and j along y.
/// A face between an inside cell and an outside cell (or the bounding box) is a
/// boundary face of the domain. The mask must describe a single 4-connected region.
class Grid {
public:
    static std::shared_ptr<const Grid> rectangle(int nx, int ny, double lx, double ly);

    /// Bounding rectangle with the upper-right quadrant (x > Lx/2, y > Ly/2) removed.
    static std::shared_ptr<const Grid> l_shape(int nx, int ny, double lx, double ly);

    /// Arbitrary mask, row-major; nonzero = inside.
    static std::shared_ptr<const Grid> masked(int nx, int ny, double lx, double ly,
                                              std::vector<std::uint8_t> mask);

    int nx() const { return nx_; }
    int ny() const { return ny_; }
    double lx() const { return lx_; }
    double ly() const { return ly_; }
    double hx() const { return hx_; }
    double hy() const { return hy_; }
    double cell_area() const { return hx_ * hy_; }
    std::size_t size() const { return static_cast<std::size_t>(nx_) * ny_; }
    std::size_t index(int i, int j) const { return static_cast<std::size_t>(j) * nx_ + i; }

    /// Cell centre coordinates.
    double x(int i) const { return (i + 0.5) * hx_; }
    double y(int j) const { return (j + 0.5) * hy_; }

    bool inside(int i, int j) const {
        return i >= 0 && j >= 0 && i < nx_ && j < ny_ && mask_[index(i, j)] != 0;
    }
    bool inside(std::size_t k) const { return mask_[k] != 0; }
    std::uint8_t neighbors(std::size_t k) const { return neighbors_[k]; }

    /// True when every cell of the bounding rectangle is inside.
    bool full() const { return active_ == size(); }
    std::size_t active_count() const { return active_; }
    const std::vector<std::uint8_t>& mask() const { return mask_; }

    bool operator==(const Grid& other) const;

private:
    Grid(int nx, int ny, double lx, double ly, std::vector<std::uint8_t> mask);

    int nx_;
    int ny_;
    double lx_;
    double ly_;
    double hx_;
    double hy_;
    std::vector<std::uint8_t> mask_;
    std::vector<std::uint8_t> neighbors_;
    std::size_t active_ = 0;
};

using GridPtr = std::shared_ptr<const Grid>;

}  // namespace ksns
