#pragma once

#include <cstddef>
#include <vector>

#include "homsim/common.hpp"

namespace homsim {

// Uniform Cartesian sampling window. Samples sit at
//   x_i = (i - nx/2) * dx,  i = 0..nx-1
// so the origin is an actual sample (FFT convention) and the window is
// [-nx/2*dx, (nx/2-1)*dx]. Row-major storage, index = iy*nx + ix.
struct Grid {
    int nx = 0;
    int ny = 0;
    double dx = 0.0;  // m
    double dy = 0.0;  // m

    void validate() const {
        if (nx < 16 || ny < 16) throw ConfigError("grid: nx, ny must be >= 16");
        if (nx % 2 || ny % 2) throw ConfigError("grid: nx, ny must be even");
        if (!(dx > 0.0) || !(dy > 0.0)) throw ConfigError("grid: pitch must be positive");
    }

    std::size_t size() const { return static_cast<std::size_t>(nx) * ny; }
    double x(int ix) const { return (ix - nx / 2) * dx; }
    double y(int iy) const { return (iy - ny / 2) * dy; }
    double cell_area() const { return dx * dy; }

    bool operator==(const Grid& o) const {
        return nx == o.nx && ny == o.ny && dx == o.dx && dy == o.dy;
    }
    bool operator!=(const Grid& o) const { return !(*this == o); }
};

}  // namespace homsim
