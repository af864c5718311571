#ifndef NSVAC_GRID_HPP_
#define NSVAC_GRID_HPP_

#include "nsvac/errors.hpp"
#include "nsvac/linalg.hpp"

namespace nsvac {

/// Uniform periodic Cartesian grid on the box [-extent, extent)^dim.
/// Index order is x-fastest: p = i + n*(j + n*k).
struct Grid {
    int dim = 1;
    int n = 8;          // points per axis, even, >= 8
    double extent = 1;  // half-width L

    Grid() = default;
    Grid(int d, int points, double half_width) : dim(d), n(points), extent(half_width) {
        if (d < 1 || d > 3) throw ConfigError("grid dim must be 1, 2 or 3");
        if (n < 8 || n % 2 != 0) throw ConfigError("grid needs an even point count >= 8");
        if (extent <= 0) throw ConfigError("grid extent must be positive");
    }

    double spacing() const { return 2.0 * extent / n; }

    long points() const {
        long p = n;
        for (int k = 1; k < dim; ++k) p *= n;
        return p;
    }

    long stride(int axis) const {
        long s = 1;
        for (int k = 0; k < axis; ++k) s *= n;
        return s;
    }

    double coord(int i) const { return -extent + i * spacing(); }

    Vec point(long p) const {
        Vec x(dim);
        long q = p;
        for (int a = 0; a < dim; ++a) {
            x[a] = coord(static_cast<int>(q % n));
            q /= n;
        }
        return x;
    }

    bool operator==(const Grid& o) const {
        return dim == o.dim && n == o.n && extent == o.extent;
    }
};

} // namespace nsvac

#endif
