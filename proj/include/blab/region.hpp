#pragma once

#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "blab/types.hpp"

namespace blab {

/// Compact interior evaluation region: a closed disc of radius R around the
/// origin, or an explicit point list. Everything stays within modulus 0.95;
/// the approximation engines rely on that margin.
struct InteriorRegion {
    bool is_disc = true;
    double R = 0.4;
    std::vector<cplx> pts;
    int density = 8;

    static InteriorRegion disc(double radius, int dens = 8) {
        if (!(radius > 0.0 && radius <= 0.95))
            throw domain_error("interior region: disc radius must be in (0, 0.95]");
        if (dens < 2) throw domain_error("interior region: density must be at least 2");
        InteriorRegion r;
        r.is_disc = true;
        r.R = radius;
        r.density = dens;
        return r;
    }

    static InteriorRegion points(std::vector<cplx> p) {
        for (cplx z : p)
            if (std::abs(z) > 0.95)
                throw domain_error("interior region: points must have modulus at most 0.95");
        InteriorRegion r;
        r.is_disc = false;
        r.pts = std::move(p);
        return r;
    }

    std::vector<cplx> grid_points(int scale = 1) const {
        if (!is_disc) return pts;
        std::vector<cplx> g;
        g.push_back(cplx{0.0, 0.0});
        const int rings = density * scale;
        for (int i = 1; i <= rings; ++i) {
            const double r = R * i / rings;
            const int m = 8 * i;
            for (int k = 0; k < m; ++k) g.push_back(std::polar(r, tau * k / m));
        }
        return g;
    }

    /// Twice as fine as the construction grid; acceptance checks use this to
    /// guard against overfitting to the search grid.
    std::vector<cplx> verification_grid() const { return grid_points(2); }
};

}  // namespace blab
