#pragma once

#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "blab/detail/poly.hpp"
#include "blab/moebius.hpp"
#include "blab/types.hpp"

namespace blab {

/// zeta * prod_k (z - w_k) / (1 - conj(w_k) z), every w_k in the open disc.
/// The zero-list form keeps boundary unimodularity and the zero set
/// structural; multiplication is list concatenation.
struct FiniteBlaschkeProduct {
    cplx zeta{1.0, 0.0};
    std::vector<cplx> zeros;

    FiniteBlaschkeProduct() = default;
    FiniteBlaschkeProduct(cplx zeta_, std::vector<cplx> zeros_)
        : zeta(zeta_), zeros(std::move(zeros_)) {
        if (std::abs(std::abs(zeta) - 1.0) > 1e-12)
            throw domain_error("blaschke: leading constant must be unimodular to 1e-12");
        for (cplx w : zeros)
            if (std::abs(w) >= 1.0)
                throw domain_error("blaschke: every zero must lie strictly inside the disc");
    }

    std::size_t degree() const { return zeros.size(); }
};

/// Zeros this close to the boundary are legal (the universal construction
/// creates them on purpose) but worth surfacing in diagnostics.
inline std::size_t count_near_boundary_zeros(const FiniteBlaschkeProduct& b,
                                             double margin = 1e-9) {
    std::size_t n = 0;
    for (cplx w : b.zeros)
        if (std::abs(w) >= 1.0 - margin) ++n;
    return n;
}

inline double max_zero_modulus(const FiniteBlaschkeProduct& b) {
    double m = 0.0;
    for (cplx w : b.zeros) m = std::max(m, std::abs(w));
    return m;
}

inline cplx evaluate(const FiniteBlaschkeProduct& b, cplx z) {
    if (std::abs(z) > 1.0 + 1e-12)
        throw domain_error("blaschke evaluate: point outside the closed disc");
    cplx acc = b.zeta;
    for (cplx w : b.zeros) acc *= (z - w) / (1.0 - std::conj(w) * z);
    return acc;
}

inline cplx evaluate_dilate(const FiniteBlaschkeProduct& b, double r, cplx z) {
    if (!(r > 0.0 && r < 1.0))
        throw domain_error("blaschke evaluate_dilate: dilation radius must be in (0,1)");
    return evaluate(b, r * z);
}

/// Upper bound for |B'| on the closed disc: each factor contributes at most
/// (1+|w|)/(1-|w|) while the others stay within the ball.
inline double lipschitz_bound(const FiniteBlaschkeProduct& b) {
    double s = 0.0;
    for (cplx w : b.zeros) s += (1.0 + std::abs(w)) / (1.0 - std::abs(w));
    return s;
}

inline FiniteBlaschkeProduct multiply(const FiniteBlaschkeProduct& a,
                                      const FiniteBlaschkeProduct& b) {
    std::vector<cplx> zs = a.zeros;
    zs.insert(zs.end(), b.zeros.begin(), b.zeros.end());
    cplx zeta = a.zeta * b.zeta;
    zeta /= std::abs(zeta);  // keep the invariant exact under long chains
    return FiniteBlaschkeProduct{zeta, std::move(zs)};
}

inline FiniteBlaschkeProduct prepend_zero_at_origin(const FiniteBlaschkeProduct& b) {
    std::vector<cplx> zs;
    zs.reserve(b.zeros.size() + 1);
    zs.push_back(cplx{0.0, 0.0});
    zs.insert(zs.end(), b.zeros.begin(), b.zeros.end());
    return FiniteBlaschkeProduct{b.zeta, std::move(zs)};
}

/// max over the grid of |B(z_i) - target_i|.
inline double sup_error(const FiniteBlaschkeProduct& b, const std::vector<cplx>& target,
                        const std::vector<cplx>& grid) {
    if (target.size() != grid.size())
        throw domain_error("sup_error: target and grid sizes differ");
    double worst = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i)
        worst = std::max(worst, std::abs(evaluate(b, grid[i]) - target[i]));
    return worst;
}

/// phi_m composed after B, returned in zero-list form with the same degree.
/// The new zeros are the roots of zeta_B * prod(z - w_k) - m.w * prod(1 - conj(w_k) z);
/// they are found numerically, polished, and the result is cross-checked
/// against pointwise composition on a disc/boundary grid. Any failure is
/// reported, never absorbed.
inline FiniteBlaschkeProduct compose_moebius_after(const MoebiusAutomorphism& m,
                                                   const FiniteBlaschkeProduct& b) {
    if (m.w == cplx{0.0, 0.0}) {
        cplx zeta = m.zeta * b.zeta;
        zeta /= std::abs(zeta);
        return FiniteBlaschkeProduct{zeta, b.zeros};
    }
    if (b.zeros.empty())  // constant input: composition is again a constant
        return FiniteBlaschkeProduct{moebius_eval(m, b.zeta) /
                                         std::abs(moebius_eval(m, b.zeta)),
                                     {}};

    std::vector<cplx> num{b.zeta};     // zeta_B * prod (z - w_k)
    std::vector<cplx> den{{1.0, 0.0}}; // prod (1 - conj(w_k) z)
    for (cplx w : b.zeros) {
        num = detail::poly_mul(num, {-w, cplx{1.0, 0.0}});
        den = detail::poly_mul(den, {cplx{1.0, 0.0}, -std::conj(w)});
    }
    std::vector<cplx> n_poly(num.size());
    for (std::size_t i = 0; i < num.size(); ++i)
        n_poly[i] = num[i] - m.w * (i < den.size() ? den[i] : cplx{0.0, 0.0});

    auto rr = detail::find_roots(n_poly);
    if (!rr.converged || rr.roots.size() != b.degree())
        throw numerics_error("compose_moebius_after: root finding did not converge");
    for (cplx r : rr.roots)
        if (std::abs(r) >= 1.0)
            throw numerics_error(
                "compose_moebius_after: computed zero escaped the open disc");

    // Recover the unimodular constant from one boundary sample, then verify
    // the whole composition on a grid.
    const cplx z0 = std::polar(1.0, 0.7318);
    cplx factor{1.0, 0.0};
    for (cplx r : rr.roots) factor *= (z0 - r) / (1.0 - std::conj(r) * z0);
    cplx zeta = moebius_eval(m, evaluate(b, z0)) / factor;
    zeta /= std::abs(zeta);
    FiniteBlaschkeProduct c{zeta, rr.roots};

    double worst = 0.0;
    for (int i = 0; i < 256; ++i) {
        const cplx z = std::polar(1.0, tau * (i + 0.5) / 256.0);
        worst = std::max(worst, std::abs(evaluate(c, z) - moebius_eval(m, evaluate(b, z))));
    }
    for (int i = 0; i < 128; ++i) {
        const double rad = 0.93 * (i + 1) / 128.0;
        const cplx z = std::polar(rad, tau * i / 128.0 + 0.19);
        worst = std::max(worst, std::abs(evaluate(c, z) - moebius_eval(m, evaluate(b, z))));
    }
    if (worst > 1e-8)
        throw numerics_error("compose_moebius_after: grid equivalence check failed");
    return c;
}

}  // namespace blab
