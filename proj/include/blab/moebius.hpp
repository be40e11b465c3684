#pragma once

#include <cmath>

#include "blab/types.hpp"

namespace blab {

/// Disc automorphism z -> zeta * (z - w) / (1 - conj(w) z).
/// Immutable; |w| < 1 and |zeta| = 1 are enforced at construction.
struct MoebiusAutomorphism {
    cplx w{0.0, 0.0};
    cplx zeta{1.0, 0.0};

    MoebiusAutomorphism() = default;
    MoebiusAutomorphism(cplx w_, cplx zeta_) : w(w_), zeta(zeta_) {
        // Near-boundary poles destroy conditioning; reject instead of clamp.
        if (std::abs(w) >= 1.0 - 1e-14)
            throw domain_error("moebius: pole parameter must satisfy |w| < 1 - 1e-14");
        if (std::abs(std::abs(zeta) - 1.0) > 1e-12)
            throw domain_error("moebius: rotation factor must be unimodular to 1e-12");
    }
};

inline cplx moebius_eval(const MoebiusAutomorphism& m, cplx z) {
    if (std::abs(z) > 1.0 + 1e-12)
        throw domain_error("moebius_eval: point outside the closed disc");
    return m.zeta * (z - m.w) / (1.0 - std::conj(m.w) * z);
}

/// The inverse automorphism in the same normal form:
/// u -> conj(zeta) * (u + zeta w) / (1 + conj(zeta w) u).
inline MoebiusAutomorphism moebius_inverse(const MoebiusAutomorphism& m) {
    return MoebiusAutomorphism{-m.zeta * m.w, std::conj(m.zeta)};
}

/// Upper bound for |phi(z) - phi(z')| / |z - z'| over the closed disc.
inline double moebius_lipschitz_bound(const MoebiusAutomorphism& m) {
    const double a = std::abs(m.w);
    return (1.0 + a) / (1.0 - a);
}

}  // namespace blab
