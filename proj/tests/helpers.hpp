#pragma once

#include <complex>
#include <cstddef>
#include <random>
#include <vector>

#include "blab/blaschke.hpp"
#include "blab/types.hpp"

namespace blab::testing {

inline std::mt19937_64 rng(std::uint64_t seed) { return std::mt19937_64{seed}; }

inline double uniform(std::mt19937_64& g, double lo, double hi) {
    return std::uniform_real_distribution<double>{lo, hi}(g);
}

/// Uniform over the disc of the given radius.
inline cplx disc_point(std::mt19937_64& g, double radius = 1.0) {
    const double r = radius * std::sqrt(uniform(g, 0.0, 1.0));
    return std::polar(r, uniform(g, 0.0, tau));
}

inline cplx circle_point(std::mt19937_64& g) { return std::polar(1.0, uniform(g, 0.0, tau)); }

/// Taylor coefficients of a finite Blaschke product in extended precision.
/// Each factor (z-w)/(1-conj(w)z) expands to -w + (1-|w|^2) sum conj(w)^{k-1} z^k;
/// factors are multiplied as truncated series.
inline std::vector<cplx> taylor_of_product(const blab::FiniteBlaschkeProduct& b,
                                           std::size_t count) {
    using lcplx = std::complex<long double>;
    std::vector<lcplx> acc(count, lcplx{0.0L, 0.0L});
    acc[0] = lcplx{b.zeta.real(), b.zeta.imag()};
    for (cplx wd : b.zeros) {
        const lcplx w{wd.real(), wd.imag()};
        std::vector<lcplx> f(count);
        f[0] = -w;
        const lcplx lead = 1.0L - std::norm(w);
        lcplx p{1.0L, 0.0L};
        for (std::size_t k = 1; k < count; ++k) {
            f[k] = lead * p;
            p *= std::conj(w);
        }
        std::vector<lcplx> next(count, lcplx{0.0L, 0.0L});
        for (std::size_t i = 0; i < count; ++i)
            for (std::size_t j = 0; i + j < count; ++j) next[i + j] += acc[i] * f[j];
        acc = std::move(next);
    }
    std::vector<cplx> out(count);
    for (std::size_t i = 0; i < count; ++i)
        out[i] = cplx{static_cast<double>(acc[i].real()), static_cast<double>(acc[i].imag())};
    return out;
}

}  // namespace blab::testing
