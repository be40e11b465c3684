#pragma once

#include <bit>
#include <vector>

#include "blab/types.hpp"

namespace blab::detail {

// In-place iterative radix-2 transform. Size must be a power of two;
// the boundary grids that feed this guarantee it.
inline void fft_radix2(std::vector<cplx>& a, bool inverse) {
    const std::size_t n = a.size();
    if (n == 0 || (n & (n - 1)) != 0)
        throw domain_error("fft: length must be a power of two");
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = (inverse ? tau : -tau) / static_cast<double>(len);
        const cplx wl = std::polar(1.0, ang);
        for (std::size_t i = 0; i < n; i += len) {
            cplx w{1.0, 0.0};
            for (std::size_t k = 0; k < len / 2; ++k) {
                cplx u = a[i + k];
                cplx v = a[i + k + len / 2] * w;
                a[i + k] = u + v;
                a[i + k + len / 2] = u - v;
                w *= wl;
            }
        }
    }
    if (inverse) {
        const double inv = 1.0 / static_cast<double>(n);
        for (auto& x : a) x *= inv;
    }
}

inline std::vector<cplx> fft(std::vector<cplx> a) {
    fft_radix2(a, false);
    return a;
}

inline std::vector<cplx> ifft(std::vector<cplx> a) {
    fft_radix2(a, true);
    return a;
}

}  // namespace blab::detail
