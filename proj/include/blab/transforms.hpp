#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "blab/detail/fft.hpp"
#include "blab/types.hpp"

namespace blab {

/// Uniform sampling of the circle at t_k = 2*pi*k/N. N is a power of two so
/// the transform layer never pads.
struct BoundaryGrid {
    std::size_t N = 0;

    BoundaryGrid() = default;
    explicit BoundaryGrid(std::size_t n) : N(n) {
        if (N < 8 || (N & (N - 1)) != 0)
            throw domain_error("boundary grid: size must be a power of two, at least 8");
    }

    double angle(std::size_t k) const { return tau * static_cast<double>(k) / static_cast<double>(N); }
    cplx point(std::size_t k) const { return std::polar(1.0, angle(k)); }
};

struct BoundaryFunction {
    BoundaryGrid grid;
    std::vector<cplx> values;

    BoundaryFunction() = default;
    BoundaryFunction(BoundaryGrid g, std::vector<cplx> v) : grid(g), values(std::move(v)) {
        if (values.size() != grid.N)
            throw domain_error("boundary function: sample count must equal grid size");
        for (cplx x : values)
            if (!std::isfinite(x.real()) || !std::isfinite(x.imag()))
                throw domain_error("boundary function: samples must be finite");
    }

    bool is_real(double tol = 1e-12) const {
        for (cplx x : values)
            if (std::abs(x.imag()) > tol) return false;
        return true;
    }
};

/// Harmonic extension by the normalized discrete Poisson kernel. The
/// normalization makes the value an exact convex combination of the samples,
/// so constants reproduce exactly and the discrete maximum principle holds
/// with no quadrature slack.
inline cplx poisson_extend(const BoundaryFunction& u, cplx z) {
    if (std::abs(z) >= 1.0)
        throw domain_error("poisson_extend: point must be strictly interior");
    const std::size_t n = u.grid.N;
    const double one_minus = 1.0 - std::norm(z);
    double total = 0.0;
    cplx acc{0.0, 0.0};
    for (std::size_t k = 0; k < n; ++k) {
        const double w = one_minus / std::norm(u.grid.point(k) - z);
        acc += w * u.values[k];
        total += w;
    }
    return acc / total;
}

/// Conjugate via the Fourier multiplier -i*sign(m); frequency 0 and the
/// Nyquist bin are zeroed, which pins conjugate(0) = 0.
inline BoundaryFunction harmonic_conjugate(const BoundaryFunction& u) {
    if (!u.is_real())
        throw domain_error("harmonic_conjugate: input must be real-valued");
    const std::size_t n = u.grid.N;
    auto c = detail::fft(u.values);
    const cplx mi{0.0, -1.0};
    c[0] = 0.0;
    c[n / 2] = 0.0;
    for (std::size_t m = 1; m < n / 2; ++m) {
        c[m] *= mi;
        c[n - m] *= -mi;
    }
    auto v = detail::ifft(std::move(c));
    for (auto& x : v) x = cplx{x.real(), 0.0};  // imaginary residue is FFT noise
    return BoundaryFunction{u.grid, std::move(v)};
}

/// u + i*conjugate(u) in one pass: keep nonnegative frequencies, double the
/// strictly positive ones. Agrees with u + i*harmonic_conjugate(u) at every
/// sample, including the Nyquist term (whose sine vanishes on the grid).
inline BoundaryFunction analytic_completion(const BoundaryFunction& u) {
    if (!u.is_real())
        throw domain_error("analytic_completion: input must be real-valued");
    const std::size_t n = u.grid.N;
    auto c = detail::fft(u.values);
    for (std::size_t m = 1; m < n / 2; ++m) {
        c[m] *= 2.0;
        c[n - m] = 0.0;
    }
    return BoundaryFunction{u.grid, detail::ifft(std::move(c))};
}

/// Coefficients of the polynomial whose boundary values equal
/// analytic_completion(u): index m covers 0..N/2. Evaluating it anywhere in
/// the closed disc extends the completion holomorphically.
inline std::vector<cplx> analytic_coefficients(const BoundaryFunction& u) {
    if (!u.is_real())
        throw domain_error("analytic_coefficients: input must be real-valued");
    const std::size_t n = u.grid.N;
    auto c = detail::fft(u.values);
    std::vector<cplx> a(n / 2 + 1);
    const double inv = 1.0 / static_cast<double>(n);
    a[0] = c[0] * inv;
    for (std::size_t m = 1; m < n / 2; ++m) a[m] = 2.0 * c[m] * inv;
    a[n / 2] = c[n / 2] * inv;
    return a;
}

/// Hard projection onto frequencies |m| <= max_freq, plus the measured
/// sup-norm change. Callers that need sample-level lower bounds preserved
/// add the (tiny) change back as a constant.
inline std::pair<BoundaryFunction, double> project_band_limit(const BoundaryFunction& u,
                                                              std::size_t max_freq) {
    const std::size_t n = u.grid.N;
    if (max_freq >= n / 2)
        throw domain_error("project_band_limit: cutoff must be below Nyquist");
    auto c = detail::fft(u.values);
    for (std::size_t m = max_freq + 1; m <= n - max_freq - 1; ++m) c[m] = 0.0;
    auto v = detail::ifft(std::move(c));
    double change = 0.0;
    for (std::size_t k = 0; k < n; ++k) change = std::max(change, std::abs(v[k] - u.values[k]));
    if (u.is_real())
        for (auto& x : v) x = cplx{x.real(), 0.0};
    return {BoundaryFunction{u.grid, std::move(v)}, change};
}

}  // namespace blab
