#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "blab/types.hpp"

namespace blab::detail {

// Polynomials are coefficient vectors in ascending powers: p[k] * z^k.

inline cplx poly_eval(const std::vector<cplx>& p, cplx z) {
    cplx acc{0.0, 0.0};
    for (std::size_t i = p.size(); i-- > 0;) acc = acc * z + p[i];
    return acc;
}

inline std::vector<cplx> poly_mul(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    if (a.empty() || b.empty()) return {};
    std::vector<cplx> c(a.size() + b.size() - 1, cplx{0.0, 0.0});
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) c[i + j] += a[i] * b[j];
    return c;
}

inline std::vector<cplx> poly_derivative(const std::vector<cplx>& p) {
    if (p.size() <= 1) return {cplx{0.0, 0.0}};
    std::vector<cplx> d(p.size() - 1);
    for (std::size_t k = 1; k < p.size(); ++k) d[k - 1] = p[k] * static_cast<double>(k);
    return d;
}

/// leading * prod_k (z - roots[k]), expanded.
inline std::vector<cplx> poly_from_roots(cplx leading, const std::vector<cplx>& roots) {
    std::vector<cplx> p{leading};
    for (cplx r : roots) p = poly_mul(p, {-r, cplx{1.0, 0.0}});
    return p;
}

struct RootResult {
    std::vector<cplx> roots;
    double max_relative_residual = 0.0;
    bool converged = false;
};

/// All complex roots by Durand-Kerner simultaneous iteration with a Newton
/// polish. Exact zeros at the origin are deflated first. The relative
/// residual |p(x)| / sum |p_k||x|^k is the acceptance measure; callers decide
/// what tolerance they need.
inline RootResult find_roots(std::vector<cplx> p, int max_iter = 600) {
    RootResult out;
    while (p.size() > 1 && std::abs(p.back()) == 0.0) p.pop_back();
    if (p.size() <= 1) {
        out.converged = true;  // constant: no roots
        return out;
    }
    std::size_t zero_count = 0;
    while (zero_count + 1 < p.size() && std::abs(p[zero_count]) == 0.0) ++zero_count;
    if (zero_count > 0) p.erase(p.begin(), p.begin() + static_cast<long>(zero_count));

    const std::size_t n = p.size() - 1;
    out.roots.assign(zero_count, cplx{0.0, 0.0});
    if (n == 0) {
        out.converged = true;
        return out;
    }

    // Monic normalisation, then a Cauchy-bound initial circle with an
    // irrational-ish phase offset so symmetric polynomials don't stall.
    const cplx lead = p.back();
    for (auto& c : p) c /= lead;
    double radius = 0.0;
    for (std::size_t k = 0; k < n; ++k) radius = std::max(radius, std::abs(p[k]));
    radius = 0.5 + std::pow(1.0 + radius, 1.0 / static_cast<double>(n)) - 1.0 + 0.4;

    std::vector<cplx> x(n);
    for (std::size_t k = 0; k < n; ++k)
        x[k] = std::polar(radius, tau * static_cast<double>(k) / static_cast<double>(n) + 0.37);

    for (int it = 0; it < max_iter; ++it) {
        double worst = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            cplx den{1.0, 0.0};
            for (std::size_t j = 0; j < n; ++j)
                if (j != i) den *= (x[i] - x[j]);
            if (std::abs(den) < 1e-290) den = cplx{1e-290, 0.0};
            const cplx step = poly_eval(p, x[i]) / den;
            x[i] -= step;
            worst = std::max(worst, std::abs(step) / std::max(1.0, std::abs(x[i])));
        }
        if (worst < 1e-14) break;
    }

    const auto dp = poly_derivative(p);
    for (auto& xi : x) {
        for (int k = 0; k < 4; ++k) {
            const cplx d = poly_eval(dp, xi);
            if (std::abs(d) < 1e-290) break;
            xi -= poly_eval(p, xi) / d;
        }
    }

    double worst_rel = 0.0;
    for (cplx xi : x) {
        double scale = 0.0, zp = 1.0;
        for (std::size_t k = 0; k < p.size(); ++k) {
            scale += std::abs(p[k]) * zp;
            zp *= std::abs(xi);
        }
        worst_rel = std::max(worst_rel, std::abs(poly_eval(p, xi)) / std::max(scale, 1e-300));
    }
    out.roots.insert(out.roots.end(), x.begin(), x.end());
    out.max_relative_residual = worst_rel;
    out.converged = worst_rel < 1e-10;
    return out;
}

}  // namespace blab::detail
