#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdlib>
#include <functional>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "blab/blaschke.hpp"
#include "blab/detail/fft.hpp"
#include "blab/detail/poly.hpp"
#include "blab/region.hpp"
#include "blab/sample_set.hpp"
#include "blab/types.hpp"

namespace blab {

using Evaluator = std::function<cplx(cplx)>;

/// Degree cap for the search loops. Overridable through BLAB_MAX_DEGREE.
inline std::size_t max_degree_cap() {
    if (const char* s = std::getenv("BLAB_MAX_DEGREE")) {
        const long v = std::atol(s);
        if (v >= 1) return static_cast<std::size_t>(v);
    }
    return 256;
}

/// Taylor coefficients of a function holomorphic on a neighbourhood of the
/// closed 0.99-disc, recovered from boundary samples on two circles. The
/// second radius cancels the leading aliasing term, so coefficients up to
/// order ~N/4 come out near machine precision for unit-ball functions.
inline std::vector<cplx> taylor_coefficients(const Evaluator& f, std::size_t count,
                                             std::size_t N = 1024) {
    if (count > N / 2) throw domain_error("taylor_coefficients: count too large for grid");
    const double r1 = 0.99, r2 = 0.98;
    std::vector<cplx> s1(N), s2(N);
    for (std::size_t k = 0; k < N; ++k) {
        const double t = tau * k / N;
        s1[k] = f(std::polar(r1, t));
        s2[k] = f(std::polar(r2, t));
        if (!std::isfinite(s1[k].real()) || !std::isfinite(s1[k].imag()) ||
            !std::isfinite(s2[k].real()) || !std::isfinite(s2[k].imag()))
            throw domain_error("taylor_coefficients: function returned a non-finite value");
    }
    s1 = detail::fft(std::move(s1));
    s2 = detail::fft(std::move(s2));
    const double q1 = std::pow(r1, static_cast<double>(N));
    const double q2 = std::pow(r2, static_cast<double>(N));
    std::vector<cplx> c(count);
    double p1 = 1.0, p2 = 1.0;
    for (std::size_t m = 0; m < count; ++m) {
        const cplx a1 = s1[m] / (static_cast<double>(N) * p1);
        const cplx a2 = s2[m] / (static_cast<double>(N) * p2);
        // a_i = c_m + d*q_i + O(q^2); eliminate d.
        c[m] = a1 - q1 * (a1 - a2) / (q1 - q2);
        p1 *= r1;
        p2 *= r2;
    }
    return c;
}

/// Schur parameters of a power series bounded by one on the disc. `terminal`
/// marks that the last stored parameter is unimodular, i.e. the recursion hit
/// a finite Blaschke product exactly.
struct SchurParameters {
    std::vector<cplx> gammas;
    bool terminal = false;
};

namespace detail {

/// Multiplicative inverse of a truncated power series with nonzero constant
/// term, to the same truncation length.
inline std::vector<cplx> series_inverse(const std::vector<cplx>& g) {
    const std::size_t n = g.size();
    std::vector<cplx> inv(n);
    inv[0] = 1.0 / g[0];
    for (std::size_t m = 1; m < n; ++m) {
        cplx acc{0.0, 0.0};
        for (std::size_t j = 1; j <= m; ++j) acc += g[j] * inv[m - j];
        inv[m] = -acc / g[0];
    }
    return inv;
}

inline std::vector<cplx> series_multiply(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    const std::size_t n = a.size();
    std::vector<cplx> out(n, cplx{0.0, 0.0});
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; i + j < n; ++j) out[i + j] += a[i] * b[j];
    return out;
}

}  // namespace detail

inline SchurParameters schur_decompose(std::vector<cplx> taylor, std::size_t depth) {
    if (taylor.empty()) throw domain_error("schur_decompose: empty series");
    if (depth == 0) throw domain_error("schur_decompose: depth must be positive");
    if (taylor.size() < depth)
        throw domain_error("schur_decompose: series shorter than requested depth");
    SchurParameters out;
    std::vector<cplx> f = std::move(taylor);
    const std::size_t n = f.size();
    for (std::size_t k = 0; k < depth; ++k) {
        const cplx g = f[0];
        const double mag = std::abs(g);
        if (mag > 1.0 + 1e-10)
            throw domain_error("schur_decompose: series is not bounded by one on the disc");
        out.gammas.push_back(g);
        // The window is wider than the coefficient noise of sampled input;
        // pushing the recursion past a unimodular parameter only divides by
        // that noise.
        if (mag >= 1.0 - 1e-9) {
            out.terminal = true;
            return out;
        }
        if (k + 1 == depth) break;
        // f <- (1/z) * (f - g) / (1 - conj(g) f), truncated.
        std::vector<cplx> num(n), den(n);
        for (std::size_t i = 0; i < n; ++i) {
            num[i] = f[i];
            den[i] = -std::conj(g) * f[i];
        }
        num[0] -= g;
        den[0] += 1.0;
        std::vector<cplx> next = detail::series_multiply(num, detail::series_inverse(den));
        for (std::size_t i = 0; i + 1 < n; ++i) f[i] = next[i + 1];
        f[n - 1] = cplx{0.0, 0.0};
    }
    return out;
}

namespace detail {

/// Lower-triangular reconstruction of the rational form P/Q from a full
/// parameter chain whose last entry is unimodular. Ascending coefficients.
inline void schur_rational(const std::vector<cplx>& chain, std::vector<cplx>& P,
                           std::vector<cplx>& Q) {
    P = {chain.back()};
    Q = {cplx{1.0, 0.0}};
    for (std::size_t idx = chain.size() - 1; idx-- > 0;) {
        const cplx g = chain[idx];
        std::vector<cplx> nP(P.size() + 1, cplx{0.0, 0.0});
        std::vector<cplx> nQ(Q.size() + 1, cplx{0.0, 0.0});
        for (std::size_t i = 0; i < P.size(); ++i) nP[i + 1] += P[i];
        for (std::size_t i = 0; i < Q.size(); ++i) nP[i] += g * Q[i];
        for (std::size_t i = 0; i < Q.size(); ++i) nQ[i] += Q[i];
        for (std::size_t i = 0; i < P.size(); ++i) nQ[i + 1] += std::conj(g) * P[i];
        P = std::move(nP);
        Q = std::move(nQ);
    }
}

inline std::vector<cplx> full_chain(const SchurParameters& params, std::size_t fill_degree) {
    std::vector<cplx> chain = params.gammas;
    if (!params.terminal) {
        chain.insert(chain.end(), fill_degree, cplx{0.0, 0.0});
        chain.push_back(cplx{1.0, 0.0});
    }
    if (chain.empty()) throw domain_error("schur reconstruction: empty parameter list");
    for (std::size_t i = 0; i + 1 < chain.size(); ++i)
        if (std::abs(chain[i]) >= 1.0 - 1e-12)
            throw domain_error("schur reconstruction: interior parameter is not contractive");
    const double tail = std::abs(chain.back());
    if (std::abs(tail - 1.0) > 1e-8)
        throw domain_error("schur reconstruction: terminal parameter must be unimodular");
    chain.back() /= tail;
    return chain;
}

}  // namespace detail

/// Rebuild the finite Blaschke product encoded by a parameter list. A
/// non-terminal list is completed with `fill_degree` zero parameters and a
/// unimodular tail, so the result has degree |gammas| + fill_degree.
inline FiniteBlaschkeProduct blaschke_from_schur(const SchurParameters& params,
                                                 std::size_t fill_degree = 0) {
    std::vector<cplx> P, Q;
    detail::schur_rational(detail::full_chain(params, fill_degree), P, Q);
    const std::size_t deg = P.size() - 1;

    FiniteBlaschkeProduct b;
    if (deg == 0) {
        const cplx v = P[0] / Q[0];
        b.zeta = v / std::abs(v);
        return b;
    }
    detail::RootResult rr = detail::find_roots(P);
    if (!rr.converged || rr.roots.size() != deg)
        throw numerics_error("schur reconstruction: numerator root extraction failed");
    for (cplx w : rr.roots)
        if (std::abs(w) >= 1.0)
            throw numerics_error("schur reconstruction: numerator root escaped the open disc");
    b.zeros = rr.roots;

    const cplx z0 = std::polar(1.0, 0.7318);
    const cplx target = detail::poly_eval(P, z0) / detail::poly_eval(Q, z0);
    cplx factor{1.0, 0.0};
    for (cplx w : b.zeros) factor *= (z0 - w) / (1.0 - std::conj(w) * z0);
    cplx zeta = target / factor;
    if (std::abs(std::abs(zeta) - 1.0) > 1e-6)
        throw numerics_error("schur reconstruction: lost unimodularity");
    b.zeta = zeta / std::abs(zeta);

    for (std::size_t k = 0; k < 128; ++k) {
        const cplx z = std::polar(1.0, tau * (k + 0.31) / 128);
        const cplx rational = detail::poly_eval(P, z) / detail::poly_eval(Q, z);
        if (std::abs(evaluate(b, z) - rational) > 1e-9)
            throw numerics_error("schur reconstruction: zero list disagrees with rational form");
    }
    return b;
}

/// Largest modulus of f over the given points.
inline double verify_ball_membership(const Evaluator& f, const std::vector<cplx>& grid) {
    double m = 0.0;
    for (cplx z : grid) m = std::max(m, std::abs(f(z)));
    return m;
}

namespace detail {

/// Core of the smallest-degree search over explicit construction and
/// verification point sets. Points may sit anywhere strictly inside the disc;
/// the public wrapper keeps its region within the usual 0.95 margin.
inline FiniteBlaschkeProduct caratheodory_on_grids(const Evaluator& f,
                                                   const std::vector<cplx>& grid,
                                                   const std::vector<cplx>& fine,
                                                   double epsilon) {
    if (!(epsilon > 0.0)) throw domain_error("caratheodory_approximate: epsilon must be positive");
    if (grid.empty()) throw domain_error("caratheodory_approximate: empty region grid");
    std::vector<cplx> fg(grid.size()), ff(fine.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        fg[i] = f(grid[i]);
        if (std::abs(fg[i]) > 1.0 + 1e-9)
            throw domain_error("caratheodory_approximate: function exceeds the unit ball");
    }
    for (std::size_t i = 0; i < fine.size(); ++i) ff[i] = f(fine[i]);

    const std::size_t cap = max_degree_cap();
    const std::size_t series_len = std::min<std::size_t>(cap + 40, 512);
    const std::vector<cplx> taylor = taylor_coefficients(f, series_len);
    if (std::abs(taylor[0]) > 1.0 + 1e-10)
        throw domain_error("caratheodory_approximate: constant term exceeds one");

    double best_err = std::numeric_limits<double>::infinity();
    std::size_t best_deg = 0;
    std::size_t d_next = 0;

    for (std::size_t depth = 8; depth / 2 < cap; depth *= 2) {
        const std::size_t eff_depth = std::min({depth, cap, series_len});
        SchurParameters full;
        try {
            full = schur_decompose(taylor, eff_depth);
        } catch (const domain_error&) {
            // Deeper levels divide by sampling noise once the useful
            // information is spent; the first level's verdict is the real one.
            if (depth == 8) throw;
            break;
        }
        // Parameters at sampling-noise level are artefacts; snapping them to
        // zero lets exact finite products reconstruct exactly.
        for (cplx& g : full.gammas)
            if (std::abs(g) < 1e-12) g = cplx{0.0, 0.0};
        // With a terminal parameter at index k the function is itself a finite
        // Blaschke product of degree k; candidates beyond k add nothing.
        const std::size_t d_stop =
            full.terminal ? full.gammas.size() - 1 : std::min(eff_depth, cap);
        // A terminal parameter can surface below degrees already scanned; the
        // exact reconstruction at its index is still a new candidate.
        const std::size_t d_start = full.terminal ? std::min(d_next, d_stop) : d_next;
        for (std::size_t d = d_start; d <= d_stop; ++d) {
            SchurParameters pre;
            if (full.terminal && d == full.gammas.size() - 1) {
                pre = full;
            } else {
                pre.gammas.assign(full.gammas.begin(), full.gammas.begin() + d);
                pre.terminal = false;
            }
            try {
                std::vector<cplx> P, Q;
                detail::schur_rational(detail::full_chain(pre, 0), P, Q);
                double err = 0.0;
                for (std::size_t i = 0; i < grid.size(); ++i)
                    err = std::max(err, std::abs(detail::poly_eval(P, grid[i]) /
                                                     detail::poly_eval(Q, grid[i]) -
                                                 fg[i]));
                if (err < best_err) {
                    best_err = err;
                    best_deg = d;
                }
                if (err < epsilon) {
                    FiniteBlaschkeProduct b = blaschke_from_schur(pre, 0);
                    double err2 = 0.0;
                    for (std::size_t i = 0; i < fine.size(); ++i)
                        err2 = std::max(err2, std::abs(evaluate(b, fine[i]) - ff[i]));
                    if (err2 < epsilon) return b;
                    best_err = std::min(best_err, err2);
                }
            } catch (const domain_error&) {
                continue;  // candidate malformed by noise; not a verdict on f
            }
        }
        d_next = d_stop + 1;
        if (full.terminal || d_stop >= cap) break;
    }

    std::ostringstream msg;
    msg << "caratheodory_approximate: no candidate met epsilon " << epsilon
        << " within degree " << cap << "; best error " << best_err << " at degree " << best_deg;
    throw numerics_error(msg.str());
}

}  // namespace detail

/// Smallest-degree finite Blaschke product within epsilon of f on the region,
/// found by truncating the Schur parameter sequence of f and completing with
/// a power tail. Degree candidates are tried in increasing order and every
/// accepted candidate is re-measured on a finer grid.
inline FiniteBlaschkeProduct caratheodory_approximate(const Evaluator& f, const InteriorRegion& L,
                                                      double epsilon) {
    return detail::caratheodory_on_grids(f, L.grid_points(), L.verification_grid(), epsilon);
}

namespace detail {

/// Assemble a finite Blaschke product from an ascending coefficient vector p
/// interpreted as B = P / P*, where P*(z) = z^d conj(P(1/conj z)). Returns
/// nothing when the quotient is not a Blaschke product (uncancelled pole) or
/// a root is not strictly inside the disc.
inline std::optional<FiniteBlaschkeProduct> blaschke_from_selfdual(const std::vector<cplx>& p) {
    const std::size_t d = p.size() - 1;
    double scale = 0.0;
    for (cplx c : p) scale = std::max(scale, std::abs(c));
    if (scale == 0.0) return std::nullopt;
    const double tol = 1e-12 * scale;
    std::size_t m = d, mu = 0;
    while (m > 0 && std::abs(p[m]) <= tol) --m;
    while (mu < m && std::abs(p[mu]) <= tol) ++mu;
    if (std::abs(p[m]) <= tol) return std::nullopt;
    if (mu < d - m) return std::nullopt;  // pole at the origin survives

    std::vector<cplx> core(p.begin() + mu, p.begin() + m + 1);
    std::vector<cplx> zeros(mu - (d - m), cplx{0.0, 0.0});
    if (core.size() > 1) {
        RootResult rr = find_roots(core);
        if (!rr.converged || rr.roots.size() != core.size() - 1) return std::nullopt;
        for (cplx w : rr.roots) {
            if (std::abs(w) >= 1.0 - 1e-12) return std::nullopt;
            zeros.push_back(w);
        }
    }

    std::vector<cplx> q(d + 1);
    for (std::size_t i = 0; i <= d; ++i) q[i] = std::conj(p[d - i]);
    const cplx z0 = std::polar(1.0, 0.7318);
    const cplx target = poly_eval(p, z0) / poly_eval(q, z0);
    cplx factor{1.0, 0.0};
    for (cplx w : zeros) factor *= (z0 - w) / (1.0 - std::conj(w) * z0);
    cplx zeta = target / factor;
    const double zmag = std::abs(zeta);
    if (!(zmag > 0.0) || std::abs(zmag - 1.0) > 1e-6) return std::nullopt;

    FiniteBlaschkeProduct b;
    b.zeta = zeta / zmag;
    b.zeros = std::move(zeros);
    return b;
}

inline double interpolation_residual(const FiniteBlaschkeProduct& b,
                                     const std::vector<cplx>& pts,
                                     const std::vector<cplx>& targets) {
    double r = 0.0;
    for (std::size_t j = 0; j < pts.size(); ++j)
        r = std::max(r, std::abs(evaluate(b, pts[j]) - targets[j]));
    return r;
}

}  // namespace detail

/// Interpolate unimodular boundary data by a finite Blaschke product. The
/// core solver finds null vectors of the real-linear system
/// P(z_j) = phi_j P*(z_j) at escalating degree; a damped least-squares pass
/// over (rotation, zeros) mops up when no null vector yields interior roots.
/// Targets are pre-rotated by conj(phi_0), which makes the residual exactly
/// invariant under a global rotation of the data.
inline FiniteBlaschkeProduct fisher_interpolate(const BoundarySampleSet& K, double epsilon) {
    if (!(epsilon > 0.0)) throw domain_error("fisher_interpolate: epsilon must be positive");
    K.require_unimodular_targets(1e-9);
    const std::size_t J = K.size();
    if (J == 0) throw domain_error("fisher_interpolate: empty sample set");
    const cplx base = K.targets[0] / std::abs(K.targets[0]);
    std::vector<cplx> tau_t(J);
    for (std::size_t j = 0; j < J; ++j) tau_t[j] = K.targets[j] * std::conj(base);

    const auto finish = [&](FiniteBlaschkeProduct b) {
        b.zeta *= base;
        b.zeta /= std::abs(b.zeta);
        return b;
    };

    double best_res = std::numeric_limits<double>::infinity();
    std::optional<FiniteBlaschkeProduct> best_b;

    const std::size_t d_lo = J - 1;
    const std::size_t d_hi = 4 * J + 16;
    for (std::size_t d = d_lo; d <= d_hi; ++d) {
        const std::size_t n = d + 1;
        Eigen::MatrixXd A = Eigen::MatrixXd::Zero(2 * J, 2 * n);
        for (std::size_t j = 0; j < J; ++j) {
            cplx zp{1.0, 0.0};
            for (std::size_t i = 0; i < n; ++i) {
                // Row pair j: sum_i p_i z^i - tau_j sum_i conj(p_{d-i}) z^i = 0,
                // expanded over p_i = x_i + i y_i.
                const cplx a = zp;                  // multiplies p_i
                const cplx bcoef = -tau_t[j] * zp;  // multiplies conj(p_{d-i})
                A(2 * j, 2 * i) += a.real();
                A(2 * j, 2 * i + 1) += -a.imag();
                A(2 * j + 1, 2 * i) += a.imag();
                A(2 * j + 1, 2 * i + 1) += a.real();
                const std::size_t col = 2 * (d - i);
                A(2 * j, col) += bcoef.real();
                A(2 * j, col + 1) += bcoef.imag();
                A(2 * j + 1, col) += bcoef.imag();
                A(2 * j + 1, col + 1) += -bcoef.real();
                zp *= K.points[j];
            }
        }
        // Full V: for d >= J the null space lives beyond the thin columns.
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(A, Eigen::ComputeFullV);
        const Eigen::VectorXd& sv = svd.singularValues();
        const double smax = sv.size() ? sv(0) : 0.0;
        const Eigen::MatrixXd& V = svd.matrixV();

        std::vector<Eigen::VectorXd> cands;
        for (Eigen::Index c = V.cols() - 1; c >= 0 && cands.size() < 4; --c) {
            const bool tiny = c >= sv.size() || sv(c) <= std::max(1e-12, 1e-9 * smax);
            if (tiny || cands.empty())
                cands.push_back(V.col(c));
            else
                break;
        }
        const std::size_t nbase = cands.size();
        for (std::size_t a = 0; a < nbase; ++a)
            for (std::size_t b2 = a + 1; b2 < nbase; ++b2) {
                cands.push_back(cands[a] + cands[b2]);
                cands.push_back(cands[a] - cands[b2]);
            }

        for (const Eigen::VectorXd& v : cands) {
            std::vector<cplx> p(n);
            for (std::size_t i = 0; i < n; ++i) p[i] = cplx{v(2 * i), v(2 * i + 1)};
            auto cand = detail::blaschke_from_selfdual(p);
            if (!cand) continue;
            const double res = detail::interpolation_residual(*cand, K.points, tau_t);
            if (res < best_res) {
                best_res = res;
                best_b = *cand;
            }
            if (res < epsilon) return finish(*cand);
        }
    }

    // Damped least-squares refinement over (rotation angle, zeros in
    // tanh-polar coordinates), started from the best candidate so far.
    if (!best_b) {
        FiniteBlaschkeProduct seed;
        seed.zeros.assign(J, cplx{0.0, 0.0});
        best_b = seed;
        best_res = detail::interpolation_residual(seed, K.points, tau_t);
    }
    const std::size_t nz = best_b->zeros.size();
    std::vector<double> x(1 + 2 * nz);
    x[0] = std::arg(best_b->zeta);
    for (std::size_t k = 0; k < nz; ++k) {
        const double r = std::min(std::abs(best_b->zeros[k]), 0.999);
        x[1 + 2 * k] = std::atanh(r);
        x[2 + 2 * k] = std::arg(best_b->zeros[k]);
    }
    const auto assemble = [&](const std::vector<double>& y) {
        FiniteBlaschkeProduct b;
        b.zeta = std::polar(1.0, y[0]);
        b.zeros.resize(nz);
        for (std::size_t k = 0; k < nz; ++k)
            b.zeros[k] = std::polar(std::tanh(y[1 + 2 * k]), y[2 + 2 * k]);
        return b;
    };
    const auto residual_vec = [&](const std::vector<double>& y, Eigen::VectorXd& r) {
        const FiniteBlaschkeProduct b = assemble(y);
        for (std::size_t j = 0; j < J; ++j) {
            const cplx e = evaluate(b, K.points[j]) - tau_t[j];
            r(2 * j) = e.real();
            r(2 * j + 1) = e.imag();
        }
    };
    const std::size_t np = x.size();
    Eigen::VectorXd r0(2 * J), r1(2 * J), rtmp(2 * J);
    residual_vec(x, r0);
    double lambda = 1e-3;
    for (int it = 0; it < 300; ++it) {
        Eigen::MatrixXd Jm(2 * J, np);
        for (std::size_t c = 0; c < np; ++c) {
            std::vector<double> xp = x, xm = x;
            const double h = 1e-6;
            xp[c] += h;
            xm[c] -= h;
            residual_vec(xp, rtmp);
            residual_vec(xm, r1);
            Jm.col(c) = (rtmp - r1) / (2.0 * h);
        }
        const Eigen::MatrixXd H = Jm.transpose() * Jm;
        const Eigen::VectorXd g = Jm.transpose() * r0;
        bool stepped = false;
        for (int tries = 0; tries < 8; ++tries) {
            Eigen::MatrixXd Hl = H;
            for (std::size_t i = 0; i < np; ++i) Hl(i, i) += lambda;
            const Eigen::VectorXd dx = Hl.ldlt().solve(-g);
            std::vector<double> xn = x;
            for (std::size_t i = 0; i < np; ++i) xn[i] += dx(i);
            residual_vec(xn, r1);
            if (r1.squaredNorm() < r0.squaredNorm()) {
                x = xn;
                r0 = r1;
                lambda = std::max(lambda * 0.5, 1e-12);
                stepped = true;
                break;
            }
            lambda *= 4.0;
        }
        if (!stepped) break;
        if (r0.norm() < 1e-14) break;
    }
    {
        const FiniteBlaschkeProduct b = assemble(x);
        const double res = detail::interpolation_residual(b, K.points, tau_t);
        if (res < best_res) {
            best_res = res;
            best_b = b;
        }
    }
    if (best_res < epsilon) return finish(*best_b);
    std::ostringstream msg;
    msg << "fisher_interpolate: residual " << best_res << " exceeds epsilon " << epsilon;
    throw numerics_error(msg.str());
}

}  // namespace blab
