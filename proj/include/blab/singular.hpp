#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "blab/approx.hpp"
#include "blab/blaschke.hpp"
#include "blab/region.hpp"
#include "blab/sample_set.hpp"
#include "blab/simultaneous.hpp"
#include "blab/types.hpp"

namespace blab {

/// Zero-free approximant S = exp((B+1)/(B-1)). The exponent maps the closed
/// ball of B values into {Re <= 0}, so |S| <= 1 on the disc, |S| = 1 on the
/// circle away from the finitely many directions where B reaches 1, and S
/// never vanishes: |S(z)| >= exp(-(1+|B(z)|)/(1-|B(z)|)).
struct SingularInnerSurrogate {
    FiniteBlaschkeProduct B;
};

inline cplx surrogate_eval(const SingularInnerSurrogate& S, cplx z) {
    const cplx b = evaluate(S.B, z);
    if (std::abs(b - 1.0) < 1e-9)
        throw domain_error("surrogate_eval: singular direction, B(z) is too close to 1");
    return std::exp((b + 1.0) / (b - 1.0));
}

namespace detail {

inline cplx cayley_exp(cplx w) { return std::exp((w + 1.0) / (w - 1.0)); }

/// Advance a continuous log f along one path segment. A segment is accepted
/// only when both halves change mildly AND their principal increments
/// compose to the endpoint increment: an endpoint ratio near 1 alone can
/// hide a full winding of the argument (e^{x - 2 pi i} looks tame), and the
/// midpoint of such a segment exposes it. Near-essential decay (values down
/// to ~1e-300) is legal, only a numerical zero is not.
inline void continue_log_segment(const Evaluator& f, double R, double th, double ta, cplx fa,
                                 double tb, cplx fb, cplx& acc, int depth) {
    const double tm = 0.5 * (ta + tb);
    const cplx fm = f(std::polar(tm * R, tm * th));
    if (!(std::abs(fm) >= 1e-300))
        throw numerics_error("cayley_log: f vanishes on the continuation path");
    const cplx r1 = fm / fa;
    const cplx r2 = fb / fm;
    if (std::abs(r1 - 1.0) <= 0.4 && std::abs(r2 - 1.0) <= 0.4) {
        const cplx whole = std::log(fb / fa);
        const cplx halves = std::log(r1) + std::log(r2);
        if (std::abs(whole - halves) < 1e-9) {
            acc += whole;
            return;
        }
    }
    if (depth >= 48) throw numerics_error("cayley_log: branch continuation did not converge");
    continue_log_segment(f, R, th, ta, fa, tm, fm, acc, depth + 1);
    continue_log_segment(f, R, th, tm, fm, tb, fb, acc, depth + 1);
}

/// Continuous branch of log f at z, tracked along the spiral
/// t -> (t|z|) e^{i t arg z} from the principal value at the origin. A
/// zero-free f on the simply connected disc makes the branch independent of
/// the path, so the spiral is just a deterministic choice.
inline cplx spiral_log(const Evaluator& f, cplx z) {
    const cplx at0 = f(cplx{0.0, 0.0});
    if (!(std::abs(at0) >= 1e-300))
        throw numerics_error("cayley_log: f vanishes on the continuation path");
    cplx acc = std::log(at0);
    const double R = std::abs(z);
    if (R == 0.0) return acc;
    const double th = std::arg(z);

    // Coarse pass resolves the winding; bisection inside each cell resolves
    // the modulus swings near the essential directions.
    const std::size_t base = 64;
    cplx prev = at0;
    for (std::size_t k = 1; k <= base; ++k) {
        const double ta = static_cast<double>(k - 1) / static_cast<double>(base);
        const double tb = static_cast<double>(k) / static_cast<double>(base);
        const cplx fb = f(std::polar(tb * R, tb * th));
        if (!(std::abs(fb) >= 1e-300))
            throw numerics_error("cayley_log: f vanishes on the continuation path");
        continue_log_segment(f, R, th, ta, prev, tb, fb, acc, 0);
        prev = fb;
    }
    return acc;
}

}  // namespace detail

/// f_0 = (log f + 1)/(log f - 1) with a continuous logarithm branch. The grid
/// is the validation set: f must be zero-free (modulus >= 1e-12) and inside
/// the unit ball there, and the transform must invert back to f through the
/// exponential to 1e-8 at every grid point.
inline Evaluator cayley_log(const Evaluator& f, const std::vector<cplx>& grid) {
    for (cplx z : grid) {
        const cplx v = f(z);
        if (std::abs(v) < 1e-12) throw domain_error("cayley_log: f vanishes on the grid");
        if (std::abs(v) > 1.0 + 1e-9)
            throw domain_error("cayley_log: f leaves the unit ball on the grid");
    }
    Evaluator f0 = [f](cplx z) {
        const cplx lg = detail::spiral_log(f, z);
        return (lg + 1.0) / (lg - 1.0);
    };
    for (cplx z : grid) {
        const cplx w = f0(z);
        if (std::abs(w) > 1.0 + 1e-9)
            throw numerics_error("cayley_log: transform left the unit ball");
        if (std::abs(detail::cayley_exp(w) - f(z)) > 1e-8)
            throw numerics_error("cayley_log: round trip through the exponential failed");
    }
    return f0;
}

namespace detail {

/// Pointwise pre-image of a target under the exponential: any logarithm
/// branch returns exactly to the target, so the principal one keeps the
/// choice deterministic.
inline cplx cayley_target(cplx phi) {
    const cplx lg = std::log(phi);
    cplx w = (lg + 1.0) / (lg - 1.0);
    const double m = std::abs(w);
    if (m > 1.0) w /= m;  // rounding guard; Re log <= 0 keeps |w| <= 1
    return w;
}

/// Budget for the inner Blaschke stage: half the distance from the
/// transformed data hull to the singular point 1, capped by the measured
/// stiffness of w -> exp((w+1)/(w-1)) on rings around the data, halved once
/// more for safety. |E'(w)| = 2 |E(w)| / |w-1|^2 exactly.
inline double singular_budget(const std::vector<cplx>& phi0, const Evaluator& f0,
                              const std::vector<cplx>& grid, double epsilon) {
    std::vector<cplx> data = phi0;
    data.reserve(data.size() + grid.size());
    for (cplx z : grid) data.push_back(f0(z));

    double dist1 = 2.0;
    for (cplx d : data) dist1 = std::min(dist1, std::abs(d - 1.0));
    if (dist1 < 1e-6)
        throw domain_error(
            "singular pipeline: transformed data within 1e-6 of the essential singularity");
    const double delta0 = 0.5 * dist1;

    double lam = 0.0;
    const auto probe = [&lam](cplx z) {
        const double m = std::abs(z);
        if (m > 1.0) z /= m;  // the approximant's values stay in the closed disc
        lam = std::max(lam, 2.0 * std::abs(cayley_exp(z)) / sqr(std::abs(z - 1.0)));
    };
    for (cplx d : data) {
        probe(d);
        for (double s : {0.5, 1.0})
            for (int i = 0; i < 16; ++i) probe(d + std::polar(s * delta0, tau * i / 16.0));
    }
    return 0.5 * std::min(delta0, epsilon / std::max(lam, 1e-12));
}

}  // namespace detail

/// Circle variant: pull the unimodular targets and the interior function
/// through the logarithm, steer a Blaschke product onto the pulled-back data
/// at the measured budget, and exponentiate. Residuals of the exponentiated
/// surrogate are re-verified against the original data.
inline SingularInnerSurrogate simultaneous_singular_circle(const BoundarySampleSet& K,
                                                           const Evaluator& f,
                                                           const InteriorRegion& L,
                                                           double epsilon) {
    if (!(epsilon > 0.0))
        throw domain_error("simultaneous_singular_circle: epsilon must be positive");
    K.require_unimodular_targets();
    const std::vector<cplx> fine = L.verification_grid();
    const Evaluator f0 = cayley_log(f, fine);

    std::vector<cplx> phi0(K.size());
    for (std::size_t j = 0; j < K.size(); ++j) {
        const cplx lg{0.0, std::arg(K.targets[j])};
        phi0[j] = (lg + 1.0) / (lg - 1.0);
        phi0[j] /= std::abs(phi0[j]);
    }

    const double delta = detail::singular_budget(phi0, f0, fine, epsilon);
    const SimultaneousResult inner =
        simultaneous_circle(BoundarySampleSet{K.points, phi0}, f0, L, delta);

    SingularInnerSurrogate S{inner.B};
    double err_K = 0.0, err_L = 0.0;
    for (std::size_t j = 0; j < K.size(); ++j)
        err_K = std::max(err_K, std::abs(surrogate_eval(S, K.points[j]) - K.targets[j]));
    for (cplx z : fine) err_L = std::max(err_L, std::abs(surrogate_eval(S, z) - f(z)));
    if (!(err_K < epsilon && err_L < epsilon))
        throw pipeline_error(
            "simultaneous_singular_circle: exponentiated residuals missed the budget",
            "surrogate errors: K " + std::to_string(err_K) + ", L " + std::to_string(err_L) +
                "; inner budget " + std::to_string(delta));
    return S;
}

/// Disc variant result: the dilation threshold plus a builder valid for any
/// radius in (r0, 1). Each radius gets its own verified construction.
struct SingularDiscFamily {
    double r0 = 0.0;
    std::function<SingularInnerSurrogate(double)> at;
};

/// Disc variant: targets of modulus at most one (and at least 1e-6, since a
/// zero-free surrogate's dilate cannot reach arbitrarily small values at a
/// fixed budget). The dilated surrogate S(r z_j) meets the targets, S tracks
/// f on L.
inline SingularDiscFamily simultaneous_singular_disc(const BoundarySampleSet& K,
                                                     const Evaluator& f, const InteriorRegion& L,
                                                     double epsilon) {
    if (!(epsilon > 0.0))
        throw domain_error("simultaneous_singular_disc: epsilon must be positive");
    K.require_ball_targets();
    for (cplx t : K.targets)
        if (std::abs(t) < 1e-6)
            throw domain_error(
                "simultaneous_singular_disc: target modulus below 1e-6 is unreachable by a "
                "zero-free dilate");
    const std::vector<cplx> fine = L.verification_grid();
    const Evaluator f0 = cayley_log(f, fine);

    std::vector<cplx> phi0(K.size());
    for (std::size_t j = 0; j < K.size(); ++j) phi0[j] = detail::cayley_target(K.targets[j]);

    const double delta = detail::singular_budget(phi0, f0, fine, epsilon);
    const BoundarySampleSet K0{K.points, phi0};

    // Default run pins the threshold; the builder re-runs the deterministic
    // pipeline with the pinned radius and re-verifies the exponentiated
    // residuals for that radius.
    const SimultaneousResult probe = simultaneous_disc(K0, f0, L, delta);
    SingularDiscFamily fam;
    fam.r0 = probe.r0.value();
    fam.at = [K, f, L, fine, K0, f0, delta, epsilon](double r) {
        const SimultaneousResult res = simultaneous_disc(K0, f0, L, delta, r);
        SingularInnerSurrogate S{res.B};
        double err_K = 0.0, err_L = 0.0;
        for (std::size_t j = 0; j < K.size(); ++j)
            err_K = std::max(err_K, std::abs(surrogate_eval(S, r * K.points[j]) - K.targets[j]));
        for (cplx z : fine) err_L = std::max(err_L, std::abs(surrogate_eval(S, z) - f(z)));
        if (!(err_K < epsilon && err_L < epsilon))
            throw pipeline_error(
                "simultaneous_singular_disc: exponentiated residuals missed the budget",
                "surrogate errors at r=" + std::to_string(r) + ": K " + std::to_string(err_K) +
                    ", L " + std::to_string(err_L) + "; inner budget " + std::to_string(delta));
        return S;
    };
    return fam;
}

}  // namespace blab
