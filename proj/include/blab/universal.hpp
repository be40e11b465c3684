#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "blab/blaschke.hpp"
#include "blab/sample_set.hpp"
#include "blab/simultaneous.hpp"
#include "blab/types.hpp"

namespace blab {

/// Allowances a stage of the inductive product is built against. Stage 0 has
/// only the trivial ones; stage k >= 1 gets boundary 1/(2(k+1)) and an
/// interior near-one allowance 2^{-k} on the previous stage's disc.
struct StageBudget {
    double boundary = 1.0;
    double conv = 1.0;
};

/// What a stage actually achieved, next to the radii that scope the claims.
struct StageCertificate {
    std::size_t stage = 0;
    double r = 0.0;                  // dilation radius the stage serves
    double annulus_base = 0.0;       // oscillation allowance holds beyond this radius
    double boundary_residual = 0.0;  // worst K distance of the dilated factor to its data
    double oscillation = 0.0;        // reciprocal-partial drift between radius r and 1 on K
    double conv_bound = 0.0;         // analytic near-one bound on the previous disc
    double conv_residual = 0.0;      // measured near-one residual on the previous disc's rim
};

/// Truncation of an infinite Blaschke product whose dilates visit a finite
/// list of boundary data vectors on K, one vector per stage, with certified
/// budgets. If a stage could not be built, failed_stage names it and the
/// lists cover only the stages before it; targets always keeps the full
/// request.
struct TruncatedUniversalProduct {
    std::vector<FiniteBlaschkeProduct> factors;
    std::vector<double> radii;
    std::vector<std::vector<cplx>> targets;
    std::vector<StageBudget> budgets;
    std::vector<StageCertificate> certificates;
    BoundarySampleSet K;
    std::optional<std::size_t> failed_stage;
};

/// Increasing radii in (0,1); the finite stand-in for a sequence tending
/// to 1.
struct RadiusSchedule {
    std::vector<double> rho;

    RadiusSchedule() = default;
    explicit RadiusSchedule(std::vector<double> r) : rho(std::move(r)) {
        for (std::size_t i = 0; i < rho.size(); ++i) {
            if (!(rho[i] > 0.0 && rho[i] < 1.0))
                throw domain_error("radius schedule: radii must lie in (0,1)");
            if (i > 0 && !(rho[i] > rho[i - 1]))
                throw domain_error("radius schedule: radii must be strictly increasing");
        }
    }
};

inline std::size_t total_degree(const TruncatedUniversalProduct& T) {
    std::size_t d = 0;
    for (const auto& b : T.factors) d += b.zeros.size();
    return d;
}

namespace detail {

/// Worst K-sample distance between the reciprocal of the dilated partial
/// product and the reciprocal of its boundary values.
inline double reciprocal_oscillation(const FiniteBlaschkeProduct& partial,
                                     const std::vector<cplx>& points, double r) {
    double worst = 0.0;
    for (cplx zeta : points) {
        const cplx inner = evaluate(partial, r * zeta);
        if (!(std::abs(inner) > 1e-300)) return std::numeric_limits<double>::infinity();
        const cplx outer = evaluate(partial, zeta);
        worst = std::max(worst, std::abs(1.0 / inner - 1.0 / outer));
    }
    return worst;
}

/// Smallest sampled radius beyond which the reciprocal of the partial
/// product stays within the allowance of its boundary values on K, all the
/// way up. The sweep starts just outside the outermost zero, where the
/// reciprocal exists.
inline double annulus_base_radius(const FiniteBlaschkeProduct& partial,
                                  const std::vector<cplx>& points, double allowance) {
    double rz = 0.0;
    for (cplx a : partial.zeros) rz = std::max(rz, std::abs(a));
    const double base = rz + (1.0 - rz) * 1e-3;
    const double top = 1.0 - 1e-9;
    const int steps = 1024;
    const double step = (top - base) / steps;
    double last_bad = -1.0;
    for (int i = 0; i < steps; ++i) {
        const double r = base + step * i;
        if (!(reciprocal_oscillation(partial, points, r) < allowance)) last_bad = r;
    }
    if (last_bad < 0.0) return base;
    return std::min(last_bad + step, top);
}

/// Analytic near-one bound for a far-field-normalized corrector product on
/// |z| <= R: each factor differs from its unimodular limit by at most
/// (1-|a|)(1+R)/(1-|a|R), and the deviations compound at worst
/// exponentially.
inline double near_one_bound(const std::vector<cplx>& zeros, double R) {
    double sum = 0.0;
    for (cplx a : zeros) {
        const double rho = std::abs(a);
        sum += (1.0 - rho) * (1.0 + R) / (1.0 - rho * R);
    }
    return std::expm1(sum) + 1e-12;
}

inline double rim_residual_to_one(const FiniteBlaschkeProduct& b, double R) {
    double worst = 0.0;
    for (int i = 0; i < 512; ++i) {
        const cplx z = std::polar(R, 2.0 * std::numbers::pi * i / 512.0);
        worst = std::max(worst, std::abs(evaluate(b, z) - 1.0));
    }
    return worst;
}

}  // namespace detail

/// Build the truncated product stage by stage. Stage 0 interpolates the
/// first data vector at one radius; stage k >= 1 first locates the radius
/// beyond which the previous partial product's reciprocal has settled on K,
/// then places one zero per node so the dilated factor matches the data
/// divided by the partial product's boundary values, while staying within
/// 2^{-k} of the constant 1 on the previous stage's disc (certified
/// analytically from the zero moduli and re-measured on the rim). Radii come
/// from the schedule where it has entries, otherwise from halving the gap to
/// 1; auto radii escalate toward 1 until the interior allowance clears,
/// pinned radii are used as given or the stage is marked failed.
inline TruncatedUniversalProduct build_universal(
    const BoundarySampleSet& K, const std::vector<std::vector<cplx>>& targets,
    const std::optional<RadiusSchedule>& schedule = std::nullopt) {
    if (K.points.empty()) throw domain_error("build_universal: empty sample set");
    if (targets.empty()) throw domain_error("build_universal: no target vectors");
    if (targets.size() > 13)
        throw domain_error("build_universal: at most 13 stages (degrees grow per stage)");
    for (const auto& t : targets) {
        if (t.size() != K.points.size())
            throw domain_error("build_universal: target vector length must match the sample set");
        for (cplx v : t)
            if (!(std::abs(v) <= 1.0 + 1e-12))
                throw domain_error("build_universal: targets must be bounded by one");
    }

    TruncatedUniversalProduct T;
    T.targets = targets;
    T.K = K;

    const FiniteBlaschkeProduct unit{cplx{1.0, 0.0}, {}};
    const auto pinned_radius = [&](std::size_t stage) -> std::optional<double> {
        if (schedule && stage < schedule->rho.size()) return schedule->rho[stage];
        return std::nullopt;
    };

    // Stage 0: plain interpolation at one radius; allowance is the trivial 1.
    {
        const std::optional<double> pin = pinned_radius(0);
        double r = pin.value_or(0.9);
        std::optional<detail::CorrectorFit> fit;
        for (double tol : {0.25, 0.9}) {
            double rr = r;
            for (int push = 0; push < 8 && !fit; ++push) {
                fit = detail::solve_corrector(unit, BoundarySampleSet{K.points, targets[0]}, rr, tol);
                if (fit) r = rr;
                if (pin) break;
                rr = 0.5 * (1.0 + rr);
            }
            if (fit) break;
        }
        if (!fit) {
            T.failed_stage = 0;
            return T;
        }
        T.factors.push_back(FiniteBlaschkeProduct{fit->rotation, fit->zeros});
        T.radii.push_back(r);
        T.budgets.push_back(StageBudget{1.0, 1.0});
        T.certificates.push_back(StageCertificate{0, r, 0.0, fit->err, 0.0, 0.0, 0.0});
    }

    FiniteBlaschkeProduct partial = T.factors[0];
    for (std::size_t m = 1; m < targets.size(); ++m) {
        const double boundary_budget = 1.0 / (2.0 * (m + 1.0));
        const double conv_budget = std::ldexp(1.0, -static_cast<int>(m));
        const double prev_r = T.radii[m - 1];

        const double R0 = detail::annulus_base_radius(partial, K.points, boundary_budget);
        const double floor_r = std::max(prev_r, R0);
        if (!(floor_r < 1.0 - 1e-9)) {
            T.failed_stage = m;
            return T;
        }

        std::vector<cplx> psi(K.points.size());
        for (std::size_t j = 0; j < K.points.size(); ++j)
            psi[j] = targets[m][j] / evaluate(partial, K.points[j]);
        const BoundarySampleSet stage_data{K.points, psi};

        const std::optional<double> pin = pinned_radius(m);
        if (pin && !(*pin > floor_r)) {
            T.failed_stage = m;
            return T;
        }
        double r = pin ? *pin : floor_r + (1.0 - floor_r) / 2.0;

        bool done = false;
        StageCertificate cert{m, r, R0, 0.0, 0.0, 0.0, 0.0};
        FiniteBlaschkeProduct factor;
        for (int attempt = 0; attempt < 48 && !done; ++attempt) {
            const double osc = detail::reciprocal_oscillation(partial, K.points, r);
            const auto fit = detail::solve_corrector(unit, stage_data, r, boundary_budget * 0.9);
            if (osc < boundary_budget && fit) {
                const double bound = detail::near_one_bound(fit->zeros, prev_r);
                const FiniteBlaschkeProduct cand{fit->rotation, fit->zeros};
                const double meas =
                    bound < conv_budget ? detail::rim_residual_to_one(cand, prev_r) : bound;
                if (bound < conv_budget && meas < conv_budget) {
                    factor = cand;
                    cert = StageCertificate{m, r, R0, fit->err, osc, bound, meas};
                    done = true;
                    break;
                }
            }
            if (pin) break;
            r = 0.5 * (1.0 + r);
        }
        if (!done) {
            T.failed_stage = m;
            return T;
        }

        T.factors.push_back(factor);
        T.radii.push_back(r);
        T.budgets.push_back(StageBudget{boundary_budget, conv_budget});
        T.certificates.push_back(cert);
        partial = multiply(partial, factor);
    }
    return T;
}

/// Product of the first upto+1 stored factors at the dilated point rz.
inline cplx evaluate_partial(const TruncatedUniversalProduct& T, std::size_t upto, double r,
                             cplx z) {
    if (upto >= T.factors.size()) throw domain_error("evaluate_partial: stage out of range");
    if (!(r > 0.0 && r < 1.0)) throw domain_error("evaluate_partial: radius must lie in (0,1)");
    if (!(std::abs(z) <= 1.0 + 1e-12))
        throw domain_error("evaluate_partial: point outside the closed disc");
    cplx v{1.0, 0.0};
    for (std::size_t k = 0; k <= upto; ++k) v *= evaluate(T.factors[k], r * z);
    return v;
}

struct TraceRow {
    std::size_t stage = 0;
    double r = 0.0;
    double measured = 0.0;
    double certified = 0.0;
};

/// Per-stage audit: the whole truncated product, dilated at the stage
/// radius, against that stage's data on K. The certified column is
/// 1/(k+1) + 2^{-k} plus grid slack: the stage budget plus the settled
/// reciprocal drift plus the worst near-one tail.
inline std::vector<TraceRow> error_trace(const TruncatedUniversalProduct& T) {
    std::vector<TraceRow> rows;
    if (T.factors.empty()) return rows;
    const std::size_t last = T.factors.size() - 1;
    for (std::size_t k = 0; k < T.factors.size(); ++k) {
        double e = 0.0;
        for (std::size_t j = 0; j < T.K.points.size(); ++j)
            e = std::max(e, std::abs(evaluate_partial(T, last, T.radii[k], T.K.points[j]) -
                                     T.targets[k][j]));
        const double certified =
            1.0 / (k + 1.0) + std::ldexp(1.0, -static_cast<int>(k)) + 1e-6;
        rows.push_back(TraceRow{k, T.radii[k], e, certified});
    }
    return rows;
}

struct ProbeReport {
    std::size_t probe = 0;
    double best_radius = 0.0;
    double best_error = std::numeric_limits<double>::infinity();
};

struct MembershipReport {
    std::vector<ProbeReport> probes;
    bool pass = false;
};

/// Finite surrogate for membership in the dilate-universality class over a
/// fixed schedule: for each probe vector, the schedule radius whose dilate
/// of f comes closest on K, and whether every probe gets within tol.
inline MembershipReport check_membership(const Evaluator& f, const BoundarySampleSet& K,
                                         const std::vector<std::vector<cplx>>& probes,
                                         const RadiusSchedule& schedule, double tol) {
    if (schedule.rho.empty()) throw domain_error("check_membership: empty schedule");
    for (const auto& p : probes)
        if (p.size() != K.points.size())
            throw domain_error("check_membership: probe length must match the sample set");
    MembershipReport rep;
    rep.pass = true;
    for (std::size_t i = 0; i < probes.size(); ++i) {
        ProbeReport pr;
        pr.probe = i;
        for (double r : schedule.rho) {
            double e = 0.0;
            for (std::size_t j = 0; j < K.points.size(); ++j)
                e = std::max(e, std::abs(f(r * K.points[j]) - probes[i][j]));
            if (e < pr.best_error) {
                pr.best_error = e;
                pr.best_radius = r;
            }
        }
        if (!(pr.best_error <= tol)) rep.pass = false;
        rep.probes.push_back(pr);
    }
    return rep;
}

}  // namespace blab
