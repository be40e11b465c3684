#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "blab/approx.hpp"
#include "blab/blaschke.hpp"
#include "blab/moebius.hpp"
#include "blab/peak.hpp"
#include "blab/region.hpp"
#include "blab/sample_set.hpp"
#include "blab/transforms.hpp"
#include "blab/types.hpp"

namespace blab {

/// One audit row of a multi-stage construction: what a stage was asked to
/// achieve and what it measured afterwards. achieved < 0 marks a stage that
/// produced no number (a failed or skipped branch).
struct BudgetEntry {
    std::string stage;
    double requested = 0.0;
    double achieved = 0.0;
};

struct SimultaneousResult {
    FiniteBlaschkeProduct B;
    double err_K = 0.0;
    double err_L = 0.0;
    std::optional<double> r0;
    std::optional<double> r_used;
    std::vector<BudgetEntry> budget_log;
};

namespace detail {

inline std::string render_budget_log(const std::vector<BudgetEntry>& log) {
    std::string s;
    for (const auto& e : log) {
        s += e.stage;
        s += ": requested ";
        s += std::to_string(e.requested);
        s += ", achieved ";
        s += std::to_string(e.achieved);
        s += '\n';
    }
    return s;
}

/// Thrown when the caller pinned a dilation radius below the computed
/// threshold. Distinct from route failures: it must reach the caller instead
/// of triggering a fallback construction.
struct radius_rejection : domain_error {
    using domain_error::domain_error;
};

inline SimultaneousResult simul_unimodular_budgeted(const BoundarySampleSet& K,
                                                    const InteriorRegion& L, double eps_K,
                                                    double eps_L,
                                                    std::vector<BudgetEntry> log) {
    if (!(eps_K > 0.0 && eps_L > 0.0))
        throw domain_error("simul_unimodular_one: epsilon must be positive");
    K.require_unimodular_targets();
    const std::size_t J = K.size();
    if (J == 0) throw domain_error("simul_unimodular_one: empty sample set");
    const std::vector<cplx> probes = L.verification_grid();

    for (int k = 2;; ++k) {
        const double step = std::exp2(-k);  // 1 - w
        if (step < 1e-6) break;
        const double w = 1.0 - step;

        // psi(z) = phi_w(phi(z)) / z with phi_w(y) = (y - w)/(1 - w y);
        // unimodular since phi_w preserves the circle. Renormalize to kill
        // rounding drift before the interpolation validates its inputs.
        std::vector<cplx> psi(J);
        for (std::size_t j = 0; j < J; ++j) {
            const cplx y = (K.targets[j] - w) / (1.0 - w * K.targets[j]);
            psi[j] = y / K.points[j];
            psi[j] /= std::abs(psi[j]);
        }

        const double fisher_tol = sqr(step);
        FiniteBlaschkeProduct cand;
        double residual = 0.0;
        try {
            const FiniteBlaschkeProduct B0 =
                fisher_interpolate(BoundarySampleSet{K.points, psi}, fisher_tol);
            residual = interpolation_residual(B0, K.points, psi);
            const MoebiusAutomorphism back{cplx{-w, 0.0}, cplx{1.0, 0.0}};
            cand = compose_moebius_after(back, prepend_zero_at_origin(B0));
        } catch (const error&) {
            log.push_back({"unimodular stage w=" + std::to_string(w), fisher_tol, -1.0});
            continue;
        }

        // Exact origin anchor of the construction: z B0(z) vanishes at 0 and
        // the backing automorphism sends 0 to w.
        if (std::abs(evaluate(cand, cplx{0.0, 0.0}) - w) > 1e-10)
            throw numerics_error("simul_unimodular_one: origin anchor drifted");

        double err_K = 0.0;
        for (std::size_t j = 0; j < J; ++j)
            err_K = std::max(err_K, std::abs(evaluate(cand, K.points[j]) - K.targets[j]));
        double err_L = 0.0;
        for (cplx p : probes) err_L = std::max(err_L, std::abs(evaluate(cand, p) - 1.0));

        // The pull-back chain certifies err_K <= Lip * residual; a violation
        // beyond rounding means the composition itself is broken.
        const double certified = (1.0 + w) * step + (1.0 + w) / step * residual;
        if (err_K > certified + 1e-9)
            throw numerics_error("simul_unimodular_one: certified boundary bound violated");
        log.push_back({"unimodular stage w=" + std::to_string(w) + " boundary", eps_K, err_K});
        log.push_back({"unimodular stage w=" + std::to_string(w) + " interior", eps_L, err_L});
        if (err_K < eps_K && err_L < eps_L) {
            SimultaneousResult res;
            res.B = std::move(cand);
            res.err_K = err_K;
            res.err_L = err_L;
            res.budget_log = std::move(log);
            return res;
        }
    }
    throw pipeline_error("simul_unimodular_one: schedule exhausted before both budgets held",
                         render_budget_log(log));
}

}  // namespace detail

/// Finite Blaschke product within epsilon of unimodular targets on K and of
/// the constant 1 on L. Walks w = 1 - 2^-k upward; each stage interpolates
/// the pulled-back targets, undoes the pull-back, and measures both errors.
inline SimultaneousResult simul_unimodular_one(const BoundarySampleSet& K,
                                               const InteriorRegion& L, double epsilon) {
    return detail::simul_unimodular_budgeted(K, L, epsilon, epsilon, {});
}

/// Finite Blaschke product within epsilon of unimodular targets on K and of
/// an arbitrary ball function f on L: approximate f on L first, then steer
/// the boundary with a factor that stays near 1 on L.
inline SimultaneousResult simultaneous_circle(const BoundarySampleSet& K, const Evaluator& f,
                                              const InteriorRegion& L, double epsilon) {
    if (!(epsilon > 0.0)) throw domain_error("simultaneous_circle: epsilon must be positive");
    K.require_unimodular_targets();
    const std::size_t J = K.size();
    if (J == 0) throw domain_error("simultaneous_circle: empty sample set");

    std::vector<BudgetEntry> log;
    const FiniteBlaschkeProduct B0 = caratheodory_approximate(f, L, epsilon / 2.0);
    const std::vector<cplx> fine = L.verification_grid();
    double base_err = 0.0;
    for (cplx z : fine) base_err = std::max(base_err, std::abs(evaluate(B0, z) - f(z)));
    log.push_back({"interior base", epsilon / 2.0, base_err});

    // |B0| = 1 on the circle, so the modified targets are unimodular.
    std::vector<cplx> modified(J);
    for (std::size_t j = 0; j < J; ++j) {
        modified[j] = K.targets[j] / evaluate(B0, K.points[j]);
        modified[j] /= std::abs(modified[j]);
    }
    SimultaneousResult sub = detail::simul_unimodular_budgeted(
        BoundarySampleSet{K.points, modified}, L, epsilon, epsilon / 2.0, std::move(log));

    SimultaneousResult res;
    res.B = multiply(B0, sub.B);
    res.budget_log = std::move(sub.budget_log);
    for (std::size_t j = 0; j < J; ++j)
        res.err_K = std::max(res.err_K, std::abs(evaluate(res.B, K.points[j]) - K.targets[j]));
    for (cplx z : fine) res.err_L = std::max(res.err_L, std::abs(evaluate(res.B, z) - f(z)));
    res.budget_log.push_back({"product boundary", epsilon, res.err_K});
    res.budget_log.push_back({"product interior", epsilon, res.err_L});
    if (!(res.err_K < epsilon && res.err_L < epsilon))
        throw pipeline_error("simultaneous_circle: product stage missed its budget",
                             detail::render_budget_log(res.budget_log));
    return res;
}

namespace detail {

/// Dilate-and-reapproximate route: dress the interior approximant with a
/// boundary extension, read a continuity radius off the dressed function,
/// then reapproximate on the union of L and the dilated node set.
inline SimultaneousResult disc_route_joint(const BoundarySampleSet& K, const Evaluator& f,
                                           const FiniteBlaschkeProduct& Bf,
                                           const InteriorRegion& L, double epsilon,
                                           std::optional<double> r_request,
                                           std::vector<BudgetEntry> log) {
    double gap = tau;
    for (std::size_t i = 0; i < K.size(); ++i)
        for (std::size_t j = i + 1; j < K.size(); ++j)
            gap = std::min(gap, std::abs(std::arg(K.points[i] / K.points[j])));

    // Grid fine enough that the V arcs of the default geometry are resolved.
    std::size_t N = 4096;
    while (N < (std::size_t{1} << 17) && 0.225 * gap * static_cast<double>(N) < 8.0 * tau + 1.0)
        N *= 2;
    const BoundaryGrid grid(N);
    const PeakSpec spec = make_peak_spec(K, epsilon / 3.0, grid);
    const RelativeExtension rel = extend_relative(K, Bf, spec, grid);
    log.push_back({"boundary dressing", epsilon / 3.0, rel.err_K});

    const std::vector<cplx> fine = L.verification_grid();
    double dressing_L = 0.0;
    for (cplx z : fine)
        dressing_L = std::max(dressing_L, std::abs(rel.value(z) - evaluate(Bf, z)));
    log.push_back({"dressing interior drift", epsilon / 2.0, dressing_L});
    if (!(dressing_L < epsilon / 2.0))
        throw numerics_error("joint route: boundary dressing disturbs the interior");

    // Boundary modulus of continuity with a 2x safety factor fixes the
    // dilation threshold: below it the dilate may move values by more than
    // the budget permits.
    double worst_step = 0.0;
    for (std::size_t k = 0; k < N; ++k)
        worst_step = std::max(
            worst_step, std::abs(rel.boundary.values[(k + 1) % N] - rel.boundary.values[k]));
    const double lip = 2.0 * worst_step * static_cast<double>(N) / tau;
    const double r0 =
        std::clamp(1.0 - (epsilon / 3.0) / std::max(lip, 1e-9), 0.0, 1.0 - 1e-12);
    log.push_back({"dilation threshold", 0.0, r0});
    if (r_request && !(*r_request > r0 && *r_request < 1.0))
        throw radius_rejection("simultaneous_disc: requested radius outside (r0, 1); r0 = " +
                               std::to_string(r0));
    const double r = r_request ? *r_request : 0.5 * (1.0 + r0);

    std::vector<cplx> joint = L.grid_points();
    std::vector<cplx> joint_fine = fine;
    for (cplx z : K.points) {
        joint.push_back(r * z);
        joint_fine.push_back(r * z);
    }
    const Evaluator g = [&rel](cplx z) { return rel.value(z); };
    const FiniteBlaschkeProduct B = caratheodory_on_grids(g, joint, joint_fine, epsilon / 3.0);
    double joint_err = 0.0;
    for (cplx z : joint_fine) joint_err = std::max(joint_err, std::abs(evaluate(B, z) - g(z)));
    log.push_back({"joint reapproximation", epsilon / 3.0, joint_err});

    SimultaneousResult res;
    res.B = B;
    for (std::size_t j = 0; j < K.size(); ++j)
        res.err_K = std::max(res.err_K, std::abs(evaluate(B, r * K.points[j]) - K.targets[j]));
    for (cplx z : fine) res.err_L = std::max(res.err_L, std::abs(evaluate(B, z) - f(z)));
    log.push_back({"dilated boundary", epsilon, res.err_K});
    log.push_back({"interior", epsilon, res.err_L});
    if (!(res.err_K < epsilon && res.err_L < epsilon))
        throw numerics_error("joint route: final residuals missed the budget");
    res.r0 = r0;
    res.r_used = r;
    res.budget_log = std::move(log);
    return res;
}

struct CorrectorFit {
    std::vector<cplx> zeros;
    cplx rotation{1.0, 0.0};
    double err = std::numeric_limits<double>::infinity();
};

/// Phase constant that cancels the far-field rotation of the corrector
/// zeros: a factor with zero a tends to -a/|a| away from a, so dividing the
/// product of those limits out keeps the dressing near 1 deep inside.
inline cplx corrector_rotation_of(const std::vector<cplx>& zeros) {
    cplx p{1.0, 0.0};
    for (cplx a : zeros) {
        const double m = std::abs(a);
        if (m > 1e-9) p *= -a / m;  // a zero at the origin has no far field
    }
    p = std::conj(p);
    return p / std::abs(p);
}

/// Place one zero per node so the dilated product hits the targets. Unknowns
/// per node: the zero's signed pseudo-hyperbolic offset from radius r
/// (through tanh, so the zero ranges over the whole disc along its ray) and
/// an angular offset. Solved by damped least squares from near-exact seeds.
inline std::optional<CorrectorFit> solve_corrector(const FiniteBlaschkeProduct& base,
                                                   const BoundarySampleSet& K, double r,
                                                   double tol) {
    const std::size_t J = K.size();
    const std::size_t n = 2 * J;

    const auto zeros_of = [&](const std::vector<double>& x) {
        std::vector<cplx> zs(J);
        for (std::size_t j = 0; j < J; ++j) {
            const double d = std::tanh(x[2 * j]);
            const double rho = (r + d) / (1.0 + d * r);  // signed radius in (-1, 1)
            zs[j] = rho * std::polar(1.0, std::arg(K.points[j]) + x[2 * j + 1]);
        }
        return zs;
    };

    // Decoupled seed for one node: with the other factors replaced by their
    // far-field constants, the j-th normalized factor as a function of the
    // offsets (rho, s) is the Moebius sweep phi_rho(r e^{-is}) with
    // phi_rho(z) = (rho - z)/(1 - rho z). To make it hit w, pick the
    // outermost rho with |phi_rho(w)| = r (phi_rho is an involution), then
    // read the angular offset from the phase. Exact up to cross-factor
    // deviations, which the solver polishes away.
    const auto seed_node = [&](cplx w, double& d_out, double& s_out) {
        double m = std::abs(w);
        if (!std::isfinite(m)) {
            w = 0.0;
            m = 0.0;
        }
        if (m > 0.999999) w *= 0.999999 / m;
        const auto image = [&](double rho) { return (rho - w) / (1.0 - rho * w); };
        double lo = 0.0, hi = 1.0 - 1e-12;
        double arg_lo = lo, val_lo = std::abs(image(lo));
        for (int i = 1; i <= 256; ++i) {
            const double rho = hi * i / 256.0;
            const double v = std::abs(image(rho));
            if (v < val_lo) {
                val_lo = v;
                arg_lo = rho;
            }
        }
        double rho = arg_lo;  // fallback: closest approach on the ray
        if (val_lo < r) {
            lo = arg_lo;
            for (int i = 0; i < 80; ++i) {
                const double mid = 0.5 * (lo + hi);
                (std::abs(image(mid)) < r ? lo : hi) = mid;
            }
            rho = 0.5 * (lo + hi);
        }
        d_out = (rho - r) / (1.0 - rho * r);
        s_out = -std::arg(image(rho));
    };
    const auto residual = [&](const std::vector<double>& x, Eigen::VectorXd& out) {
        const std::vector<cplx> zs = zeros_of(x);
        const cplx zeta0 = corrector_rotation_of(zs);
        double worst = 0.0;
        for (std::size_t j = 0; j < J; ++j) {
            const cplx p = r * K.points[j];
            cplx v = evaluate(base, p) * zeta0;
            for (cplx a : zs) v *= (p - a) / (1.0 - std::conj(a) * p);
            const cplx d = v - K.targets[j];
            out[2 * j] = d.real();
            out[2 * j + 1] = d.imag();
            worst = std::max(worst, std::abs(d));
        }
        return worst;
    };

    std::vector<double> seed(n, 0.0);
    for (std::size_t j = 0; j < J; ++j) {
        double d = 0.0, s = 0.0;
        seed_node(K.targets[j] / evaluate(base, r * K.points[j]), d, s);
        seed[2 * j] = std::atanh(std::clamp(d, -0.999999, 0.999999));
        seed[2 * j + 1] = s;
    }

    CorrectorFit best;
    for (double spread : {0.0, 0.35, -0.35, 1.2, -1.2}) {
        std::vector<double> x = seed;
        for (std::size_t j = 0; j < J; ++j) x[2 * j + 1] += spread * (1.0 - r);

        Eigen::VectorXd y(n), y2(n);
        double err = residual(x, y);
        double lambda = 1e-3;
        for (int it = 0; it < 120 && err > tol * 0.2; ++it) {
            Eigen::MatrixXd Jm(n, n);
            for (std::size_t c = 0; c < n; ++c) {
                const double h = 1e-6;
                std::vector<double> xp = x, xm = x;
                xp[c] += h;
                xm[c] -= h;
                Eigen::VectorXd yp(n), ym(n);
                residual(xp, yp);
                residual(xm, ym);
                Jm.col(static_cast<Eigen::Index>(c)) = (yp - ym) / (2.0 * h);
            }
            const Eigen::MatrixXd JtJ = Jm.transpose() * Jm;
            const Eigen::VectorXd grad = Jm.transpose() * y;
            bool stepped = false;
            for (int back = 0; back < 12; ++back) {
                Eigen::MatrixXd A = JtJ;
                for (std::size_t i = 0; i < n; ++i) {
                    const auto ii = static_cast<Eigen::Index>(i);
                    A(ii, ii) += lambda * std::max(JtJ(ii, ii), 1e-12);
                }
                const Eigen::VectorXd dx = A.ldlt().solve(grad);
                std::vector<double> xn = x;
                for (std::size_t i = 0; i < n; ++i) xn[i] -= dx[static_cast<Eigen::Index>(i)];
                const double e2 = residual(xn, y2);
                if (e2 < err) {
                    x = std::move(xn);
                    y = y2;
                    err = e2;
                    lambda = std::max(lambda * 0.35, 1e-12);
                    stepped = true;
                    break;
                }
                lambda *= 4.0;
            }
            if (!stepped) break;
        }
        if (err < best.err) {
            best.err = err;
            best.zeros = zeros_of(x);
            best.rotation = corrector_rotation_of(best.zeros);
        }
        if (best.err < tol * 0.2) break;
    }
    if (!(best.err < tol)) return std::nullopt;
    return best;
}

/// Corrector route: keep the interior approximant and multiply in one
/// near-boundary zero per node. Each factor is a unimodular constant plus
/// O((1-rho) (1+R)/(1-R)) on L, so the interior drift shrinks as r -> 1
/// while the dilated boundary values remain exactly solvable.
inline SimultaneousResult disc_route_corrector(const BoundarySampleSet& K, const Evaluator& f,
                                               const FiniteBlaschkeProduct& Bf,
                                               const InteriorRegion& L, double epsilon,
                                               std::optional<double> r_request,
                                               std::vector<BudgetEntry> log, double base_err) {
    const std::vector<cplx> fine = L.verification_grid();
    double r_hat = 0.0;
    for (cplx z : fine) r_hat = std::max(r_hat, std::abs(z));
    const double lambda_geo = (1.0 + r_hat) / (1.0 - r_hat);
    const double J = static_cast<double>(K.size());
    const double slack = epsilon - base_err;
    const double width = std::min(0.05, slack / (4.0 * J * lambda_geo));
    const double r0 = std::max(0.9, 1.0 - width);
    log.push_back({"dilation threshold", 0.0, r0});
    if (r_request && !(*r_request > r0 && *r_request < 1.0))
        throw radius_rejection("simultaneous_disc: requested radius outside (r0, 1); r0 = " +
                               std::to_string(r0));
    double r = r_request ? *r_request : 0.5 * (1.0 + r0);

    for (int attempt = 0; attempt < 4; ++attempt) {
        const auto fit = solve_corrector(Bf, K, r, epsilon * 0.5);
        if (fit) {
            std::vector<cplx> zs = Bf.zeros;
            zs.insert(zs.end(), fit->zeros.begin(), fit->zeros.end());
            cplx zeta = Bf.zeta * fit->rotation;
            zeta /= std::abs(zeta);
            SimultaneousResult res;
            res.B = FiniteBlaschkeProduct{zeta, std::move(zs)};
            for (std::size_t j = 0; j < K.size(); ++j)
                res.err_K = std::max(res.err_K,
                                     std::abs(evaluate(res.B, r * K.points[j]) - K.targets[j]));
            for (cplx z : fine)
                res.err_L = std::max(res.err_L, std::abs(evaluate(res.B, z) - f(z)));
            log.push_back({"corrector boundary r=" + std::to_string(r), epsilon, res.err_K});
            log.push_back({"corrector interior r=" + std::to_string(r), epsilon, res.err_L});
            if (res.err_K < epsilon && res.err_L < epsilon) {
                res.r0 = r0;
                res.r_used = r;
                res.budget_log = std::move(log);
                return res;
            }
        } else {
            log.push_back({"corrector solve r=" + std::to_string(r), epsilon * 0.5, -1.0});
        }
        if (r_request) break;
        r = 0.5 * (1.0 + r);  // less distortion on L, same solvability on rK
    }
    throw pipeline_error("simultaneous_disc: all construction routes missed the budget",
                         render_budget_log(log));
}

}  // namespace detail

/// Dilated boundary interpolation: B(r z_j) close to targets of modulus at
/// most one, B close to f on L. Returns the threshold r0 along with the
/// radius actually used; callers may pin any radius inside (r0, 1).
inline SimultaneousResult simultaneous_disc(const BoundarySampleSet& K, const Evaluator& f,
                                            const InteriorRegion& L, double epsilon,
                                            std::optional<double> r_request = std::nullopt) {
    if (!(epsilon > 0.0)) throw domain_error("simultaneous_disc: epsilon must be positive");
    K.require_ball_targets();
    if (K.size() == 0) throw domain_error("simultaneous_disc: empty sample set");
    if (r_request && !(*r_request > 0.0 && *r_request < 1.0))
        throw domain_error("simultaneous_disc: requested radius must lie in (0, 1)");

    std::vector<BudgetEntry> log;
    const FiniteBlaschkeProduct Bf = caratheodory_approximate(f, L, epsilon / 2.0);
    const std::vector<cplx> fine = L.verification_grid();
    double base_err = 0.0;
    for (cplx z : fine) base_err = std::max(base_err, std::abs(evaluate(Bf, z) - f(z)));
    log.push_back({"interior base", epsilon / 2.0, base_err});

    // The joint route's radius gate is not terminal: the corrector route has
    // its own (usually lower) threshold, and the advertised r0 is whichever
    // route served the unpinned run. A pin is rejected only once every route
    // has refused it.
    try {
        return detail::disc_route_joint(K, f, Bf, L, epsilon, r_request, log);
    } catch (const error& e) {
        log.push_back({std::string("joint route abandoned: ") + e.what(), epsilon, -1.0});
    }
    return detail::disc_route_corrector(K, f, Bf, L, epsilon, r_request, std::move(log),
                                        base_err);
}

}  // namespace blab
