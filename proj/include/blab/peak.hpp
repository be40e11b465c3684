#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "blab/blaschke.hpp"
#include "blab/detail/poly.hpp"
#include "blab/sample_set.hpp"
#include "blab/transforms.hpp"
#include "blab/types.hpp"

namespace blab {

/// Geometry and scale parameters for a peak function: arcs of half-width
/// U_radius around the nodes, inner bump supports of half-width V_radius,
/// root order n, damping plateau M, and the finite stand-in `cap` for the
/// concentrating weight's blow-up at the nodes.
struct PeakSpec {
    BoundarySampleSet K;  // points only; targets, if any, are ignored here
    double U_radius = 0.0;
    double V_radius = 0.0;
    double epsilon = 0.0;
    int n = 0;
    double M = 0.0;
    double cap = 0.0;

    void validate() const {
        if (!(V_radius > 0.0 && U_radius > V_radius && U_radius < std::numbers::pi / 4.0))
            throw domain_error("peak spec: need 0 < V_radius < U_radius < pi/4");
        if (!(epsilon > 0.0 && epsilon < 1.0))
            throw domain_error("peak spec: epsilon must be in (0,1)");
        if (n < 2) throw domain_error("peak spec: root order must be at least 2");
        if (!(std::isfinite(M) && M > 1.0))
            throw domain_error("peak spec: plateau must be finite and exceed one");
        if (!(std::sin(std::numbers::pi / n) < epsilon))
            throw domain_error("peak spec: root order too small for epsilon");
        const double root = std::pow(M - 1.0, 1.0 / n);
        if (!(root > 2.0 && 2.0 / (root - 2.0) < epsilon))
            throw domain_error("peak spec: plateau too low for epsilon");
        if (!(std::isfinite(cap) && cap >= 10.0 * M))
            throw domain_error("peak spec: cap must be at least 10*M");
        for (std::size_t i = 0; i < K.points.size(); ++i)
            for (std::size_t j = i + 1; j < K.points.size(); ++j) {
                const double a = std::arg(K.points[i] / K.points[j]);
                if (std::abs(a) <= 2.0 * U_radius)
                    throw domain_error("peak spec: U neighborhoods overlap");
            }
    }
};

/// Smallest root order with sin(pi/n) < epsilon, and the smallest power-of-two
/// plateau with (M-1)^{1/n} > 2 + 2/epsilon. The strict inequality is decided
/// with a small guard so that exact-value ties (sin(pi/6) against 1/2) do not
/// slip through in floating point.
inline std::pair<int, double> choose_parameters(double epsilon) {
    if (!(epsilon > 0.0 && epsilon < 1.0))
        throw domain_error("choose_parameters: epsilon must be in (0,1)");
    int n = 2;
    while (!(std::sin(std::numbers::pi / n) < epsilon - 1e-12)) {
        ++n;
        if (n > 1000000)
            throw numerics_error("choose_parameters: no admissible root order");
    }
    const double need = static_cast<double>(n) * std::log2(2.0 + 2.0 / epsilon);
    const int j = static_cast<int>(std::floor(need)) + 1;
    return {n, std::exp2(static_cast<double>(j))};
}

/// Chordal gap between the complement of the U system and the closed V arcs.
/// Every V point sits within chord(V_radius) of its node while every point
/// outside the U system is at least chord(U_radius) away from that node, so
/// the difference is a valid lower bound, and it is attained on the circle.
inline double chordal_separation(const PeakSpec& spec) {
    if (spec.K.points.empty()) return 2.0;
    return 2.0 * (std::sin(spec.U_radius / 2.0) - std::sin(spec.V_radius / 2.0));
}

namespace detail {

inline double angular_distance(double a, double b) {
    double d = std::fmod(std::abs(a - b), tau);
    return std::min(d, tau - d);
}

inline double min_node_angle_distance(const std::vector<double>& node_angles, double theta) {
    double best = tau;  // larger than any angular distance
    for (double a : node_angles) best = std::min(best, angular_distance(a, theta));
    return best;
}

inline std::vector<double> node_angles_of(const BoundarySampleSet& K) {
    std::vector<double> a;
    a.reserve(K.points.size());
    for (cplx p : K.points) a.push_back(std::arg(p));
    return a;
}

inline void require_bump_resolution(const PeakSpec& spec, const BoundaryGrid& grid) {
    if (!spec.K.points.empty() && spec.V_radius * static_cast<double>(grid.N) < 8.0 * tau)
        throw domain_error("bump: V neighborhoods span fewer than eight grid samples");
}

inline double smooth_bump(double x) {
    if (std::abs(x) >= 1.0) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - x * x));
}

/// Decomposition of a bump into the part the grid can carry and the part it
/// cannot: `density` is the absolutely continuous component (band-limited,
/// real samples), `atom_mass[j]` the point mass parked at node j. The forced
/// value is what an evaluator must report exactly at a node.
struct BumpParts {
    BoundaryFunction density;
    std::vector<cplx> nodes;
    std::vector<double> atom_mass;
    double forced_value = 0.0;
    double density_mean = 0.0;
};

/// Concentrating weight. The smooth shoulder inside the V arcs carries at
/// most 0.2*dist of extra mean and the node atoms carry dist/4 in total, so
/// the full measure stays below the 1 + dist/2 budget with margin.
inline BumpParts bump_parts_u1(const PeakSpec& spec, const BoundaryGrid& grid) {
    spec.validate();
    require_bump_resolution(spec, grid);
    const std::size_t N = grid.N;
    const double dist = chordal_separation(spec);
    const auto angles = node_angles_of(spec.K);

    std::vector<double> shape(N, 0.0);
    double total_shape = 0.0;
    for (std::size_t k = 0; k < N; ++k) {
        for (double a : angles) {
            const double d = angular_distance(grid.angle(k), a);
            if (d < spec.V_radius) shape[k] += smooth_bump(d / spec.V_radius);
        }
        total_shape += shape[k];
    }
    const double amp =
        total_shape > 0.0
            ? std::min(1.0, 0.2 * dist * static_cast<double>(N) / total_shape)
            : 0.0;

    std::vector<cplx> v(N);
    for (std::size_t k = 0; k < N; ++k) v[k] = cplx{1.0 + amp * shape[k], 0.0};
    auto [bl, change] = project_band_limit(BoundaryFunction{grid, std::move(v)}, N / 4);
    (void)change;
    double mn = bl.values[0].real();
    for (cplx x : bl.values) mn = std::min(mn, x.real());
    const double lift = std::max(0.0, 1.0 - mn);
    double mean = 0.0;
    auto vals = bl.values;
    for (auto& x : vals) {
        x = cplx{x.real() + lift, 0.0};
        mean += x.real();
    }
    mean /= static_cast<double>(N);

    BumpParts parts{BoundaryFunction{grid, std::move(vals)},
                    spec.K.points,
                    std::vector<double>(spec.K.points.size(),
                                        spec.K.points.empty()
                                            ? 0.0
                                            : dist / (4.0 * static_cast<double>(spec.K.points.size()))),
                    spec.cap,
                    mean};
    double atoms = 0.0;
    for (double c : parts.atom_mass) atoms += c;
    if (!(mean + atoms < 1.0 + 0.5 * dist))
        throw numerics_error("bump: mass exceeds the integral budget");
    return parts;
}

/// Damping weight: plateau M with a downward point correction at each node.
/// The atom budget is tiny by design so the completion keeps real part well
/// above one at any interior point the library evaluates.
inline BumpParts bump_parts_u2(const PeakSpec& spec, const BoundaryGrid& grid) {
    spec.validate();
    require_bump_resolution(spec, grid);
    const std::size_t N = grid.N;
    const double dist = chordal_separation(spec);
    const std::size_t J = spec.K.points.size();
    const double per =
        J == 0 ? 0.0
               : std::min({dist / 4.0, 0.01, (spec.M - 1.0) * 1e-7}) / static_cast<double>(J);

    BumpParts parts{BoundaryFunction{grid, std::vector<cplx>(N, cplx{spec.M, 0.0})},
                    spec.K.points,
                    std::vector<double>(J, per),
                    1.0,
                    spec.M};
    double atoms = 0.0;
    for (double c : parts.atom_mass) atoms += c;
    // Same inequality as mean - atoms > M - dist/2, but written so a plateau
    // large enough to absorb the atoms in floating point cannot void it.
    if (!(atoms < 0.5 * dist))
        throw numerics_error("bump: dip mass exceeds the integral budget");
    return parts;
}

inline std::size_t nearest_sample(const BoundaryGrid& grid, cplx node) {
    double theta = std::arg(node);
    if (theta < 0.0) theta += tau;
    const auto idx = static_cast<std::size_t>(
        std::llround(theta * static_cast<double>(grid.N) / tau));
    return idx % grid.N;
}

}  // namespace detail

/// Sampled concentrating weight. The forced node samples stand in for the
/// integrable blow-up; they carry no quadrature weight, so mean checks skip
/// them (the singular mass is accounted separately as node atoms).
inline BoundaryFunction build_bump_u1(const PeakSpec& spec, const BoundaryGrid& grid) {
    auto parts = detail::bump_parts_u1(spec, grid);
    auto v = parts.density.values;
    for (cplx node : parts.nodes) v[detail::nearest_sample(grid, node)] = cplx{spec.cap, 0.0};
    return BoundaryFunction{grid, std::move(v)};
}

inline BoundaryFunction build_bump_u2(const PeakSpec& spec, const BoundaryGrid& grid) {
    auto parts = detail::bump_parts_u2(spec, grid);
    auto v = parts.density.values;
    for (cplx node : parts.nodes) v[detail::nearest_sample(grid, node)] = cplx{1.0, 0.0};
    return BoundaryFunction{grid, std::move(v)};
}

/// Principal n-th root, samplewise. On the half-plane {Re >= 1} the principal
/// branch lands in the cone |arg| < pi/(2n).
inline BoundaryFunction nth_root_in_cone(const BoundaryFunction& g, int n) {
    if (n < 1) throw domain_error("nth_root_in_cone: order must be positive");
    std::vector<cplx> out(g.values.size());
    const double inv = 1.0 / static_cast<double>(n);
    for (std::size_t k = 0; k < g.values.size(); ++k) {
        const cplx w = g.values[k];
        if (w.real() < 1.0 - 1e-9)
            throw domain_error("nth_root_in_cone: sample with real part below one");
        out[k] = std::pow(w, inv);
    }
    return BoundaryFunction{g.grid, std::move(out)};
}

inline cplx herglotz_kernel(cplx zeta, cplx z) { return (zeta + z) / (zeta - z); }

/// Holomorphic completion of a bump: the polynomial completing its absolutely
/// continuous part plus one Herglotz kernel per node atom. Evaluating exactly
/// at a node returns the recorded stand-in value (the kernel's own limit is
/// not finite); everywhere else the kernel is used as written. On the circle
/// the kernels are purely imaginary, so the real part of the value equals the
/// density there.
struct CompletedBoundaryFunction {
    std::vector<cplx> coeffs;
    std::vector<cplx> nodes;
    std::vector<double> weights;
    double forced_value = 0.0;

    cplx value(cplx z) const {
        if (std::abs(z) > 1.0 + 1e-12)
            throw domain_error("completed boundary function: point outside the closed disc");
        for (std::size_t j = 0; j < nodes.size(); ++j)
            if (std::abs(z - nodes[j]) < 1e-13) {
                double im = detail::poly_eval(coeffs, nodes[j]).imag();
                for (std::size_t k = 0; k < nodes.size(); ++k)
                    if (k != j) im += weights[k] * herglotz_kernel(nodes[k], nodes[j]).imag();
                return cplx{forced_value, im};
            }
        cplx v = detail::poly_eval(coeffs, z);
        for (std::size_t k = 0; k < nodes.size(); ++k)
            v += weights[k] * herglotz_kernel(nodes[k], z);
        return v;
    }
};

struct PeakDiagnostics {
    double peak_defect = 0.0;  // max over nodes of |h - 1|
    double off_U_max = 0.0;    // max |h| at samples U-far from every node
    double im_max = 0.0;       // max |Im h| over all samples
    double re_min = 0.0;       // min Re h over all samples
    double mod_max = 0.0;      // max |h| over all samples
    double arg_max = 0.0;      // max |arg h| over all samples
};

/// The peak: h = h_1/(h_1+h_2) with h_j the cone n-th roots of the completed
/// bumps. Near one on the nodes, small off the U arcs, real part nonnegative
/// everywhere, values in the aperture-pi/n cone inside the closed disc.
struct PeakFunction {
    BoundaryFunction boundary;
    PeakSpec spec;
    PeakDiagnostics diag;
    CompletedBoundaryFunction g1, g2;

    cplx value(cplx z) const {
        const cplx w1 = g1.value(z), w2 = g2.value(z);
        if (!(w1.real() > 0.0 && w2.real() > 0.0))
            throw numerics_error("peak function: completion left the right half-plane");
        const double inv = 1.0 / static_cast<double>(spec.n);
        const cplx r1 = std::pow(w1, inv), r2 = std::pow(w2, inv);
        return r1 / (r1 + r2);
    }
};

namespace detail {

inline PeakFunction assemble_peak(const PeakSpec& spec, const BoundaryGrid& grid) {
    const auto p1 = bump_parts_u1(spec, grid);
    const auto p2 = bump_parts_u2(spec, grid);
    const std::size_t N = grid.N;

    CompletedBoundaryFunction g1{analytic_coefficients(p1.density), p1.nodes, p1.atom_mass,
                                 spec.cap};
    std::vector<double> neg(p2.atom_mass.size());
    for (std::size_t j = 0; j < neg.size(); ++j) neg[j] = -p2.atom_mass[j];
    CompletedBoundaryFunction g2{{cplx{spec.M, 0.0}}, p2.nodes, std::move(neg), 1.0};

    // Boundary samples of the completions: FFT path for the density, then the
    // kernels, which are purely imaginary on the circle. Samples landing on a
    // node take the forced branch so the peak is exact there.
    const BoundaryFunction c1 = analytic_completion(p1.density);
    std::vector<cplx> s1(N), s2(N);
    for (std::size_t k = 0; k < N; ++k) {
        const cplx pt = grid.point(k);
        bool on_node = false;
        for (cplx node : p1.nodes)
            if (std::abs(pt - node) < 1e-13) { on_node = true; break; }
        if (on_node) {
            s1[k] = g1.value(pt);
            s2[k] = g2.value(pt);
            continue;
        }
        cplx a = c1.values[k];
        cplx b{spec.M, 0.0};
        for (std::size_t j = 0; j < p1.nodes.size(); ++j) {
            const cplx ker = herglotz_kernel(p1.nodes[j], pt);
            a += p1.atom_mass[j] * ker;
            b -= p2.atom_mass[j] * ker;
        }
        s1[k] = a;
        s2[k] = b;
    }

    const BoundaryFunction h1 = nth_root_in_cone(BoundaryFunction{grid, std::move(s1)}, spec.n);
    const BoundaryFunction h2 = nth_root_in_cone(BoundaryFunction{grid, std::move(s2)}, spec.n);
    std::vector<cplx> h(N);
    for (std::size_t k = 0; k < N; ++k) h[k] = h1.values[k] / (h1.values[k] + h2.values[k]);

    PeakDiagnostics d;
    d.re_min = h.empty() ? 0.0 : h[0].real();
    const auto angles = node_angles_of(spec.K);
    for (std::size_t k = 0; k < N; ++k) {
        const double mod = std::abs(h[k]);
        d.im_max = std::max(d.im_max, std::abs(h[k].imag()));
        d.re_min = std::min(d.re_min, h[k].real());
        d.mod_max = std::max(d.mod_max, mod);
        d.arg_max = std::max(d.arg_max, std::abs(std::arg(h[k])));
        if (min_node_angle_distance(angles, grid.angle(k)) >= spec.U_radius)
            d.off_U_max = std::max(d.off_U_max, mod);
    }

    PeakFunction peak{BoundaryFunction{grid, std::move(h)}, spec, d, std::move(g1),
                      std::move(g2)};
    for (cplx node : spec.K.points)
        peak.diag.peak_defect =
            std::max(peak.diag.peak_defect, std::abs(peak.value(node) - 1.0));
    return peak;
}

}  // namespace detail

inline PeakFunction build_peak_function(PeakSpec spec, const BoundaryGrid& grid) {
    spec.validate();
    PeakFunction peak = detail::assemble_peak(spec, grid);
    if (!(peak.diag.peak_defect < spec.epsilon / 10.0) && !spec.K.points.empty()) {
        // One escalation: the defect scales like cap^{-1/n}, so raise cap by
        // the measured shortfall to the n-th power (log-clamped).
        const double l = std::log10(spec.cap) +
                         spec.n * std::log10(std::max(
                                      1.0, peak.diag.peak_defect * 10.0 / spec.epsilon)) +
                         0.3;
        spec.cap = std::pow(10.0, std::min(l, 290.0));
        peak = detail::assemble_peak(spec, grid);
    }
    const char* bad = nullptr;
    if (!(peak.diag.re_min >= -1e-9)) bad = "real part nonnegativity";
    else if (!(peak.diag.im_max < spec.epsilon)) bad = "imaginary part bound";
    else if (!(peak.diag.off_U_max < spec.epsilon)) bad = "far field bound";
    else if (!(peak.diag.peak_defect < spec.epsilon / 10.0)) bad = "peak defect";
    else if (!(peak.diag.mod_max <= 1.0 + 1e-9)) bad = "modulus bound";
    else if (!(peak.diag.arg_max <= std::numbers::pi / spec.n + 1e-9)) bad = "cone aperture";
    if (bad) throw numerics_error(std::string("peak function: ") + bad + " violated");
    return peak;
}

/// Default geometry: U arcs as wide as the node spacing allows (never past
/// pi/4.5), V at half of U, scale parameters from epsilon alone.
inline PeakSpec make_peak_spec(const BoundarySampleSet& K, double epsilon,
                               const BoundaryGrid& grid) {
    auto [n, M] = choose_parameters(epsilon);
    double min_gap = tau;
    for (std::size_t i = 0; i < K.points.size(); ++i)
        for (std::size_t j = i + 1; j < K.points.size(); ++j)
            min_gap = std::min(min_gap, std::abs(std::arg(K.points[i] / K.points[j])));
    const double U = std::min(std::numbers::pi / 4.5, 0.45 * min_gap);
    const double V = 0.5 * U;
    if (!K.points.empty() && V * static_cast<double>(grid.N) < 8.0 * tau)
        throw domain_error("make_peak_spec: grid too coarse for the arc geometry");
    const double lc = std::max({std::log10(M) + 1.0, std::log10(M) + 6.0,
                                n * std::log10(10.0 / epsilon) + std::log10(8.0)});
    PeakSpec spec{BoundarySampleSet{K.points}, U, V, epsilon, n, M,
                  std::pow(10.0, std::min(lc, 290.0))};
    spec.validate();
    return spec;
}

/// Deterministic interior sample cloud: golden-angle spiral, radii pushed
/// toward the boundary but kept clear of it.
inline std::vector<cplx> interior_probe_points(std::size_t count = 500) {
    std::vector<cplx> pts;
    pts.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        const double r = 0.998 * std::sqrt((static_cast<double>(i) + 0.5) /
                                           static_cast<double>(count));
        const double th = tau * std::fmod(static_cast<double>(i) * 0.6180339887498949, 1.0) + 0.05;
        pts.push_back(std::polar(r, th));
    }
    return pts;
}

struct ExtensionDiagnostics {
    double err_K = 0.0;          // max over nodes of |g - phi|
    double far_field_max = 0.0;  // max |g - 1| at samples U-far from every node
    double sup_modulus = 0.0;    // over the grid and the interior probes
    double delta_used = 0.0;
    double m_used = 0.0;
    double eta = 0.0;
    PeakDiagnostics peak;
};

/// g = exp(-delta*m + h*(F - eta)): the peak h steers a log-interpolant F of
/// the targets, eta shifts its real part under zero, and the damping factor
/// keeps the modulus under one. Evaluable anywhere in the closed disc.
struct HolomorphicExtension {
    BoundaryFunction boundary;
    ExtensionDiagnostics diag;
    PeakFunction peak;
    std::vector<PeakFunction> parts;  // singleton peaks carrying the partition
    std::vector<cplx> log_targets;
    double eta = 0.0;
    double m = 0.0;
    double damping = 0.0;  // delta * m

    cplx partition_log(cplx z) const {
        cplx num{0.0, 0.0}, den{0.0, 0.0};
        for (std::size_t j = 0; j < parts.size(); ++j) {
            const cplx hj = parts[j].value(z);
            num += log_targets[j] * hj;
            den += hj;
        }
        return num / den;
    }

    cplx value(cplx z) const {
        return std::exp(-damping + peak.value(z) * (partition_log(z) - eta));
    }
};

namespace detail {

/// Everything about the extension that does not depend on the damping or on
/// the outer peak's scale parameters.
struct PartitionState {
    std::vector<PeakFunction> parts;
    std::vector<cplx> log_targets;
    std::vector<cplx> probes;
    std::vector<cplx> F_grid, F_probes, F_nodes;
    std::vector<std::size_t> far_samples;
    double eta = 0.0;
    double m = 0.0;
};

inline PartitionState build_partition(const BoundarySampleSet& K, const PeakSpec& spec,
                                      const BoundaryGrid& grid) {
    PartitionState st;
    st.probes = interior_probe_points();
    st.log_targets.reserve(K.size());
    for (cplx t : K.targets) {
        cplx a = std::log(t);
        st.log_targets.push_back(cplx{std::min(0.0, a.real()), a.imag()});
    }

    // Singleton peaks: a fixed, very sharp cone (order 40, plateau 2^500)
    // makes each one's footprint at every other node of order 1e-4, which is
    // what keeps the partition's interpolation defect inside the budget.
    const double Ms = std::exp2(500.0);
    for (cplx node : K.points) {
        PeakSpec s{BoundarySampleSet{{node}}, spec.U_radius, spec.V_radius, 0.25, 40, Ms,
                   1e6 * Ms};
        st.parts.push_back(build_peak_function(s, grid));
    }

    const std::size_t N = grid.N;
    const std::size_t J = K.size();
    st.F_grid.resize(N);
    for (std::size_t k = 0; k < N; ++k) {
        cplx num{0.0, 0.0}, den{0.0, 0.0};
        for (std::size_t j = 0; j < J; ++j) {
            const cplx hj = st.parts[j].boundary.values[k];
            num += st.log_targets[j] * hj;
            den += hj;
        }
        st.F_grid[k] = num / den;
    }
    auto partition_at = [&](cplx z) {
        cplx num{0.0, 0.0}, den{0.0, 0.0};
        for (std::size_t j = 0; j < J; ++j) {
            const cplx hj = st.parts[j].value(z);
            num += st.log_targets[j] * hj;
            den += hj;
        }
        return num / den;
    };
    st.F_probes.reserve(st.probes.size());
    for (cplx z : st.probes) st.F_probes.push_back(partition_at(z));
    st.F_nodes.reserve(J);
    for (cplx z : K.points) st.F_nodes.push_back(partition_at(z));

    double re_max = 0.0, im_max = 0.0, im_a = 0.0;
    for (cplx f : st.F_grid) {
        re_max = std::max(re_max, f.real());
        im_max = std::max(im_max, std::abs(f.imag()));
    }
    for (cplx f : st.F_probes) {
        re_max = std::max(re_max, f.real());
        im_max = std::max(im_max, std::abs(f.imag()));
    }
    for (cplx a : st.log_targets) im_a = std::max(im_a, std::abs(a.imag()));
    st.eta = std::max(0.0, re_max) + 1e-9;
    st.m = std::max(im_a + std::numbers::pi, im_max + 0.5);

    const auto angles = node_angles_of(K);
    for (std::size_t k = 0; k < N; ++k)
        if (min_node_angle_distance(angles, grid.angle(k)) >= spec.U_radius)
            st.far_samples.push_back(k);
    return st;
}

struct DampedFit {
    double err_K = 0.0, far_max = 0.0, sup_mod = 0.0;
};

inline DampedFit measure_damped(const std::vector<cplx>& P_grid,
                                const std::vector<cplx>& P_probes,
                                const std::vector<cplx>& P_nodes,
                                const std::vector<cplx>& targets,
                                const std::vector<std::size_t>& far_samples, double s) {
    DampedFit f;
    for (std::size_t j = 0; j < P_nodes.size(); ++j)
        f.err_K = std::max(f.err_K, std::abs(std::exp(-s + P_nodes[j]) - targets[j]));
    for (std::size_t k : far_samples)
        f.far_max = std::max(f.far_max, std::abs(std::exp(-s + P_grid[k]) - 1.0));
    for (cplx p : P_grid) f.sup_mod = std::max(f.sup_mod, std::exp(-s + p.real()));
    for (cplx p : P_probes) f.sup_mod = std::max(f.sup_mod, std::exp(-s + p.real()));
    return f;
}

struct ExtensionAttempt {
    PeakFunction peak;
    std::vector<cplx> P_grid, P_probes, P_nodes;
};

inline ExtensionAttempt build_attempt(const PartitionState& st, const PeakSpec& spec,
                                      const BoundarySampleSet& K, const BoundaryGrid& grid) {
    ExtensionAttempt at{build_peak_function(spec, grid), {}, {}, {}};
    const std::size_t N = grid.N;
    at.P_grid.resize(N);
    for (std::size_t k = 0; k < N; ++k)
        at.P_grid[k] = at.peak.boundary.values[k] * (st.F_grid[k] - st.eta);
    at.P_probes.resize(st.probes.size());
    for (std::size_t i = 0; i < st.probes.size(); ++i)
        at.P_probes[i] = at.peak.value(st.probes[i]) * (st.F_probes[i] - st.eta);
    at.P_nodes.resize(K.size());
    for (std::size_t j = 0; j < K.size(); ++j)
        at.P_nodes[j] = at.peak.value(K.points[j]) * (st.F_nodes[j] - st.eta);
    return at;
}

inline HolomorphicExtension finish_extension(PartitionState st, ExtensionAttempt at,
                                             const BoundaryGrid& grid, double delta) {
    const double s = delta * st.m;
    std::vector<cplx> g(grid.N);
    for (std::size_t k = 0; k < grid.N; ++k) g[k] = std::exp(-s + at.P_grid[k]);
    HolomorphicExtension ext{BoundaryFunction{grid, std::move(g)},
                             ExtensionDiagnostics{},
                             std::move(at.peak),
                             std::move(st.parts),
                             std::move(st.log_targets),
                             st.eta,
                             st.m,
                             s};
    ext.diag.delta_used = delta;
    ext.diag.m_used = st.m;
    ext.diag.eta = st.eta;
    ext.diag.peak = ext.peak.diag;
    return ext;
}

}  // namespace detail

/// One damping level, no search: exposes the residual trade-off directly so
/// callers can sweep delta and watch both error terms move.
inline HolomorphicExtension extend_unit_ball_fixed_delta(const BoundarySampleSet& K,
                                                         const PeakSpec& spec,
                                                         const BoundaryGrid& grid,
                                                         double delta) {
    K.require_ball_targets(1e-12);
    for (cplx t : K.targets)
        if (std::abs(t) < 1e-6)
            throw domain_error(
                "unit-ball extension: target modulus below 1e-6; perturb the data away from zero");
    if (!(delta > 0.0 && delta <= 1.0))
        throw domain_error("unit-ball extension: delta must be in (0,1]");
    spec.validate();
    if (spec.K.points.size() != K.points.size())
        throw domain_error("unit-ball extension: spec nodes must match the target set");
    for (std::size_t j = 0; j < K.points.size(); ++j)
        if (std::abs(spec.K.points[j] - K.points[j]) > 1e-12)
            throw domain_error("unit-ball extension: spec nodes must match the target set");

    auto st = detail::build_partition(K, spec, grid);
    auto at = detail::build_attempt(st, spec, K, grid);
    const double s = delta * st.m;
    const auto fit =
        detail::measure_damped(at.P_grid, at.P_probes, at.P_nodes, K.targets, st.far_samples, s);
    auto ext = detail::finish_extension(std::move(st), std::move(at), grid, delta);
    ext.diag.err_K = fit.err_K;
    ext.diag.far_field_max = fit.far_max;
    ext.diag.sup_modulus = fit.sup_mod;
    return ext;
}

/// Interpolates the targets on K while staying within epsilon of one far from
/// K and within the closed unit ball everywhere. The cone parameters carried
/// by `spec` are tried as given; if the residuals miss, the cone is sharpened through a
/// fixed ladder (the far-field error scales with the peak's off-U footprint,
/// which only a higher root order can shrink). For each cone the damping is
/// chosen by binary search for the largest delta meeting both residual
/// targets, seeded at epsilon/(4m).
inline HolomorphicExtension extend_unit_ball(const BoundarySampleSet& K, const PeakSpec& spec,
                                             const BoundaryGrid& grid) {
    K.require_ball_targets(1e-12);
    for (cplx t : K.targets)
        if (std::abs(t) < 1e-6)
            throw domain_error(
                "unit-ball extension: target modulus below 1e-6; perturb the data away from zero");
    spec.validate();
    if (spec.K.points.size() != K.points.size())
        throw domain_error("unit-ball extension: spec nodes must match the target set");
    for (std::size_t j = 0; j < K.points.size(); ++j)
        if (std::abs(spec.K.points[j] - K.points[j]) > 1e-12)
            throw domain_error("unit-ball extension: spec nodes must match the target set");

    const auto st = detail::build_partition(K, spec, grid);
    const double eps = spec.epsilon;

    std::vector<PeakSpec> rungs{spec};
    for (double v : {0.25, 0.18, 0.12, 0.08, 0.06, 0.045, 0.033}) {
        auto [n, M] = choose_parameters(v);
        if (n <= rungs.back().n) continue;
        const double lc = std::max({std::log10(M) + 1.0, std::log10(M) + 6.0,
                                    n * std::log10(10.0 / v) + std::log10(8.0)});
        rungs.push_back(PeakSpec{spec.K, spec.U_radius, spec.V_radius, spec.epsilon, n, M,
                                 std::pow(10.0, std::min(lc, 290.0))});
    }

    double best_err = -1.0, best_far = -1.0;
    for (const PeakSpec& rung : rungs) {
        auto at = detail::build_attempt(st, rung, K, grid);
        auto fit_at = [&](double delta) {
            return detail::measure_damped(at.P_grid, at.P_probes, at.P_nodes, K.targets,
                                          st.far_samples, delta * st.m);
        };
        // Strict interior margin: the bisection drives delta to the boundary
        // of feasibility, and callers that rescale the result by a unimodular
        // factor must not be pushed onto the epsilon boundary by one ulp.
        const double eps_in = eps * (1.0 - 1e-9);
        auto ok = [&](double delta) {
            const auto f = fit_at(delta);
            return f.err_K < eps_in && f.far_max < eps_in && f.sup_mod <= 1.0 + 1e-9;
        };

        const double d0 = std::clamp(eps / (4.0 * st.m), 1e-12, 1.0);
        double seed = -1.0;
        if (ok(d0)) seed = d0;
        for (int k = 1; seed < 0.0 && k <= 40; ++k) {
            const double up = d0 * std::exp2(static_cast<double>(k));
            if (up <= 1.0 && ok(up)) { seed = up; break; }
            const double dn = d0 * std::exp2(-static_cast<double>(k));
            if (dn > 0.0 && ok(dn)) { seed = dn; break; }
        }
        if (seed < 0.0) {
            const auto f = fit_at(d0);
            if (best_err < 0.0 || f.err_K + f.far_max < best_err + best_far) {
                best_err = f.err_K;
                best_far = f.far_max;
            }
            continue;
        }
        double lo = seed;
        while (lo * 2.0 <= 1.0 && ok(lo * 2.0)) lo *= 2.0;
        double hi = std::min(1.0, lo * 2.0);
        if (!ok(hi)) {
            for (int i = 0; i < 50; ++i) {
                const double mid = 0.5 * (lo + hi);
                (ok(mid) ? lo : hi) = mid;
            }
        } else {
            lo = hi;  // feasible all the way to the delta ceiling
        }
        const auto fit = fit_at(lo);
        auto ext = detail::finish_extension(st, std::move(at), grid, lo);
        ext.diag.err_K = fit.err_K;
        ext.diag.far_field_max = fit.far_max;
        ext.diag.sup_modulus = fit.sup_mod;
        return ext;
    }
    throw numerics_error(
        "unit-ball extension: residual targets unattained at every cone refinement; best "
        "err_K=" +
        std::to_string(best_err) + ", far_field=" + std::to_string(best_far));
}

/// f * extension of the deflected targets phi_j / f(z_j). Since |f| = 1 on the
/// circle the far field tracks f and the modulus stays under one.
struct RelativeExtension {
    HolomorphicExtension inner;
    FiniteBlaschkeProduct base;
    BoundaryFunction boundary;
    double err_K = 0.0;
    double far_field_max = 0.0;
    double sup_modulus = 0.0;

    cplx value(cplx z) const { return evaluate(base, z) * inner.value(z); }
};

inline RelativeExtension extend_relative(const BoundarySampleSet& K,
                                         const FiniteBlaschkeProduct& f, const PeakSpec& spec,
                                         const BoundaryGrid& grid) {
    K.require_ball_targets(1e-12);
    std::vector<cplx> ratios(K.size());
    for (std::size_t j = 0; j < K.size(); ++j) {
        const cplx fj = evaluate(f, K.points[j]);
        cplx r = K.targets[j] / fj;
        if (std::abs(r) > 1.0) r /= std::abs(r) * (1.0 + 1e-15);  // rounding guard only
        ratios[j] = r;
    }
    HolomorphicExtension inner =
        extend_unit_ball(BoundarySampleSet{K.points, std::move(ratios)}, spec, grid);

    const std::size_t N = grid.N;
    std::vector<cplx> g(N);
    double sup = 0.0;
    std::vector<cplx> f_vals(N);
    for (std::size_t k = 0; k < N; ++k) {
        f_vals[k] = evaluate(f, grid.point(k));
        g[k] = f_vals[k] * inner.boundary.values[k];
        sup = std::max(sup, std::abs(g[k]));
    }
    RelativeExtension rel{std::move(inner), f, BoundaryFunction{grid, std::move(g)}, 0.0, 0.0,
                          std::max(sup, 0.0)};
    for (std::size_t j = 0; j < K.size(); ++j)
        rel.err_K = std::max(rel.err_K, std::abs(rel.value(K.points[j]) - K.targets[j]));
    const auto angles = detail::node_angles_of(K);
    for (std::size_t k = 0; k < N; ++k)
        if (detail::min_node_angle_distance(angles, grid.angle(k)) >= spec.U_radius)
            rel.far_field_max =
                std::max(rel.far_field_max, std::abs(rel.boundary.values[k] - f_vals[k]));
    rel.sup_modulus = std::max(rel.sup_modulus, rel.inner.diag.sup_modulus);
    return rel;
}

}  // namespace blab
