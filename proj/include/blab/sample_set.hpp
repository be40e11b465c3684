#pragma once

#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "blab/types.hpp"

namespace blab {

/// Finitely many distinct circle points, optionally paired with target
/// values. The desk-scale stand-in for a compact boundary set of measure
/// zero.
struct BoundarySampleSet {
    std::vector<cplx> points;
    std::vector<cplx> targets;  // empty or same length as points

    BoundarySampleSet() = default;
    explicit BoundarySampleSet(std::vector<cplx> pts, std::vector<cplx> tgts = {})
        : points(std::move(pts)), targets(std::move(tgts)) {
        for (cplx p : points)
            if (std::abs(std::abs(p) - 1.0) > 1e-12)
                throw domain_error("sample set: points must lie on the unit circle");
        for (std::size_t i = 0; i < points.size(); ++i)
            for (std::size_t j = i + 1; j < points.size(); ++j)
                if (std::abs(points[i] - points[j]) <= 1e-9)
                    throw domain_error("sample set: points must be pairwise distinct");
        if (!targets.empty() && targets.size() != points.size())
            throw domain_error("sample set: one target per point");
        for (cplx t : targets)
            if (!std::isfinite(t.real()) || !std::isfinite(t.imag()))
                throw domain_error("sample set: targets must be finite");
    }

    std::size_t size() const { return points.size(); }

    void require_unimodular_targets(double tol = 1e-12) const {
        if (targets.empty())
            throw domain_error("sample set: targets required");
        for (cplx t : targets)
            if (std::abs(std::abs(t) - 1.0) > tol)
                throw domain_error("sample set: targets must be unimodular");
    }

    void require_ball_targets(double tol = 1e-12) const {
        if (targets.empty())
            throw domain_error("sample set: targets required");
        for (cplx t : targets)
            if (std::abs(t) > 1.0 + tol)
                throw domain_error("sample set: targets must lie in the closed unit disc");
    }
};

inline BoundarySampleSet from_angles(const std::vector<double>& angles,
                                     std::vector<cplx> targets = {}) {
    std::vector<cplx> pts;
    pts.reserve(angles.size());
    for (double t : angles) pts.push_back(std::polar(1.0, t));
    return BoundarySampleSet{std::move(pts), std::move(targets)};
}

}  // namespace blab
