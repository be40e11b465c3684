#pragma once

#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace blab {

using cplx = std::complex<double>;

inline constexpr double tau = 2.0 * std::numbers::pi;

/// Base class for everything this library throws.
struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Input failed a precondition (bad radius, point off the circle, ...).
struct domain_error : error {
    using error::error;
};

/// An iterative kernel failed to converge or a residual check failed.
/// Never swallowed: callers either handle it or let it surface.
struct numerics_error : error {
    using error::error;
};

/// A multi-stage construction missed its accuracy budget. Carries the
/// stage log so the failure is inspectable.
struct pipeline_error : error {
    explicit pipeline_error(const std::string& what, std::string log = {})
        : error(what), stage_log(std::move(log)) {}
    std::string stage_log;
};

inline double sqr(double x) { return x * x; }

/// Chordal distance between two points of the closed disc.
inline double chord(cplx a, cplx b) { return std::abs(a - b); }

}  // namespace blab
