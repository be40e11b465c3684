#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "blab/universal.hpp"

using blab::cplx;

namespace {

blab::BoundarySampleSet two_point_set() {
    return blab::BoundarySampleSet{{cplx{1.0, 0.0}, cplx{0.0, 1.0}}};
}

std::vector<std::vector<cplx>> four_constant_targets() {
    return {{cplx{0.5, 0.0}, cplx{0.5, 0.0}},
            {cplx{-0.5, 0.0}, cplx{-0.5, 0.0}},
            {cplx{0.0, 0.5}, cplx{0.0, 0.5}},
            {cplx{0.0, 0.0}, cplx{0.0, 0.0}}};
}

cplx product_at(const blab::TruncatedUniversalProduct& T, std::size_t from, std::size_t to,
                cplx z) {
    cplx v{1.0, 0.0};
    for (std::size_t k = from; k <= to; ++k) v *= blab::evaluate(T.factors[k], z);
    return v;
}

}  // namespace

TEST_CASE("radius schedule validates its shape", "[universal]") {
    REQUIRE_NOTHROW((blab::RadiusSchedule{{0.5, 0.9}}));
    REQUIRE_THROWS_AS((blab::RadiusSchedule{{0.5, 0.5}}), blab::domain_error);
    REQUIRE_THROWS_AS((blab::RadiusSchedule{{0.9, 0.5}}), blab::domain_error);
    REQUIRE_THROWS_AS((blab::RadiusSchedule{{0.5, 1.0}}), blab::domain_error);
    REQUIRE_THROWS_AS((blab::RadiusSchedule{{0.0, 0.5}}), blab::domain_error);
}

TEST_CASE("single-stage build is one interpolating product", "[universal]") {
    const blab::BoundarySampleSet K{{cplx{1.0, 0.0}}};
    const auto T = blab::build_universal(K, {{cplx{0.5, 0.0}}});
    REQUIRE_FALSE(T.failed_stage.has_value());
    REQUIRE(T.factors.size() == 1);
    REQUIRE(T.radii.size() == 1);
    const auto rows = blab::error_trace(T);
    REQUIRE(rows.size() == 1);
    // with one stage the trace is exactly the stage residual
    REQUIRE(rows[0].measured == Catch::Approx(T.certificates[0].boundary_residual).margin(1e-12));
    REQUIRE(rows[0].measured < 1.0);
    REQUIRE(rows[0].measured <= rows[0].certified);
}

TEST_CASE("four-stage build meets every certificate", "[universal]") {
    const auto T = blab::build_universal(two_point_set(), four_constant_targets());
    REQUIRE_FALSE(T.failed_stage.has_value());
    REQUIRE(T.factors.size() == 4);
    REQUIRE(blab::total_degree(T) == 8);

    for (std::size_t k = 1; k < 4; ++k) {
        REQUIRE(T.radii[k] > T.radii[k - 1]);
        REQUIRE(T.radii[k] < 1.0);
        REQUIRE(T.budgets[k].boundary == Catch::Approx(1.0 / (2.0 * (k + 1.0))));
        REQUIRE(T.budgets[k].conv == Catch::Approx(std::ldexp(1.0, -static_cast<int>(k))));
        const auto& c = T.certificates[k];
        REQUIRE(c.boundary_residual < T.budgets[k].boundary);
        REQUIRE(c.oscillation < T.budgets[k].boundary);
        REQUIRE(c.conv_bound < T.budgets[k].conv);
        REQUIRE(c.conv_residual <= c.conv_bound);
        REQUIRE(T.radii[k] > c.annulus_base);
    }

    const auto rows = blab::error_trace(T);
    REQUIRE(rows.size() == 4);
    for (std::size_t k = 0; k < 4; ++k) {
        REQUIRE(rows[k].measured <= rows[k].certified);
        if (k > 0) REQUIRE(rows[k].certified < rows[k - 1].certified);
    }
}

TEST_CASE("stored factors stay near one on the previous disc", "[universal]") {
    const auto T = blab::build_universal(two_point_set(), four_constant_targets());
    REQUIRE_FALSE(T.failed_stage.has_value());
    for (std::size_t k = 1; k < T.factors.size(); ++k) {
        double worst = 0.0;
        for (int i = 0; i < 256; ++i) {
            const cplx z = std::polar(T.radii[k - 1], 2.0 * std::numbers::pi * i / 256.0);
            worst = std::max(worst, std::abs(blab::evaluate(T.factors[k], z) - 1.0));
        }
        REQUIRE(worst < std::ldexp(1.0, -static_cast<int>(k)));
    }
}

TEST_CASE("tail products stay near one inside their radius", "[universal]") {
    const auto T = blab::build_universal(two_point_set(), four_constant_targets());
    REQUIRE_FALSE(T.failed_stage.has_value());
    const std::size_t last = T.factors.size() - 1;
    for (std::size_t m = 0; m + 1 <= last; ++m) {
        double tail_budget = 0.0;
        for (std::size_t k = m + 1; k <= last; ++k)
            tail_budget += std::ldexp(1.0, -static_cast<int>(k));
        double worst = 0.0;
        for (int i = 0; i < 256; ++i) {
            const cplx z = std::polar(T.radii[m], 2.0 * std::numbers::pi * i / 256.0);
            worst = std::max(worst, std::abs(product_at(T, m + 1, last, z) - 1.0));
        }
        REQUIRE(worst <= tail_budget + 1e-9);
    }
}

TEST_CASE("partial evaluation multiplies exactly the requested factors", "[universal]") {
    const auto T = blab::build_universal(two_point_set(), four_constant_targets());
    REQUIRE_FALSE(T.failed_stage.has_value());
    const cplx z{0.3, -0.4};
    const double r = 0.77;
    REQUIRE(std::abs(blab::evaluate_partial(T, 0, r, z) - blab::evaluate(T.factors[0], r * z)) <
            1e-15);
    REQUIRE(std::abs(blab::evaluate_partial(T, 3, r, z) - product_at(T, 0, 3, r * z)) < 1e-14);
    REQUIRE_THROWS_AS(blab::evaluate_partial(T, 9, r, z), blab::domain_error);
    REQUIRE_THROWS_AS(blab::evaluate_partial(T, 0, 1.5, z), blab::domain_error);
    REQUIRE_THROWS_AS(blab::evaluate_partial(T, 0, r, cplx{2.0, 0.0}), blab::domain_error);

    // consistency with the trace measurement
    const auto rows = blab::error_trace(T);
    for (std::size_t k = 0; k < rows.size(); ++k) {
        double e = 0.0;
        for (std::size_t j = 0; j < T.K.points.size(); ++j)
            e = std::max(e, std::abs(blab::evaluate_partial(T, 3, T.radii[k], T.K.points[j]) -
                                     T.targets[k][j]));
        REQUIRE(e == Catch::Approx(rows[k].measured).margin(1e-14));
    }
}

TEST_CASE("annulus base clears the outermost zero", "[universal]") {
    blab::FiniteBlaschkeProduct partial{cplx{1.0, 0.0}, {cplx{0.8, 0.0}, cplx{0.1, 0.2}}};
    const double R0 = blab::detail::annulus_base_radius(partial, {cplx{1.0, 0.0}}, 0.25);
    REQUIRE(R0 > 0.8);
    REQUIRE(R0 < 1.0);
}

TEST_CASE("membership self-check passes at the certificate tolerance", "[universal]") {
    const auto T = blab::build_universal(two_point_set(), four_constant_targets());
    REQUIRE_FALSE(T.failed_stage.has_value());
    const blab::Evaluator f = [&](cplx z) { return product_at(T, 0, 3, z); };
    const auto rows = blab::error_trace(T);
    const auto rep = blab::check_membership(f, T.K, T.targets, blab::RadiusSchedule{T.radii},
                                            rows[0].certified);
    REQUIRE(rep.pass);
    REQUIRE(rep.probes.size() == 4);
    for (std::size_t k = 0; k < 4; ++k) {
        REQUIRE(rep.probes[k].best_error <= rows[k].certified);
        REQUIRE(rep.probes[k].best_error <= rows[k].measured + 1e-12);
    }
}

TEST_CASE("membership rejects what no dilate can reach", "[universal]") {
    const blab::Evaluator f = [](cplx z) { return z; };
    const blab::BoundarySampleSet K{{cplx{1.0, 0.0}}};
    const auto rep =
        blab::check_membership(f, K, {{cplx{-1.0, 0.0}}}, blab::RadiusSchedule{{0.3, 0.6, 0.9}},
                               1.0);
    REQUIRE(rep.probes[0].best_error >= 1.0);
    REQUIRE_FALSE(rep.pass);
}

TEST_CASE("membership finds an exact dilate hit", "[universal]") {
    const blab::FiniteBlaschkeProduct b{cplx{1.0, 0.0}, {cplx{0.3, 0.1}, cplx{-0.2, 0.4}}};
    const blab::Evaluator f = [&](cplx z) { return blab::evaluate(b, z); };
    const auto K = two_point_set();
    const double r_hit = 0.6;
    std::vector<cplx> probe;
    for (cplx p : K.points) probe.push_back(blab::evaluate(b, r_hit * p));
    const auto rep =
        blab::check_membership(f, K, {probe}, blab::RadiusSchedule{{0.2, r_hit, 0.95}}, 1e-12);
    REQUIRE(rep.pass);
    REQUIRE(rep.probes[0].best_radius == Catch::Approx(r_hit));
    REQUIRE(rep.probes[0].best_error < 1e-15);
}

TEST_CASE("a pinned schedule below the settled annulus marks the stage", "[universal]") {
    const auto T = blab::build_universal(two_point_set(), four_constant_targets(),
                                         blab::RadiusSchedule{{0.3, 0.31}});
    REQUIRE(T.failed_stage.has_value());
    REQUIRE(*T.failed_stage == 1);
    REQUIRE(T.factors.size() == 1);
    REQUIRE(T.radii.size() == 1);
    REQUIRE(T.certificates.size() == 1);
    REQUIRE(T.targets.size() == 4);  // the request is kept in full
}

TEST_CASE("target validation rejects oversized data", "[universal]") {
    const auto K = two_point_set();
    REQUIRE_THROWS_AS((blab::build_universal(K, {{cplx{1.5, 0.0}, cplx{0.0, 0.0}}})),
                      blab::domain_error);
    REQUIRE_THROWS_AS((blab::build_universal(K, {{cplx{0.5, 0.0}}})), blab::domain_error);
    REQUIRE_THROWS_AS(blab::build_universal(K, {}), blab::domain_error);
    const std::vector<std::vector<cplx>> too_many(14, {cplx{0.1, 0.0}, cplx{0.1, 0.0}});
    REQUIRE_THROWS_AS(blab::build_universal(K, too_many), blab::domain_error);
}
