#pragma once

#include <cmath>
#include <complex>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "blab/blaschke.hpp"
#include "blab/sample_set.hpp"
#include "blab/simultaneous.hpp"
#include "blab/singular.hpp"
#include "blab/types.hpp"
#include "blab/universal.hpp"

namespace blab::io {

/// Insertion-ordered JSON: key order in the output is exactly the order the
/// code inserted, which keeps emission reproducible.
using json = nlohmann::ordered_json;

namespace detail {

inline void dump_value(std::string& out, const json& v) {
    switch (v.type()) {
        case json::value_t::object: {
            out += '{';
            bool first = true;
            for (auto it = v.begin(); it != v.end(); ++it) {
                if (!first) out += ',';
                first = false;
                out += json(it.key()).dump();
                out += ':';
                dump_value(out, it.value());
            }
            out += '}';
            return;
        }
        case json::value_t::array: {
            out += '[';
            for (std::size_t i = 0; i < v.size(); ++i) {
                if (i) out += ',';
                dump_value(out, v[i]);
            }
            out += ']';
            return;
        }
        case json::value_t::string:
            out += v.dump();
            return;
        case json::value_t::boolean:
            out += v.get<bool>() ? "true" : "false";
            return;
        case json::value_t::number_integer:
            out += std::to_string(v.get<long long>());
            return;
        case json::value_t::number_unsigned:
            out += std::to_string(v.get<unsigned long long>());
            return;
        case json::value_t::number_float: {
            const double d = v.get<double>();
            if (!std::isfinite(d))
                throw domain_error("serialize: non-finite number has no JSON form");
            char buf[40];
            std::snprintf(buf, sizeof buf, "%.17g", d);
            out += buf;
            return;
        }
        default:
            out += "null";
            return;
    }
}

inline std::string format_double(double d) {
    if (!std::isfinite(d)) throw domain_error("serialize: non-finite number has no CSV form");
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", d);
    return buf;
}

}  // namespace detail

/// Compact JSON text with doubles at 17 significant digits: enough to round
/// trip exactly, byte-stable for identical inputs.
inline std::string dump_deterministic(const json& v) {
    std::string out;
    detail::dump_value(out, v);
    out += '\n';
    return out;
}

inline json to_json(cplx z) { return json::array({z.real(), z.imag()}); }

inline cplx complex_from(const json& j) {
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw domain_error("json: complex values are [re, im] arrays");
    return cplx{j[0].get<double>(), j[1].get<double>()};
}

inline json to_json(const FiniteBlaschkeProduct& b) {
    json zeros = json::array();
    for (cplx a : b.zeros) zeros.push_back(to_json(a));
    json j;
    j["zeta"] = to_json(b.zeta);
    j["zeros"] = std::move(zeros);
    return j;
}

inline FiniteBlaschkeProduct blaschke_from(const json& j) {
    if (!j.is_object() || !j.contains("zeta") || !j.contains("zeros"))
        throw domain_error("json: a product needs zeta and zeros");
    std::vector<cplx> zeros;
    for (const auto& z : j.at("zeros")) zeros.push_back(complex_from(z));
    return FiniteBlaschkeProduct{complex_from(j.at("zeta")), std::move(zeros)};
}

inline json to_json(const SingularInnerSurrogate& s) {
    json j;
    j["type"] = "singular-surrogate";
    j["B"] = to_json(s.B);
    return j;
}

inline SingularInnerSurrogate surrogate_from(const json& j) {
    if (!j.is_object() || j.value("type", "") != std::string("singular-surrogate") ||
        !j.contains("B"))
        throw domain_error("json: a surrogate is {type: singular-surrogate, B: ...}");
    return SingularInnerSurrogate{blaschke_from(j.at("B"))};
}

inline json to_json(const std::vector<BudgetEntry>& log) {
    json rows = json::array();
    for (const auto& e : log) {
        json r;
        r["stage"] = e.stage;
        r["requested"] = e.requested;
        r["achieved"] = e.achieved;
        rows.push_back(std::move(r));
    }
    return rows;
}

inline json to_json(const SimultaneousResult& res) {
    json j;
    j["B"] = to_json(res.B);
    j["err_K"] = res.err_K;
    j["err_L"] = res.err_L;
    j["r0"] = res.r0 ? json(*res.r0) : json(nullptr);
    j["r_used"] = res.r_used ? json(*res.r_used) : json(nullptr);
    j["budget_log"] = to_json(res.budget_log);
    return j;
}

inline json points_to_json(const std::vector<cplx>& pts) {
    json a = json::array();
    for (cplx p : pts) a.push_back(to_json(p));
    return a;
}

inline json to_json(const TruncatedUniversalProduct& T) {
    json j;
    json factors = json::array();
    for (const auto& b : T.factors) factors.push_back(to_json(b));
    j["factors"] = std::move(factors);
    json radii = json::array();
    for (double r : T.radii) radii.push_back(r);
    j["radii"] = std::move(radii);
    json targets = json::array();
    for (const auto& v : T.targets) targets.push_back(points_to_json(v));
    j["targets"] = std::move(targets);
    json budgets = json::array();
    for (const auto& b : T.budgets) {
        json e;
        e["boundary"] = b.boundary;
        e["conv"] = b.conv;
        budgets.push_back(std::move(e));
    }
    j["budgets"] = std::move(budgets);
    json certs = json::array();
    for (const auto& c : T.certificates) {
        json e;
        e["stage"] = static_cast<unsigned long long>(c.stage);
        e["r"] = c.r;
        e["annulus_base"] = c.annulus_base;
        e["boundary_residual"] = c.boundary_residual;
        e["oscillation"] = c.oscillation;
        e["conv_bound"] = c.conv_bound;
        e["conv_residual"] = c.conv_residual;
        certs.push_back(std::move(e));
    }
    j["certificates"] = std::move(certs);
    json K;
    K["points"] = points_to_json(T.K.points);
    j["K"] = std::move(K);
    j["total_degree"] = static_cast<unsigned long long>(total_degree(T));
    j["failed_stage"] =
        T.failed_stage ? json(static_cast<unsigned long long>(*T.failed_stage)) : json(nullptr);
    return j;
}

inline TruncatedUniversalProduct universal_from(const json& j) {
    TruncatedUniversalProduct T;
    for (const auto& f : j.at("factors")) T.factors.push_back(blaschke_from(f));
    for (const auto& r : j.at("radii")) T.radii.push_back(r.get<double>());
    for (const auto& v : j.at("targets")) {
        std::vector<cplx> row;
        for (const auto& t : v) row.push_back(complex_from(t));
        T.targets.push_back(std::move(row));
    }
    if (j.contains("budgets"))
        for (const auto& b : j.at("budgets"))
            T.budgets.push_back(
                StageBudget{b.at("boundary").get<double>(), b.at("conv").get<double>()});
    std::vector<cplx> pts;
    for (const auto& p : j.at("K").at("points")) pts.push_back(complex_from(p));
    T.K = BoundarySampleSet{std::move(pts)};
    if (j.contains("failed_stage") && !j.at("failed_stage").is_null())
        T.failed_stage = j.at("failed_stage").get<std::size_t>();
    return T;
}

inline std::string trace_csv(const std::vector<TraceRow>& rows) {
    std::string out = "stage,r,measured,certified\n";
    for (const auto& r : rows) {
        out += std::to_string(r.stage);
        out += ',';
        out += detail::format_double(r.r);
        out += ',';
        out += detail::format_double(r.measured);
        out += ',';
        out += detail::format_double(r.certified);
        out += '\n';
    }
    return out;
}

}  // namespace blab::io
