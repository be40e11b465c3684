// blab: JSON problem ingestion, pipeline dispatch, JSON/CSV artifact emission.
//
// Exit codes: 0 all requested tolerances met, 1 completed but a tolerance was
// missed, 2 problem-spec validation failure (nothing written), 3 pipeline
// failure. Identical spec and seed always produce byte-identical result.json.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <CLI11.hpp>

#include <blab/approx.hpp>
#include <blab/blaschke.hpp>
#include <blab/io.hpp>
#include <blab/moebius.hpp>
#include <blab/region.hpp>
#include <blab/sample_set.hpp>
#include <blab/simultaneous.hpp>
#include <blab/singular.hpp>
#include <blab/types.hpp>
#include <blab/universal.hpp>

namespace {

using blab::cplx;
using blab::io::json;

const std::set<std::string> kTasks = {
    "caratheodory",  "fisher",        "simultaneous-circle", "simultaneous-disc",
    "singular-circle", "singular-disc", "universal",           "check-membership",
    "verify"};

struct Problem {
    std::optional<blab::BoundarySampleSet> K;
    std::optional<blab::InteriorRegion> L;
    std::function<cplx(cplx)> f;
    double epsilon = 0.0;
    long long seed = 0;
    int grid_n = 4096;
    std::optional<double> r_request;
    std::vector<std::vector<cplx>> stage_targets;
    std::optional<blab::RadiusSchedule> schedule;
    std::vector<std::vector<cplx>> probes;
    double tol = 0.0;
    json verify_problem;
    json verify_approximant;
};

struct Artifacts {
    json result;
    std::optional<std::string> trace;
    std::string trace_file;
    int exit_code = 0;
    std::string note;  // stderr message accompanying a nonzero exit
};

std::vector<cplx> complex_list(const json& j) {
    std::vector<cplx> out;
    for (const auto& e : j) out.push_back(blab::io::complex_from(e));
    return out;
}

blab::BoundarySampleSet sample_set_from(const json& jk) {
    std::vector<double> angles;
    for (const auto& a : jk.at("angles")) {
        if (!a.is_number()) throw blab::domain_error("spec: K angles must be numbers");
        angles.push_back(a.get<double>());
    }
    std::vector<cplx> targets;
    if (jk.contains("targets")) targets = complex_list(jk.at("targets"));
    return blab::from_angles(angles, std::move(targets));
}

blab::InteriorRegion region_from(const json& jl) {
    const std::string type = jl.at("type").get<std::string>();
    if (type == "disc")
        return blab::InteriorRegion::disc(jl.at("radius").get<double>(), jl.value("grid", 8));
    if (type == "points") return blab::InteriorRegion::points(complex_list(jl.at("points")));
    throw blab::domain_error("spec: L.type must be disc or points");
}

cplx horner(const std::vector<cplx>& coeffs, cplx z) {
    cplx acc{0.0, 0.0};
    for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * z + *it;
    return acc;
}

std::function<cplx(cplx)> evaluator_from(const json& jf) {
    const std::string type = jf.at("type").get<std::string>();
    if (type == "blaschke") {
        auto b = blab::io::blaschke_from(jf);
        return [b](cplx z) { return blab::evaluate(b, z); };
    }
    if (type == "constant") {
        const cplx c = blab::io::complex_from(jf.at("value"));
        return [c](cplx) { return c; };
    }
    if (type == "rational") {
        auto num = complex_list(jf.at("numerator"));
        auto den = complex_list(jf.at("denominator"));
        if (den.empty() || std::all_of(den.begin(), den.end(), [](cplx c) { return c == 0.0; }))
            throw blab::domain_error("spec: rational denominator must be nonzero");
        return [num, den](cplx z) { return horner(num, z) / horner(den, z); };
    }
    if (type == "singular-surrogate") {
        auto s = blab::io::surrogate_from(jf);
        return [s](cplx z) { return blab::surrogate_eval(s, z); };
    }
    throw blab::domain_error("spec: f.type must be blaschke, constant, rational, or "
                             "singular-surrogate");
}

double require_epsilon(const json& spec) {
    const double eps = spec.at("epsilon").get<double>();
    if (!(eps > 0.0 && eps < 1.0)) throw blab::domain_error("spec: epsilon must lie in (0,1)");
    return eps;
}

Problem load_problem(const json& spec, const std::string& task) {
    Problem P;
    if (spec.contains("task") && spec.at("task").get<std::string>() != task)
        throw blab::domain_error("spec: task field disagrees with the command line");
    P.seed = spec.value("seed", 0LL);
    P.grid_n = spec.value("grid_N", 4096);
    if (spec.contains("K")) P.K = sample_set_from(spec.at("K"));
    if (spec.contains("L")) P.L = region_from(spec.at("L"));
    if (spec.contains("f")) P.f = evaluator_from(spec.at("f"));
    if (spec.contains("r")) P.r_request = spec.at("r").get<double>();

    if (task == "caratheodory") {
        P.epsilon = require_epsilon(spec);
        if (!P.f) throw blab::domain_error("spec: caratheodory needs f");
        if (!P.L) throw blab::domain_error("spec: caratheodory needs L");
    } else if (task == "fisher") {
        P.epsilon = require_epsilon(spec);
        if (!P.K) throw blab::domain_error("spec: fisher needs K");
        P.K->require_unimodular_targets(1e-9);
    } else if (task == "simultaneous-circle" || task == "singular-circle") {
        P.epsilon = require_epsilon(spec);
        if (!P.K || !P.L || !P.f)
            throw blab::domain_error("spec: " + task + " needs K, L, and f");
        P.K->require_unimodular_targets();
    } else if (task == "simultaneous-disc" || task == "singular-disc") {
        P.epsilon = require_epsilon(spec);
        if (!P.K || !P.L || !P.f)
            throw blab::domain_error("spec: " + task + " needs K, L, and f");
        P.K->require_ball_targets();
    } else if (task == "universal") {
        if (!P.K) throw blab::domain_error("spec: universal needs K");
        for (const auto& v : spec.at("stage_targets")) P.stage_targets.push_back(complex_list(v));
        if (spec.contains("schedule")) {
            std::vector<double> rho;
            for (const auto& r : spec.at("schedule")) rho.push_back(r.get<double>());
            P.schedule = blab::RadiusSchedule{std::move(rho)};
        }
    } else if (task == "check-membership") {
        if (!P.K) throw blab::domain_error("spec: check-membership needs K");
        if (!P.f) throw blab::domain_error("spec: check-membership needs f");
        for (const auto& v : spec.at("probes")) P.probes.push_back(complex_list(v));
        std::vector<double> rho;
        for (const auto& r : spec.at("schedule")) rho.push_back(r.get<double>());
        P.schedule = blab::RadiusSchedule{std::move(rho)};
        P.tol = spec.at("tol").get<double>();
        if (!(P.tol > 0.0)) throw blab::domain_error("spec: tol must be positive");
    } else if (task == "verify") {
        P.verify_problem = spec.at("problem");
        P.verify_approximant = spec.at("approximant");
    }
    return P;
}

// ---- measurement helpers ----

double boundary_error(const std::function<cplx(cplx)>& F, const blab::BoundarySampleSet& K,
                      double r) {
    double worst = 0.0;
    for (std::size_t j = 0; j < K.size(); ++j)
        worst = std::max(worst, std::abs(F(r * K.points[j]) - K.targets[j]));
    return worst;
}

double interior_error(const std::function<cplx(cplx)>& F, const std::function<cplx(cplx)>& f,
                      const blab::InteriorRegion& L) {
    double worst = 0.0;
    for (cplx z : L.verification_grid()) worst = std::max(worst, std::abs(F(z) - f(z)));
    return worst;
}

// ---- trace emission ----

struct AngleRow {
    double angle;
    cplx point;
    cplx target;
};

std::vector<AngleRow> sorted_angles(const blab::BoundarySampleSet& K) {
    std::vector<AngleRow> rows;
    for (std::size_t j = 0; j < K.size(); ++j) {
        double a = std::arg(K.points[j]);
        if (a < 0.0) a += blab::tau;
        rows.push_back({a, K.points[j], K.targets.empty() ? cplx{0.0, 0.0} : K.targets[j]});
    }
    std::sort(rows.begin(), rows.end(),
              [](const AngleRow& x, const AngleRow& y) { return x.angle < y.angle; });
    return rows;
}

std::string csv_boundary(const std::function<cplx(cplx)>& F, const blab::BoundarySampleSet& K,
                         double r) {
    std::string out = "angle,error\n";
    for (const AngleRow& row : sorted_angles(K)) {
        out += blab::io::detail::format_double(row.angle);
        out += ',';
        out += blab::io::detail::format_double(std::abs(F(r * row.point) - row.target));
        out += '\n';
    }
    return out;
}

std::string csv_radial(const std::function<cplx(cplx)>& F, const std::vector<double>& thetas,
                       int steps) {
    std::string out = "theta,r,modulus\n";
    for (double th : thetas) {
        const cplx dir = std::polar(1.0, th);
        for (int i = 1; i <= steps; ++i) {
            const double r = static_cast<double>(i) / (steps + 1);
            out += blab::io::detail::format_double(th);
            out += ',';
            out += blab::io::detail::format_double(r);
            out += ',';
            out += blab::io::detail::format_double(std::abs(F(r * dir)));
            out += '\n';
        }
    }
    return out;
}

std::vector<double> trace_thetas(const Problem& P) {
    if (!P.K || P.K->points.empty()) return {0.0};
    std::vector<double> out;
    for (const AngleRow& row : sorted_angles(*P.K)) out.push_back(row.angle);
    return out;
}

void attach_trace(Artifacts& A, const std::string& kind, const Problem& P,
                  const std::function<cplx(cplx)>& F, double boundary_r) {
    if (kind.empty()) return;
    if (kind == "boundary") {
        if (!P.K || P.K->targets.empty())
            throw blab::domain_error("trace: boundary trace needs K with targets");
        A.trace = csv_boundary(F, *P.K, boundary_r);
        A.trace_file = "trace_boundary.csv";
    } else if (kind == "radial") {
        A.trace = csv_radial(F, trace_thetas(P), P.grid_n);
        A.trace_file = "trace_radial.csv";
    } else {
        throw blab::domain_error("trace: kind '" + kind + "' is not available for this task");
    }
}

json header(const std::string& task, const Problem& P) {
    json j;
    j["task"] = task;
    j["seed"] = P.seed;
    j["grid_N"] = P.grid_n;
    return j;
}

// ---- task handlers ----

Artifacts run_caratheodory(const Problem& P, const std::string& trace) {
    Artifacts A;
    const auto B = blab::caratheodory_approximate(P.f, *P.L, P.epsilon);
    const auto F = [&B](cplx z) { return blab::evaluate(B, z); };
    const double err = interior_error(F, P.f, *P.L);
    A.result = header("caratheodory", P);
    A.result["epsilon"] = P.epsilon;
    A.result["B"] = blab::io::to_json(B);
    A.result["err_L"] = err;
    A.exit_code = err <= P.epsilon ? 0 : 1;
    attach_trace(A, trace, P, F, 1.0);
    return A;
}

Artifacts run_fisher(const Problem& P, const std::string& trace) {
    Artifacts A;
    const auto B = blab::fisher_interpolate(*P.K, P.epsilon);
    const auto F = [&B](cplx z) { return blab::evaluate(B, z); };
    const double err = boundary_error(F, *P.K, 1.0);
    A.result = header("fisher", P);
    A.result["epsilon"] = P.epsilon;
    A.result["B"] = blab::io::to_json(B);
    A.result["err_K"] = err;
    A.exit_code = err <= P.epsilon ? 0 : 1;
    attach_trace(A, trace, P, F, 1.0);
    return A;
}

Artifacts run_simultaneous_circle(const Problem& P, const std::string& trace) {
    Artifacts A;
    const auto res = blab::simultaneous_circle(*P.K, P.f, *P.L, P.epsilon);
    A.result = header("simultaneous-circle", P);
    A.result["epsilon"] = P.epsilon;
    A.result["result"] = blab::io::to_json(res);
    A.exit_code = (res.err_K <= P.epsilon && res.err_L <= P.epsilon) ? 0 : 1;
    const auto B = res.B;
    attach_trace(A, trace, P, [B](cplx z) { return blab::evaluate(B, z); }, 1.0);
    return A;
}

Artifacts run_simultaneous_disc(const Problem& P, const std::string& trace) {
    Artifacts A;
    const auto base = blab::simultaneous_disc(*P.K, P.f, *P.L, P.epsilon);
    const double r0 = base.r0.value();
    std::vector<double> radii;
    if (P.r_request)
        radii.push_back(*P.r_request);
    else
        for (double q : {0.25, 0.5, 0.75}) radii.push_back(r0 + (1.0 - r0) * q);
    bool met = base.err_K <= P.epsilon && base.err_L <= P.epsilon;
    json per_r = json::array();
    for (double r : radii) {
        const auto res = blab::simultaneous_disc(*P.K, P.f, *P.L, P.epsilon, r);
        met = met && res.err_K <= P.epsilon && res.err_L <= P.epsilon;
        per_r.push_back(blab::io::to_json(res));
    }
    A.result = header("simultaneous-disc", P);
    A.result["epsilon"] = P.epsilon;
    A.result["r0"] = r0;
    A.result["base"] = blab::io::to_json(base);
    A.result["per_r"] = std::move(per_r);
    A.exit_code = met ? 0 : 1;
    const auto B = base.B;
    attach_trace(A, trace, P, [B](cplx z) { return blab::evaluate(B, z); },
                 base.r_used.value_or(1.0));
    return A;
}

Artifacts run_singular_circle(const Problem& P, const std::string& trace) {
    Artifacts A;
    const auto S = blab::simultaneous_singular_circle(*P.K, P.f, *P.L, P.epsilon);
    const auto F = [S](cplx z) { return blab::surrogate_eval(S, z); };
    const double err_K = boundary_error(F, *P.K, 1.0);
    const double err_L = interior_error(F, P.f, *P.L);
    A.result = header("singular-circle", P);
    A.result["epsilon"] = P.epsilon;
    A.result["surrogate"] = blab::io::to_json(S);
    A.result["err_K"] = err_K;
    A.result["err_L"] = err_L;
    A.exit_code = (err_K <= P.epsilon && err_L <= P.epsilon) ? 0 : 1;
    attach_trace(A, trace, P, F, 1.0);
    return A;
}

Artifacts run_singular_disc(const Problem& P, const std::string& trace) {
    Artifacts A;
    const auto fam = blab::simultaneous_singular_disc(*P.K, P.f, *P.L, P.epsilon);
    std::vector<double> radii;
    if (P.r_request)
        radii.push_back(*P.r_request);
    else
        for (double q : {0.25, 0.5, 0.75}) radii.push_back(fam.r0 + (1.0 - fam.r0) * q);
    bool met = true;
    json per_r = json::array();
    std::optional<blab::SingularInnerSurrogate> last;
    double last_r = 1.0;
    for (double r : radii) {
        const auto S = fam.at(r);
        const auto F = [S](cplx z) { return blab::surrogate_eval(S, z); };
        const double err_K = boundary_error(F, *P.K, r);
        const double err_L = interior_error(F, P.f, *P.L);
        met = met && err_K <= P.epsilon && err_L <= P.epsilon;
        json e;
        e["r"] = r;
        e["surrogate"] = blab::io::to_json(S);
        e["err_K"] = err_K;
        e["err_L"] = err_L;
        per_r.push_back(std::move(e));
        last = S;
        last_r = r;
    }
    A.result = header("singular-disc", P);
    A.result["epsilon"] = P.epsilon;
    A.result["r0"] = fam.r0;
    A.result["per_r"] = std::move(per_r);
    A.exit_code = met ? 0 : 1;
    if (last) {
        const auto S = *last;
        attach_trace(A, trace, P, [S](cplx z) { return blab::surrogate_eval(S, z); }, last_r);
    }
    return A;
}

Artifacts run_universal(const Problem& P, const std::string& trace) {
    Artifacts A;
    const auto T = blab::build_universal(*P.K, P.stage_targets, P.schedule);
    const auto rows = blab::error_trace(T);
    A.result = header("universal", P);
    A.result["universal"] = blab::io::to_json(T);
    json jrows = json::array();
    bool met = !T.failed_stage.has_value();
    for (const auto& r : rows) {
        json e;
        e["stage"] = static_cast<unsigned long long>(r.stage);
        e["r"] = r.r;
        e["measured"] = r.measured;
        e["certified"] = r.certified;
        jrows.push_back(std::move(e));
        met = met && r.measured <= r.certified;
    }
    A.result["trace"] = std::move(jrows);
    if (!trace.empty()) {
        if (trace != "universal")
            throw blab::domain_error("trace: universal task only emits the universal trace");
        A.trace = blab::io::trace_csv(rows);
        A.trace_file = "trace_universal.csv";
    }
    if (T.failed_stage) {
        A.exit_code = 3;
        A.note = "universal: stage " + std::to_string(*T.failed_stage) +
                 " construction failed; partial product serialized";
    } else {
        A.exit_code = met ? 0 : 1;
    }
    return A;
}

Artifacts run_membership(const Problem& P, const std::string& trace) {
    if (!trace.empty())
        throw blab::domain_error("trace: check-membership emits no traces");
    Artifacts A;
    const auto rep = blab::check_membership(P.f, *P.K, P.probes, *P.schedule, P.tol);
    A.result = header("check-membership", P);
    A.result["tol"] = P.tol;
    json probes = json::array();
    for (const auto& pr : rep.probes) {
        json e;
        e["probe"] = static_cast<unsigned long long>(pr.probe);
        e["best_radius"] = pr.best_radius;
        e["best_error"] = pr.best_error;
        probes.push_back(std::move(e));
    }
    A.result["probes"] = std::move(probes);
    A.result["pass"] = rep.pass;
    A.exit_code = rep.pass ? 0 : 1;
    return A;
}

// Re-checks a serialized approximant against a problem description, so audit
// never trusts the numbers stored next to the approximant.
Artifacts run_verify(const Problem& P, const std::string& trace) {
    if (!trace.empty()) throw blab::domain_error("trace: verify emits no traces");
    Artifacts A;
    const json& prob = P.verify_problem;
    const json& app = P.verify_approximant;
    const std::string ptask = prob.at("task").get<std::string>();
    if (!kTasks.count(ptask) || ptask == "verify" || ptask == "check-membership")
        throw blab::domain_error("verify: problem.task must name an approximation task");
    Problem Q = load_problem(prob, ptask);

    A.result = header("verify", P);
    A.result["problem_task"] = ptask;
    json checks = json::array();
    bool pass = true;
    const auto check = [&](const std::string& name, double value, double bound) {
        json c;
        c["name"] = name;
        c["value"] = value;
        c["bound"] = bound;
        c["pass"] = value <= bound;
        pass = pass && value <= bound;
        checks.push_back(std::move(c));
    };

    if (ptask == "universal") {
        const auto T = blab::io::universal_from(app.contains("universal") ? app.at("universal")
                                                                          : app);
        for (const auto& row : blab::error_trace(T))
            check("stage_" + std::to_string(row.stage), row.measured, row.certified);
        if (T.failed_stage) pass = false;
    } else if (ptask == "singular-circle" || ptask == "singular-disc") {
        const json& japp = app.contains("surrogate") ? app.at("surrogate") : app;
        const auto S = blab::io::surrogate_from(japp);
        const auto F = [S](cplx z) { return blab::surrogate_eval(S, z); };
        const double r = app.value("r", prob.value("r", 1.0));
        if (Q.K && !Q.K->targets.empty())
            check("err_K", boundary_error(F, *Q.K, ptask == "singular-disc" ? r : 1.0),
                  Q.epsilon);
        if (Q.L && Q.f) check("err_L", interior_error(F, Q.f, *Q.L), Q.epsilon);
    } else {
        json japp = app;
        std::optional<double> r_used;
        if (japp.contains("B")) japp = japp.at("B");
        if (app.contains("r_used") && app.at("r_used").is_number())
            r_used = app.at("r_used").get<double>();
        const auto B = blab::io::blaschke_from(japp);
        const auto F = [B](cplx z) { return blab::evaluate(B, z); };
        if (ptask == "fisher" || ptask == "simultaneous-circle")
            check("err_K", boundary_error(F, *Q.K, 1.0), Q.epsilon);
        if (ptask == "simultaneous-disc") {
            if (!r_used && Q.r_request) r_used = Q.r_request;
            if (!r_used)
                throw blab::domain_error("verify: disc approximant needs r_used or problem r");
            check("err_K", boundary_error(F, *Q.K, *r_used), Q.epsilon);
        }
        if (Q.L && Q.f && ptask != "fisher") check("err_L", interior_error(F, Q.f, *Q.L), Q.epsilon);
    }

    A.result["checks"] = std::move(checks);
    A.result["pass"] = pass;
    A.exit_code = pass ? 0 : 1;
    return A;
}

Artifacts dispatch(const std::string& task, const Problem& P, const std::string& trace) {
    if (task == "caratheodory") return run_caratheodory(P, trace);
    if (task == "fisher") return run_fisher(P, trace);
    if (task == "simultaneous-circle") return run_simultaneous_circle(P, trace);
    if (task == "simultaneous-disc") return run_simultaneous_disc(P, trace);
    if (task == "singular-circle") return run_singular_circle(P, trace);
    if (task == "singular-disc") return run_singular_disc(P, trace);
    if (task == "universal") return run_universal(P, trace);
    if (task == "check-membership") return run_membership(P, trace);
    return run_verify(P, trace);
}

bool write_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    out << content;
    return static_cast<bool>(out);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"finite Blaschke approximation pipelines"};
    std::string task, spec_path, out_dir, trace;
    long long seed = 0;
    int grid_n = 4096;
    app.add_option("task", task, "one of: caratheodory fisher simultaneous-circle "
                                 "simultaneous-disc singular-circle singular-disc universal "
                                 "check-membership verify")
        ->required();
    app.add_option("--spec", spec_path, "problem description (JSON)")->required();
    app.add_option("--out", out_dir, "artifact directory")->required();
    app.add_option("--trace", trace, "CSV trace kind")
        ->check(CLI::IsMember({"boundary", "radial", "universal"}));
    auto* grid_opt = app.add_option("--grid-n", grid_n, "trace sampling resolution");
    auto* seed_opt = app.add_option("--seed", seed, "echoed into result.json");
    CLI11_PARSE(app, argc, argv);

    if (!kTasks.count(task)) {
        std::cerr << "blab: unknown task '" << task << "'\n";
        return 2;
    }

    json spec;
    {
        std::ifstream in(spec_path, std::ios::binary);
        if (!in) {
            std::cerr << "blab: cannot read spec file '" << spec_path << "'\n";
            return 2;
        }
        try {
            spec = json::parse(in);
        } catch (const json::exception& e) {
            std::cerr << "blab: spec is not valid JSON: " << e.what() << "\n";
            return 2;
        }
    }

    Problem P;
    try {
        P = load_problem(spec, task);
        if (seed_opt->count()) P.seed = seed;
        if (grid_opt->count()) P.grid_n = grid_n;
        if (P.grid_n < 1) throw blab::domain_error("spec: grid_N must be positive");
    } catch (const json::exception& e) {
        std::cerr << "blab: spec validation failed: " << e.what() << "\n";
        return 2;
    } catch (const blab::domain_error& e) {
        std::cerr << "blab: spec validation failed: " << e.what() << "\n";
        return 2;
    }

    Artifacts A;
    try {
        A = dispatch(task, P, trace);
    } catch (const blab::domain_error& e) {
        std::cerr << "blab: spec validation failed: " << e.what() << "\n";
        return 2;
    } catch (const blab::pipeline_error& e) {
        std::cerr << "blab: pipeline failure in " << task << ": " << e.what() << "\n";
        if (!e.stage_log.empty()) std::cerr << e.stage_log << "\n";
        return 3;
    } catch (const blab::error& e) {
        std::cerr << "blab: pipeline failure in " << task << ": " << e.what() << "\n";
        return 3;
    } catch (const json::exception& e) {
        std::cerr << "blab: spec validation failed: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "blab: pipeline failure in " << task << ": " << e.what() << "\n";
        return 3;
    }

    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) {
        std::cerr << "blab: cannot create output directory: " << ec.message() << "\n";
        return 3;
    }
    if (!write_file(std::filesystem::path(out_dir) / "result.json",
                    blab::io::dump_deterministic(A.result))) {
        std::cerr << "blab: cannot write result.json\n";
        return 3;
    }
    if (A.trace && !write_file(std::filesystem::path(out_dir) / A.trace_file, *A.trace)) {
        std::cerr << "blab: cannot write " << A.trace_file << "\n";
        return 3;
    }
    if (!A.note.empty()) std::cerr << "blab: " << A.note << "\n";
    return A.exit_code;
}
