#pragma once

// JSON run configurations and report serialization.
//
// Config schema (unknown keys are rejected):
//   domain          [[x, y], ...]                       required
//   beta            ["expr1", "expr2"]                  required
//   mu, f           "expr"                              default "0"
//   parameters      {"name": number, ...}               bound in every expression
//   kind            "direct" | "adjoint"                default "direct"
//   boundary_data   [{"arcs": SELECTOR, "g": "expr"}]   default: none (g = 0)
//   p               [1, 2, "inf", ...]                  default [2]
//   tolerances      {ode_rtol, ode_atol, eps_geom, eps_w, eps_event, max_time,
//                    fd_step, t_probe, eps_trace, eps_cut, max_step_fraction,
//                    w1inf, edge_samples, quad_order, boundary_points, grid_n}
//   solve           {"grid": n, "points": [[x, y], ...], "exact": "expr"}
//   density         {"T": [...], "delta_fraction": r, "shells": n, "per_shell": n}
//   demo            {"p": p, "alpha": a, "m": [...]}
//   output          {"path": file, "format": "json" | "csv", "svg": file}
// SELECTOR is "inflow", "outflow", "all", "edge:i", or {"edge": i, "s0": a, "s1": b};
// edge indices refer to the counterclockwise vertex order.

#include <advect/characteristics.hpp>
#include <advect/config.hpp>
#include <advect/corpus.hpp>
#include <advect/diagnostics.hpp>
#include <advect/error.hpp>
#include <advect/quadrature.hpp>
#include <advect/solver.hpp>

#include "json.hpp"

#include <cmath>
#include <initializer_list>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace advect::io {

using json = nlohmann::json;

inline constexpr int schema_version = 1;

struct DataSpec {
    json arcs;
    std::string g;
};

struct SolveOptions {
    std::optional<int> grid;
    std::vector<Point2> points;
    std::optional<std::string> exact;
};

struct DemoOptions {
    NormOrder p{2.0};
    double alpha = 0.75;
    std::vector<double> m{2, 4, 8, 16};
};

struct OutputOptions {
    std::optional<std::string> path;
    std::optional<std::string> format;
    std::optional<std::string> svg;
};

struct RunConfig {
    std::vector<Point2> vertices;
    std::string beta1, beta2;
    std::string mu = "0";
    std::string f = "0";
    Parameters parameters;
    ProblemKind kind = ProblemKind::direct;
    std::vector<DataSpec> boundary_data;
    std::vector<NormOrder> p{NormOrder(2.0)};
    SolverConfig solver;
    SolveOptions solve;
    DensityOptions density;
    DemoOptions demo;
    OutputOptions output;
};

namespace detail {

[[noreturn]] inline void bad(const std::string& what) { throw Error(ErrorKind::invalid_config, what); }

inline void check_keys(const json& j, const char* where, std::initializer_list<const char*> allowed) {
    if (!j.is_object()) bad(std::string(where) + " must be an object");
    for (const auto& [k, v] : j.items()) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || k == a;
        if (!ok) bad("unknown key '" + k + "' in " + where);
    }
}

inline double number(const json& j, const std::string& what) {
    if (!j.is_number()) bad(what + " must be a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) bad(what + " must be finite");
    return v;
}

inline double positive(const json& j, const std::string& what) {
    const double v = number(j, what);
    if (!(v > 0.0)) bad(what + " must be positive");
    return v;
}

inline int positive_int(const json& j, const std::string& what) {
    if (!j.is_number_integer() || j.get<long long>() < 1) bad(what + " must be a positive integer");
    return j.get<int>();
}

inline std::string text(const json& j, const std::string& what) {
    if (!j.is_string()) bad(what + " must be a string");
    return j.get<std::string>();
}

inline Point2 point(const json& j, const std::string& what) {
    if (!j.is_array() || j.size() != 2) bad(what + " must be a pair [x, y]");
    return {number(j[0], what), number(j[1], what)};
}

} // namespace detail

/// "inf" (or "infinity") or a number >= 1.
inline NormOrder parse_norm_order(const json& j) {
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "inf" || s == "infinity") return NormOrder::infinity();
        try {
            std::size_t used = 0;
            const double v = std::stod(s, &used);
            if (used == s.size()) return NormOrder(v);
        } catch (const std::exception&) {
        }
        detail::bad("p must be a number >= 1 or \"inf\", got \"" + s + "\"");
    }
    const double v = detail::number(j, "p");
    if (!(v >= 1.0)) detail::bad("p must lie in [1, inf]");
    return NormOrder(v);
}

inline json norm_order_json(const NormOrder& p) {
    if (p.is_infinite()) return "infinity";
    return p.p();
}

inline RunConfig parse_run_config(const json& j) {
    using namespace detail;
    check_keys(j, "config",
               {"domain", "beta", "mu", "f", "parameters", "kind", "boundary_data", "p", "tolerances", "solve",
                "density", "demo", "output", "schema_version"});
    RunConfig c;
    if (!j.contains("domain") || !j["domain"].is_array()) bad("config needs 'domain' as a list of [x, y] vertices");
    for (const auto& v : j["domain"]) c.vertices.push_back(point(v, "domain vertex"));
    if (!j.contains("beta") || !j["beta"].is_array() || j["beta"].size() != 2)
        bad("config needs 'beta' as [\"expr1\", \"expr2\"]");
    c.beta1 = text(j["beta"][0], "beta[0]");
    c.beta2 = text(j["beta"][1], "beta[1]");
    if (j.contains("mu")) c.mu = text(j["mu"], "mu");
    if (j.contains("f")) c.f = text(j["f"], "f");
    if (j.contains("parameters")) {
        if (!j["parameters"].is_object()) bad("parameters must be an object");
        for (const auto& [k, v] : j["parameters"].items()) c.parameters[k] = number(v, "parameter " + k);
    }
    if (j.contains("kind")) {
        const auto k = text(j["kind"], "kind");
        if (k == "direct") c.kind = ProblemKind::direct;
        else if (k == "adjoint") c.kind = ProblemKind::adjoint;
        else bad("kind must be \"direct\" or \"adjoint\"");
    }
    if (j.contains("boundary_data")) {
        if (!j["boundary_data"].is_array()) bad("boundary_data must be a list");
        for (const auto& b : j["boundary_data"]) {
            check_keys(b, "boundary_data entry", {"arcs", "g"});
            if (!b.contains("arcs") || !b.contains("g")) bad("boundary_data entries need 'arcs' and 'g'");
            c.boundary_data.push_back({b["arcs"], text(b["g"], "g")});
        }
    }
    if (j.contains("p")) {
        c.p.clear();
        if (j["p"].is_array()) {
            for (const auto& v : j["p"]) c.p.push_back(parse_norm_order(v));
        } else {
            c.p.push_back(parse_norm_order(j["p"]));
        }
        if (c.p.empty()) bad("p must not be empty");
    }
    if (j.contains("tolerances")) {
        const auto& t = j["tolerances"];
        check_keys(t, "tolerances",
                   {"ode_rtol", "ode_atol", "eps_geom", "eps_w", "eps_event", "max_time", "fd_step", "t_probe",
                    "eps_trace", "eps_cut", "max_step_fraction", "w1inf", "edge_samples", "quad_order",
                    "boundary_points", "grid_n"});
        auto& s = c.solver;
        if (t.contains("ode_rtol")) s.ode_rtol = positive(t["ode_rtol"], "ode_rtol");
        if (t.contains("ode_atol")) s.ode_atol_rel = positive(t["ode_atol"], "ode_atol");
        if (t.contains("eps_geom")) s.eps_geom = positive(t["eps_geom"], "eps_geom");
        if (t.contains("eps_w")) s.eps_w = positive(t["eps_w"], "eps_w");
        if (t.contains("eps_event")) s.eps_event = positive(t["eps_event"], "eps_event");
        if (t.contains("max_time")) s.max_time = positive(t["max_time"], "max_time");
        if (t.contains("fd_step")) s.fd_step = positive(t["fd_step"], "fd_step");
        if (t.contains("t_probe")) s.t_probe = positive(t["t_probe"], "t_probe");
        if (t.contains("eps_trace")) s.eps_trace = positive(t["eps_trace"], "eps_trace");
        if (t.contains("eps_cut")) s.eps_cut = positive(t["eps_cut"], "eps_cut");
        if (t.contains("max_step_fraction")) s.max_step_fraction = positive(t["max_step_fraction"], "max_step_fraction");
        if (t.contains("w1inf")) s.w1inf = positive(t["w1inf"], "w1inf");
        if (t.contains("edge_samples")) s.edge_samples = positive_int(t["edge_samples"], "edge_samples");
        if (t.contains("quad_order")) s.quad_order = positive_int(t["quad_order"], "quad_order");
        if (t.contains("boundary_points")) s.boundary_points = positive_int(t["boundary_points"], "boundary_points");
        if (t.contains("grid_n")) s.grid_n = positive_int(t["grid_n"], "grid_n");
        if (s.grid_n < 8) bad("grid_n must be at least 8");
        if (s.edge_samples < 2) bad("edge_samples must be at least 2");
    }
    if (j.contains("solve")) {
        const auto& s = j["solve"];
        check_keys(s, "solve", {"grid", "points", "exact"});
        if (s.contains("grid")) c.solve.grid = positive_int(s["grid"], "solve.grid");
        if (s.contains("points")) {
            if (!s["points"].is_array()) bad("solve.points must be a list");
            for (const auto& p : s["points"]) c.solve.points.push_back(point(p, "solve point"));
        }
        if (s.contains("exact")) c.solve.exact = text(s["exact"], "solve.exact");
    }
    if (j.contains("density")) {
        const auto& d = j["density"];
        check_keys(d, "density", {"T", "delta_fraction", "shells", "per_shell"});
        if (d.contains("T")) {
            if (!d["T"].is_array() || d["T"].empty()) bad("density.T must be a nonempty list");
            c.density.T_list.clear();
            for (const auto& v : d["T"]) c.density.T_list.push_back(positive(v, "density.T"));
        }
        if (d.contains("delta_fraction")) c.density.delta_fraction = positive(d["delta_fraction"], "delta_fraction");
        if (d.contains("shells")) c.density.shells = positive_int(d["shells"], "shells");
        if (d.contains("per_shell")) c.density.per_shell = positive_int(d["per_shell"], "per_shell");
        if (c.density.shells < 2) bad("density.shells must be at least 2");
    }
    if (j.contains("demo")) {
        const auto& d = j["demo"];
        check_keys(d, "demo", {"p", "alpha", "m"});
        if (d.contains("p")) c.demo.p = parse_norm_order(d["p"]);
        if (d.contains("alpha")) c.demo.alpha = positive(d["alpha"], "demo.alpha");
        if (d.contains("m")) {
            if (!d["m"].is_array()) bad("demo.m must be a list");
            c.demo.m.clear();
            for (const auto& v : d["m"]) c.demo.m.push_back(positive(v, "demo.m"));
        }
    }
    if (j.contains("output")) {
        const auto& o = j["output"];
        check_keys(o, "output", {"path", "format", "svg"});
        if (o.contains("path")) c.output.path = text(o["path"], "output.path");
        if (o.contains("format")) {
            c.output.format = text(o["format"], "output.format");
            if (*c.output.format != "json" && *c.output.format != "csv") bad("output.format must be json or csv");
        }
        if (o.contains("svg")) c.output.svg = text(o["svg"], "output.svg");
    }
    return c;
}

inline json to_json(const RunConfig& c) {
    json j;
    j["schema_version"] = schema_version;
    json dom = json::array();
    for (const auto& v : c.vertices) dom.push_back({v.x, v.y});
    j["domain"] = dom;
    j["beta"] = {c.beta1, c.beta2};
    j["mu"] = c.mu;
    j["f"] = c.f;
    if (!c.parameters.empty()) {
        json p = json::object();
        for (const auto& [k, v] : c.parameters) p[k] = v;
        j["parameters"] = p;
    }
    j["kind"] = std::string(to_string(c.kind));
    json bd = json::array();
    for (const auto& b : c.boundary_data) bd.push_back({{"arcs", b.arcs}, {"g", b.g}});
    j["boundary_data"] = bd;
    json ps = json::array();
    for (const auto& p : c.p) ps.push_back(p.is_infinite() ? json("inf") : json(p.p()));
    j["p"] = ps;
    json t;
    const auto& s = c.solver;
    t["ode_rtol"] = s.ode_rtol;
    t["ode_atol"] = s.ode_atol_rel;
    if (s.eps_geom) t["eps_geom"] = *s.eps_geom;
    if (s.eps_w) t["eps_w"] = *s.eps_w;
    if (s.eps_event) t["eps_event"] = *s.eps_event;
    if (s.max_time) t["max_time"] = *s.max_time;
    if (s.fd_step) t["fd_step"] = *s.fd_step;
    if (s.t_probe) t["t_probe"] = *s.t_probe;
    if (s.eps_trace) t["eps_trace"] = *s.eps_trace;
    if (s.w1inf) t["w1inf"] = *s.w1inf;
    t["eps_cut"] = s.eps_cut;
    t["max_step_fraction"] = s.max_step_fraction;
    t["edge_samples"] = s.edge_samples;
    t["quad_order"] = s.quad_order;
    t["boundary_points"] = s.boundary_points;
    t["grid_n"] = s.grid_n;
    j["tolerances"] = t;
    json so = json::object();
    if (c.solve.grid) so["grid"] = *c.solve.grid;
    if (!c.solve.points.empty()) {
        json pts = json::array();
        for (const auto& p : c.solve.points) pts.push_back({p.x, p.y});
        so["points"] = pts;
    }
    if (c.solve.exact) so["exact"] = *c.solve.exact;
    if (!so.empty()) j["solve"] = so;
    j["density"] = {{"T", c.density.T_list},
                    {"delta_fraction", c.density.delta_fraction},
                    {"shells", c.density.shells},
                    {"per_shell", c.density.per_shell}};
    j["demo"] = {{"p", c.demo.p.is_infinite() ? json("inf") : json(c.demo.p.p())},
                 {"alpha", c.demo.alpha},
                 {"m", c.demo.m}};
    json out = json::object();
    if (c.output.path) out["path"] = *c.output.path;
    if (c.output.format) out["format"] = *c.output.format;
    if (c.output.svg) out["svg"] = *c.output.svg;
    if (!out.empty()) j["output"] = out;
    return j;
}

/// Built-in examples as editable configs.
inline RunConfig example_config(std::string_view name, ProblemKind kind = ProblemKind::direct) {
    const auto ex = corpus::example_by_name(name);
    RunConfig c;
    c.kind = kind;
    c.vertices.assign(ex.domain.vertices().begin(), ex.domain.vertices().end());
    c.beta1 = ex.beta.component(0).source();
    c.beta2 = ex.beta.component(1).source();
    c.mu = "1";
    c.f = "0";
    c.boundary_data.push_back({kind == ProblemKind::direct ? "inflow" : "outflow", "1"});
    c.p = {NormOrder(1.0), NormOrder(2.0), NormOrder::infinity()};
    if (name == "square") {
        c.solve.grid = 19;
        c.solve.exact = kind == ProblemKind::direct ? "exp(-x)" : "exp(x - 1)";
    } else {
        c.solve.grid = 20;
    }
    return c;
}

// ---------------------------------------------------------------- problem

struct Problem {
    PolygonalDomain domain;
    VectorField beta;
    ScalarField mu, f;
    FlowContext flow;
    BoundaryClassification bc;
    ProblemData data;
};

inline std::vector<ArcRef> resolve_selector(const json& sel, const PolygonalDomain& d,
                                            const BoundaryClassification& bc) {
    using detail::bad;
    if (sel.is_string()) {
        const auto s = sel.get<std::string>();
        if (s == "inflow") return bc.arcs_with(BoundaryLabel::inflow);
        if (s == "outflow") return bc.arcs_with(BoundaryLabel::outflow);
        if (s == "characteristic") return bc.arcs_with(BoundaryLabel::characteristic);
        if (s == "all") {
            std::vector<ArcRef> out;
            for (std::size_t i = 0; i < d.size(); ++i) out.push_back({i, 0.0, 1.0});
            return out;
        }
        if (s.rfind("edge:", 0) == 0) {
            try {
                std::size_t used = 0;
                const long i = std::stol(s.substr(5), &used);
                if (used == s.size() - 5 && i >= 0 && static_cast<std::size_t>(i) < d.size())
                    return {ArcRef{static_cast<std::size_t>(i), 0.0, 1.0}};
            } catch (const std::exception&) {
            }
            bad("arc selector '" + s + "' names no edge of the domain");
        }
        bad("unknown arc selector '" + s + "'");
    }
    detail::check_keys(sel, "arc selector", {"edge", "s0", "s1"});
    if (!sel.contains("edge") || !sel["edge"].is_number_integer()) bad("arc selector needs an integer 'edge'");
    const long i = sel["edge"].get<long>();
    if (i < 0 || static_cast<std::size_t>(i) >= d.size()) bad("arc selector edge out of range");
    ArcRef a{static_cast<std::size_t>(i), 0.0, 1.0};
    if (sel.contains("s0")) a.s0 = detail::number(sel["s0"], "s0");
    if (sel.contains("s1")) a.s1 = detail::number(sel["s1"], "s1");
    if (!(0.0 <= a.s0 && a.s0 < a.s1 && a.s1 <= 1.0)) bad("arc selector needs 0 <= s0 < s1 <= 1");
    return {a};
}

inline Problem build_problem(const RunConfig& c) {
    Problem p;
    p.domain = build_domain(c.vertices);
    p.beta = VectorField::parse(c.beta1, c.beta2, c.parameters);
    p.mu = parse_field(c.mu, c.parameters);
    p.f = parse_field(c.f, c.parameters);
    p.flow = make_flow_context(p.domain, p.beta, c.solver, p.mu);
    p.bc = classify_boundary(p.flow);
    p.data.beta = p.beta;
    p.data.mu = p.mu;
    p.data.f = p.f;
    p.data.kind = c.kind;
    for (const auto& b : c.boundary_data) {
        const auto g = parse_field(b.g, c.parameters);
        for (const auto& a : resolve_selector(b.arcs, p.flow.domain, p.bc)) p.data.g.push_back({a, g});
    }
    return p;
}

inline SolveContext solve_context(const Problem& p, const SolverConfig& cfg) {
    SolveContext c;
    c.flow = p.flow;
    c.bc = p.bc;
    c.pd = p.data;
    c.cfg = cfg;
    return c;
}

// ---------------------------------------------------------------- reports

/// Finite numbers as numbers, infinities as strings, NaN as null.
inline json num(double v) {
    if (std::isnan(v)) return nullptr;
    if (std::isinf(v)) return v > 0 ? "infinity" : "-infinity";
    return v;
}

inline json to_json(const Point2& p) { return json::array({num(p.x), num(p.y)}); }

inline json to_json(const Tolerances& t) {
    return {{"ode_rtol", t.ode_rtol},         {"ode_atol", t.ode_atol},     {"eps_geom", t.eps_geom},
            {"eps_w", t.eps_w},               {"eps_event", t.eps_event},   {"max_time", t.max_time},
            {"max_step", t.max_step},         {"fd_step", t.fd_step},       {"t_probe", t.t_probe},
            {"eps_trace", t.eps_trace},       {"eps_cut", t.eps_cut},       {"edge_samples", t.edge_samples},
            {"quad_order", t.quad_order},     {"boundary_points", t.boundary_points}, {"grid_n", t.grid_n}};
}

inline json to_json(const FieldNorms& n) {
    return {{"sup_beta", n.sup_beta}, {"inf_beta", n.inf_beta}, {"sup_Dbeta", n.sup_Dbeta}, {"w1inf", n.w1inf},
            {"sup_mu", n.sup_mu},     {"ess_inf_mu", n.ess_inf_mu}, {"grid_n", n.grid_n}};
}

inline json to_json(const ArcRef& a) { return {{"edge", a.edge}, {"s0", a.s0}, {"s1", a.s1}}; }

inline json to_json(const BoundaryClassification& bc, const PolygonalDomain& d,
                    const std::vector<std::string>* edge_names = nullptr) {
    json arcs = json::array();
    for (const auto& a : bc.arcs) {
        json e = to_json(a.arc);
        e["label"] = std::string(to_string(a.label));
        e["from"] = to_json(d.arc_point(a.arc, 0.0));
        e["to"] = to_json(d.arc_point(a.arc, 1.0));
        if (edge_names && a.arc.edge < edge_names->size()) e["edge_name"] = (*edge_names)[a.arc.edge];
        arcs.push_back(e);
    }
    json comps = json::array();
    for (const auto& c : bc.components)
        comps.push_back({{"point", to_json(c.point)}, {"inflow_arcs", c.inflow_arcs}, {"outflow_arcs", c.outflow_arcs}});
    json probes = json::array();
    for (const auto& p : bc.probes)
        probes.push_back({{"edge", p.edge},
                          {"s", p.s},
                          {"point", to_json(p.point)},
                          {"label", std::string(to_string(p.label))},
                          {"ambiguous", p.ambiguous}});
    return {{"arcs", arcs}, {"components", comps}, {"probes", probes}, {"warnings", bc.warnings}};
}

inline json to_json(const NormReport& r) {
    return {{"p", norm_order_json(r.p)},
            {"lp_domain", num(r.lp_domain)},
            {"lp_inflow_weighted", num(r.lp_inflow_weighted)},
            {"lp_outflow_weighted", num(r.lp_outflow_weighted)},
            {"directional_derivative_lp", num(r.directional_derivative_lp)},
            {"graph_norm", num(r.graph_norm)},
            {"trace_graph_norm", num(r.trace_graph_norm)},
            {"one_sided_fallback", r.one_sided_fallback},
            {"order", r.order},
            {"boundary_points", r.boundary_points}};
}

inline json opt(const std::optional<double>& v) { return v ? num(*v) : json(nullptr); }

inline json to_json(const ConstantsReport& r) {
    return {{"p", norm_order_json(r.p)},
            {"q", norm_order_json(r.q)},
            {"sigma_p", num(r.sigma_p)},
            {"sigma_q", num(r.sigma_q)},
            {"C2p", num(r.C2p)},
            {"C2q", num(r.C2q)},
            {"C1p", opt(r.C1p)},
            {"C1p_prime", opt(r.C1p_prime)},
            {"C1_infty", opt(r.C1_infty)},
            {"C1q_tilde", opt(r.C1q_tilde)},
            {"C1q_tilde_prime", opt(r.C1q_tilde_prime)},
            {"inputs", to_json(r.inputs)},
            {"failures", r.failures}};
}

inline json to_json(const Margin& m) {
    json in = json::object();
    for (const auto& [k, v] : m.inputs) in[k] = num(v);
    return {{"name", m.name},     {"inequality", m.inequality}, {"lhs", num(m.lhs)},
            {"rhs", num(m.rhs)},  {"margin", num(m.margin)},     {"holds", m.holds()},
            {"inputs", in}};
}

inline json to_json(const GreenResidual& g) {
    return {{"lhs", num(g.lhs)},
            {"outflow_term", num(g.outflow_term)},
            {"inflow_term", num(g.inflow_term)},
            {"divergence_term", num(g.divergence_term)},
            {"residual", num(g.residual)}};
}

inline json to_json(const SeparationResult& s) {
    return {{"distance", opt(s.distance)}, {"separated", s.separated}};
}

inline json to_json(const StabilityReport& r) {
    json ms = json::array();
    for (const auto& m : r.margins) ms.push_back(to_json(m));
    return {{"kind", std::string(to_string(r.kind))},
            {"p", norm_order_json(r.p)},
            {"solution_norms", to_json(r.solution)},
            {"f_norm", num(r.f_norm)},
            {"g_norm", num(r.g_norm)},
            {"margins", ms},
            {"skipped", r.skipped}};
}

inline json to_json(const WellPosednessReport& r) {
    json sig = json::array();
    for (const auto& [p, s] : r.sigma) sig.push_back({{"p", norm_order_json(p)}, {"sigma_p", num(s)}});
    json cs = json::array();
    for (const auto& c : r.constants) cs.push_back(to_json(c));
    json tm = json::array();
    for (const auto& t : r.trace_margins) tm.push_back({to_json(t.outflow), to_json(t.inflow)});
    json gr = json::array();
    for (const auto& [p, g] : r.green) {
        json e = to_json(g);
        e["p"] = norm_order_json(p);
        gr.push_back(e);
    }
    json st = json::array();
    for (const auto& s : r.stability) st.push_back(to_json(s));
    return {{"schema_version", schema_version},
            {"sigma", sig},
            {"constants", cs},
            {"separation", to_json(r.separation)},
            {"trace_margins", tm},
            {"green_identity", gr},
            {"stability", st}};
}

inline json to_json(const DensityReport& r) {
    json comps = json::array();
    for (const auto& c : r.components) {
        json shells = json::array();
        for (const auto& s : c.shells)
            shells.push_back({{"distance", num(s.distance)},
                              {"tau_min", num(s.tau_min)},
                              {"tau_max", num(s.tau_max)},
                              {"footpoints", s.footpoints},
                              {"not_exited", s.not_exited},
                              {"errors", s.errors}});
        comps.push_back({{"point", to_json(c.point)},
                         {"verdict", std::string(to_string(c.verdict))},
                         {"T_used", opt(c.T_used)},
                         {"tau_min", num(c.tau_min)},
                         {"tau_max", num(c.tau_max)},
                         {"footpoints", c.footpoints},
                         {"shells", shells}});
    }
    json j = {{"schema_version", schema_version},
              {"T", r.options.T_list},
              {"delta_fraction", r.options.delta_fraction},
              {"shells", r.options.shells},
              {"per_shell", r.options.per_shell},
              {"components", comps}};
    if (!r.note.empty()) j["note"] = r.note;
    return j;
}

inline json to_json(const DemoTable& t) {
    json rows = json::array();
    for (const auto& r : t.rows)
        rows.push_back({{"m", r.m},
                        {"graph_pow", num(r.graph_pow)},
                        {"graph_pow_exact", num(r.graph_pow_exact)},
                        {"graph_rel_error", num(r.graph_rel_error)},
                        {"outflow_pow", num(r.outflow_pow)},
                        {"outflow_pow_exact", num(r.outflow_pow_exact)},
                        {"outflow_rel_error", num(r.outflow_rel_error)},
                        {"ratio", num(r.ratio)},
                        {"local_trace", num(r.local_trace)}});
    return {{"p", norm_order_json(t.p)},
            {"alpha", t.alpha},
            {"rows", rows},
            {"fitted_exponent", num(t.fitted_exponent)},
            {"expected_exponent", num(t.expected_exponent)}};
}

// -------------------------------------------------------------------- csv

inline std::string csv_number(double v) {
    if (std::isnan(v)) return "";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    return advect::detail::format_number(v);
}

inline std::string csv_quote(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + "\"";
}

inline std::string demo_csv(const DemoTable& t) {
    std::ostringstream os;
    os << "m,graph_pow,graph_pow_exact,graph_rel_error,outflow_pow,outflow_pow_exact,outflow_rel_error,ratio,local_trace\n";
    for (const auto& r : t.rows) {
        os << csv_number(r.m) << ',' << csv_number(r.graph_pow) << ',' << csv_number(r.graph_pow_exact) << ','
           << csv_number(r.graph_rel_error) << ',' << csv_number(r.outflow_pow) << ','
           << csv_number(r.outflow_pow_exact) << ',' << csv_number(r.outflow_rel_error) << ','
           << csv_number(r.ratio) << ',' << csv_number(r.local_trace) << '\n';
    }
    return os.str();
}

} // namespace advect::io
