// advect: command-line front end.
//
//   advect classify       --config F | --example N  [--svg F] [--out F]
//   advect solve          ... [--adjoint] [--grid N] [--format json|csv] [--svg F]
//   advect norms          ... [--p LIST] [--field EXPR]
//   advect diagnose       ... [--p LIST]
//   advect demo-unbounded [--p P] [--alpha A] [--m LIST] [--format json|csv]
//   advect examples list | export NAME
//
// Exit codes: 0 ok, 2 configuration error, 3 numerical failure.

#include <advect/advect.hpp>
#include <advect/io.hpp>
#include <advect/svg.hpp>

#include "CLI11.hpp"

#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

namespace {

using advect::io::json;
using namespace advect;

struct Common {
    std::string config;
    std::string example;
    std::string p_list;
    std::string svg;
    std::string out;
    std::string format;
};

void add_source(CLI::App* app, Common& c) {
    app->add_option("--config", c.config, "JSON run configuration");
    app->add_option("--example", c.example, "built-in example: square, triangle, seven-segments");
    app->add_option("--out", c.out, "write the report here instead of stdout");
}

io::RunConfig read_config(const Common& c) {
    if (!c.config.empty() && !c.example.empty())
        throw Error(ErrorKind::invalid_config, "give either --config or --example, not both");
    if (!c.example.empty()) return io::example_config(c.example);
    if (c.config.empty()) throw Error(ErrorKind::invalid_config, "a --config file or an --example is required");
    std::ifstream in(c.config);
    if (!in) throw Error(ErrorKind::invalid_config, "cannot read " + c.config);
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw Error(ErrorKind::invalid_config, std::string("malformed JSON in ") + c.config + ": " + e.what());
    }
    return io::parse_run_config(j);
}

/// Reads the config; its output section fills whatever the flags left unset.
io::RunConfig load(Common& c) {
    auto rc = read_config(c);
    if (c.out.empty() && rc.output.path) c.out = *rc.output.path;
    if (c.svg.empty() && rc.output.svg) c.svg = *rc.output.svg;
    if (c.format.empty() && rc.output.format) c.format = *rc.output.format;
    return rc;
}

std::vector<NormOrder> parse_p_list(const std::string& s) {
    std::vector<NormOrder> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        out.push_back(io::parse_norm_order(json(item)));
    }
    if (out.empty()) throw Error(ErrorKind::invalid_config, "--p needs at least one value");
    return out;
}

std::vector<double> parse_list(const std::string& s, const char* what) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stod(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw Error(ErrorKind::invalid_config, std::string("bad number '") + item + "' in " + what);
        }
    }
    return out;
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::invalid_config, "cannot write " + path);
    out << text;
}

void emit(const Common& c, const std::string& text) {
    if (c.out.empty()) std::cout << text;
    else write_text(c.out, text);
}

json envelope(const char* command, const io::RunConfig& rc, const io::Problem& pb) {
    json j;
    j["schema_version"] = io::schema_version;
    j["command"] = command;
    j["config"] = io::to_json(rc);
    j["resolved"] = {{"tolerances", io::to_json(pb.flow.tol)},
                     {"field_norms", io::to_json(pb.flow.norms)},
                     {"vertices_reversed", pb.domain.was_reversed()}};
    return j;
}

std::string dump(const json& j) { return j.dump(2) + "\n"; }

void maybe_svg(const std::string& path, const io::Problem& pb, std::vector<svg::HeatSample> heat = {},
               double cell = 0.0) {
    if (path.empty()) return;
    svg::Picture pic;
    pic.domain = &pb.flow.domain;
    pic.bc = &pb.bc;
    pic.traces = svg::sample_traces(pb.flow, pb.bc);
    pic.heat = std::move(heat);
    pic.heat_cell = cell;
    write_text(path, svg::render(pic));
}

// ------------------------------------------------------------- commands

int cmd_classify(Common c) {
    const auto rc = load(c);
    const auto pb = io::build_problem(rc);
    json j = envelope("classify", rc, pb);
    std::vector<std::string> names;
    if (!c.example.empty()) names = corpus::example_by_name(c.example).edge_names;
    j["classification"] = io::to_json(pb.bc, pb.flow.domain, names.empty() ? nullptr : &names);
    const auto sep = separation_check(pb.flow.domain, pb.bc);
    j["separation"] = io::to_json(sep);
    maybe_svg(c.svg, pb);
    emit(c, dump(j));
    return 0;
}

int cmd_solve(Common c, bool adjoint, int grid_flag) {
    auto rc = load(c);
    if (adjoint && !c.example.empty()) {
        rc = io::example_config(c.example, ProblemKind::adjoint);
    } else if (adjoint) {
        rc.kind = ProblemKind::adjoint;
        // default data follows the data set of the chosen problem
        for (auto& b : rc.boundary_data)
            if (b.arcs.is_string() && b.arcs.get<std::string>() == "inflow") b.arcs = "outflow";
    }
    if (grid_flag > 0) rc.solve.grid = grid_flag;
    const auto pb = io::build_problem(rc);
    const SolutionField u(io::solve_context(pb, rc.solver));

    std::vector<Point2> pts = rc.solve.points;
    const int n = rc.solve.grid.value_or(pts.empty() ? 20 : 0);
    if (n > 0) {
        const auto g = grid_points(pb.flow.domain, n);
        pts.insert(pts.end(), g.begin(), g.end());
    }
    std::optional<ScalarField> exact;
    if (rc.solve.exact) exact = parse_field(*rc.solve.exact, rc.parameters);

    const std::string format = c.format.empty() ? rc.output.format.value_or("json") : c.format;
    json rows = json::array();
    std::ostringstream csv;
    csv << "x,y,u,tau,footpoint_x,footpoint_y,status\n";
    std::size_t failed = 0;
    double max_err = 0.0;
    std::vector<svg::HeatSample> heat;
    for (const auto& x : pts) {
        json row = {{"x", x.x}, {"y", x.y}};
        try {
            const auto s = u.evaluate(x);
            row["u"] = io::num(s.u);
            row["tau"] = io::num(s.tau);
            row["footpoint"] = s.footpoint ? io::to_json(*s.footpoint) : json(nullptr);
            row["attenuation"] = io::num(s.attenuation);
            row["status"] = std::string(to_string(s.status));
            if (exact) {
                const double e = std::abs(s.u - (*exact)(x));
                row["error"] = io::num(e);
                max_err = std::max(max_err, e);
            }
            heat.push_back({x, s.u});
            csv << io::csv_number(x.x) << ',' << io::csv_number(x.y) << ',' << io::csv_number(s.u) << ','
                << io::csv_number(s.tau) << ',' << (s.footpoint ? io::csv_number(s.footpoint->x) : "") << ','
                << (s.footpoint ? io::csv_number(s.footpoint->y) : "") << ',' << to_string(s.status) << '\n';
        } catch (const Error& e) {
            ++failed;
            row["u"] = nullptr;
            row["status"] = "error";
            row["error_kind"] = std::string(to_string(e.kind()));
            row["message"] = e.what();
            csv << io::csv_number(x.x) << ',' << io::csv_number(x.y) << ",,,,,"
                << io::csv_quote("error: " + std::string(to_string(e.kind()))) << '\n';
        }
        rows.push_back(row);
    }
    json summary = {{"points", pts.size()}, {"failed", failed}, {"kind", std::string(to_string(rc.kind))}};
    if (exact) summary["max_abs_error"] = io::num(max_err);
    if (n > 0) maybe_svg(c.svg, pb, heat, (pb.flow.domain.bbox_max().x - pb.flow.domain.bbox_min().x) / n);
    else maybe_svg(c.svg, pb, heat, pb.flow.domain.diameter() / 40.0);

    if (format == "csv") {
        emit(c, csv.str());
        std::cerr << summary.dump() << "\n";
    } else if (format == "json") {
        json j = envelope("solve", rc, pb);
        j["summary"] = summary;
        j["rows"] = rows;
        emit(c, dump(j));
    } else {
        throw Error(ErrorKind::invalid_config, "--format must be json or csv");
    }
    return 0;
}

int cmd_norms(Common c, const std::string& field) {
    const auto rc = load(c);
    const auto ps = c.p_list.empty() ? rc.p : parse_p_list(c.p_list);
    const auto pb = io::build_problem(rc);
    const auto nc = make_norm_context(pb.flow);
    json j = envelope("norms", rc, pb);
    ScalarFn u;
    if (!field.empty()) {
        u = as_fn(parse_field(field, rc.parameters));
        j["field"] = field;
    } else {
        u = SolutionField(io::solve_context(pb, rc.solver)).as_fn();
        j["field"] = "solution";
    }
    json reports = json::array();
    for (const auto& p : ps) reports.push_back(io::to_json(norm_report(u, nc, p)));
    j["norms"] = reports;
    emit(c, dump(j));
    return 0;
}

void print_diagnose_table(std::ostream& os, const WellPosednessReport& w, const DensityReport& d) {
    os << std::setprecision(6);
    os << "separation: ";
    if (w.separation.distance) os << "dist(outflow, inflow) = " << *w.separation.distance;
    else os << "one of the sets is empty";
    os << (w.separation.separated ? " (separated)\n" : " (not separated)\n");
    for (const auto& c : w.constants) {
        os << "p = " << c.p.label() << ": sigma_p = " << c.sigma_p << ", C2p = " << c.C2p;
        if (c.C1p) os << ", C1p = " << *c.C1p << ", C1p' = " << *c.C1p_prime;
        if (c.C1q_tilde) os << ", C1q~ = " << *c.C1q_tilde << ", C1q~' = " << *c.C1q_tilde_prime;
        os << "\n";
    }
    for (const auto& s : w.stability)
        for (const auto& m : s.margins)
            os << "  " << m.name << " (p = " << s.p.label() << "): margin " << m.margin << (m.holds() ? " ok" : " VIOLATED")
               << "\n";
    if (!d.note.empty()) os << "density: " << d.note << "\n";
    for (const auto& c : d.components)
        os << "density at (" << c.point.x << ", " << c.point.y << "): " << to_string(c.verdict) << ", tau in ["
           << c.tau_min << ", " << c.tau_max << "] over " << c.footpoints << " footpoints\n";
}

int cmd_diagnose(Common c) {
    const auto rc = load(c);
    const auto ps = c.p_list.empty() ? rc.p : parse_p_list(c.p_list);
    const auto pb = io::build_problem(rc);
    WellPosednessReport w;
    for (const auto& p : ps) {
        w.sigma.emplace_back(p, sigma_p(pb.mu, pb.beta, pb.flow.domain, p, pb.flow.tol.grid_n));
        w.constants.push_back(constants_for(p, pb.mu, pb.flow));
    }
    w.separation = separation_check(pb.flow.domain, pb.bc);
    const SolutionField u(io::solve_context(pb, rc.solver));
    const auto nc = make_norm_context(pb.flow);
    json solve_errors = json::array();
    for (const auto& p : ps) {
        try {
            w.stability.push_back(stability_margins(u, nc, p));
            w.trace_margins.push_back(check_trace_inequality(u.as_fn(), nc, p));
            if (!p.is_infinite()) w.green.emplace_back(p, check_green_identity(u.as_fn(), nc, p));
        } catch (const Error& e) {
            // an unsolvable case still gets its constants and density report
            solve_errors.push_back({{"p", io::norm_order_json(p)},
                                    {"kind", std::string(to_string(e.kind()))},
                                    {"message", e.what()}});
        }
    }
    const auto dens = density_condition(pb.flow, pb.bc, rc.density);
    json j = envelope("diagnose", rc, pb);
    j["well_posedness"] = io::to_json(w);
    j["density"] = io::to_json(dens);
    j["solve_errors"] = solve_errors;
    if (c.out.empty()) {
        std::cout << dump(j);
    } else {
        write_text(c.out, dump(j));
        print_diagnose_table(std::cout, w, dens);
    }
    return 0;
}

int cmd_demo(Common c, const std::string& p_text, double alpha, const std::string& m_text) {
    io::DemoOptions o;
    if (!c.config.empty() || !c.example.empty()) o = load(c).demo;
    if (!p_text.empty()) o.p = io::parse_norm_order(json(p_text));
    if (alpha > 0.0) o.alpha = alpha;
    if (!m_text.empty()) o.m = parse_list(m_text, "--m");
    const auto t = unbounded_trace_demo(o.p, o.alpha, o.m);
    if (c.format == "csv") {
        emit(c, io::demo_csv(t));
    } else if (c.format == "json") {
        json j = {{"schema_version", io::schema_version}, {"command", "demo-unbounded"}, {"demo", io::to_json(t)}};
        emit(c, dump(j));
    } else if (c.format.empty()) {
        std::ostringstream os;
        os << "p = " << t.p.label() << ", alpha = " << t.alpha << "\n";
        os << std::setw(6) << "m" << std::setw(16) << "graph^p" << std::setw(16) << "exact" << std::setw(12)
           << "rel.err" << std::setw(16) << "outflow^p" << std::setw(16) << "exact" << std::setw(12) << "rel.err"
           << std::setw(14) << "ratio" << "\n";
        for (const auto& r : t.rows) {
            os << std::setw(6) << r.m << std::setw(16) << std::setprecision(8) << r.graph_pow << std::setw(16)
               << r.graph_pow_exact << std::setw(12) << std::setprecision(2) << r.graph_rel_error << std::setw(16)
               << std::setprecision(8) << r.outflow_pow << std::setw(16) << r.outflow_pow_exact << std::setw(12)
               << std::setprecision(2) << r.outflow_rel_error << std::setw(14) << std::setprecision(6) << r.ratio
               << "\n";
        }
        os << std::setprecision(6) << "fitted growth exponent " << t.fitted_exponent << " (expected "
           << t.expected_exponent << ")\n";
        emit(c, os.str());
    } else {
        throw Error(ErrorKind::invalid_config, "--format must be json or csv");
    }
    return 0;
}

int cmd_examples(const std::string& action, const std::string& name, const Common& c) {
    if (action == "list") {
        for (const auto& n : corpus::example_names()) std::cout << n << "\n";
        return 0;
    }
    if (action == "export") {
        if (name.empty()) throw Error(ErrorKind::invalid_config, "examples export needs a name");
        emit(c, dump(io::to_json(io::example_config(name))));
        return 0;
    }
    throw Error(ErrorKind::invalid_config, "examples takes 'list' or 'export NAME'");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Stationary advection problems solved along characteristics"};
    app.require_subcommand(1);
    Common common;

    auto* classify = app.add_subcommand("classify", "label boundary arcs as inflow, outflow or characteristic");
    add_source(classify, common);
    classify->add_option("--svg", common.svg, "write an SVG picture");

    bool adjoint = false;
    int grid = 0;
    auto* solve = app.add_subcommand("solve", "solve on a grid or at listed points");
    add_source(solve, common);
    solve->add_flag("--adjoint", adjoint, "solve the adjoint problem with data on the outflow set");
    solve->add_option("--grid", grid, "grid resolution (overrides the config)");
    solve->add_option("--format", common.format, "json or csv");
    solve->add_option("--svg", common.svg, "write an SVG heatmap");

    std::string field;
    auto* norms = app.add_subcommand("norms", "weighted norms of the solution or of a given field");
    add_source(norms, common);
    norms->add_option("--p", common.p_list, "comma-separated exponents, 'inf' allowed");
    norms->add_option("--field", field, "expression to measure instead of the solution");

    auto* diagnose = app.add_subcommand("diagnose", "constants, stability margins and density test");
    add_source(diagnose, common);
    diagnose->add_option("--p", common.p_list, "comma-separated exponents, 'inf' allowed");

    std::string demo_p, demo_m;
    double demo_alpha = 0.0;
    auto* demo = app.add_subcommand("demo-unbounded", "norms of the u_m family on the triangle");
    add_source(demo, common);
    demo->add_option("--p", demo_p, "exponent p");
    demo->add_option("--alpha", demo_alpha, "exponent alpha with 1/p < alpha < 2/p");
    demo->add_option("--m", demo_m, "comma-separated increasing m values");
    demo->add_option("--format", common.format, "json or csv (default: text table)");

    std::string ex_action = "list", ex_name;
    auto* examples = app.add_subcommand("examples", "list or export built-in examples");
    examples->add_option("action", ex_action, "list (default) | export");
    examples->add_option("name", ex_name, "example name for export");
    examples->add_option("--out", common.out, "write the config here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*classify) return cmd_classify(common);
        if (*solve) return cmd_solve(common, adjoint, grid);
        if (*norms) return cmd_norms(common, field);
        if (*diagnose) return cmd_diagnose(common);
        if (*demo) return cmd_demo(common, demo_p, demo_alpha, demo_m);
        if (*examples) return cmd_examples(ex_action, ex_name, common);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return is_numerical(e.kind()) ? 3 : 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 2;
}
