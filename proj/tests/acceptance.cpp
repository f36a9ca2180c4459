// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <advect/advect.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace advect;

namespace {

using L = BoundaryLabel;
using Clock = std::chrono::steady_clock;

struct Check {
    bool ok = true;
    std::ostringstream detail;

    void require(bool cond, const std::string& what) {
        if (!cond) {
            if (!ok) detail << "; ";
            detail << what;
            ok = false;
        }
    }
};

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
}

const std::vector<corpus::PaperExample>& corpus_examples() {
    static const std::vector<corpus::PaperExample> ex{corpus::example_triangle(), corpus::example_seven_segments(),
                                                      corpus::example_square()};
    return ex;
}

std::vector<Point2> random_interior(const PolygonalDomain& d, int n, std::mt19937& rng, double margin = 1e-3) {
    const Point2 lo = d.bbox_min(), hi = d.bbox_max();
    std::uniform_real_distribution<double> ux(lo.x, hi.x), uy(lo.y, hi.y);
    std::vector<Point2> out;
    while (static_cast<int>(out.size()) < n) {
        const Point2 p{ux(rng), uy(rng)};
        if (signed_distance(d, p) < -margin) out.push_back(p);
    }
    return out;
}

/// Quadratic in coordinates scaled to the bounding box.
struct Quadratic {
    double c[6];
    Point2 lo, span;

    double operator()(const Point2& x) const {
        const double s = (x.x - lo.x) / span.x, t = (x.y - lo.y) / span.y;
        return c[0] + c[1] * s + c[2] * t + c[3] * s * s + c[4] * s * t + c[5] * t * t;
    }
};

Quadratic random_quadratic(const PolygonalDomain& d, std::mt19937& rng) {
    std::uniform_real_distribution<double> uc(-1.0, 1.0);
    Quadratic q;
    for (double& v : q.c) v = uc(rng);
    q.lo = d.bbox_min();
    q.span = d.bbox_max() - d.bbox_min();
    return q;
}

// ------------------------------------------------------------------ 1

Check criterion_1() {
    Check c;
    const auto t0 = Clock::now();
    double worst = 0.0, worst_exp = 0.0;
    for (double p : {1.0, 2.0, 3.0}) {
        const auto t = unbounded_trace_demo(NormOrder(p), 1.5 / p, {2, 4, 8, 16});
        for (const auto& r : t.rows) {
            worst = std::max({worst, r.graph_rel_error, r.outflow_rel_error});
            c.require(r.graph_rel_error < 1e-3, "graph norm rel error " + fmt(r.graph_rel_error) + " at p=" + fmt(p) +
                                                    " m=" + fmt(r.m));
            c.require(r.outflow_rel_error < 1e-3, "outflow norm rel error " + fmt(r.outflow_rel_error) +
                                                      " at p=" + fmt(p) + " m=" + fmt(r.m));
        }
        const double dev = std::abs(t.fitted_exponent - 1.0 / p);
        worst_exp = std::max(worst_exp, dev);
        c.require(dev <= 0.05, "fitted exponent " + fmt(t.fitted_exponent) + " for p=" + fmt(p));
    }
    const double sec = seconds_since(t0);
    c.require(sec < 10.0, "runtime " + fmt(sec) + " s");
    if (c.ok)
        c.detail << "max rel error " << fmt(worst) << ", max exponent deviation " << fmt(worst_exp) << ", " << fmt(sec)
                 << " s";
    return c;
}

// ------------------------------------------------------------------ 2

bool labels_match(const BoundaryClassification& bc, const corpus::PaperExample& ex, std::string& why) {
    for (std::size_t e = 0; e < ex.domain.size(); ++e) {
        for (const auto& a : bc.arcs) {
            if (a.arc.edge != e) continue;
            if (a.label != ex.expected_labels[e] || a.arc.s0 != 0.0 || a.arc.s1 != 1.0) {
                why = ex.name + " edge " + ex.edge_names[e] + " classified " + std::string(to_string(a.label));
                return false;
            }
        }
    }
    if (bc.arcs.size() != ex.domain.size()) {
        why = ex.name + ": " + std::to_string(bc.arcs.size()) + " arcs";
        return false;
    }
    if (bc.components.size() != ex.expected_components.size()) {
        why = ex.name + ": " + std::to_string(bc.components.size()) + " components";
        return false;
    }
    for (std::size_t k = 0; k < bc.components.size(); ++k) {
        if (distance(bc.components[k].point, ex.expected_components[k]) > 1e-9) {
            why = ex.name + ": component off the expected point";
            return false;
        }
    }
    return true;
}

Check criterion_2() {
    Check c;
    const auto t0 = Clock::now();
    for (const auto& ex : {corpus::example_triangle(), corpus::example_seven_segments()}) {
        for (int samples : {64, 128}) {
            SolverConfig cfg;
            cfg.edge_samples = samples;
            const auto bc = classify_boundary(make_flow_context(ex.domain, ex.beta, cfg));
            std::string why;
            c.require(labels_match(bc, ex, why), why + " with " + std::to_string(samples) + " samples");
            c.require(bc.warnings.empty(), ex.name + " has ambiguous arcs");
        }
    }
    const double sec = seconds_since(t0);
    c.require(sec < 2.0, "runtime " + fmt(sec) + " s");
    if (c.ok) c.detail << "triangle and seven-segments exact at 64 and 128 samples per edge, " << fmt(sec) << " s";
    return c;
}

// ------------------------------------------------------------------ 3

Check criterion_3() {
    Check c;
    const auto tri = corpus::example_triangle();
    const auto ct = make_flow_context(tri.domain, tri.beta);
    const auto bt = classify_boundary(ct);
    const ArcRef minus{tri.oracle_edge, 0.0, 1.0};
    std::vector<double> fr;
    for (int k = 1; k <= 50; ++k) fr.push_back(corpus::triangle_inflow_param(k / 51.0));
    double worst = 0.0;
    for (const auto& e : exit_time_map(ct, bt, minus, fr)) {
        const double r = 1.0 - e.s;
        if (!e.tau) {
            c.require(false, "no exit from s = " + fmt(r));
            continue;
        }
        worst = std::max(worst, std::abs(*e.tau - 2.0 * r));
        c.require(e.exit_on_outflow, "triangle exit off the outflow set");
    }
    c.require(worst < 1e-6, "triangle exit time error " + fmt(worst));

    const auto ss = corpus::example_seven_segments();
    const auto cs = make_flow_context(ss.domain, ss.beta);
    const auto bs = classify_boundary(cs);
    double tau_min = std::numeric_limits<double>::infinity();
    for (const auto& e : exit_time_map(cs, bs, {ss.oracle_edge, 0.0, 1.0}, 64)) {
        if (!e.tau) {
            c.require(false, "no exit from a G4 sample");
            continue;
        }
        tau_min = std::min(tau_min, *e.tau);
    }
    c.require(tau_min >= 1.0 - 1e-6, "seven-segments minimum exit time " + fmt(tau_min));

    const auto dt = density_condition(ct, bt);
    const auto ds = density_condition(cs, bs);
    c.require(dt.components.size() == 1 && dt.components[0].verdict == DensityVerdict::condition_i,
              "triangle density verdict");
    c.require(ds.components.size() == 1 && ds.components[0].verdict == DensityVerdict::condition_ii,
              "seven-segments density verdict");
    if (c.ok)
        c.detail << "triangle max |tau - 2s| " << fmt(worst) << ", seven-segments min tau " << fmt(tau_min)
                 << ", verdicts condition_i / condition_ii";
    return c;
}

// ------------------------------------------------------------------ 4

SolveContext manufactured(ProblemKind kind) {
    const auto sq = corpus::example_square();
    ProblemData pd;
    pd.beta = sq.beta;
    pd.mu = parse_field("1");
    pd.kind = kind;
    auto ctx = make_solve_context(sq.domain, pd);
    ctx.pd.g = data_on(ctx.bc, data_label(kind), parse_field("1"));
    return ctx;
}

Check criterion_4() {
    Check c;
    std::mt19937 rng(4);
    double worst_err = 0.0, worst_res = 0.0, worst_trace = 0.0, min_margin = std::numeric_limits<double>::infinity();
    for (auto kind : {ProblemKind::direct, ProblemKind::adjoint}) {
        const std::string k(to_string(kind));
        const SolutionField u(manufactured(kind));
        const auto& ctx = u.context();
        const auto pts = grid_points(ctx.flow.domain, 19);
        c.require(pts.size() == 400, k + ": " + std::to_string(pts.size()) + " grid points");
        double err = 0.0;
        for (const auto& x : pts) {
            const double exact = kind == ProblemKind::direct ? std::exp(-x.x) : std::exp(x.x - 1.0);
            err = std::max(err, std::abs(u(x) - exact));
        }
        worst_err = std::max(worst_err, err);
        c.require(err < 1e-8, k + " max error " + fmt(err));

        const auto res = strong_residual(u, random_interior(ctx.flow.domain, 100, rng, 1e-2));
        worst_res = std::max(worst_res, res.max_residual);
        c.require(res.failures.empty() && res.max_residual < 1e-6, k + " strong residual " + fmt(res.max_residual));

        const auto nc = make_norm_context(ctx.flow);
        for (const auto& p : {NormOrder(1.0), NormOrder(2.0), NormOrder::infinity()}) {
            if (kind == ProblemKind::direct) {
                const double tr = trace_recovery_check(u, nc, p);
                worst_trace = std::max(worst_trace, tr);
                c.require(tr < 1e-6, "trace recovery " + fmt(tr) + " at p=" + p.label());
            }
            const auto st = stability_margins(u, nc, p);
            c.require(st.margins.size() == 2, k + " stability margins missing at p=" + p.label());
            for (const auto& m : st.margins) {
                min_margin = std::min(min_margin, m.margin);
                c.require(m.margin >= 0.0, m.name + " margin " + fmt(m.margin) + " at p=" + p.label());
            }
        }
    }
    if (c.ok)
        c.detail << "max error " << fmt(worst_err) << ", strong residual " << fmt(worst_res) << ", trace recovery "
                 << fmt(worst_trace) << ", min stability margin " << fmt(min_margin);
    return c;
}

// ------------------------------------------------------------------ 5

Check criterion_5() {
    Check c;
    const auto u = parse_field("x^2*y");
    double worst = 0.0;
    for (const auto& ex : {corpus::example_triangle(), corpus::example_seven_segments()}) {
        for (int order : {7, 9}) {
            const auto nc = make_norm_context(make_flow_context(ex.domain, ex.beta), {}, order);
            const double r = check_green_identity(u, nc, NormOrder(2.0)).residual;
            worst = std::max(worst, r);
            c.require(r < 1e-8, ex.name + " x^2 y residual " + fmt(r) + " at order " + std::to_string(order));
        }
    }
    const auto tri = corpus::example_triangle();
    const auto flow = make_flow_context(tri.domain, tri.beta);
    double worst_um = 0.0;
    for (double m : {2.0, 4.0, 8.0, 16.0}) {
        const auto um = corpus::um_profile(m, 0.75);
        const double r = check_green_identity(um.field, make_norm_context(flow, {um.kink()}), NormOrder(2.0)).residual;
        worst_um = std::max(worst_um, r);
        c.require(r < 1e-5, "u_m residual " + fmt(r) + " at m=" + fmt(m));
    }
    if (c.ok) c.detail << "x^2 y residual " << fmt(worst) << ", u_m residual " << fmt(worst_um);
    return c;
}

// ------------------------------------------------------------------ 6

/// 1 on the set at distance >= delta from the outflow arcs, linear below.
ScalarFn outflow_cutoff(const PolygonalDomain& d, const BoundaryClassification& bc, double delta) {
    std::vector<std::pair<Point2, Point2>> segs;
    for (const auto& a : bc.arcs_with(L::outflow)) segs.emplace_back(d.arc_point(a, 0.0), d.arc_point(a, 1.0));
    return [segs, delta](const Point2& x) {
        double r = std::numeric_limits<double>::infinity();
        for (const auto& [a, b] : segs) r = std::min(r, point_segment_distance(x, a, b));
        return std::min(1.0, r / delta);
    };
}

Check criterion_6() {
    Check c;
    std::mt19937 rng(6);
    const NormOrder ps[] = {NormOrder(1.0), NormOrder(2.0), NormOrder(3.0)};
    double min_trace = std::numeric_limits<double>::infinity(), min_vanish = min_trace;
    int functions = 0;
    for (const auto& ex : corpus_examples()) {
        const auto flow = make_flow_context(ex.domain, ex.beta);
        const auto nc = make_norm_context(flow);
        for (int k = 0; k < 100; ++k) {
            const auto q1 = random_quadratic(ex.domain, rng), q2 = random_quadratic(ex.domain, rng);
            const ScalarFn u = [q1, q2](const Point2& x) { return std::max(q1(x), q2(x)); };
            for (const auto& p : ps) {
                const auto m = check_trace_inequality(u, nc, p);
                min_trace = std::min({min_trace, m.outflow.margin, m.inflow.margin});
                c.require(m.outflow.holds() && m.inflow.holds(), ex.name + " trace margin at p=" + p.label());
            }
            ++functions;
        }
        // lifted inflow data times a cutoff that vanishes on the outflow set
        const auto cut = outflow_cutoff(ex.domain, nc.bc, 0.25 * ex.domain.diameter());
        for (int k = 0; k < 20; ++k) {
            const auto g = random_quadratic(ex.domain, rng);
            // g is a callable, so it is transported by hand from the footpoint
            const auto w = lift_boundary_data(ex.domain, ex.beta, data_on(nc.bc, L::inflow, parse_field("0")));
            const auto& sctx = w.context();
            const ScalarFn u = [&sctx, g, cut](const Point2& x) {
                const double phi = cut(x);
                if (phi == 0.0) return 0.0;
                const auto s = solve_point(sctx, x);
                return s.footpoint ? g(*s.footpoint) * phi : 0.0;
            };
            for (const auto& p : ps) {
                const auto m = check_vanishing_trace(u, nc, p);
                min_vanish = std::min({min_vanish, m.opposite_trace.margin, m.trace_norm.margin});
                c.require(m.opposite_trace.margin >= -margin_tolerance && m.trace_norm.margin >= -margin_tolerance,
                          ex.name + " vanishing-trace margin at p=" + p.label());
            }
        }
    }
    if (c.ok)
        c.detail << functions << " functions, min trace margin " << fmt(min_trace) << ", min vanishing margin "
                 << fmt(min_vanish);
    return c;
}

// ------------------------------------------------------------------ 7

Check criterion_7() {
    Check c;
    const auto ctx = manufactured(ProblemKind::direct);
    const SolutionField u(ctx);
    const auto nc = make_norm_context(ctx.flow);
    const ScalarFn zero = [](const Point2&) { return 0.0; };
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> uc(-1.0, 1.0);
    double worst = 0.0, min_gap = std::numeric_limits<double>::infinity();
    for (int k = 0; k < 20; ++k) {
        // v = (1 - x) * sum c_ij x^i y^j, i + j <= 2, vanishes on x = 1
        double a[6];
        for (double& v : a) v = uc(rng);
        std::ostringstream src;
        src.precision(17);
        src << "(1 - x)*(" << a[0] << " + " << a[1] << "*x + " << a[2] << "*y + " << a[3] << "*x^2 + " << a[4]
            << "*x*y + " << a[5] << "*y^2)";
        const auto v = parse_field(src.str());
        const double r = weak_residual(u.as_fn(), ctx, nc, v);
        worst = std::max(worst, std::abs(r));
        c.require(std::abs(r) < 1e-6, "weak residual " + fmt(r));
        // int_0^1 g v(0, y) |beta.n| dy with g = 1
        const double boundary = a[0] + a[2] / 2.0 + a[5] / 3.0;
        const double wrong = weak_residual(zero, ctx, nc, v);
        min_gap = std::min(min_gap, std::abs(wrong) - std::abs(boundary));
        c.require(std::abs(wrong) >= std::abs(boundary) - 1e-12,
                  "zeroed-data residual " + fmt(wrong) + " below " + fmt(boundary));
    }
    if (c.ok) c.detail << "max |weak residual| " << fmt(worst) << ", wrong-solution excess " << fmt(min_gap);
    return c;
}

// ------------------------------------------------------------------ 8

Check criterion_8() {
    Check c;
    std::mt19937 rng(8);
    std::uniform_real_distribution<double> uf(0.05, 0.45);
    const char* fields[][2] = {{"1", "0"}, {"x + 1", "0"}, {"y", "-x"}};
    double worst = 0.0;
    int checked = 0, skipped = 0;
    for (const auto& ex : corpus_examples()) {
        for (const auto& f : fields) {
            const auto ctx = make_flow_context(ex.domain, VectorField::parse(f[0], f[1]));
            const double tol = 10 * ctx.tol.eps_event;
            int done = 0;
            while (done < 100) {
                const Point2 x = random_interior(ex.domain, 1, rng)[0];
                const auto full = flow(ctx, x, Direction::forward);
                if (!full.exit) {
                    ++skipped;
                    continue;
                }
                const double tau = full.exit->tau;
                const double t = uf(rng) * tau, s = uf(rng) * tau;
                const auto whole = flow_for(ctx, x, Direction::forward, t + s);
                const auto first = flow_for(ctx, x, Direction::forward, t);
                const auto second = flow_for(ctx, end_point(first), Direction::forward, s);
                const auto back = flow_for(ctx, end_point(whole), Direction::backward, t + s);
                if (whole.exit || first.exit || second.exit || back.exit) {
                    c.require(false, ex.name + ": orbit left before its exit time");
                    break;
                }
                const double e1 = distance(end_point(second), end_point(whole));
                const double e2 = distance(end_point(back), x);
                worst = std::max({worst, e1 / tol, e2 / tol});
                c.require(e1 < tol, ex.name + " semigroup defect " + fmt(e1));
                c.require(e2 < tol, ex.name + " inversion defect " + fmt(e2));
                ++done;
                ++checked;
            }
        }
    }
    if (c.ok)
        c.detail << checked << " orbits, worst defect " << fmt(worst) << " x 10 eps_event, " << skipped
                 << " non-exiting starts skipped";
    return c;
}

} // namespace

int main() {
    struct Item {
        const char* name;
        std::function<Check()> run;
    };
    const Item items[] = {
        {"1 unbounded-trace example norms and growth exponent", criterion_1},
        {"2 boundary classification of the corpus domains", criterion_2},
        {"3 travel-time oracles and density verdicts", criterion_3},
        {"4 manufactured solution, residuals and stability margins", criterion_4},
        {"5 Green identity", criterion_5},
        {"6 trace inequalities on random Lipschitz functions", criterion_6},
        {"7 weak-form consistency", criterion_7},
        {"8 flow semigroup and inversion", criterion_8},
    };
    int failed = 0;
    for (const auto& it : items) {
        Check r;
        try {
            r = it.run();
        } catch (const std::exception& e) {
            r.ok = false;
            r.detail << "uncaught error: " << e.what();
        }
        std::printf("%s %s: %s\n", r.ok ? "PASS" : "FAIL", it.name, r.detail.str().c_str());
        std::fflush(stdout);
        failed += r.ok ? 0 : 1;
    }
    return failed == 0 ? 0 : 1;
}
