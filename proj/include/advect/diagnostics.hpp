#pragma once

// Well-posedness constants, trace and Green-identity checks, stability
// margins, the travel-time density test and the unbounded-trace demo.
//
// All margins are stored signed (rhs - lhs); the pass threshold
// margin_tolerance is applied only when classifying.

#include <advect/characteristics.hpp>
#include <advect/config.hpp>
#include <advect/corpus.hpp>
#include <advect/error.hpp>
#include <advect/fields.hpp>
#include <advect/quadrature.hpp>
#include <advect/solver.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace advect {

inline constexpr double margin_tolerance = 1e-9;

/// ess inf of mu - (1/p) div beta by a refined grid minimum; p = inf drops
/// the divergence term.
inline double sigma_p(const ScalarField& mu, const VectorField& v, const PolygonalDomain& d, const NormOrder& p,
                      int grid_n = 32) {
    if (grid_n < 8) throw Error(ErrorKind::invalid_config, "grid_n must be at least 8");
    const auto g = detail::sample_grid(d, grid_n);
    const double ip = p.inverse();
    return detail::refined_min(d, g, [&](const Point2& x) {
        return ip == 0.0 ? mu(x) : mu(x) - ip * v.divergence(x);
    });
}

/// C2p = p^{1/p} + w1inf^{1/p}, and 2 for p = inf.
inline double c2(const NormOrder& p, double w1inf) {
    if (p.is_infinite()) return 2.0;
    return std::pow(p.p(), 1.0 / p.p()) + std::pow(w1inf, 1.0 / p.p());
}

struct ConstantsReport {
    NormOrder p;
    NormOrder q;
    double sigma_p = 0.0;
    double sigma_q = 0.0;
    double w1inf = 0.0;
    double sup_mu = 0.0;
    FieldNorms inputs;
    double C2p = 0.0;
    double C2q = 0.0;
    // Present only when the corresponding sigma is positive.
    std::optional<double> C1p;        // C1_infty when p = inf
    std::optional<double> C1p_prime;
    std::optional<double> C1_infty;   // set when p = inf
    std::optional<double> C1q_tilde;
    std::optional<double> C1q_tilde_prime;
    std::vector<std::string> failures; // HypothesisFailed messages
};

inline ConstantsReport constants(const NormOrder& p, const FieldNorms& norms, double sigma_p_value,
                                 double sigma_q_value) {
    ConstantsReport r;
    r.p = p;
    r.q = p.conjugate();
    r.sigma_p = sigma_p_value;
    r.sigma_q = sigma_q_value;
    r.inputs = norms;
    r.w1inf = norms.w1inf;
    r.sup_mu = norms.sup_mu;
    r.C2p = c2(r.p, r.w1inf);
    r.C2q = c2(r.q, r.w1inf);
    if (r.sigma_p > 0.0) {
        const double s = r.sigma_p;
        const double c1 = p.is_infinite() ? 3.0 / s * (1.0 + s + r.w1inf + r.sup_mu)
                                          : (1.0 + r.C2p) / s * (1.0 + s + r.w1inf + r.sup_mu);
        r.C1p = c1;
        if (p.is_infinite()) r.C1_infty = c1;
        r.C1p_prime = (1.0 + r.C2p) * (2.0 + (1.0 + r.sup_mu) * c1);
    } else {
        r.failures.push_back("HypothesisFailed: sigma_p = " + detail::format_number(r.sigma_p) + " <= 0 for p = " +
                             r.p.label());
    }
    if (r.sigma_q > 0.0) {
        const double s = r.sigma_q;
        const double c1 = (1.0 + r.C2q) / s * (1.0 + s + r.sup_mu);
        r.C1q_tilde = c1;
        r.C1q_tilde_prime = (1.0 + r.C2q) * (1.0 + (1.0 + r.sup_mu) * c1);
    } else {
        r.failures.push_back("HypothesisFailed: sigma_q = " + detail::format_number(r.sigma_q) + " <= 0 for q = " +
                             r.q.label());
    }
    return r;
}

/// Throwing form: HypothesisFailed unless sigma_p > 0.
inline ConstantsReport checked_constants(const NormOrder& p, const FieldNorms& norms, double sigma_p_value,
                                         double sigma_q_value) {
    if (!(sigma_p_value > 0.0))
        throw Error(ErrorKind::hypothesis_failed, "sigma_p = " + detail::format_number(sigma_p_value) + " <= 0");
    return constants(p, norms, sigma_p_value, sigma_q_value);
}

inline ConstantsReport constants_for(const NormOrder& p, const ScalarField& mu, const FlowContext& ctx) {
    const double sp = sigma_p(mu, ctx.beta, ctx.domain, p, ctx.tol.grid_n);
    const double sq = sigma_p(mu, ctx.beta, ctx.domain, p.conjugate(), ctx.tol.grid_n);
    return constants(p, ctx.norms, sp, sq);
}

/// One checked inequality lhs <= rhs.
struct Margin {
    std::string name;
    std::string inequality;
    double lhs = 0.0;
    double rhs = 0.0;
    double margin = 0.0; // rhs - lhs
    std::map<std::string, double> inputs;

    bool holds(double tol = margin_tolerance) const { return margin >= -tol; }
};

inline Margin make_margin(std::string name, std::string inequality, double lhs, double rhs,
                          std::map<std::string, double> inputs = {}) {
    return {std::move(name), std::move(inequality), lhs, rhs, rhs - lhs, std::move(inputs)};
}

struct TraceMargins {
    Margin outflow; // ||u||_{+} <= C2p ||u||_W + ||u||_{-}
    Margin inflow;  // ||u||_{-} <= C2p ||u||_W + ||u||_{+}
};

/// Weighted trace bounds on both boundary sets for a Lipschitz u.
inline TraceMargins check_trace_inequality(const ScalarFn& u, const NormContext& c, const NormOrder& p) {
    const auto nr = norm_report(u, c, p);
    const double k = c2(p, c.flow.norms.w1inf);
    const std::map<std::string, double> in{{"C2p", k},
                                           {"graph_norm", nr.graph_norm},
                                           {"outflow_norm", nr.lp_outflow_weighted},
                                           {"inflow_norm", nr.lp_inflow_weighted}};
    TraceMargins m;
    m.outflow = make_margin("trace_outflow", "||u||_{L^p(outflow;|beta.n|)} <= C2p ||u||_{W^p_beta} + ||u||_{L^p(inflow;|beta.n|)}",
                            nr.lp_outflow_weighted, k * nr.graph_norm + nr.lp_inflow_weighted, in);
    m.inflow = make_margin("trace_inflow", "||u||_{L^p(inflow;|beta.n|)} <= C2p ||u||_{W^p_beta} + ||u||_{L^p(outflow;|beta.n|)}",
                           nr.lp_inflow_weighted, k * nr.graph_norm + nr.lp_outflow_weighted, in);
    return m;
}

struct GreenResidual {
    double lhs = 0.0;
    double outflow_term = 0.0;
    double inflow_term = 0.0;
    double divergence_term = 0.0;
    double residual = 0.0; // |lhs - rhs|
};

namespace detail {

inline double signed_power(double u, double p) {
    if (u == 0.0) return 0.0;
    return std::copysign(std::pow(std::abs(u), p - 1.0), u);
}

inline GreenResidual green_identity(const ScalarFn& u, const ScalarFn& beta_grad_u, const NormContext& c,
                                    const NormOrder& p) {
    if (p.is_infinite()) throw Error(ErrorKind::invalid_config, "the Green identity needs a finite p");
    const double pp = p.p();
    const auto& beta = c.flow.beta;
    GreenResidual g;
    g.lhs = integrate_domain([&](const Point2& x) { return beta_grad_u(x) * signed_power(u(x), pp); }, c.rule);
    g.outflow_term =
        integrate_boundary_weighted([&](const Point2& x) { return std::pow(std::abs(u(x)), pp); }, c,
                                    BoundaryLabel::outflow) / pp;
    g.inflow_term =
        integrate_boundary_weighted([&](const Point2& x) { return std::pow(std::abs(u(x)), pp); }, c,
                                    BoundaryLabel::inflow) / pp;
    g.divergence_term =
        integrate_domain([&](const Point2& x) { return beta.divergence(x) * std::pow(std::abs(u(x)), pp); }, c.rule) /
        pp;
    g.residual = std::abs(g.lhs - (g.outflow_term - g.inflow_term - g.divergence_term));
    return g;
}

} // namespace detail

/// |int (beta.grad u) |u|^{p-2} u  -  (1/p)[int_+ |u|^p beta.n - int_- |u|^p |beta.n| - int (div beta)|u|^p]|
/// with beta.grad u from exact derivatives.
inline GreenResidual check_green_identity(const ScalarField& u, const NormContext& c, const NormOrder& p) {
    const auto& beta = c.flow.beta;
    return detail::green_identity(
        as_fn(u),
        [&](const Point2& x) {
            const Dual d = u.gradient(x);
            const Point2 b = beta(x);
            return b.x * d.dx + b.y * d.dy;
        },
        c, p);
}

/// Same with beta.grad u by finite differences (for fields without an
/// expression, such as solver output).
inline GreenResidual check_green_identity(const ScalarFn& u, const NormContext& c, const NormOrder& p) {
    return detail::green_identity(
        u,
        [&](const Point2& x) {
            return directional_derivative(u, c.flow.domain, c.flow.beta, x, c.flow.tol.fd_step).value;
        },
        c, p);
}

struct VanishingMargins {
    Margin opposite_trace; // ||u||_{opposite} <= C2p ||u||_W
    Margin trace_norm;     // ||u||_{W,tr} <= (1 + C2p) ||u||_W
};

/// For u vanishing on the set `vanishes_on`: bound of the trace on the
/// opposite set and equivalence of the graph and trace-graph norms.
inline VanishingMargins check_vanishing_trace(const ScalarFn& u, const NormContext& c, const NormOrder& p,
                                              BoundaryLabel vanishes_on = BoundaryLabel::outflow) {
    const auto& d = c.flow.domain;
    const double eps = c.flow.tol.eps_w;
    auto check = [&](const Point2& x) {
        const double v = std::abs(u(x));
        if (v > eps)
            throw Error(ErrorKind::not_vanishing, "|u| = " + detail::format_number(v) + " at " + detail::point_text(x) +
                                                      " on the " + std::string(to_string(vanishes_on)) + " set");
    };
    for (const auto& n : c.rule.boundary)
        if (n.label == vanishes_on) check(n.x);
    for (const auto& a : c.bc.arcs)
        if (a.label == vanishes_on)
            for (int k = 0; k <= 8; ++k) check(d.arc_point(a.arc, k / 8.0));

    const auto nr = norm_report(u, c, p);
    const double k = c2(p, c.flow.norms.w1inf);
    const BoundaryLabel other =
        vanishes_on == BoundaryLabel::outflow ? BoundaryLabel::inflow : BoundaryLabel::outflow;
    const double opp = other == BoundaryLabel::inflow ? nr.lp_inflow_weighted : nr.lp_outflow_weighted;
    const std::map<std::string, double> in{{"C2p", k}, {"graph_norm", nr.graph_norm}};
    VanishingMargins m;
    m.opposite_trace = make_margin("vanishing_opposite_trace",
                                   "||u||_{L^p(" + std::string(to_string(other)) + ";|beta.n|)} <= C2p ||u||_{W^p_beta}",
                                   opp, k * nr.graph_norm, in);
    m.trace_norm = make_margin("vanishing_trace_norm", "||u||_{W^p_beta,tr} <= (1 + C2p) ||u||_{W^p_beta}",
                               nr.trace_graph_norm, (1.0 + k) * nr.graph_norm, in);
    return m;
}

struct SeparationResult {
    std::optional<double> distance; // empty when one of the sets is empty
    bool separated = true;
};

inline SeparationResult separation_check(const PolygonalDomain& d, const BoundaryClassification& bc,
                                         double tol = 0.0) {
    SeparationResult r;
    const auto plus = bc.arcs_with(BoundaryLabel::outflow);
    const auto minus = bc.arcs_with(BoundaryLabel::inflow);
    if (plus.empty() || minus.empty()) return r;
    r.distance = set_distance(d, plus, minus);
    r.separated = *r.distance > tol;
    return r;
}

// ---------------------------------------------------------------- stability

struct StabilityReport {
    ProblemKind kind = ProblemKind::direct;
    NormOrder p;
    NormReport solution;
    double f_norm = 0.0; // ||f||_{L^p}, standing in for the dual norm
    double g_norm = 0.0; // ||g||_{L^p(data set; |beta.n|)}
    ConstantsReport constants;
    std::vector<Margin> margins;
    std::vector<std::string> skipped;
};

/// Stability bounds of the solved problem: the L^p bound and the
/// trace-graph bound, with C1p / C1p' (direct) or C1q~ / C1q~' (adjoint).
inline StabilityReport stability_margins(const SolutionField& u, const NormContext& nc, const NormOrder& p) {
    const auto& c = u.context();
    StabilityReport r;
    r.kind = c.pd.kind;
    r.p = p;
    r.constants = constants_for(p, c.pd.mu, c.flow);
    r.solution = norm_report(u.as_fn(), nc, p);
    r.f_norm = lp_norm_domain(as_fn(c.pd.f), nc, p);
    const BoundaryLabel dl = data_label(c.pd.kind);
    r.g_norm = lp_norm_boundary([&](const Point2& x) { return detail::boundary_value(c, x); }, nc, dl, p);
    const double data = r.f_norm + r.g_norm;
    const std::map<std::string, double> base{{"f_norm", r.f_norm}, {"g_norm", r.g_norm}};
    auto with = [&](const char* k, double v) {
        auto m = base;
        m[k] = v;
        return m;
    };
    if (c.pd.kind == ProblemKind::direct) {
        if (r.constants.C1p) {
            r.margins.push_back(make_margin("lp_stability", "||u||_{L^p} <= C1p (||f||_{L^p} + ||g||_{L^p(inflow;|beta.n|)})",
                                            r.solution.lp_domain, *r.constants.C1p * data,
                                            with("C1p", *r.constants.C1p)));
            r.margins.push_back(make_margin("strong_stability",
                                            "||u||_{W^p_beta,tr} <= C1p' (||f||_{L^p} + ||g||_{L^p(inflow;|beta.n|)})",
                                            r.solution.trace_graph_norm, *r.constants.C1p_prime * data,
                                            with("C1p_prime", *r.constants.C1p_prime)));
        } else {
            r.skipped.insert(r.skipped.end(), r.constants.failures.begin(), r.constants.failures.end());
        }
    } else {
        if (r.constants.C1q_tilde) {
            r.margins.push_back(make_margin("adjoint_lp_stability",
                                            "||u||_{L^p} <= C1q~ (||f||_{L^p} + ||g||_{L^p(outflow;|beta.n|)})",
                                            r.solution.lp_domain, *r.constants.C1q_tilde * data,
                                            with("C1q_tilde", *r.constants.C1q_tilde)));
            r.margins.push_back(make_margin("adjoint_strong_stability",
                                            "||u||_{W^p_beta,tr} <= C1q~' (||f||_{L^p} + ||g||_{L^p(outflow;|beta.n|)})",
                                            r.solution.trace_graph_norm, *r.constants.C1q_tilde_prime * data,
                                            with("C1q_tilde_prime", *r.constants.C1q_tilde_prime)));
        } else {
            r.skipped.insert(r.skipped.end(), r.constants.failures.begin(), r.constants.failures.end());
        }
    }
    return r;
}

// ------------------------------------------------------------------ density

enum class DensityVerdict { condition_i, condition_ii, undetermined };

inline std::string_view to_string(DensityVerdict v) {
    switch (v) {
    case DensityVerdict::condition_i: return "condition_i";
    case DensityVerdict::condition_ii: return "condition_ii";
    case DensityVerdict::undetermined: return "undetermined";
    }
    return "?";
}

struct DensityOptions {
    std::vector<double> T_list{0.5, 0.1, 0.01};
    double delta_fraction = 0.1; // outermost shell distance, times the shortest adjacent inflow arc
    int shells = 8;
    int per_shell = 4;
};

struct ShellStats {
    double distance = 0.0; // outer radius (arclength from the component)
    double tau_min = std::numeric_limits<double>::infinity();
    double tau_max = 0.0;  // inf when some footpoint did not exit
    int footpoints = 0;
    int not_exited = 0;
    std::vector<std::string> errors;
};

struct ComponentDensity {
    Point2 point{};
    DensityVerdict verdict = DensityVerdict::undetermined;
    std::optional<double> T_used;
    double tau_min = std::numeric_limits<double>::infinity();
    double tau_max = 0.0;
    int footpoints = 0;
    std::vector<ShellStats> shells;
};

struct DensityReport {
    DensityOptions options;
    std::vector<ComponentDensity> components;
    std::string note;
};

/// Travel-time test at every component where the inflow and outflow closures
/// meet. Footpoints are placed on the adjacent inflow arcs in geometric shells
/// (delta, delta/2], (delta/2, delta/4], ... measured along the arc.
inline DensityReport density_condition(const FlowContext& ctx, const BoundaryClassification& bc,
                                       const DensityOptions& o = {}) {
    if (o.T_list.empty() || o.shells < 2 || o.per_shell < 1 || !(o.delta_fraction > 0.0))
        throw Error(ErrorKind::invalid_config, "density options need T values, >= 2 shells and a positive delta");
    DensityReport rep;
    rep.options = o;
    const auto& d = ctx.domain;
    if (bc.components.empty()) {
        rep.note = "separated; density condition trivial";
        return rep;
    }
    const double tol = ctx.tol.eps_geom;
    const double t_min = *std::min_element(o.T_list.begin(), o.T_list.end());
    for (const auto& comp : bc.components) {
        ComponentDensity cd;
        cd.point = comp.point;
        // adjacent inflow arcs and the end touching the component
        struct Side {
            ArcRef arc;
            bool from_start;
        };
        std::vector<Side> sides;
        double shortest = std::numeric_limits<double>::infinity();
        for (std::size_t ai : comp.inflow_arcs) {
            const ArcRef& a = bc.arcs[ai].arc;
            const bool s0 = distance(d.arc_point(a, 0.0), comp.point) <= 10 * tol;
            const bool s1 = distance(d.arc_point(a, 1.0), comp.point) <= 10 * tol;
            if (!s0 && !s1) continue;
            sides.push_back({a, s0});
            shortest = std::min(shortest, d.arc_length(a));
        }
        const double delta = o.delta_fraction * shortest;
        for (int j = 0; j < o.shells; ++j) {
            ShellStats sh;
            sh.distance = delta * std::ldexp(1.0, -j);
            for (const auto& side : sides) {
                const double len = d.arc_length(side.arc);
                std::vector<double> fr;
                for (int k = 0; k < o.per_shell; ++k) {
                    const double r = sh.distance * (1.0 - (k + 0.5) / (2.0 * o.per_shell));
                    const double f = r / len;
                    fr.push_back(side.from_start ? f : 1.0 - f);
                }
                for (const auto& e : exit_time_map(ctx, bc, side.arc, fr)) {
                    ++sh.footpoints;
                    if (!e.error.empty()) {
                        sh.errors.push_back(e.error);
                        continue;
                    }
                    const double tau = e.tau ? *e.tau : std::numeric_limits<double>::infinity();
                    if (!e.tau) ++sh.not_exited;
                    sh.tau_min = std::min(sh.tau_min, tau);
                    sh.tau_max = std::max(sh.tau_max, tau);
                }
            }
            cd.tau_min = std::min(cd.tau_min, sh.tau_min);
            cd.tau_max = std::max(cd.tau_max, sh.tau_max);
            cd.footpoints += sh.footpoints;
            cd.shells.push_back(std::move(sh));
        }
        bool any_error = false;
        for (const auto& sh : cd.shells) any_error = any_error || !sh.errors.empty();
        // (i): shell maxima shrink towards the component and the innermost
        // falls below every tested T.
        bool shrinking = true;
        for (std::size_t j = 1; j < cd.shells.size(); ++j)
            shrinking = shrinking && cd.shells[j].tau_max <= cd.shells[j - 1].tau_max * (1.0 + 1e-9);
        const double inner = cd.shells.back().tau_max;
        if (!any_error && cd.footpoints > 0 && shrinking && inner < t_min) {
            cd.verdict = DensityVerdict::condition_i;
            cd.T_used = t_min;
        } else if (!any_error && cd.footpoints > 0) {
            // (ii): uniform lower bound; report the largest T it certifies.
            std::optional<double> best;
            for (double T : o.T_list)
                if (cd.tau_min >= T && (!best || T > *best)) best = T;
            if (best) {
                cd.verdict = DensityVerdict::condition_ii;
                cd.T_used = best;
            }
        }
        rep.components.push_back(std::move(cd));
    }
    return rep;
}

// ------------------------------------------------------- unbounded trace demo

struct DemoRow {
    double m = 0.0;
    double graph_pow = 0.0;           // quadrature ||u_m||^p_{W^p_beta}
    double graph_pow_exact = 0.0;
    double graph_rel_error = 0.0;
    double outflow_pow = 0.0;         // quadrature ||u_m||^p_{L^p(outflow;beta.n)}
    double outflow_pow_exact = 0.0;
    double outflow_rel_error = 0.0;
    double ratio = 0.0;               // outflow norm / graph norm
    double local_trace = 0.0;         // ||u_m||_{L^p} on {(s, s): s >= 1/2}
};

struct DemoTable {
    NormOrder p;
    double alpha = 0.0;
    std::vector<DemoRow> rows;
    double fitted_exponent = 0.0;   // slope of log(ratio) against log(m)
    double expected_exponent = 0.0; // 1/p
};

namespace detail {

inline double least_squares_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

} // namespace detail

/// Quadrature norms of u_m on the triangle example against their closed
/// forms; the boundary-to-graph ratio grows like m^{1/p}.
inline DemoTable unbounded_trace_demo(const NormOrder& p, double alpha, const std::vector<double>& m_list,
                                      const SolverConfig& cfg = {}) {
    if (p.is_infinite() || !(alpha > p.inverse() && alpha < 2.0 * p.inverse())) {
        throw Error(ErrorKind::exponent_out_of_window,
                    "alpha = " + detail::format_number(alpha) + " must satisfy 1/p < alpha < 2/p for p = " + p.label());
    }
    if (m_list.size() < 2) throw Error(ErrorKind::invalid_config, "the demo needs at least two values of m");
    for (std::size_t i = 1; i < m_list.size(); ++i)
        if (!(m_list[i] > m_list[i - 1])) throw Error(ErrorKind::invalid_config, "m values must increase");

    const auto ex = corpus::example_triangle();
    const auto flow = make_flow_context(ex.domain, ex.beta, cfg);
    const std::size_t plus_edge = ex.edge_index("gamma_plus");
    DemoTable t;
    t.p = p;
    t.alpha = alpha;
    t.expected_exponent = p.inverse();
    std::vector<double> lx, ly;
    for (double m : m_list) {
        const auto um = corpus::um_profile(m, alpha);
        const auto nc = make_norm_context(flow, {um.kink()});
        const auto u = as_fn(um.field);
        const auto nr = norm_report(u, nc, p);
        DemoRow r;
        r.m = m;
        r.graph_pow = std::pow(nr.graph_norm, p.p());
        r.graph_pow_exact = um.graph_norm_pow(p.p());
        r.graph_rel_error = std::abs(r.graph_pow - r.graph_pow_exact) / r.graph_pow_exact;
        r.outflow_pow = std::pow(nr.lp_outflow_weighted, p.p());
        r.outflow_pow_exact = um.outflow_norm_pow(p.p());
        r.outflow_rel_error = std::abs(r.outflow_pow - r.outflow_pow_exact) / r.outflow_pow_exact;
        r.ratio = nr.lp_outflow_weighted / nr.graph_norm;
        // local trace on the closed sub-arc away from the origin
        const Edge& e = ex.domain.edge(plus_edge);
        const double s_half = project_onto_segment({0.5, 0.5}, e.start, e.end);
        const ArcRef sub = e.start.x < e.end.x ? ArcRef{plus_edge, s_half, 1.0} : ArcRef{plus_edge, 0.0, s_half};
        const Rule1D g = gauss_legendre(flow.tol.boundary_points);
        double acc = 0.0;
        for (std::size_t k = 0; k < g.nodes.size(); ++k) {
            const Point2 x = ex.domain.arc_point(sub, g.nodes[k]);
            acc += g.weights[k] * ex.domain.arc_length(sub) * std::pow(std::abs(u(x)), p.p()) *
                   std::abs(dot(flow.beta(x), e.normal));
        }
        r.local_trace = std::pow(acc, 1.0 / p.p());
        lx.push_back(std::log(m));
        ly.push_back(std::log(r.ratio));
        t.rows.push_back(r);
    }
    t.fitted_exponent = detail::least_squares_slope(lx, ly);
    return t;
}

// --------------------------------------------------------------- aggregate

struct WellPosednessReport {
    std::vector<std::pair<NormOrder, double>> sigma;
    std::vector<ConstantsReport> constants;
    SeparationResult separation;
    std::vector<TraceMargins> trace_margins;  // per p, for the solution
    std::vector<std::pair<NormOrder, GreenResidual>> green;
    std::vector<StabilityReport> stability;
};

} // namespace advect
