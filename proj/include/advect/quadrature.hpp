#pragma once

#include <advect/characteristics.hpp>
#include <advect/config.hpp>
#include <advect/fields.hpp>
#include <advect/geometry.hpp>
#include <advect/triangulation.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <span>
#include <vector>

namespace advect {

using ScalarFn = std::function<double(const Point2&)>;

inline ScalarFn as_fn(const ScalarField& f) {
    return [f](const Point2& p) { return f(p); };
}

struct Rule1D {
    std::vector<double> nodes;   // in [0, 1]
    std::vector<double> weights; // sum to 1
};

/// n-point Gauss-Legendre rule mapped to [0, 1] (Newton on P_n).
inline Rule1D gauss_legendre(int n) {
    Rule1D r;
    r.nodes.resize(n);
    r.weights.resize(n);
    for (int i = 0; i < n; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = 0.0;
            for (int k = 1; k <= n; ++k) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
            }
            dp = n * (z * p0 - p1) / (z * z - 1.0);
            const double dz = p0 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16) break;
        }
        // recompute derivative at the converged node
        double p0 = 1.0, p1 = 0.0;
        for (int k = 1; k <= n; ++k) {
            const double p2 = p1;
            p1 = p0;
            p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
        }
        dp = n * (z * p0 - p1) / (z * z - 1.0);
        r.nodes[n - 1 - i] = 0.5 * (1.0 + z);
        r.weights[n - 1 - i] = 1.0 / ((1.0 - z * z) * dp * dp);
    }
    return r;
}

struct TriangleRule {
    std::vector<std::array<double, 2>> nodes; // reference coords (u, v), u, v >= 0, u + v <= 1
    std::vector<double> weights;              // sum to 1/2
    int order = 0;
};

/// Collapsed-coordinate (conical product) rule exact for polynomials of total
/// degree <= order on the reference triangle.
inline TriangleRule triangle_rule(int order) {
    const int n = (order + 3) / 2; // 2n - 1 >= order + 1 for the (1 - eta) Jacobian
    const Rule1D g = gauss_legendre(n);
    TriangleRule r;
    r.order = order;
    for (int j = 0; j < n; ++j) {
        const double eta = g.nodes[j];
        for (int i = 0; i < n; ++i) {
            const double xi = g.nodes[i];
            r.nodes.push_back({xi * (1.0 - eta), eta});
            r.weights.push_back(g.weights[i] * g.weights[j] * (1.0 - eta));
        }
    }
    return r;
}

struct WeightedPoint {
    Point2 x{};
    double w = 0.0;
};

struct BoundaryNode {
    Point2 x{};
    double w = 0.0; // arclength weight
    std::size_t arc = 0;
    std::size_t edge = 0;
    BoundaryLabel label = BoundaryLabel::characteristic;
};

struct QuadratureOptions {
    int order = 7;
    int boundary_points = 8;
    std::vector<SplitLine> splits;
};

struct QuadratureRule {
    std::vector<WeightedPoint> domain;
    std::vector<BoundaryNode> boundary;
    std::vector<Triangle> triangles;
    QuadratureOptions options;
};

/// Domain nodes from the ear-clipped triangulation (cut along the split
/// lines) and Gauss-Legendre nodes on every classified arc (also cut).
inline QuadratureRule make_rule(const PolygonalDomain& d, const BoundaryClassification& bc, const QuadratureOptions& o) {
    QuadratureRule r;
    r.options = o;
    r.triangles = split_triangles(ear_clip(d.vertices()), o.splits);
    const auto tr = triangle_rule(o.order);
    for (const auto& t : r.triangles) {
        const double jac = 2.0 * triangle_area(t);
        for (std::size_t k = 0; k < tr.nodes.size(); ++k) {
            const auto [u, v] = tr.nodes[k];
            r.domain.push_back({t[0] + u * (t[1] - t[0]) + v * (t[2] - t[0]), tr.weights[k] * jac});
        }
    }
    const Rule1D g = gauss_legendre(o.boundary_points);
    for (std::size_t ai = 0; ai < bc.arcs.size(); ++ai) {
        const auto& la = bc.arcs[ai];
        const Edge& e = d.edge(la.arc.edge);
        std::vector<double> cuts{la.arc.s0, la.arc.s1};
        for (const auto& l : o.splits) {
            const double f0 = l.eval(e.start), f1 = l.eval(e.end);
            if (f0 == f1) continue;
            const double s = f0 / (f0 - f1);
            if (s > la.arc.s0 && s < la.arc.s1) cuts.push_back(s);
        }
        std::sort(cuts.begin(), cuts.end());
        for (std::size_t c = 0; c + 1 < cuts.size(); ++c) {
            const double s0 = cuts[c], s1 = cuts[c + 1];
            if (!(s1 > s0)) continue;
            for (int k = 0; k < o.boundary_points; ++k) {
                const double s = s0 + g.nodes[k] * (s1 - s0);
                r.boundary.push_back({e.at(s), g.weights[k] * (s1 - s0) * e.length, ai, la.arc.edge, la.label});
            }
        }
    }
    return r;
}

/// Pairwise summation; fixed order so results are reproducible.
inline double pairwise_sum(std::span<const double> v) {
    if (v.size() <= 8) {
        double s = 0.0;
        for (double x : v) s += x;
        return s;
    }
    const std::size_t h = v.size() / 2;
    return pairwise_sum(v.subspan(0, h)) + pairwise_sum(v.subspan(h));
}

struct DirectionalDerivative {
    double value = 0.0;
    bool one_sided = false;
};

/// Central difference (u(x + h beta) - u(x - h beta)) / 2h, falling back to
/// one-sided quotients when one stencil point leaves the closed domain.
inline DirectionalDerivative directional_derivative(const ScalarFn& u, const PolygonalDomain& d, const VectorField& beta,
                                                    const Point2& x, double h) {
    const Point2 b = beta(x);
    const Point2 xp = x + h * b, xm = x - h * b;
    const bool fp = in_closure(d, xp), fm = in_closure(d, xm);
    if (fp && fm) return {(u(xp) - u(xm)) / (2.0 * h), false};
    // one-sided: second order when the doubled stencil still fits
    if (fp) {
        const Point2 xpp = x + 2.0 * h * b;
        if (in_closure(d, xpp)) return {(-3.0 * u(x) + 4.0 * u(xp) - u(xpp)) / (2.0 * h), true};
        return {(u(xp) - u(x)) / h, true};
    }
    if (fm) {
        const Point2 xmm = x - 2.0 * h * b;
        if (in_closure(d, xmm)) return {(3.0 * u(x) - 4.0 * u(xm) + u(xmm)) / (2.0 * h), true};
        return {(u(x) - u(xm)) / h, true};
    }
    std::ostringstream os;
    os.precision(17);
    os << "both difference stencils leave the domain at (" << x.x << ", " << x.y << ")";
    throw Error(ErrorKind::too_close_to_boundary, os.str());
}

/// Everything the norm family needs: flow context, classification and rule.
struct NormContext {
    FlowContext flow;
    BoundaryClassification bc;
    QuadratureRule rule;
    std::vector<Point2> sup_points; // grid and edge samples used for p = inf
};

inline NormContext make_norm_context(const FlowContext& flow, std::vector<SplitLine> splits = {},
                                     std::optional<int> order = std::nullopt) {
    NormContext c;
    c.flow = flow;
    c.bc = classify_boundary(flow);
    QuadratureOptions o;
    o.order = order.value_or(flow.tol.quad_order);
    o.boundary_points = flow.tol.boundary_points;
    o.splits = std::move(splits);
    c.rule = make_rule(flow.domain, c.bc, o);
    c.sup_points = detail::sample_grid(flow.domain, flow.tol.grid_n).points;
    return c;
}

namespace detail {

inline double lp_combine(std::vector<double>& terms, const NormOrder& p) {
    if (p.is_infinite()) {
        double m = 0.0;
        for (double t : terms) m = std::max(m, t);
        return m;
    }
    return std::pow(pairwise_sum(terms), 1.0 / p.p());
}

} // namespace detail

/// ||u||_{L^p(Omega)}. For p = inf: max over nodes and the sample grid.
inline double lp_norm_domain(const ScalarFn& u, const NormContext& c, const NormOrder& p) {
    std::vector<double> terms;
    if (p.is_infinite()) {
        for (const auto& n : c.rule.domain) terms.push_back(std::abs(u(n.x)));
        for (const auto& x : c.sup_points) terms.push_back(std::abs(u(x)));
    } else {
        for (const auto& n : c.rule.domain) terms.push_back(n.w * std::pow(std::abs(u(n.x)), p.p()));
    }
    return detail::lp_combine(terms, p);
}

/// ||u||_{L^p(Gamma_label; |beta.n|)}; for p = inf the weight is dropped.
inline double lp_norm_boundary(const ScalarFn& u, const NormContext& c, BoundaryLabel label, const NormOrder& p) {
    std::vector<double> terms;
    const auto& d = c.flow.domain;
    for (const auto& n : c.rule.boundary) {
        if (n.label != label) continue;
        const double val = std::abs(u(n.x));
        if (p.is_infinite()) terms.push_back(val);
        else {
            const double wgt = std::abs(dot(c.flow.beta(n.x), d.edge(n.edge).normal));
            terms.push_back(n.w * std::pow(val, p.p()) * wgt);
        }
    }
    if (p.is_infinite()) {
        for (const auto& a : c.bc.arcs)
            if (a.label == label)
                for (double t : {0.0, 1.0}) terms.push_back(std::abs(u(d.arc_point(a.arc, t))));
    }
    return detail::lp_combine(terms, p);
}

/// ||beta.grad u||_{L^p(Omega)} by finite differences; sets *one_sided if
/// any node needed the one-sided fallback.
inline double directional_lp_norm(const ScalarFn& u, const NormContext& c, const NormOrder& p,
                                  bool* one_sided = nullptr) {
    const double h = c.flow.tol.fd_step;
    std::vector<double> terms;
    bool fallback = false;
    auto dd = [&](const Point2& x) {
        const auto r = directional_derivative(u, c.flow.domain, c.flow.beta, x, h);
        fallback = fallback || r.one_sided;
        return std::abs(r.value);
    };
    if (p.is_infinite()) {
        for (const auto& n : c.rule.domain) terms.push_back(dd(n.x));
        for (const auto& x : c.sup_points) {
            // boundary samples at sharp corners may admit no stencil
            try {
                terms.push_back(dd(x));
            } catch (const Error& e) {
                if (e.kind() != ErrorKind::too_close_to_boundary) throw;
            }
        }
    } else {
        for (const auto& n : c.rule.domain) terms.push_back(n.w * std::pow(dd(n.x), p.p()));
    }
    if (one_sided) *one_sided = fallback;
    return detail::lp_combine(terms, p);
}

inline double combine_norms(std::initializer_list<double> parts, const NormOrder& p) {
    if (p.is_infinite()) return std::max(parts);
    double s = 0.0;
    for (double v : parts) s += std::pow(v, p.p());
    return std::pow(s, 1.0 / p.p());
}

struct NormReport {
    NormOrder p;
    double lp_domain = 0.0;
    double lp_inflow_weighted = 0.0;
    double lp_outflow_weighted = 0.0;
    double directional_derivative_lp = 0.0;
    double graph_norm = 0.0;       // W^p_beta
    double trace_graph_norm = 0.0; // W^p_{beta,tr}
    bool one_sided_fallback = false;
    int order = 0;
    int boundary_points = 0;
};

inline NormReport norm_report(const ScalarFn& u, const NormContext& c, const NormOrder& p) {
    NormReport r;
    r.p = p;
    r.order = c.rule.options.order;
    r.boundary_points = c.rule.options.boundary_points;
    r.lp_domain = lp_norm_domain(u, c, p);
    r.lp_inflow_weighted = lp_norm_boundary(u, c, BoundaryLabel::inflow, p);
    r.lp_outflow_weighted = lp_norm_boundary(u, c, BoundaryLabel::outflow, p);
    r.directional_derivative_lp = directional_lp_norm(u, c, p, &r.one_sided_fallback);
    r.graph_norm = combine_norms({r.lp_domain, r.directional_derivative_lp}, p);
    r.trace_graph_norm = combine_norms({r.graph_norm, r.lp_outflow_weighted, r.lp_inflow_weighted}, p);
    return r;
}

/// Integral of u over the domain with the rule's nodes.
inline double integrate_domain(const ScalarFn& u, const QuadratureRule& r) {
    std::vector<double> t;
    t.reserve(r.domain.size());
    for (const auto& n : r.domain) t.push_back(n.w * u(n.x));
    return pairwise_sum(t);
}

/// Integral of u * |beta.n| over the arcs with the given label.
inline double integrate_boundary_weighted(const ScalarFn& u, const NormContext& c, BoundaryLabel label) {
    std::vector<double> t;
    for (const auto& n : c.rule.boundary) {
        if (n.label != label) continue;
        t.push_back(n.w * u(n.x) * std::abs(dot(c.flow.beta(n.x), c.flow.domain.edge(n.edge).normal)));
    }
    return pairwise_sum(t);
}

} // namespace advect
