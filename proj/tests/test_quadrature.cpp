#include <advect/corpus.hpp>
#include <advect/quadrature.hpp>
#include <advect/triangulation.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace advect;

namespace {

using L = BoundaryLabel;

NormContext context_of(const corpus::PaperExample& ex, std::vector<SplitLine> splits = {},
                       std::optional<int> order = std::nullopt) {
    return make_norm_context(make_flow_context(ex.domain, ex.beta), std::move(splits), order);
}

/// Coefficients of (c0 + c1 t)^k.
std::vector<double> linear_power(double c0, double c1, int k) {
    std::vector<double> p{1.0};
    for (int i = 0; i < k; ++i) {
        std::vector<double> q(p.size() + 1, 0.0);
        for (std::size_t j = 0; j < p.size(); ++j) {
            q[j] += c0 * p[j];
            q[j + 1] += c1 * p[j];
        }
        p = q;
    }
    return p;
}

/// Exact area integral of x^a y^b over a CCW polygon by Green's theorem,
/// int x^a y^b dA = 1/(a + 1) oint x^(a+1) y^b dy, each edge expanded in t.
double monomial_integral(const PolygonalDomain& d, int a, int b) {
    double total = 0.0;
    for (const auto& e : d.edges()) {
        const Point2 p = e.start, q = e.end - e.start;
        const auto px = linear_power(p.x, q.x, a + 1);
        const auto py = linear_power(p.y, q.y, b);
        double line = 0.0;
        for (std::size_t i = 0; i < px.size(); ++i)
            for (std::size_t j = 0; j < py.size(); ++j) line += px[i] * py[j] / static_cast<double>(i + j + 1);
        total += line * q.y / (a + 1);
    }
    return total;
}

Error error_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e;
    }
    ADD_FAILURE() << "expected an advect::Error";
    return Error(ErrorKind::invalid_config, "none");
}

const NormOrder P1{1.0}, P2{2.0}, Pinf = NormOrder::infinity();

} // namespace

TEST(Rules, GaussLegendreWeights) {
    for (int n : {1, 2, 5, 8, 12}) {
        const auto g = gauss_legendre(n);
        double s = 0.0;
        for (double w : g.weights) s += w;
        EXPECT_NEAR(s, 1.0, 1e-14);
        // exact for t^(2n-1)
        double m = 0.0;
        for (int i = 0; i < n; ++i) m += g.weights[i] * std::pow(g.nodes[i], 2 * n - 1);
        EXPECT_NEAR(m, 1.0 / (2 * n), 1e-14);
    }
}

TEST(Rules, TriangleRuleExactness) {
    // int_T u^i v^j = i! j! / (i + j + 2)!
    auto fact = [](int k) { return std::tgamma(k + 1.0); };
    for (int order : {1, 3, 5, 7, 9}) {
        const auto r = triangle_rule(order);
        for (int i = 0; i <= order; ++i) {
            for (int j = 0; i + j <= order; ++j) {
                double s = 0.0;
                for (std::size_t k = 0; k < r.nodes.size(); ++k)
                    s += r.weights[k] * std::pow(r.nodes[k][0], i) * std::pow(r.nodes[k][1], j);
                EXPECT_NEAR(s, fact(i) * fact(j) / fact(i + j + 2), 1e-15) << order << " " << i << " " << j;
            }
        }
    }
}

TEST(Triangulation, AreasAddUp) {
    for (const auto& ex : {corpus::example_square(), corpus::example_triangle(), corpus::example_seven_segments()}) {
        const auto tris = ear_clip(ex.domain.vertices());
        EXPECT_EQ(tris.size(), ex.domain.size() - 2);
        double a = 0.0;
        for (const auto& t : tris) {
            EXPECT_GT(triangle_area(t), 0.0);
            a += triangle_area(t);
        }
        EXPECT_NEAR(a, ex.domain.area(), 1e-14);
        const auto split = split_triangles(tris, std::vector<SplitLine>{SplitLine::horizontal(0.3)});
        double b = 0.0;
        for (const auto& t : split) b += triangle_area(t);
        EXPECT_NEAR(b, ex.domain.area(), 1e-14);
        for (const auto& t : split) {
            // no piece straddles the line
            const double lo = std::min({t[0].y, t[1].y, t[2].y}), hi = std::max({t[0].y, t[1].y, t[2].y});
            EXPECT_FALSE(lo < 0.3 - 1e-15 && hi > 0.3 + 1e-15);
        }
    }
}

TEST(Rules, PolynomialExactnessOnCorpus) {
    for (const auto& ex : {corpus::example_triangle(), corpus::example_seven_segments()}) {
        for (int order : {5, 7}) {
            const auto nc = context_of(ex, {}, order);
            for (int a = 0; a <= order; ++a) {
                for (int b = 0; a + b <= order; ++b) {
                    const double exact = monomial_integral(ex.domain, a, b);
                    const double q = integrate_domain(
                        [&](const Point2& x) { return std::pow(x.x, a) * std::pow(x.y, b); }, nc.rule);
                    const double scale = std::max(std::abs(exact), 1e-300);
                    if (std::abs(exact) < 1e-14) EXPECT_NEAR(q, 0.0, 1e-13) << ex.name << " x^" << a << " y^" << b;
                    else EXPECT_LT(std::abs(q - exact) / scale, 1e-12) << ex.name << " x^" << a << " y^" << b;
                }
            }
        }
    }
}

TEST(Norms, DomainExamples) {
    const auto sq = context_of(corpus::example_square());
    for (const auto& p : {P1, P2, NormOrder(3.0), Pinf}) EXPECT_NEAR(lp_norm_domain([](const Point2&) { return 1.0; }, sq, p), 1.0, 1e-14);
    EXPECT_NEAR(lp_norm_domain([](const Point2& x) { return x.x; }, sq, P2), std::sqrt(1.0 / 3.0), 1e-14);

    const auto um = corpus::um_profile(4, 0.75);
    const auto tri = context_of(corpus::example_triangle(), {um.kink()});
    EXPECT_NEAR(lp_norm_domain(as_fn(um.field), tri, P2), std::sqrt(1.0 / 30.0), 1e-12);
}

TEST(Norms, BoundaryExamples) {
    const auto um = corpus::um_profile(4, 0.75);
    const auto tri = context_of(corpus::example_triangle(), {um.kink()});
    EXPECT_NEAR(lp_norm_boundary(as_fn(um.field), tri, L::outflow, P2), std::sqrt(0.4), 1e-12);
    // weight 1/sqrt(2) times arclength sqrt(2)
    EXPECT_NEAR(lp_norm_boundary([](const Point2&) { return 1.0; }, tri, L::outflow, P1), 1.0, 1e-14);

    const auto sq = context_of(corpus::example_square());
    EXPECT_NEAR(lp_norm_boundary([](const Point2&) { return 1.0; }, sq, L::inflow, P1), 1.0, 1e-14);
    // the weight is dropped for p = inf
    EXPECT_NEAR(lp_norm_boundary([](const Point2& x) { return x.y; }, sq, L::inflow, Pinf), 1.0, 1e-14);
}

TEST(Norms, KinkNeedsTheSplit) {
    const auto um = corpus::um_profile(8, 0.75);
    const auto split = context_of(corpus::example_triangle(), {um.kink()});
    const auto plain = context_of(corpus::example_triangle());
    const double exact = um.graph_norm_pow(2.0);
    const double with = std::pow(lp_norm_domain(as_fn(um.field), split, P2), 2.0);
    const double without = std::pow(lp_norm_domain(as_fn(um.field), plain, P2), 2.0);
    EXPECT_LT(std::abs(with - exact) / exact, 1e-12);
    EXPECT_GT(std::abs(without - exact) / exact, 1e-6);
}

TEST(DirectionalDerivative, Examples) {
    const auto ex = corpus::example_square();
    const auto& d = ex.domain;
    const double h = 1e-5;
    EXPECT_NEAR(directional_derivative([](const Point2& x) { return x.x; }, d, ex.beta, {0.3, 0.4}, h).value, 1.0, 1e-10);
    const auto e = directional_derivative([](const Point2& x) { return std::exp(-x.x); }, d, ex.beta, {0.5, 0.5}, h);
    EXPECT_FALSE(e.one_sided);
    EXPECT_NEAR(e.value, -std::exp(-0.5), 1e-9);
    EXPECT_EQ(directional_derivative([](const Point2&) { return 4.0; }, d, ex.beta, {0.5, 0.5}, h).value, 0.0);
    // at the inflow edge only the forward stencil fits
    const auto f = directional_derivative([](const Point2& x) { return x.x * x.x; }, d, ex.beta, {0.0, 0.5}, h);
    EXPECT_TRUE(f.one_sided);
    EXPECT_NEAR(f.value, 0.0, 1e-12);
}

TEST(DirectionalDerivative, NoStencilAtTheApex) {
    // at the origin of the triangle both x + h and x - h leave the closure
    const auto ex = corpus::example_triangle();
    EXPECT_EQ(error_of([&] { directional_derivative([](const Point2&) { return 1.0; }, ex.domain, ex.beta, {0, 0}, 1e-5); })
                  .kind(),
              ErrorKind::too_close_to_boundary);
}

TEST(NormReport, ConstantOnSquare) {
    const auto nc = context_of(corpus::example_square());
    const auto r = norm_report([](const Point2&) { return 1.0; }, nc, P1);
    EXPECT_NEAR(r.lp_domain, 1.0, 1e-14);
    EXPECT_NEAR(r.directional_derivative_lp, 0.0, 1e-14);
    EXPECT_NEAR(r.graph_norm, 1.0, 1e-14);
    EXPECT_NEAR(r.lp_inflow_weighted, 1.0, 1e-14);
    EXPECT_NEAR(r.lp_outflow_weighted, 1.0, 1e-14);
    EXPECT_NEAR(r.trace_graph_norm, 3.0, 1e-13);
    EXPECT_EQ(r.order, 7);
}

TEST(NormReport, LinearAtInfinity) {
    const auto nc = context_of(corpus::example_square());
    const auto r = norm_report([](const Point2& x) { return x.x; }, nc, Pinf);
    EXPECT_NEAR(r.lp_domain, 1.0, 1e-14);
    EXPECT_NEAR(r.directional_derivative_lp, 1.0, 1e-9);
    EXPECT_NEAR(r.graph_norm, 1.0, 1e-9);
}

TEST(NormReport, CombinesParts) {
    const auto nc = context_of(corpus::example_seven_segments());
    const auto u = [](const Point2& x) { return std::sin(x.x) + x.y * x.y; };
    for (const auto& p : {P1, P2, NormOrder(3.0)}) {
        const auto r = norm_report(u, nc, p);
        const double q = p.p();
        EXPECT_NEAR(r.graph_norm, std::pow(std::pow(r.lp_domain, q) + std::pow(r.directional_derivative_lp, q), 1 / q),
                    1e-13);
        EXPECT_NEAR(r.trace_graph_norm,
                    std::pow(std::pow(r.graph_norm, q) + std::pow(r.lp_outflow_weighted, q) +
                                 std::pow(r.lp_inflow_weighted, q),
                             1 / q),
                    1e-13);
    }
    const auto r = norm_report(u, nc, Pinf);
    EXPECT_EQ(r.graph_norm, std::max(r.lp_domain, r.directional_derivative_lp));
}

TEST(NormReport, SplitUmMatchesBothClosedForms) {
    for (double m : {2.0, 4.0, 8.0}) {
        const auto um = corpus::um_profile(m, 0.75);
        const auto nc = context_of(corpus::example_triangle(), {um.kink()});
        const auto r = norm_report(as_fn(um.field), nc, P2);
        EXPECT_NEAR(r.graph_norm * r.graph_norm / um.graph_norm_pow(2.0), 1.0, 1e-9);
        EXPECT_NEAR(r.lp_outflow_weighted * r.lp_outflow_weighted / um.outflow_norm_pow(2.0), 1.0, 1e-12);
    }
}

TEST(Norms, HoelderOnInflow) {
    const auto nc = context_of(corpus::example_seven_segments());
    std::mt19937 rng(31);
    std::uniform_real_distribution<double> c(-1.0, 1.0);
    std::uniform_real_distribution<double> up(1.1, 4.0);
    for (int i = 0; i < 100; ++i) {
        const double a0 = c(rng), a1 = c(rng), a2 = c(rng), b0 = c(rng), b1 = c(rng), b2 = c(rng);
        auto g = [=](const Point2& x) { return a0 + a1 * x.x + a2 * x.y * x.x; };
        auto v = [=](const Point2& x) { return b0 + b1 * x.y + b2 * x.x * x.x; };
        const NormOrder p(up(rng));
        const double lhs = std::abs(integrate_boundary_weighted([&](const Point2& x) { return g(x) * v(x); }, nc, L::inflow));
        const double rhs = lp_norm_boundary(g, nc, L::inflow, p) * lp_norm_boundary(v, nc, L::inflow, p.conjugate());
        EXPECT_LE(lhs, rhs + 1e-9);
    }
}

TEST(Norms, StableUnderOrderIncrease) {
    const auto ex = corpus::example_seven_segments();
    const auto u = [](const Point2& x) { return std::exp(-x.x / 3) * std::cos(2 * x.y) + 0.1 * x.x * x.y; };
    const auto lo = norm_report(u, context_of(ex, {}, 7), P2);
    const auto hi = norm_report(u, context_of(ex, {}, 11), P2);
    EXPECT_LT(std::abs(hi.lp_domain / lo.lp_domain - 1), 1e-3);
    EXPECT_LT(std::abs(hi.directional_derivative_lp / lo.directional_derivative_lp - 1), 1e-3);
    EXPECT_LT(std::abs(hi.trace_graph_norm / lo.trace_graph_norm - 1), 1e-3);
}

TEST(Norms, LargePApproachesSup) {
    const auto nc = context_of(corpus::example_square());
    // a flat bump with maximum 1 at the centre
    const auto u = [](const Point2& x) { return std::exp(-((x.x - 0.5) * (x.x - 0.5) + (x.y - 0.5) * (x.y - 0.5)) / 10); };
    const double sup = lp_norm_domain(u, nc, Pinf);
    EXPECT_NEAR(sup, 1.0, 1e-14);
    EXPECT_LT(std::abs(lp_norm_domain(u, nc, NormOrder(64.0)) / sup - 1), 0.02);
}
