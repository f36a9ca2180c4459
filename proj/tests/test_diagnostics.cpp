#include <advect/corpus.hpp>
#include <advect/diagnostics.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace advect;

namespace {

using L = BoundaryLabel;

PolygonalDomain unit_square() { return build_domain({{0, 0}, {1, 0}, {1, 1}, {0, 1}}); }

template <class F>
Error error_of(F&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e;
    }
    ADD_FAILURE() << "expected an advect::Error";
    return Error(ErrorKind::invalid_config, "none");
}

FieldNorms unit_norms() {
    FieldNorms n;
    n.sup_beta = 1.0;
    n.w1inf = 1.0;
    n.sup_mu = 1.0;
    n.ess_inf_mu = 1.0;
    return n;
}

const NormOrder P1{1.0}, P2{2.0}, P3{3.0};

} // namespace

TEST(Sigma, Examples) {
    const auto sq = unit_square();
    for (const auto& p : {P1, P2, P3, NormOrder::infinity()})
        EXPECT_EQ(sigma_p(parse_field("1"), VectorField::parse("1", "0"), sq, p), 1.0);
    EXPECT_DOUBLE_EQ(sigma_p(parse_field("2"), VectorField::parse("x", "y"), sq, P2), 1.0);
    EXPECT_DOUBLE_EQ(sigma_p(parse_field("2"), VectorField::parse("x", "y"), sq, NormOrder::infinity()), 2.0);
}

TEST(Sigma, RotationOnTriangle) {
    // div (y, -x) = 0 and 1 + x^2 is smallest on x = 0, which meets the closure
    const auto tri = corpus::example_triangle().domain;
    const auto mu = parse_field("1 + x^2");
    const auto v = VectorField::parse("y", "-x");
    const double s1 = sigma_p(mu, v, tri, P1);
    EXPECT_NEAR(s1, 1.0, 1e-12);
    for (const auto& p : {P2, P3, NormOrder::infinity()}) EXPECT_EQ(sigma_p(mu, v, tri, p), s1);
    EXPECT_EQ(error_of([&] { sigma_p(mu, v, tri, P2, 4); }).kind(), ErrorKind::invalid_config);
}

TEST(Constants, UnitInputs) {
    const auto r = constants(P1, unit_norms(), 1.0, 1.0);
    EXPECT_DOUBLE_EQ(r.C2p, 2.0);
    ASSERT_TRUE(r.C1p);
    EXPECT_DOUBLE_EQ(*r.C1p, 12.0);
    // (1 + 2)(2 + 2 * 12)
    EXPECT_DOUBLE_EQ(*r.C1p_prime, 78.0);
    EXPECT_TRUE(r.q.is_infinite());
    EXPECT_DOUBLE_EQ(r.C2q, 2.0);
    // (1 + 2)(1 + 1 + 1) and (1 + 2)(1 + 2 * 9)
    EXPECT_DOUBLE_EQ(*r.C1q_tilde, 9.0);
    EXPECT_DOUBLE_EQ(*r.C1q_tilde_prime, 57.0);
    EXPECT_TRUE(r.failures.empty());

    const auto ri = constants(NormOrder::infinity(), unit_norms(), 1.0, 1.0);
    ASSERT_TRUE(ri.C1_infty);
    EXPECT_DOUBLE_EQ(*ri.C1_infty, 12.0);
    EXPECT_DOUBLE_EQ(ri.C2q, 2.0); // q = 1: 1^1 + 1^1
}

TEST(Constants, GeneralP) {
    FieldNorms n = unit_norms();
    n.w1inf = 3.0;
    n.sup_mu = 0.5;
    const auto r = constants(P2, n, 0.25, 0.75);
    const double c2 = std::sqrt(2.0) + std::sqrt(3.0);
    EXPECT_DOUBLE_EQ(r.C2p, c2);
    EXPECT_DOUBLE_EQ(*r.C1p, (1 + c2) / 0.25 * (1 + 0.25 + 3 + 0.5));
    EXPECT_DOUBLE_EQ(*r.C1p_prime, (1 + c2) * (2 + 1.5 * *r.C1p));
    EXPECT_DOUBLE_EQ(*r.C1q_tilde, (1 + c2) / 0.75 * (1 + 0.75 + 0.5));
    // recomputing from the recorded inputs is bit-identical
    const auto again = constants(r.p, r.inputs, r.sigma_p, r.sigma_q);
    EXPECT_EQ(*again.C1p, *r.C1p);
    EXPECT_EQ(*again.C1q_tilde_prime, *r.C1q_tilde_prime);
}

TEST(Constants, HypothesisFailed) {
    const auto r = constants(P2, unit_norms(), 0.0, 1.0);
    EXPECT_FALSE(r.C1p);
    EXPECT_TRUE(r.C1q_tilde);
    ASSERT_EQ(r.failures.size(), 1u);
    EXPECT_NE(r.failures[0].find("HypothesisFailed"), std::string::npos);
    EXPECT_EQ(error_of([] { checked_constants(P2, unit_norms(), 0.0, 1.0); }).kind(), ErrorKind::hypothesis_failed);
    EXPECT_EQ(error_of([] { checked_constants(P2, unit_norms(), -0.5, 1.0); }).kind(), ErrorKind::hypothesis_failed);
}

TEST(Trace, ConstantOnSquare) {
    const auto sq = corpus::example_square();
    const auto nc = make_norm_context(make_flow_context(sq.domain, sq.beta));
    const auto m = check_trace_inequality([](const Point2&) { return 1.0; }, nc, P1);
    EXPECT_NEAR(m.outflow.lhs, 1.0, 1e-14);
    EXPECT_NEAR(m.outflow.rhs, 3.0, 1e-14);
    EXPECT_NEAR(m.outflow.margin, 2.0, 1e-14);
    EXPECT_NEAR(m.inflow.margin, 2.0, 1e-14);
    EXPECT_TRUE(m.outflow.holds());

    const auto z = check_trace_inequality([](const Point2&) { return 0.0; }, nc, P2);
    EXPECT_EQ(z.outflow.margin, 0.0);
    EXPECT_EQ(z.inflow.margin, 0.0);
    EXPECT_TRUE(z.inflow.holds());
}

TEST(Trace, RandomQuadraticsOnTriangle) {
    const auto ex = corpus::example_triangle();
    const auto nc = make_norm_context(make_flow_context(ex.domain, ex.beta));
    std::mt19937 rng(21);
    std::uniform_real_distribution<double> c(-2.0, 2.0);
    for (int k = 0; k < 20; ++k) {
        double a[6];
        for (double& v : a) v = c(rng);
        const double cut = c(rng) * 0.25 + 0.5;
        auto u = [=](const Point2& x) {
            const double q = a[0] + a[1] * x.x + a[2] * x.y + a[3] * x.x * x.x + a[4] * x.x * x.y + a[5] * x.y * x.y;
            return q + a[0] * std::abs(x.x + x.y - cut);
        };
        for (const auto& p : {P1, P2, P3}) {
            const auto m = check_trace_inequality(u, nc, p);
            EXPECT_TRUE(m.outflow.holds()) << k << " " << p.label() << " " << m.outflow.margin;
            EXPECT_TRUE(m.inflow.holds()) << k << " " << p.label() << " " << m.inflow.margin;
        }
    }
}

TEST(Green, ConstantOnSquare) {
    const auto sq = corpus::example_square();
    const auto nc = make_norm_context(make_flow_context(sq.domain, sq.beta));
    const auto g = check_green_identity(parse_field("3"), nc, P2);
    EXPECT_EQ(g.lhs, 0.0);
    EXPECT_NEAR(g.outflow_term, 4.5, 1e-13);
    EXPECT_NEAR(g.inflow_term, 4.5, 1e-13);
    EXPECT_LT(g.residual, 1e-13);
}

TEST(Green, PolynomialOnCorpus) {
    const auto u = parse_field("x^2*y");
    for (const auto& ex : {corpus::example_square(), corpus::example_triangle(), corpus::example_seven_segments()}) {
        const auto nc = make_norm_context(make_flow_context(ex.domain, ex.beta), {}, 7);
        EXPECT_LT(check_green_identity(u, nc, P2).residual, 1e-8) << ex.name;
        EXPECT_LT(check_green_identity(u, nc, P3).residual, 1e-8) << ex.name;
    }
    // x^2 y on the square: lhs = int 2 x y * x^2 y = 1/6
    const auto sq = corpus::example_square();
    const auto g = check_green_identity(u, make_norm_context(make_flow_context(sq.domain, sq.beta)), P2);
    EXPECT_NEAR(g.lhs, 1.0 / 6.0, 1e-13);
}

TEST(Green, DivergentField) {
    const auto sq = unit_square();
    const auto beta = VectorField::parse("x + 1", "y*x");
    const auto nc = make_norm_context(make_flow_context(sq, beta));
    EXPECT_LT(check_green_identity(parse_field("1 + x*y"), nc, P2).residual, 1e-8);
    EXPECT_LT(check_green_identity(parse_field("1 + x*y"), nc, P1).residual, 1e-8);
}

TEST(Green, KinkedProfile) {
    const auto ex = corpus::example_triangle();
    const auto flow = make_flow_context(ex.domain, ex.beta);
    const auto um = corpus::um_profile(8, 0.75);
    EXPECT_LT(check_green_identity(um.field, make_norm_context(flow, {um.kink()}), P2).residual, 1e-5);
}

TEST(Green, FiniteDifferenceForm) {
    const auto sq = corpus::example_square();
    const auto nc = make_norm_context(make_flow_context(sq.domain, sq.beta));
    const auto g = check_green_identity([](const Point2& x) { return x.x * x.x * x.y; }, nc, P2);
    EXPECT_LT(g.residual, 1e-6);
}

TEST(Green, ResidualDoesNotGrowWithOrder) {
    const auto ex = corpus::example_seven_segments();
    const auto flow = make_flow_context(ex.domain, ex.beta);
    const auto u = parse_field("x^3*y^2 + x*y^4");
    double prev = std::numeric_limits<double>::infinity();
    for (int order : {3, 5, 7, 9}) {
        const double r = check_green_identity(u, make_norm_context(flow, {}, order), P2).residual;
        EXPECT_LE(r, std::max(prev, 1e-11)) << order;
        prev = r;
    }
}

TEST(Vanishing, ParabolaOnSquare) {
    const auto sq = corpus::example_square();
    const auto nc = make_norm_context(make_flow_context(sq.domain, sq.beta));
    const auto u = [](const Point2& x) { return x.x * (1.0 - x.x); };
    const auto m = check_vanishing_trace(u, nc, P2);
    EXPECT_TRUE(m.opposite_trace.holds());
    EXPECT_TRUE(m.trace_norm.holds());
    EXPECT_NEAR(m.opposite_trace.lhs, 0.0, 1e-14);
    const auto mi = check_vanishing_trace(u, nc, P2, L::inflow);
    EXPECT_TRUE(mi.opposite_trace.holds());

    const auto z = check_vanishing_trace([](const Point2&) { return 0.0; }, nc, P1);
    EXPECT_EQ(z.opposite_trace.margin, 0.0);
    EXPECT_EQ(z.trace_norm.margin, 0.0);
}

TEST(Vanishing, RejectsNonVanishing) {
    const auto sq = corpus::example_square();
    const auto nc = make_norm_context(make_flow_context(sq.domain, sq.beta));
    EXPECT_EQ(error_of([&] { check_vanishing_trace([](const Point2& x) { return x.x; }, nc, P2); }).kind(),
              ErrorKind::not_vanishing);
}

TEST(Vanishing, LiftedBandOnTriangle) {
    // data supported on gamma_minus for 0.2 <= y <= 0.4, transported along
    // horizontals and cut off linearly towards gamma_plus
    const auto ex = corpus::example_triangle();
    const auto flow = make_flow_context(ex.domain, ex.beta);
    const auto nc = make_norm_context(flow, {SplitLine::horizontal(0.2), SplitLine::horizontal(0.4)});
    auto bump = [](double y) { return y > 0.2 && y < 0.4 ? std::sin(5 * std::acos(-1.0) * (y - 0.2)) : 0.0; };
    auto u = [&](const Point2& x) {
        const double b = bump(x.y);
        return b == 0.0 ? 0.0 : b * (x.y - x.x) / (2.0 * x.y);
    };
    for (const auto& p : {P1, P2, P3}) {
        const auto m = check_vanishing_trace(u, nc, p);
        EXPECT_GE(m.opposite_trace.margin, -1e-9);
        EXPECT_GE(m.trace_norm.margin, -1e-9);
    }
}

TEST(Separation, Corpus) {
    const auto sq = corpus::example_square();
    const auto c1 = make_flow_context(sq.domain, sq.beta);
    const auto s1 = separation_check(sq.domain, classify_boundary(c1));
    ASSERT_TRUE(s1.distance);
    EXPECT_DOUBLE_EQ(*s1.distance, 1.0);
    EXPECT_TRUE(s1.separated);
    for (const auto& ex : {corpus::example_triangle(), corpus::example_seven_segments()}) {
        const auto c = make_flow_context(ex.domain, ex.beta);
        const auto s = separation_check(ex.domain, classify_boundary(c));
        ASSERT_TRUE(s.distance);
        EXPECT_NEAR(*s.distance, 0.0, 1e-12) << ex.name;
        EXPECT_FALSE(s.separated);
    }
}

TEST(Density, Verdicts) {
    const auto tri = corpus::example_triangle();
    const auto ct = make_flow_context(tri.domain, tri.beta);
    const auto rt = density_condition(ct, classify_boundary(ct));
    ASSERT_EQ(rt.components.size(), 1u);
    EXPECT_EQ(rt.components[0].verdict, DensityVerdict::condition_i);
    EXPECT_NEAR(norm(rt.components[0].point), 0.0, 1e-9);
    // tau(s) = 2s on the innermost shell
    const auto& inner = rt.components[0].shells.back();
    EXPECT_LE(inner.tau_max, 2.0 * inner.distance * std::sqrt(0.5) + 1e-9);

    const auto ss = corpus::example_seven_segments();
    const auto cs = make_flow_context(ss.domain, ss.beta);
    const auto rs = density_condition(cs, classify_boundary(cs));
    ASSERT_EQ(rs.components.size(), 1u);
    EXPECT_EQ(rs.components[0].verdict, DensityVerdict::condition_ii);
    EXPECT_NEAR(rs.components[0].point.x, 2.5, 1e-9);
    EXPECT_NEAR(rs.components[0].point.y, 0.5, 1e-9);
    EXPECT_GE(rs.components[0].tau_min, 1.0 - 1e-6);

    const auto sq = corpus::example_square();
    const auto cq = make_flow_context(sq.domain, sq.beta);
    const auto rq = density_condition(cq, classify_boundary(cq));
    EXPECT_TRUE(rq.components.empty());
    EXPECT_EQ(rq.note, "separated; density condition trivial");
}

TEST(Density, StableUnderRefinement) {
    DensityOptions fine;
    fine.delta_fraction = 0.05;
    fine.per_shell = 8;
    for (const auto& [ex, v] : {std::pair{corpus::example_triangle(), DensityVerdict::condition_i},
                                std::pair{corpus::example_seven_segments(), DensityVerdict::condition_ii}}) {
        const auto c = make_flow_context(ex.domain, ex.beta);
        const auto r = density_condition(c, classify_boundary(c), fine);
        ASSERT_EQ(r.components.size(), 1u);
        EXPECT_EQ(r.components[0].verdict, v) << ex.name;
    }
    DensityOptions bad;
    bad.shells = 1;
    const auto sq = corpus::example_square();
    const auto c = make_flow_context(sq.domain, sq.beta);
    EXPECT_EQ(error_of([&] { density_condition(c, classify_boundary(c), bad); }).kind(), ErrorKind::invalid_config);
}

TEST(Demo, UnboundedTrace) {
    const auto t = unbounded_trace_demo(P2, 0.75, {2, 4, 8, 16});
    ASSERT_EQ(t.rows.size(), 4u);
    const auto& last = t.rows.back();
    EXPECT_NEAR(last.graph_pow_exact, 1.0 / 60.0, 1e-15);
    EXPECT_NEAR(last.outflow_pow_exact, 0.8, 1e-15);
    EXPECT_LT(last.graph_rel_error, 1e-3);
    EXPECT_LT(last.outflow_rel_error, 1e-3);
    EXPECT_NEAR(t.fitted_exponent, 0.5, 0.05);
    EXPECT_EQ(t.expected_exponent, 0.5);
    for (const auto& r : t.rows) {
        if (r.m > 2) {
            EXPECT_EQ(r.local_trace, 0.0) << r.m;
        }
    }
}

TEST(Demo, Errors) {
    EXPECT_EQ(error_of([] { unbounded_trace_demo(P2, 0.4, {2, 4}); }).kind(), ErrorKind::exponent_out_of_window);
    EXPECT_EQ(error_of([] { unbounded_trace_demo(P2, 1.0, {2, 4}); }).kind(), ErrorKind::exponent_out_of_window);
    EXPECT_EQ(error_of([] { unbounded_trace_demo(NormOrder::infinity(), 1.0, {2, 4}); }).kind(),
              ErrorKind::exponent_out_of_window);
    EXPECT_EQ(error_of([] { unbounded_trace_demo(P2, 0.75, {4}); }).kind(), ErrorKind::invalid_config);
    EXPECT_EQ(error_of([] { unbounded_trace_demo(P2, 0.75, {4, 2}); }).kind(), ErrorKind::invalid_config);
}

TEST(Stability, ManufacturedDirectAndAdjoint) {
    const auto sq = corpus::example_square();
    for (auto kind : {ProblemKind::direct, ProblemKind::adjoint}) {
        ProblemData pd;
        pd.beta = sq.beta;
        pd.mu = parse_field("1");
        pd.kind = kind;
        auto c = make_solve_context(sq.domain, pd);
        c.pd.g = data_on(c.bc, data_label(kind), parse_field("1"));
        const SolutionField u(c);
        const auto nc = make_norm_context(c.flow);
        for (const auto& p : {P1, P2, NormOrder::infinity()}) {
            const auto r = stability_margins(u, nc, p);
            ASSERT_EQ(r.margins.size(), 2u);
            EXPECT_TRUE(r.skipped.empty());
            for (const auto& m : r.margins) EXPECT_GE(m.margin, 0.0) << m.name << " " << p.label();
            EXPECT_EQ(r.margins[0].name, kind == ProblemKind::direct ? "lp_stability" : "adjoint_lp_stability");
            EXPECT_NEAR(r.g_norm, 1.0, 1e-12);
            EXPECT_EQ(r.f_norm, 0.0);
        }
    }
}

TEST(Stability, SkippedWithoutCoercivity) {
    const auto sq = corpus::example_square();
    ProblemData pd;
    pd.beta = sq.beta;
    auto c = make_solve_context(sq.domain, pd);
    c.pd.g = data_on(c.bc, L::inflow, parse_field("1"));
    const auto r = stability_margins(SolutionField(c), make_norm_context(c.flow), P2);
    EXPECT_TRUE(r.margins.empty());
    EXPECT_FALSE(r.skipped.empty());
}
