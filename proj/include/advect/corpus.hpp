#pragma once

// Built-in reference problems with closed-form oracles.
//
// triangle        {|x| < y < 1} with beta = (1, 0). The outflow and inflow
//                 edges meet at the origin, so the classical separation
//                 condition fails. Carries the u_m family, whose W^p_beta
//                 norm tends to zero while the outflow trace norm blows up.
// seven-segments  the notched polygon bounded by G1..G7 with beta = (1, 0);
//                 outflow G3 and inflow G4 meet at x* = (5/2, 1/2), and
//                 orbits from G4 need time 7 - 2t to leave.
//                 The characteristic top edge right of the notch is G5:
//                 the flow-based labels put G1, G4 in the inflow set and
//                 G2, G5, G7 in the characteristic set.
// square          unit square with beta = (1, 0): separated boundary, used
//                 for manufactured solutions.

#include <advect/characteristics.hpp>
#include <advect/error.hpp>
#include <advect/fields.hpp>
#include <advect/geometry.hpp>
#include <advect/triangulation.hpp>

#include <cmath>
#include <functional>
#include <string>
#include <vector>

namespace advect::corpus {

struct PaperExample {
    std::string name;
    PolygonalDomain domain;
    VectorField beta;
    std::vector<std::string> edge_names;          // per canonical edge
    std::vector<BoundaryLabel> expected_labels;   // per canonical edge
    std::vector<Point2> expected_components;
    /// Inflow edge used by the exit-time oracle and a map from its edge
    /// parameter s to the closed-form exit time.
    std::size_t oracle_edge = 0;
    std::function<double(double)> exit_time;

    std::size_t edge_index(std::string_view edge_name) const {
        for (std::size_t i = 0; i < edge_names.size(); ++i)
            if (edge_names[i] == edge_name) return i;
        throw Error(ErrorKind::invalid_config, "no edge named " + std::string(edge_name));
    }
};

namespace detail {

struct NamedSegment {
    Point2 a, b;
    const char* name;
    BoundaryLabel label;
};

inline std::vector<std::string> name_edges(const PolygonalDomain& d, const std::vector<NamedSegment>& segs,
                                           std::vector<BoundaryLabel>& labels) {
    std::vector<std::string> names;
    labels.clear();
    for (const auto& e : d.edges()) {
        for (const auto& s : segs) {
            if ((e.start == s.a && e.end == s.b) || (e.start == s.b && e.end == s.a)) {
                names.emplace_back(s.name);
                labels.push_back(s.label);
            }
        }
    }
    return names;
}

} // namespace detail

inline PaperExample example_triangle() {
    using L = BoundaryLabel;
    PaperExample ex;
    ex.name = "triangle";
    ex.domain = build_domain({{0.0, 0.0}, {1.0, 1.0}, {-1.0, 1.0}});
    ex.beta = VectorField::parse("1", "0");
    ex.edge_names = detail::name_edges(ex.domain,
                                       {{{0, 0}, {1, 1}, "gamma_plus", L::outflow},
                                        {{1, 1}, {-1, 1}, "top", L::characteristic},
                                        {{-1, 1}, {0, 0}, "gamma_minus", L::inflow}},
                                       ex.expected_labels);
    ex.expected_components = {{0.0, 0.0}};
    ex.oracle_edge = ex.edge_index("gamma_minus");
    // footpoint (-r, r) sits at edge parameter s = 1 - r; exit time 2r
    ex.exit_time = [](double s) { return 2.0 * (1.0 - s); };
    return ex;
}

/// Footpoint (-r, r) on the inflow edge of the triangle as an edge parameter.
inline double triangle_inflow_param(double r) { return 1.0 - r; }

inline PaperExample example_seven_segments() {
    using L = BoundaryLabel;
    PaperExample ex;
    ex.name = "seven-segments";
    // Listed in the order G1..G7 are traversed; this is clockwise and gets
    // reversed by build_domain.
    ex.domain = build_domain({{0, 0}, {1, 1}, {2, 1}, {2.5, 0.5}, {3, 1}, {4, 1}, {5, 0}});
    ex.beta = VectorField::parse("1", "0");
    ex.edge_names = detail::name_edges(ex.domain,
                                       {{{0, 0}, {1, 1}, "G1", L::inflow},
                                        {{1, 1}, {2, 1}, "G2", L::characteristic},
                                        {{2, 1}, {2.5, 0.5}, "G3", L::outflow},
                                        {{2.5, 0.5}, {3, 1}, "G4", L::inflow},
                                        {{3, 1}, {4, 1}, "G5", L::characteristic},
                                        {{4, 1}, {5, 0}, "G6", L::outflow},
                                        {{5, 0}, {0, 0}, "G7", L::characteristic}},
                                       ex.expected_labels);
    ex.expected_components = {{2.5, 0.5}};
    ex.oracle_edge = ex.edge_index("G4");
    const Edge g4 = ex.domain.edge(ex.oracle_edge);
    ex.exit_time = [g4](double s) {
        const double t = g4.at(s).x; // footpoint (t, t - 2) leaves through G6 at x = 7 - t
        return 7.0 - 2.0 * t;
    };
    return ex;
}

inline PaperExample example_square() {
    using L = BoundaryLabel;
    PaperExample ex;
    ex.name = "square";
    ex.domain = build_domain({{0, 0}, {1, 0}, {1, 1}, {0, 1}});
    ex.beta = VectorField::parse("1", "0");
    ex.edge_names = detail::name_edges(ex.domain,
                                       {{{0, 0}, {1, 0}, "bottom", L::characteristic},
                                        {{1, 0}, {1, 1}, "right", L::outflow},
                                        {{1, 1}, {0, 1}, "top", L::characteristic},
                                        {{0, 1}, {0, 0}, "left", L::inflow}},
                                       ex.expected_labels);
    ex.oracle_edge = ex.edge_index("left");
    ex.exit_time = [](double) { return 1.0; };
    return ex;
}

/// u_m(x) = m^alpha (1 - m y)^2 for y < 1/m and 0 otherwise, written as
/// m^a * max(0, 1 - m*y)^2, with its exact norms on the triangle.
struct UmProfile {
    double m = 1.0;
    double alpha = 1.0;
    ScalarField field;

    /// ||u_m||^p_{W^p_beta} = ||u_m||^p_{L^p} (beta . grad u_m = 0).
    double graph_norm_pow(double p) const {
        return 2.0 * std::pow(m, p * alpha - 2.0) / ((2.0 * p + 1.0) * (2.0 * p + 2.0));
    }
    /// ||u_m||^p_{L^p(outflow; beta.n)}.
    double outflow_norm_pow(double p) const { return std::pow(m, p * alpha - 1.0) / (2.0 * p + 1.0); }
    /// Quadrature must split here to see smooth pieces.
    SplitLine kink() const { return SplitLine::horizontal(1.0 / m); }
};

inline UmProfile um_profile(double m, double alpha) {
    if (!(m >= 1.0) || !(alpha > 0.0)) throw Error(ErrorKind::invalid_config, "u_m needs m >= 1 and alpha > 0");
    UmProfile u;
    u.m = m;
    u.alpha = alpha;
    u.field = parse_field("m^a * max(0, 1 - m*y)^2", {{"m", m}, {"a", alpha}});
    return u;
}

inline std::vector<std::string> example_names() { return {"square", "triangle", "seven-segments"}; }

inline PaperExample example_by_name(std::string_view name) {
    if (name == "triangle") return example_triangle();
    if (name == "seven-segments") return example_seven_segments();
    if (name == "square") return example_square();
    throw Error(ErrorKind::invalid_config, "unknown example '" + std::string(name) + "'");
}

} // namespace advect::corpus
