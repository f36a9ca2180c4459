#pragma once

#include <advect/expression.hpp>
#include <advect/geometry.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <optional>
#include <vector>

namespace advect {

using Jacobian = std::array<std::array<double, 2>, 2>; // [i][j] = d beta_i / d x_j

class VectorField {
public:
    VectorField() : VectorField(ScalarField::constant(0.0), ScalarField::constant(0.0)) {}
    VectorField(ScalarField b1, ScalarField b2) : b1_(std::move(b1)), b2_(std::move(b2)) {}

    static VectorField parse(std::string_view s1, std::string_view s2, const Parameters& params = {}) {
        return {parse_field(s1, params), parse_field(s2, params)};
    }

    Point2 operator()(const Point2& p) const { return {b1_(p), b2_(p)}; }

    double divergence(const Point2& p) const { return b1_.gradient(p).dx + b2_.gradient(p).dy; }

    Jacobian jacobian(const Point2& p) const {
        const Dual g1 = b1_.gradient(p);
        const Dual g2 = b2_.gradient(p);
        return {{{g1.dx, g1.dy}, {g2.dx, g2.dy}}};
    }

    const ScalarField& component(int i) const { return i == 0 ? b1_ : b2_; }

private:
    ScalarField b1_;
    ScalarField b2_;
};

/// div beta at p by forward-mode differentiation.
inline double divergence(const VectorField& v, const Point2& p) { return v.divergence(p); }

struct FieldNorms {
    double sup_beta = 0.0;
    double inf_beta = 0.0;  // used for the default characteristic time horizon
    double sup_Dbeta = 0.0; // max over entries |d_i beta_j| and |div beta|
    double w1inf = 0.0;     // max(sup_beta, sup_Dbeta), or the caller's override
    double sup_mu = 0.0;
    double ess_inf_mu = 0.0;
    int grid_n = 0;
};

namespace detail {

struct SampleGrid {
    std::vector<Point2> points;
    double hx = 0.0;
    double hy = 0.0;
};

/// Regular grid points in the closed domain plus grid_n + 1 samples per edge.
inline SampleGrid sample_grid(const PolygonalDomain& d, int grid_n) {
    SampleGrid g;
    const Point2 lo = d.bbox_min(), hi = d.bbox_max();
    g.hx = (hi.x - lo.x) / grid_n;
    g.hy = (hi.y - lo.y) / grid_n;
    for (int i = 0; i <= grid_n; ++i) {
        for (int j = 0; j <= grid_n; ++j) {
            const Point2 p{lo.x + i * g.hx, lo.y + j * g.hy};
            if (in_closure(d, p)) g.points.push_back(p);
        }
    }
    for (const auto& e : d.edges()) {
        for (int k = 0; k <= grid_n; ++k) g.points.push_back(e.at(static_cast<double>(k) / grid_n));
    }
    return g;
}

/// Maximum of f over the sample grid, then three rounds of 4x refinement
/// around the best sample.
inline double refined_max(const PolygonalDomain& d, const SampleGrid& g, const std::function<double(const Point2&)>& f) {
    double best = -std::numeric_limits<double>::infinity();
    Point2 arg{};
    for (const auto& p : g.points) {
        const double v = f(p);
        if (v > best) {
            best = v;
            arg = p;
        }
    }
    double hx = g.hx, hy = g.hy;
    for (int round = 0; round < 3; ++round) {
        const Point2 centre = arg;
        hx /= 4.0;
        hy /= 4.0;
        for (int i = -4; i <= 4; ++i) {
            for (int j = -4; j <= 4; ++j) {
                const Point2 p{centre.x + i * hx, centre.y + j * hy};
                if (!in_closure(d, p)) continue;
                const double v = f(p);
                if (v > best) {
                    best = v;
                    arg = p;
                }
            }
        }
    }
    return best;
}

inline double refined_min(const PolygonalDomain& d, const SampleGrid& g, const std::function<double(const Point2&)>& f) {
    return -refined_max(d, g, [&](const Point2& p) { return -f(p); });
}

inline double max_abs_entry(const Jacobian& j) {
    return std::max({std::abs(j[0][0]), std::abs(j[0][1]), std::abs(j[1][0]), std::abs(j[1][1])});
}

} // namespace detail

/// Grid estimates of the field sup/inf norms entering the constants.
inline FieldNorms estimate_norms(const VectorField& v, const ScalarField& mu, const PolygonalDomain& d, int grid_n,
                                 std::optional<double> w1inf_override = std::nullopt) {
    if (grid_n < 8) throw Error(ErrorKind::invalid_config, "grid_n must be at least 8");
    const auto g = detail::sample_grid(d, grid_n);
    FieldNorms n;
    n.grid_n = grid_n;
    n.sup_beta = detail::refined_max(d, g, [&](const Point2& p) { return norm(v(p)); });
    n.inf_beta = detail::refined_min(d, g, [&](const Point2& p) { return norm(v(p)); });
    n.sup_Dbeta = detail::refined_max(d, g, [&](const Point2& p) {
        try {
            return std::max(detail::max_abs_entry(v.jacobian(p)), std::abs(v.divergence(p)));
        } catch (const Error& e) {
            // kink samples carry no derivative information; skip them
            if (e.kind() != ErrorKind::non_differentiable) throw;
            return 0.0;
        }
    });
    n.w1inf = w1inf_override.value_or(std::max(n.sup_beta, n.sup_Dbeta));
    n.sup_mu = detail::refined_max(d, g, [&](const Point2& p) { return std::abs(mu(p)); });
    n.ess_inf_mu = detail::refined_min(d, g, [&](const Point2& p) { return mu(p); });
    return n;
}

} // namespace advect
