#pragma once

// Pointwise solution of  beta . grad u + mu u = f,  u = g on the inflow set,
// and of the adjoint problem  -div(beta u) + mu u = f,  u = g on the outflow
// set, by integrating along characteristics.
//
// Along the backward orbit y(s) from x (forward orbit for the adjoint, with
// effective reaction mu - div beta) the state carries
//   I_mu(s) = int_0^s mu(y),   I_f(s) = int_0^s f(y) exp(-I_mu),
// so that u(x) = g(y(tau)) exp(-I_mu(tau)) + I_f(tau).

#include <advect/characteristics.hpp>
#include <advect/config.hpp>
#include <advect/error.hpp>
#include <advect/fields.hpp>
#include <advect/quadrature.hpp>

#include <cmath>
#include <cstring>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <span>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

namespace advect {

enum class ProblemKind { direct, adjoint };

inline std::string_view to_string(ProblemKind k) { return k == ProblemKind::direct ? "direct" : "adjoint"; }

struct BoundaryDatum {
    ArcRef arc;
    ScalarField g;
};

struct ProblemData {
    VectorField beta;
    ScalarField mu = ScalarField::constant(0.0);
    ScalarField f = ScalarField::constant(0.0);
    std::vector<BoundaryDatum> g; // arcs without data carry g = 0
    ProblemKind kind = ProblemKind::direct;
};

/// Label of the boundary set where data is prescribed.
inline BoundaryLabel data_label(ProblemKind k) {
    return k == ProblemKind::direct ? BoundaryLabel::inflow : BoundaryLabel::outflow;
}

/// One datum per arc of the data set (inflow or outflow), all with the same g.
inline std::vector<BoundaryDatum> data_on(const BoundaryClassification& bc, BoundaryLabel l, const ScalarField& g) {
    std::vector<BoundaryDatum> out;
    for (const auto& a : bc.arcs_with(l)) out.push_back({a, g});
    return out;
}

struct SolveContext {
    FlowContext flow;
    BoundaryClassification bc;
    ProblemData pd;
    SolverConfig cfg;
};

inline SolveContext make_solve_context(const PolygonalDomain& d, const ProblemData& pd, const SolverConfig& cfg = {}) {
    SolveContext c;
    c.flow = make_flow_context(d, pd.beta, cfg, pd.mu);
    c.bc = classify_boundary(c.flow);
    c.pd = pd;
    c.cfg = cfg;
    return c;
}

enum class PointStatus { transported, boundary_data, no_footpoint };

inline std::string_view to_string(PointStatus s) {
    switch (s) {
    case PointStatus::transported: return "transported";
    case PointStatus::boundary_data: return "boundary_data";
    case PointStatus::no_footpoint: return "no_footpoint";
    }
    return "?";
}

struct PointSolution {
    double u = 0.0;
    PointStatus status = PointStatus::transported;
    std::optional<Point2> footpoint;
    double tau = 0.0;
    double attenuation = 1.0; // exp(-int mu) along the orbit
};

namespace detail {

inline std::string point_text(const Point2& p) {
    std::ostringstream os;
    os.precision(17);
    os << "(" << p.x << ", " << p.y << ")";
    return os.str();
}

/// g at a boundary point of the data set; zero where no datum covers it.
inline double boundary_value(const SolveContext& c, const Point2& p) {
    const auto& d = c.flow.domain;
    const double tol = c.flow.tol.eps_geom;
    for (const auto& bd : c.pd.g) {
        const Point2 a = d.arc_point(bd.arc, 0.0), b = d.arc_point(bd.arc, 1.0);
        if (point_segment_distance(p, a, b) <= tol) return bd.g(p);
    }
    return 0.0;
}

} // namespace detail

/// Solves at one point of the closed domain.
inline PointSolution solve_point(const SolveContext& c, const Point2& x) {
    const auto& d = c.flow.domain;
    const auto& tol = c.flow.tol;
    const BoundaryLabel data = data_label(c.pd.kind);
    const auto where = contains(d, x);
    if (where.where == Location::exterior)
        throw Error(ErrorKind::start_outside, "evaluation point " + detail::point_text(x) + " lies outside the domain");

    PointSolution out;
    if (where.where == Location::boundary && in_label_closure(c.bc, d, x, data, tol.eps_geom)) {
        out.u = detail::boundary_value(c, x);
        out.status = PointStatus::boundary_data;
        out.footpoint = x;
        return out;
    }

    const bool direct = c.pd.kind == ProblemKind::direct;
    const double sign = direct ? -1.0 : 1.0;
    auto rhs = [&](const State<4>& y) {
        const Point2 p{y[0], y[1]};
        const Point2 b = c.pd.beta(p);
        const double m = direct ? c.pd.mu(p) : c.pd.mu(p) - c.pd.beta.divergence(p);
        return State<4>{sign * b.x, sign * b.y, m, c.pd.f(p) * std::exp(-y[2])};
    };
    const double log_cut = -std::log(tol.eps_cut);
    auto decayed = [&](double, const State<4>& y) { return y[2] > log_cut; };
    const auto r = integrate_in_domain<4>(d, rhs, State<4>{x.x, x.y, 0.0, 0.0}, tol.max_time, c.flow.ode(), decayed,
                                         false);
    out.tau = r.t;
    out.attenuation = std::exp(-r.y[2]);
    if (r.stop != StopReason::exited) {
        if (r.stop == StopReason::predicate || out.attenuation < tol.eps_cut) {
            // no data reachable; the remaining contribution is below eps_cut
            out.u = r.y[3];
            out.status = PointStatus::no_footpoint;
            return out;
        }
        std::ostringstream os;
        os.precision(6);
        os << "orbit from " << detail::point_text(x) << " found no footpoint before t = " << r.t
           << " and the attenuation " << out.attenuation << " has not fallen below eps_cut";
        throw Error(ErrorKind::attenuation_not_decayed, os.str());
    }
    const Point2 foot = r.exit->point;
    if (!in_label_closure(c.bc, d, foot, data, tol.eps_geom)) {
        throw Error(ErrorKind::footpoint_on_characteristic_arc,
                    "orbit from " + detail::point_text(x) + " reaches the boundary at " + detail::point_text(foot) +
                        ", which is not in the " + std::string(to_string(data)) + " set");
    }
    out.footpoint = foot;
    out.u = detail::boundary_value(c, foot) * out.attenuation + r.y[3];
    return out;
}

inline double solve_direct(const SolveContext& c, const Point2& x) {
    if (c.pd.kind != ProblemKind::direct) throw Error(ErrorKind::invalid_config, "solve_direct needs a direct problem");
    return solve_point(c, x).u;
}

inline double solve_adjoint(const SolveContext& c, const Point2& x) {
    if (c.pd.kind != ProblemKind::adjoint) throw Error(ErrorKind::invalid_config, "solve_adjoint needs an adjoint problem");
    return solve_point(c, x).u;
}

/// x -> u(x) with per-point provenance. Copies share the context and the
/// cache; the cache takes one writer at a time and any number of readers.
class SolutionField {
public:
    SolutionField() = default;
    explicit SolutionField(SolveContext c, bool cache = true)
        : ctx_(std::make_shared<const SolveContext>(std::move(c))) {
        if (cache) cache_ = std::make_shared<Cache>();
    }

    PointSolution evaluate(const Point2& x) const {
        if (cache_) {
            const Key k = key(x);
            {
                std::shared_lock lock(cache_->mutex);
                if (auto it = cache_->map.find(k); it != cache_->map.end()) return it->second;
            }
            PointSolution s = solve_point(*ctx_, x);
            std::unique_lock lock(cache_->mutex);
            cache_->map.emplace(k, s);
            return s;
        }
        return solve_point(*ctx_, x);
    }

    double operator()(const Point2& x) const { return evaluate(x).u; }
    ScalarFn as_fn() const {
        return [f = *this](const Point2& x) { return f(x); };
    }

    const SolveContext& context() const { return *ctx_; }

private:
    struct Key {
        std::uint64_t a, b;
        bool operator==(const Key&) const = default;
    };
    struct KeyHash {
        std::size_t operator()(const Key& k) const { return std::hash<std::uint64_t>{}(k.a * 0x9e3779b97f4a7c15ULL ^ k.b); }
    };
    struct Cache {
        std::shared_mutex mutex;
        std::unordered_map<Key, PointSolution, KeyHash> map;
    };
    static Key key(const Point2& x) {
        Key k{};
        std::memcpy(&k.a, &x.x, sizeof(double));
        std::memcpy(&k.b, &x.y, sizeof(double));
        return k;
    }

    std::shared_ptr<const SolveContext> ctx_;
    std::shared_ptr<Cache> cache_;
};

inline SolutionField solve(const PolygonalDomain& d, const ProblemData& pd, const SolverConfig& cfg = {}) {
    return SolutionField(make_solve_context(d, pd, cfg));
}

struct PointFailure {
    Point2 x{};
    ErrorKind kind = ErrorKind::domain_error;
    std::string message;
};

struct ResidualReport {
    double max_residual = 0.0;
    std::size_t evaluated = 0;
    bool one_sided = false;
    std::vector<PointFailure> failures;
};

/// max |beta . grad u + mu u - f| over the points, with beta . grad u by
/// finite differences along beta.
inline ResidualReport strong_residual(const ScalarFn& u, const SolveContext& c, std::span<const Point2> points) {
    ResidualReport r;
    const auto& pd = c.pd;
    for (const auto& x : points) {
        try {
            const auto dd = directional_derivative(u, c.flow.domain, pd.beta, x, c.flow.tol.fd_step);
            r.one_sided = r.one_sided || dd.one_sided;
            double res = 0.0;
            if (pd.kind == ProblemKind::direct) res = dd.value + pd.mu(x) * u(x) - pd.f(x);
            else res = -dd.value - pd.beta.divergence(x) * u(x) + pd.mu(x) * u(x) - pd.f(x);
            r.max_residual = std::max(r.max_residual, std::abs(res));
            ++r.evaluated;
        } catch (const Error& e) {
            r.failures.push_back({x, e.kind(), e.what()});
        }
    }
    return r;
}

inline ResidualReport strong_residual(const SolutionField& u, std::span<const Point2> points) {
    return strong_residual(u.as_fn(), u.context(), points);
}

namespace detail {

inline void require_vanishing(const ScalarField& v, const NormContext& nc, BoundaryLabel l, double eps, ErrorKind kind,
                              const char* what) {
    const auto& d = nc.flow.domain;
    auto check = [&](const Point2& p) {
        const double val = v(p);
        if (std::abs(val) > eps) {
            std::ostringstream os;
            os.precision(6);
            os << what << ": |v| = " << std::abs(val) << " at " << point_text(p) << " on the " << to_string(l)
               << " set";
            throw Error(kind, os.str());
        }
    };
    for (const auto& n : nc.rule.boundary)
        if (n.label == l) check(n.x);
    for (const auto& a : nc.bc.arcs) {
        if (a.label != l) continue;
        for (int k = 0; k <= 8; ++k) check(d.arc_point(a.arc, k / 8.0));
    }
}

} // namespace detail

/// Signed weak-form residual
///   int u (-beta . grad v - (div beta) v + mu v) - int f v - int_{inflow} g v |beta.n|
/// for a test function v vanishing on the outflow set.
inline double weak_residual(const ScalarFn& u, const SolveContext& c, const NormContext& nc, const ScalarField& v) {
    detail::require_vanishing(v, nc, BoundaryLabel::outflow, c.flow.tol.eps_w, ErrorKind::test_function_not_admissible,
                              "test function does not vanish");
    const auto& pd = c.pd;
    const double vol = integrate_domain(
        [&](const Point2& x) {
            const Dual dv = v.gradient(x);
            const Point2 b = pd.beta(x);
            const double adj = -(b.x * dv.dx + b.y * dv.dy) - pd.beta.divergence(x) * dv.v + pd.mu(x) * dv.v;
            return u(x) * adj - pd.f(x) * dv.v;
        },
        nc.rule);
    const double bnd = integrate_boundary_weighted(
        [&](const Point2& x) { return detail::boundary_value(c, x) * v(x); }, nc, BoundaryLabel::inflow);
    return vol - bnd;
}

/// ||u - g||_{L^p(data set; |beta.n|)} with u evaluated eps_trace inside the
/// domain along +beta (inflow) or -beta (outflow) from each boundary node.
inline double trace_recovery_check(const ScalarFn& u, const SolveContext& c, const NormContext& nc, const NormOrder& p) {
    const BoundaryLabel l = data_label(c.pd.kind);
    const double inward = c.pd.kind == ProblemKind::direct ? 1.0 : -1.0;
    const double eps = c.flow.tol.eps_trace;
    auto gap = [&](const Point2& x) {
        const Point2 b = c.pd.beta(x);
        const double nb = norm(b);
        const Point2 xi = nb > 0.0 ? x + (inward * eps / nb) * b : x;
        return u(xi) - detail::boundary_value(c, x);
    };
    return lp_norm_boundary(gap, nc, l, p);
}

inline double trace_recovery_check(const SolutionField& u, const NormContext& nc, const NormOrder& p) {
    return trace_recovery_check(u.as_fn(), u.context(), nc, p);
}

/// Transport of boundary data with mu = f = 0: the trace is g on the listed
/// arcs and the field vanishes on orbits starting from arcs without data.
inline SolutionField lift_boundary_data(const PolygonalDomain& d, const VectorField& beta,
                                        std::vector<BoundaryDatum> g, ProblemKind kind = ProblemKind::direct,
                                        const SolverConfig& cfg = {}) {
    ProblemData pd;
    pd.beta = beta;
    pd.g = std::move(g);
    pd.kind = kind;
    return solve(d, pd, cfg);
}

/// Grid of (n + 1)^2 points over the bounding box, restricted to the closure.
inline std::vector<Point2> grid_points(const PolygonalDomain& d, int n) {
    std::vector<Point2> pts;
    const Point2 lo = d.bbox_min(), hi = d.bbox_max();
    for (int j = 0; j <= n; ++j) {
        for (int i = 0; i <= n; ++i) {
            const Point2 p{lo.x + (hi.x - lo.x) * i / n, lo.y + (hi.y - lo.y) * j / n};
            if (in_closure(d, p)) pts.push_back(p);
        }
    }
    return pts;
}

} // namespace advect
