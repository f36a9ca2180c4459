#pragma once

#include <advect/config.hpp>
#include <advect/fields.hpp>
#include <advect/geometry.hpp>
#include <advect/ode.hpp>

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace advect {

enum class Direction { forward, backward };

inline std::string_view to_string(Direction d) { return d == Direction::forward ? "forward" : "backward"; }

/// Domain, advection field and resolved tolerances shared by all flow-based
/// operations.
struct FlowContext {
    PolygonalDomain domain;
    VectorField beta;
    FieldNorms norms;
    Tolerances tol;

    OdeSettings ode() const {
        OdeSettings s;
        s.rtol = tol.ode_rtol;
        s.atol = tol.ode_atol;
        s.max_step = tol.max_step;
        s.eps_event = tol.eps_event;
        s.eps_geom = tol.eps_geom;
        return s;
    }
};

inline FlowContext make_flow_context(const PolygonalDomain& domain, const VectorField& beta,
                                     const SolverConfig& cfg = {},
                                     const ScalarField& mu = ScalarField::constant(0.0)) {
    FlowContext c;
    c.norms = estimate_norms(beta, mu, domain, cfg.grid_n, cfg.w1inf);
    c.domain = cfg.eps_geom ? domain.with_tolerance(*cfg.eps_geom) : domain;
    c.beta = beta;
    c.tol = resolve(cfg, c.domain, c.norms);
    return c;
}

struct CharacteristicTrace {
    Point2 start{};
    Direction direction = Direction::forward;
    std::vector<TraceSample> samples;
    std::optional<ExitEvent> exit;
    std::optional<double> truncated_at;
};

namespace detail {

inline CharacteristicTrace run_flow(const FlowContext& ctx, const Point2& x0, Direction dir, double t_end,
                                    bool record) {
    if (contains(ctx.domain, x0).where == Location::exterior) {
        std::ostringstream os;
        os.precision(17);
        os << "flow start (" << x0.x << ", " << x0.y << ") lies outside the domain";
        throw Error(ErrorKind::start_outside, os.str());
    }
    const double sign = dir == Direction::forward ? 1.0 : -1.0;
    auto rhs = [&](const State<2>& y) {
        const Point2 b = ctx.beta({y[0], y[1]});
        return State<2>{sign * b.x, sign * b.y};
    };
    auto out = integrate_in_domain<2>(ctx.domain, rhs, State<2>{x0.x, x0.y}, t_end, ctx.ode(), record);
    CharacteristicTrace tr;
    tr.start = x0;
    tr.direction = dir;
    tr.samples = std::move(out.samples);
    if (!record) {
        // keep start and end so end_point() works on unrecorded traces
        tr.samples.push_back({0.0, x0});
        if (out.t > 0.0) tr.samples.push_back({out.t, out.exit ? out.exit->point : detail::position(out.y)});
    }
    if (out.exit) tr.exit = out.exit;
    else tr.truncated_at = out.t;
    return tr;
}

} // namespace detail

/// Characteristic through x0 until it leaves the closed domain or reaches
/// the time horizon tol.max_time.
inline CharacteristicTrace flow(const FlowContext& ctx, const Point2& x0, Direction dir) {
    return detail::run_flow(ctx, x0, dir, ctx.tol.max_time, true);
}

/// Position after flowing for time t, or the exit point if the orbit leaves
/// first (check trace.exit).
inline CharacteristicTrace flow_for(const FlowContext& ctx, const Point2& x0, Direction dir, double t) {
    return detail::run_flow(ctx, x0, dir, t, true);
}

inline Point2 end_point(const CharacteristicTrace& tr) {
    return tr.exit ? tr.exit->point : tr.samples.back().x;
}

enum class BoundaryLabel { inflow, outflow, characteristic };

inline std::string_view to_string(BoundaryLabel l) {
    switch (l) {
    case BoundaryLabel::inflow: return "inflow";
    case BoundaryLabel::outflow: return "outflow";
    case BoundaryLabel::characteristic: return "characteristic";
    }
    return "?";
}

struct LabeledArc {
    ArcRef arc;
    BoundaryLabel label = BoundaryLabel::characteristic;
};

/// A connected component of closure(outflow) ∩ closure(inflow). On a simple
/// polygon these are isolated points.
struct IntersectionComponent {
    Point2 point{};
    std::vector<std::size_t> inflow_arcs;
    std::vector<std::size_t> outflow_arcs;
};

/// Isolated boundary point where beta.n vanished and the flow-based
/// definition was applied directly.
struct ProbePoint {
    std::size_t edge = 0;
    double s = 0.0;
    Point2 point{};
    BoundaryLabel label = BoundaryLabel::characteristic;
    bool ambiguous = false;
};

struct BoundaryClassification {
    std::vector<LabeledArc> arcs; // ordered by edge, then s
    std::vector<IntersectionComponent> components;
    std::vector<ProbePoint> probes;
    std::vector<std::string> warnings; // AmbiguousArc reports

    std::vector<ArcRef> arcs_with(BoundaryLabel l) const {
        std::vector<ArcRef> out;
        for (const auto& a : arcs)
            if (a.label == l) out.push_back(a.arc);
        return out;
    }
};

namespace detail {

enum class SignClass { neg, zero, pos };

inline SignClass classify_sign(double w, double eps) {
    if (w > eps) return SignClass::pos;
    if (w < -eps) return SignClass::neg;
    return SignClass::zero;
}

inline BoundaryLabel label_of(SignClass c) {
    return c == SignClass::pos ? BoundaryLabel::outflow
                               : c == SignClass::neg ? BoundaryLabel::inflow : BoundaryLabel::characteristic;
}

/// Flow-based label of a single boundary point.
inline ProbePoint probe_point(const FlowContext& ctx, std::size_t edge, double s) {
    ProbePoint pp;
    pp.edge = edge;
    pp.s = s;
    pp.point = ctx.domain.edge(edge).at(s);
    const auto tr = run_flow(ctx, pp.point, Direction::forward, ctx.tol.t_probe, false);
    if (tr.exit && tr.exit->tau < ctx.tol.t_probe) {
        pp.label = BoundaryLabel::outflow;
    } else {
        const auto where = contains(ctx.domain, end_point(tr)).where;
        if (where == Location::interior) pp.label = BoundaryLabel::inflow;
        else {
            pp.label = BoundaryLabel::characteristic;
            pp.ambiguous = true;
        }
    }
    return pp;
}

} // namespace detail

/// Splits every edge into inflow / outflow / characteristic arcs by the sign
/// of beta.n, resolving isolated tangency points with a short flow probe.
inline BoundaryClassification classify_boundary(const FlowContext& ctx) {
    using detail::SignClass;
    BoundaryClassification bc;
    const auto& d = ctx.domain;
    const int K = ctx.tol.edge_samples;
    const double eps = ctx.tol.eps_w;

    for (std::size_t ei = 0; ei < d.size(); ++ei) {
        const Edge& e = d.edge(ei);
        auto w = [&](double s) { return dot(ctx.beta(e.at(s)), e.normal); };
        std::vector<double> ss(K + 1);
        std::vector<SignClass> cls(K + 1);
        for (int j = 0; j <= K; ++j) {
            ss[j] = static_cast<double>(j) / K;
            cls[j] = detail::classify_sign(w(ss[j]), eps);
        }
        // Isolated tangency samples: resolved by probing, then absorbed into
        // the neighbouring arcs.
        for (int j = 0; j <= K; ++j) {
            if (cls[j] != SignClass::zero) continue;
            const bool left_zero = j > 0 && cls[j - 1] == SignClass::zero;
            const bool right_zero = j < K && cls[j + 1] == SignClass::zero;
            if (left_zero || right_zero) continue;
            if (j > 0 && j < K) {
                auto pp = detail::probe_point(ctx, ei, ss[j]);
                if (pp.ambiguous) {
                    std::ostringstream os;
                    os.precision(17);
                    os << "AmbiguousArc: flow probe inconclusive at edge " << ei << ", s = " << ss[j];
                    bc.warnings.push_back(os.str());
                }
                bc.probes.push_back(pp);
            }
            // On a sign change (pos, 0, neg) the sample joins the left side and
            // the root is located below.
            cls[j] = j > 0 ? cls[j - 1] : cls[j + 1];
        }
        // Breakpoints between samples of different class.
        struct Piece {
            double s0, s1;
            SignClass c;
        };
        std::vector<Piece> pieces;
        double start = 0.0;
        for (int j = 0; j < K; ++j) {
            if (cls[j] == cls[j + 1]) continue;
            // root of w (sign change) or of |w| = eps (entering/leaving a tangential run)
            double target = 0.0;
            if (cls[j] == SignClass::zero || cls[j + 1] == SignClass::zero) {
                const SignClass nz = cls[j] == SignClass::zero ? cls[j + 1] : cls[j];
                target = nz == SignClass::pos ? eps : -eps;
            }
            double a = ss[j], b = ss[j + 1];
            double fa = w(a) - target;
            for (int it = 0; it < 200 && b - a > 1e-15; ++it) {
                const double m = 0.5 * (a + b);
                const double fm = w(m) - target;
                if ((fm > 0.0) == (fa > 0.0)) {
                    a = m;
                    fa = fm;
                } else {
                    b = m;
                }
            }
            const double root = 0.5 * (a + b);
            pieces.push_back({start, root, cls[j]});
            start = root;
        }
        pieces.push_back({start, 1.0, cls[K]});
        for (const auto& p : pieces) {
            const BoundaryLabel l = detail::label_of(p.c);
            if (!bc.arcs.empty() && bc.arcs.back().arc.edge == ei && bc.arcs.back().label == l) {
                bc.arcs.back().arc.s1 = p.s1;
            } else {
                bc.arcs.push_back({{ei, p.s0, p.s1}, l});
            }
        }
    }

    // Components of closure(outflow) ∩ closure(inflow): shared arc endpoints.
    const double tol = ctx.tol.eps_geom;
    for (std::size_t i = 0; i < bc.arcs.size(); ++i) {
        if (bc.arcs[i].label != BoundaryLabel::inflow) continue;
        for (std::size_t j = 0; j < bc.arcs.size(); ++j) {
            if (bc.arcs[j].label != BoundaryLabel::outflow) continue;
            const ArcRef& ai = bc.arcs[i].arc;
            const ArcRef& aj = bc.arcs[j].arc;
            const Point2 ends_i[2] = {d.arc_point(ai, 0.0), d.arc_point(ai, 1.0)};
            const Point2 ends_j[2] = {d.arc_point(aj, 0.0), d.arc_point(aj, 1.0)};
            std::vector<Point2> meets;
            for (const auto& p : ends_i)
                if (point_segment_distance(p, ends_j[0], ends_j[1]) <= tol) meets.push_back(p);
            for (const auto& p : ends_j)
                if (point_segment_distance(p, ends_i[0], ends_i[1]) <= tol) meets.push_back(p);
            for (const auto& p : meets) {
                auto it = std::find_if(bc.components.begin(), bc.components.end(),
                                       [&](const IntersectionComponent& c) { return distance(c.point, p) <= 10 * tol; });
                if (it == bc.components.end()) {
                    bc.components.push_back({p, {}, {}});
                    it = bc.components.end() - 1;
                }
                if (std::find(it->inflow_arcs.begin(), it->inflow_arcs.end(), i) == it->inflow_arcs.end())
                    it->inflow_arcs.push_back(i);
                if (std::find(it->outflow_arcs.begin(), it->outflow_arcs.end(), j) == it->outflow_arcs.end())
                    it->outflow_arcs.push_back(j);
            }
        }
    }
    return bc;
}

/// Whether p lies (within tol) on the closure of some arc labeled l.
inline bool in_label_closure(const BoundaryClassification& bc, const PolygonalDomain& d, const Point2& p,
                             BoundaryLabel l, double tol) {
    for (const auto& a : bc.arcs) {
        if (a.label != l) continue;
        if (point_segment_distance(p, d.arc_point(a.arc, 0.0), d.arc_point(a.arc, 1.0)) <= tol) return true;
    }
    return false;
}

struct ExitTimeEntry {
    double s = 0.0;
    Point2 footpoint{};
    std::optional<double> tau;
    std::optional<ExitEvent> exit;
    bool exit_on_outflow = false;
    std::string error;
};

/// Forward exit times from footpoints at the given arc parameters
/// (fractions of the arc, 0 = arc.s0, 1 = arc.s1).
inline std::vector<ExitTimeEntry> exit_time_map(const FlowContext& ctx, const BoundaryClassification& bc,
                                                const ArcRef& arc, std::span<const double> fractions) {
    std::vector<ExitTimeEntry> out;
    out.reserve(fractions.size());
    for (double f : fractions) {
        ExitTimeEntry e;
        e.s = arc.s0 + f * (arc.s1 - arc.s0);
        e.footpoint = ctx.domain.edge(arc.edge).at(e.s);
        try {
            const auto tr = detail::run_flow(ctx, e.footpoint, Direction::forward, ctx.tol.max_time, false);
            if (tr.exit) {
                e.tau = tr.exit->tau;
                e.exit = tr.exit;
                e.exit_on_outflow = in_label_closure(bc, ctx.domain, tr.exit->point, BoundaryLabel::outflow,
                                                     ctx.tol.eps_geom);
            }
        } catch (const Error& err) {
            e.error = err.what();
        }
        out.push_back(std::move(e));
    }
    return out;
}

/// n footpoints at the midpoints of n equal parameter cells of the arc.
inline std::vector<ExitTimeEntry> exit_time_map(const FlowContext& ctx, const BoundaryClassification& bc,
                                                const ArcRef& arc, int n) {
    std::vector<double> fr(n);
    for (int i = 0; i < n; ++i) fr[i] = (i + 0.5) / n;
    return exit_time_map(ctx, bc, arc, fr);
}

} // namespace advect
