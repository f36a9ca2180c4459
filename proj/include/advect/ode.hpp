#pragma once

// Dormand-Prince 5(4) integration of autonomous systems whose first two
// components are a position in the plane, stopping at the first exit from
// the closed polygon.

#include <advect/error.hpp>
#include <advect/geometry.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <sstream>
#include <vector>

namespace advect {

template <std::size_t N>
using State = std::array<double, N>;

struct OdeSettings {
    double rtol = 1e-12;
    double atol = 1e-13;
    double max_step = 0.05; // cap on spatial displacement per step
    double eps_event = 1e-10;
    double eps_geom = 1e-9;
};

struct ExitEvent {
    std::size_t edge = 0;
    double s = 0.0;
    double tau = 0.0;
    Point2 point{};
    bool at_vertex = false;
};

struct TraceSample {
    double t = 0.0;
    Point2 x{};
};

enum class StopReason { exited, time_limit, predicate };

template <std::size_t N>
struct OdeOutcome {
    StopReason stop = StopReason::time_limit;
    double t = 0.0;
    State<N> y{};
    std::optional<ExitEvent> exit;
    std::vector<TraceSample> samples;
    std::size_t steps = 0;
    std::size_t rejected = 0;
};

namespace detail {

template <std::size_t N>
inline Point2 position(const State<N>& y) {
    return {y[0], y[1]};
}

template <std::size_t N>
inline State<N> axpy(const State<N>& y, double h, std::initializer_list<std::pair<double, const State<N>*>> terms) {
    State<N> out = y;
    for (std::size_t i = 0; i < N; ++i) {
        double acc = 0.0;
        for (const auto& [c, k] : terms) acc += c * (*k)[i];
        out[i] += h * acc;
    }
    return out;
}

template <std::size_t N>
struct DpStep {
    State<N> y;
    State<N> err;
    State<N> k7;
};

/// One Dormand-Prince step of size h from y with first stage k1.
template <std::size_t N, class Rhs>
DpStep<N> dp_step(Rhs& f, const State<N>& y, const State<N>& k1, double h) {
    const State<N> k2 = f(axpy<N>(y, h, {{1.0 / 5.0, &k1}}));
    const State<N> k3 = f(axpy<N>(y, h, {{3.0 / 40.0, &k1}, {9.0 / 40.0, &k2}}));
    const State<N> k4 = f(axpy<N>(y, h, {{44.0 / 45.0, &k1}, {-56.0 / 15.0, &k2}, {32.0 / 9.0, &k3}}));
    const State<N> k5 = f(axpy<N>(
        y, h, {{19372.0 / 6561.0, &k1}, {-25360.0 / 2187.0, &k2}, {64448.0 / 6561.0, &k3}, {-212.0 / 729.0, &k4}}));
    const State<N> k6 = f(axpy<N>(y, h,
                                  {{9017.0 / 3168.0, &k1},
                                   {-355.0 / 33.0, &k2},
                                   {46732.0 / 5247.0, &k3},
                                   {49.0 / 176.0, &k4},
                                   {-5103.0 / 18656.0, &k5}}));
    DpStep<N> out;
    out.y = axpy<N>(y, h,
                    {{35.0 / 384.0, &k1},
                     {500.0 / 1113.0, &k3},
                     {125.0 / 192.0, &k4},
                     {-2187.0 / 6784.0, &k5},
                     {11.0 / 84.0, &k6}});
    out.k7 = f(out.y);
    const State<N> zero{};
    out.err = axpy<N>(zero, h,
                      {{71.0 / 57600.0, &k1},
                       {-71.0 / 16695.0, &k3},
                       {71.0 / 1920.0, &k4},
                       {-17253.0 / 339200.0, &k5},
                       {22.0 / 525.0, &k6},
                       {-1.0 / 40.0, &out.k7}});
    return out;
}

template <std::size_t N>
double error_norm(const State<N>& err, const State<N>& y0, const State<N>& y1, const OdeSettings& s) {
    double acc = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
        const double sc = s.atol + s.rtol * std::max(std::abs(y0[i]), std::abs(y1[i]));
        acc += (err[i] / sc) * (err[i] / sc);
    }
    return std::sqrt(acc / N);
}

/// Signed distance of p to the line through edge e (positive outside).
inline double line_distance(const Edge& e, const Point2& p) { return dot(e.normal, p - e.start); }

/// Edge crossed by a point just outside: among the nearest edges (up to eps)
/// the one whose supporting line is furthest behind, so that orbits sliding
/// along one edge into a corner pick the edge they actually cross.
inline std::size_t exit_edge(const PolygonalDomain& d, const Point2& p, double eps) {
    const auto ne = nearest_edge(d, p);
    std::size_t best = ne.edge;
    double best_line = line_distance(d.edge(best), p);
    for (std::size_t i = 0; i < d.size(); ++i) {
        const Edge& e = d.edge(i);
        if (point_segment_distance(p, e.start, e.end) > ne.dist + eps) continue;
        const double ld = line_distance(e, p);
        if (ld > best_line) {
            best = i;
            best_line = ld;
        }
    }
    return best;
}

/// Whether the chord p0 -> p1 crosses some edge outward at a point of the
/// edge's interior, i.e. the step jumped over a thin exterior region.
inline bool chord_leaves(const PolygonalDomain& d, const Point2& p0, const Point2& p1, double eps) {
    for (const auto& e : d.edges()) {
        const double d0 = line_distance(e, p0), d1 = line_distance(e, p1);
        if (!(d0 <= eps && d1 > eps) || !(d1 - d0 > 0.0)) continue;
        if (d0 > 0.0) continue; // starts on the line; handled by the exit test
        const double t = -d0 / (d1 - d0);
        const Point2 q = p0 + t * (p1 - p0);
        const double along = dot(q - e.start, e.end - e.start) / e.length;
        if (along > eps && along < e.length - eps) return true;
    }
    return false;
}

} // namespace detail

/// Integrates dy/dt = f(y) from y0 until the position leaves the closed
/// domain, t reaches t_end, or stop(t, y) returns true after an accepted step.
///
/// An exit is registered when the signed boundary distance exceeds eps_geom,
/// and steps whose chord crosses an edge outward are retried shorter;
/// the crossing time is bracketed within the step, bisected on the signed
/// distance down to eps_event, then polished by regula falsi on the exit
/// edge's supporting line.
template <std::size_t N, class Rhs, class Stop>
OdeOutcome<N> integrate_in_domain(const PolygonalDomain& d, Rhs f, const State<N>& y0, double t_end,
                                  const OdeSettings& s, Stop stop, bool record_samples = true) {
    static_assert(N >= 2, "state must start with a position");
    OdeOutcome<N> out;
    out.y = y0;
    if (record_samples) out.samples.push_back({0.0, detail::position(y0)});

    double t = 0.0;
    State<N> y = y0;
    State<N> k1 = f(y);
    auto speed_of = [](const State<N>& k) { return std::hypot(k[0], k[1]); };
    auto cap = [&](const State<N>& k) {
        const double v = speed_of(k);
        return v > 0.0 ? s.max_step / v : t_end;
    };
    double h = std::min({cap(k1), t_end});
    if (!(h > 0.0)) h = t_end;
    double sd = signed_distance(d, detail::position(y));

    while (t < t_end) {
        h = std::min({h, cap(k1), t_end - t});
        const bool last = (t + h >= t_end);
        const auto step = detail::dp_step<N>(f, y, k1, h);
        const double en = detail::error_norm<N>(step.err, y, step.y, s);
        if (!(en <= 1.0)) {
            ++out.rejected;
            h *= std::clamp(0.9 * std::pow(std::isfinite(en) ? en : 1e10, -0.2), 0.1, 0.9);
            if (h < 1e-15 * std::max(1.0, std::abs(t))) {
                std::ostringstream os;
                os.precision(17);
                os << "step size underflow at t = " << t << ", x = (" << y[0] << ", " << y[1] << ")";
                throw Error(ErrorKind::step_underflow, os.str());
            }
            continue;
        }
        const double sd_new = signed_distance(d, detail::position(step.y));
        if (sd_new <= s.eps_geom && detail::chord_leaves(d, detail::position(y), detail::position(step.y), s.eps_geom)) {
            // landed back inside after crossing a notch; retry shorter
            ++out.rejected;
            h *= 0.25;
            continue;
        }
        ++out.steps;
        if (sd_new > s.eps_geom) {
            // Exit within [t, t + h].
            // Threshold strictly above the rounding noise of points on the boundary.
            const double level = 0.5 * (std::max(0.0, sd) + s.eps_geom);
            const double v = std::max(speed_of(k1), speed_of(step.k7));
            double a = 0.0, b = h;
            for (int it = 0; it < 200 && (b - a) * v > s.eps_event; ++it) {
                const double m = 0.5 * (a + b);
                const auto ym = detail::dp_step<N>(f, y, k1, m).y;
                if (signed_distance(d, detail::position(ym)) > level) b = m;
                else a = m;
            }
            State<N> yb = detail::dp_step<N>(f, y, k1, b).y;
            const Edge& e = d.edge(detail::exit_edge(d, detail::position(yb), s.eps_geom));
            double ga = (a == 0.0) ? detail::line_distance(e, detail::position(y))
                                   : detail::line_distance(e, detail::position(detail::dp_step<N>(f, y, k1, a).y));
            double gb = detail::line_distance(e, detail::position(yb));
            if (ga > 0.0 && a > 0.0) {
                // the bisection level sits above the line; widen the bracket
                a = 0.0;
                ga = detail::line_distance(e, detail::position(y));
            }
            double tau = b;
            State<N> y_exit = yb;
            if (ga >= 0.0 && t > 0.0) {
                // the previous step ended on the exit line itself
                tau = 0.0;
                y_exit = y;
            } else if (ga <= 0.0 && gb > 0.0) {
                // Illinois variant of regula falsi
                int side = 0;
                for (int it = 0; it < 60; ++it) {
                    const double c = (a * gb - b * ga) / (gb - ga);
                    if (!(c > a && c < b)) break;
                    const auto yc = detail::dp_step<N>(f, y, k1, c).y;
                    const double gc = detail::line_distance(e, detail::position(yc));
                    tau = c;
                    y_exit = yc;
                    if (std::abs(gc) <= 1e-15 * d.diameter()) break;
                    if (gc > 0.0) {
                        b = c;
                        gb = gc;
                        if (side == -1) ga *= 0.5;
                        side = -1;
                    } else {
                        a = c;
                        ga = gc;
                        if (side == 1) gb *= 0.5;
                        side = 1;
                    }
                }
            }
            ExitEvent ev;
            ev.tau = t + tau;
            const Point2 px = detail::position(y_exit);
            const auto ne2 = detail::nearest_edge(d, px);
            ev.edge = ne2.edge;
            ev.s = ne2.s;
            ev.point = px;
            const Edge& ee = d.edge(ne2.edge);
            if (distance(px, ee.start) <= s.eps_geom) {
                ev.s = 0.0;
                ev.point = ee.start;
                ev.at_vertex = true;
            } else if (distance(px, ee.end) <= s.eps_geom) {
                ev.s = 1.0;
                ev.point = ee.end;
                ev.at_vertex = true;
            }
            out.stop = StopReason::exited;
            out.t = ev.tau;
            out.y = y_exit;
            out.exit = ev;
            if (record_samples) {
                if (out.samples.back().t < ev.tau) out.samples.push_back({ev.tau, ev.point});
                else out.samples.back().x = ev.point;
            }
            return out;
        }
        t = last ? t_end : t + h;
        y = step.y;
        k1 = step.k7;
        sd = sd_new;
        if (record_samples) out.samples.push_back({t, detail::position(y)});
        if (stop(t, y)) {
            out.stop = StopReason::predicate;
            out.t = t;
            out.y = y;
            return out;
        }
        h *= std::clamp(0.9 * std::pow(std::max(en, 1e-10), -0.2), 0.2, 5.0);
    }
    out.stop = StopReason::time_limit;
    out.t = t;
    out.y = y;
    return out;
}

template <std::size_t N, class Rhs>
OdeOutcome<N> integrate_in_domain(const PolygonalDomain& d, Rhs f, const State<N>& y0, double t_end,
                                  const OdeSettings& s, bool record_samples = true) {
    return integrate_in_domain<N>(d, f, y0, t_end, s, [](double, const State<N>&) { return false; }, record_samples);
}

} // namespace advect
