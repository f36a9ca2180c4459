#pragma once

#include <advect/error.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <sstream>
#include <vector>

namespace advect {

struct Point2 {
    double x = 0.0;
    double y = 0.0;

    constexpr Point2& operator+=(const Point2& o) { x += o.x; y += o.y; return *this; }
    constexpr Point2& operator-=(const Point2& o) { x -= o.x; y -= o.y; return *this; }
    constexpr Point2& operator*=(double s) { x *= s; y *= s; return *this; }
    friend constexpr Point2 operator+(Point2 a, const Point2& b) { return a += b; }
    friend constexpr Point2 operator-(Point2 a, const Point2& b) { return a -= b; }
    friend constexpr Point2 operator-(const Point2& a) { return {-a.x, -a.y}; }
    friend constexpr Point2 operator*(Point2 a, double s) { return a *= s; }
    friend constexpr Point2 operator*(double s, Point2 a) { return a *= s; }
    friend constexpr bool operator==(const Point2&, const Point2&) = default;
};

constexpr double dot(const Point2& a, const Point2& b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(const Point2& a, const Point2& b) { return a.x * b.y - a.y * b.x; }
inline double norm(const Point2& a) { return std::hypot(a.x, a.y); }
inline double distance(const Point2& a, const Point2& b) { return norm(a - b); }

/// Parameter of the closest point on segment [a, b] to p, clamped to [0, 1].
inline double project_onto_segment(const Point2& p, const Point2& a, const Point2& b) {
    const Point2 ab = b - a;
    const double len2 = dot(ab, ab);
    if (len2 == 0.0) return 0.0;
    return std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
}

inline double point_segment_distance(const Point2& p, const Point2& a, const Point2& b) {
    const double s = project_onto_segment(p, a, b);
    return distance(p, a + s * (b - a));
}

namespace detail {

inline int orientation_sign(const Point2& a, const Point2& b, const Point2& c) {
    const double v = cross(b - a, c - a);
    return (v > 0.0) - (v < 0.0);
}

inline bool on_segment_collinear(const Point2& a, const Point2& b, const Point2& p) {
    return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) && std::min(a.y, b.y) <= p.y &&
           p.y <= std::max(a.y, b.y);
}

} // namespace detail

/// Closed segments [a, b] and [c, d] share at least one point.
inline bool segments_intersect(const Point2& a, const Point2& b, const Point2& c, const Point2& d) {
    using detail::orientation_sign;
    const int o1 = orientation_sign(a, b, c);
    const int o2 = orientation_sign(a, b, d);
    const int o3 = orientation_sign(c, d, a);
    const int o4 = orientation_sign(c, d, b);
    if (o1 != o2 && o3 != o4) return true;
    if (o1 == 0 && detail::on_segment_collinear(a, b, c)) return true;
    if (o2 == 0 && detail::on_segment_collinear(a, b, d)) return true;
    if (o3 == 0 && detail::on_segment_collinear(c, d, a)) return true;
    if (o4 == 0 && detail::on_segment_collinear(c, d, b)) return true;
    return false;
}

inline double segment_segment_distance(const Point2& a, const Point2& b, const Point2& c, const Point2& d) {
    if (segments_intersect(a, b, c, d)) return 0.0;
    return std::min({point_segment_distance(a, c, d), point_segment_distance(b, c, d),
                     point_segment_distance(c, a, b), point_segment_distance(d, a, b)});
}

struct Edge {
    Point2 start;
    Point2 end;
    Point2 normal; // unit, outward
    double length = 0.0;

    Point2 at(double s) const { return start + s * (end - start); }
    Point2 tangent() const { return (end - start) * (1.0 / length); }
};

/// Sub-interval [s0, s1] of one boundary edge.
struct ArcRef {
    std::size_t edge = 0;
    double s0 = 0.0;
    double s1 = 1.0;

    friend bool operator==(const ArcRef&, const ArcRef&) = default;
};

enum class Location { interior, boundary, exterior };

struct Containment {
    Location where = Location::exterior;
    std::size_t edge = 0; // meaningful for boundary
    double s = 0.0;       // meaningful for boundary
};

/// Simple polygon stored counterclockwise. Immutable once built.
class PolygonalDomain {
public:
    std::span<const Point2> vertices() const { return vertices_; }
    std::span<const Edge> edges() const { return edges_; }
    const Edge& edge(std::size_t i) const { return edges_.at(i); }
    std::size_t size() const { return vertices_.size(); }
    double area() const { return area_; }
    double perimeter() const { return perimeter_; }
    double diameter() const { return diameter_; }
    /// Points within this distance of an edge classify as boundary.
    double eps_geom() const { return eps_geom_; }
    /// True when the caller's vertices were clockwise and got reversed.
    bool was_reversed() const { return reversed_; }

    Point2 bbox_min() const { return bbox_min_; }
    Point2 bbox_max() const { return bbox_max_; }

    Point2 arc_point(const ArcRef& arc, double t) const {
        const Edge& e = edge(arc.edge);
        return e.at(arc.s0 + t * (arc.s1 - arc.s0));
    }
    double arc_length(const ArcRef& arc) const { return edge(arc.edge).length * (arc.s1 - arc.s0); }

    /// Copy with a different boundary tolerance.
    PolygonalDomain with_tolerance(double eps) const {
        PolygonalDomain d = *this;
        d.eps_geom_ = eps;
        return d;
    }

private:
    friend PolygonalDomain build_domain(std::vector<Point2> vertices, double eps_rel);

    std::vector<Point2> vertices_;
    std::vector<Edge> edges_;
    double area_ = 0.0;
    double perimeter_ = 0.0;
    double diameter_ = 0.0;
    double eps_geom_ = 0.0;
    bool reversed_ = false;
    Point2 bbox_min_{};
    Point2 bbox_max_{};
};

inline double signed_area(std::span<const Point2> v) {
    double a = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) a += cross(v[i], v[(i + 1) % v.size()]);
    return 0.5 * a;
}

/// Validates and canonicalizes a polygon. Clockwise input is reversed (see
/// PolygonalDomain::was_reversed) rather than rejected.
inline PolygonalDomain build_domain(std::vector<Point2> vertices, double eps_rel = 1e-9) {
    const std::size_t n = vertices.size();
    if (n < 3) throw Error(ErrorKind::degenerate_area, "polygon needs at least 3 vertices");
    for (const auto& p : vertices) {
        if (!std::isfinite(p.x) || !std::isfinite(p.y))
            throw Error(ErrorKind::degenerate_area, "non-finite vertex coordinate");
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (vertices[i] == vertices[(i + 1) % n]) {
            std::ostringstream os;
            os << "repeated vertex at index " << i;
            throw Error(ErrorKind::self_intersecting, os.str());
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        const Point2& a = vertices[i];
        const Point2& b = vertices[(i + 1) % n];
        for (std::size_t j = i + 1; j < n; ++j) {
            const Point2& c = vertices[j];
            const Point2& d = vertices[(j + 1) % n];
            const bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
            if (adjacent) {
                // Adjacent edges may only share their common vertex.
                const Point2 shared = (j == i + 1) ? b : a;
                const Point2 u = ((j == i + 1) ? a : b) - shared;
                const Point2 w = ((j == i + 1) ? d : c) - shared;
                if (cross(u, w) == 0.0 && dot(u, w) > 0.0) {
                    std::ostringstream os;
                    os << "edges " << i << " and " << j << " fold back onto each other";
                    throw Error(ErrorKind::self_intersecting, os.str());
                }
                continue;
            }
            if (segments_intersect(a, b, c, d)) {
                std::ostringstream os;
                os << "edges " << i << " and " << j << " intersect";
                throw Error(ErrorKind::self_intersecting, os.str());
            }
        }
    }

    double area = signed_area(vertices);
    double scale = 0.0;
    for (const auto& p : vertices) scale = std::max({scale, std::abs(p.x), std::abs(p.y)});
    if (std::abs(area) <= 1e-14 * scale * scale) throw Error(ErrorKind::degenerate_area, "polygon has zero area");

    PolygonalDomain d;
    if (area < 0.0) {
        std::reverse(vertices.begin(), vertices.end());
        area = -area;
        d.reversed_ = true;
    }
    d.vertices_ = std::move(vertices);
    d.area_ = area;
    d.bbox_min_ = d.bbox_max_ = d.vertices_.front();
    for (std::size_t i = 0; i < n; ++i) {
        const Point2& a = d.vertices_[i];
        const Point2& b = d.vertices_[(i + 1) % n];
        Edge e;
        e.start = a;
        e.end = b;
        e.length = distance(a, b);
        const Point2 t = (b - a) * (1.0 / e.length);
        e.normal = {t.y, -t.x}; // right of travel direction points out for CCW
        d.edges_.push_back(e);
        d.perimeter_ += e.length;
        d.bbox_min_ = {std::min(d.bbox_min_.x, a.x), std::min(d.bbox_min_.y, a.y)};
        d.bbox_max_ = {std::max(d.bbox_max_.x, a.x), std::max(d.bbox_max_.y, a.y)};
        for (std::size_t j = i + 1; j < n; ++j) d.diameter_ = std::max(d.diameter_, distance(a, d.vertices_[j]));
    }
    d.eps_geom_ = eps_rel * d.diameter_;
    return d;
}

namespace detail {

/// Even-odd crossing test; boundary points give an arbitrary answer.
inline bool crossing_inside(const PolygonalDomain& d, const Point2& p) {
    bool inside = false;
    const auto v = d.vertices();
    for (std::size_t i = 0, j = v.size() - 1; i < v.size(); j = i++) {
        const Point2& a = v[i];
        const Point2& b = v[j];
        if ((a.y > p.y) != (b.y > p.y)) {
            const double xc = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if (p.x < xc) inside = !inside;
        }
    }
    return inside;
}

struct NearestEdge {
    std::size_t edge = 0;
    double s = 0.0;
    double dist = std::numeric_limits<double>::infinity();
};

inline NearestEdge nearest_edge(const PolygonalDomain& d, const Point2& p) {
    NearestEdge best;
    for (std::size_t i = 0; i < d.size(); ++i) {
        const Edge& e = d.edge(i);
        const double s = project_onto_segment(p, e.start, e.end);
        const double dist = distance(p, e.at(s));
        if (dist < best.dist) best = {i, s, dist};
    }
    return best;
}

} // namespace detail

inline Containment contains(const PolygonalDomain& d, const Point2& p) {
    const auto ne = detail::nearest_edge(d, p);
    if (ne.dist <= d.eps_geom()) return {Location::boundary, ne.edge, ne.s};
    return {detail::crossing_inside(d, p) ? Location::interior : Location::exterior, 0, 0.0};
}

inline bool in_closure(const PolygonalDomain& d, const Point2& p) {
    return contains(d, p).where != Location::exterior;
}

/// Distance to the boundary, negative inside and positive outside.
inline double signed_distance(const PolygonalDomain& d, const Point2& p) {
    const auto ne = detail::nearest_edge(d, p);
    return detail::crossing_inside(d, p) ? -ne.dist : ne.dist;
}

/// Minimum Euclidean distance between two unions of boundary arcs.
inline double set_distance(const PolygonalDomain& d, std::span<const ArcRef> a, std::span<const ArcRef> b) {
    if (a.empty() || b.empty()) throw Error(ErrorKind::empty_set, "set_distance needs two nonempty arc sets");
    double best = std::numeric_limits<double>::infinity();
    for (const auto& ra : a) {
        const Point2 a0 = d.arc_point(ra, 0.0), a1 = d.arc_point(ra, 1.0);
        for (const auto& rb : b) {
            best = std::min(best, segment_segment_distance(a0, a1, d.arc_point(rb, 0.0), d.arc_point(rb, 1.0)));
        }
    }
    return best;
}

} // namespace advect
