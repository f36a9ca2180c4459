#pragma once

#include <advect/error.hpp>
#include <advect/geometry.hpp>

#include <array>
#include <cstddef>
#include <span>
#include <vector>

namespace advect {

using Triangle = std::array<Point2, 3>;

inline double triangle_area(const Triangle& t) { return 0.5 * cross(t[1] - t[0], t[2] - t[0]); }

/// Ear clipping of a counterclockwise simple polygon. Deterministic: the
/// lowest-index remaining vertex forming a valid ear is clipped first.
inline std::vector<Triangle> ear_clip(std::span<const Point2> poly) {
    std::vector<std::size_t> idx(poly.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    std::vector<Triangle> out;
    auto strictly_inside = [](const Point2& p, const Point2& a, const Point2& b, const Point2& c) {
        // closed triangle test; vertices coinciding with a corner do not block
        if (p == a || p == b || p == c) return false;
        return cross(b - a, p - a) >= 0.0 && cross(c - b, p - b) >= 0.0 && cross(a - c, p - c) >= 0.0;
    };
    while (idx.size() > 3) {
        const std::size_t m = idx.size();
        bool clipped = false;
        for (std::size_t k = 0; k < m; ++k) {
            const Point2& a = poly[idx[(k + m - 1) % m]];
            const Point2& b = poly[idx[k]];
            const Point2& c = poly[idx[(k + 1) % m]];
            if (cross(b - a, c - b) <= 0.0) continue; // reflex or collinear
            bool blocked = false;
            for (std::size_t q = 0; q < m && !blocked; ++q) {
                if (q == k || q == (k + 1) % m || q == (k + m - 1) % m) continue;
                blocked = strictly_inside(poly[idx[q]], a, b, c);
            }
            if (blocked) continue;
            out.push_back({a, b, c});
            idx.erase(idx.begin() + static_cast<std::ptrdiff_t>(k));
            clipped = true;
            break;
        }
        if (!clipped) {
            // Only collinear runs remain; drop the first collinear vertex.
            bool dropped = false;
            for (std::size_t k = 0; k < m; ++k) {
                const Point2& a = poly[idx[(k + m - 1) % m]];
                const Point2& b = poly[idx[k]];
                const Point2& c = poly[idx[(k + 1) % m]];
                if (cross(b - a, c - b) == 0.0) {
                    idx.erase(idx.begin() + static_cast<std::ptrdiff_t>(k));
                    dropped = true;
                    break;
                }
            }
            if (!dropped) throw Error(ErrorKind::self_intersecting, "ear clipping failed; polygon is not simple");
        }
    }
    const Triangle last{poly[idx[0]], poly[idx[1]], poly[idx[2]]};
    if (triangle_area(last) > 0.0) out.push_back(last);
    return out;
}

/// Line a.x + b.y = c; points with a.x + b.y < c are on the negative side.
struct SplitLine {
    double a = 0.0;
    double b = 1.0;
    double c = 0.0;

    double eval(const Point2& p) const { return a * p.x + b * p.y - c; }
    static SplitLine horizontal(double y) { return {0.0, 1.0, y}; }
};

namespace detail {

/// Clip a convex polygon against one side of a line (Sutherland-Hodgman).
inline std::vector<Point2> clip_convex(const std::vector<Point2>& poly, const SplitLine& l, bool keep_negative) {
    std::vector<Point2> out;
    const std::size_t n = poly.size();
    auto side = [&](const Point2& p) { return keep_negative ? -l.eval(p) : l.eval(p); };
    for (std::size_t i = 0; i < n; ++i) {
        const Point2& p = poly[i];
        const Point2& q = poly[(i + 1) % n];
        const double sp = side(p), sq = side(q);
        if (sp >= 0.0) out.push_back(p);
        if ((sp > 0.0 && sq < 0.0) || (sp < 0.0 && sq > 0.0)) {
            const double t = sp / (sp - sq);
            out.push_back(p + t * (q - p));
        }
    }
    return out;
}

} // namespace detail

/// Cuts triangles along the lines so no resulting triangle straddles one.
inline std::vector<Triangle> split_triangles(std::vector<Triangle> tris, std::span<const SplitLine> lines) {
    for (const auto& l : lines) {
        std::vector<Triangle> next;
        for (const auto& t : tris) {
            const std::vector<Point2> poly(t.begin(), t.end());
            for (bool neg : {true, false}) {
                const auto piece = detail::clip_convex(poly, l, neg);
                for (std::size_t i = 1; i + 1 < piece.size(); ++i) {
                    const Triangle f{piece[0], piece[i], piece[i + 1]};
                    if (triangle_area(f) > 1e-300) next.push_back(f);
                }
            }
        }
        tris = std::move(next);
    }
    return tris;
}

} // namespace advect
