#pragma once

// Self-contained SVG pictures: the domain with its labeled boundary arcs,
// a few characteristics, and optionally a heatmap of sampled values.

#include <advect/characteristics.hpp>
#include <advect/geometry.hpp>

#include <algorithm>
#include <cstdio>
#include <cmath>
#include <sstream>
#include <string>
#include <vector>

namespace advect::svg {

struct HeatSample {
    Point2 x{};
    double value = 0.0;
};

struct Picture {
    const PolygonalDomain* domain = nullptr;
    const BoundaryClassification* bc = nullptr;
    std::vector<CharacteristicTrace> traces;
    std::vector<HeatSample> heat;
    double heat_cell = 0.0; // side of one heat square in domain units
    std::string title;
};

namespace detail {

inline std::string colour_of(BoundaryLabel l) {
    switch (l) {
    case BoundaryLabel::inflow: return "#1f77b4";
    case BoundaryLabel::outflow: return "#d62728";
    case BoundaryLabel::characteristic: return "#7f7f7f";
    }
    return "#000000";
}

/// Blue-white-red ramp on t in [0, 1].
inline std::string ramp(double t) {
    t = std::clamp(t, 0.0, 1.0);
    int r, g, b;
    if (t < 0.5) {
        const double s = t / 0.5;
        r = static_cast<int>(std::lround(59 + s * (255 - 59)));
        g = static_cast<int>(std::lround(76 + s * (255 - 76)));
        b = static_cast<int>(std::lround(192 + s * (255 - 192)));
    } else {
        const double s = (t - 0.5) / 0.5;
        r = static_cast<int>(std::lround(255 - s * (255 - 180)));
        g = static_cast<int>(std::lround(255 - s * (255 - 4)));
        b = static_cast<int>(std::lround(255 - s * (255 - 38)));
    }
    char buf[8];
    std::snprintf(buf, sizeof buf, "#%02x%02x%02x", r, g, b);
    return buf;
}

} // namespace detail

inline std::string render(const Picture& pic) {
    const PolygonalDomain& d = *pic.domain;
    const double W = 640.0, pad = 24.0;
    const Point2 lo = d.bbox_min(), hi = d.bbox_max();
    const double span = std::max(hi.x - lo.x, hi.y - lo.y);
    const double scale = (W - 2 * pad) / span;
    const double H = (hi.y - lo.y) * scale + 2 * pad + (pic.title.empty() ? 0.0 : 20.0);
    const double top = pic.title.empty() ? 0.0 : 20.0;
    auto X = [&](double x) { return pad + (x - lo.x) * scale; };
    auto Y = [&](double y) { return top + pad + (hi.y - y) * scale; };

    std::ostringstream os;
    os.precision(6);
    os << std::fixed;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 "
       << W << ' ' << H << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
    if (!pic.title.empty())
        os << "<text x=\"" << pad << "\" y=\"16\" font-family=\"monospace\" font-size=\"13\">" << pic.title
           << "</text>\n";

    os << "<polygon fill=\"#f4f4f4\" stroke=\"none\" points=\"";
    for (const auto& v : d.vertices()) os << X(v.x) << ',' << Y(v.y) << ' ';
    os << "\"/>\n";

    if (!pic.heat.empty()) {
        double vmin = pic.heat.front().value, vmax = vmin;
        for (const auto& h : pic.heat) {
            vmin = std::min(vmin, h.value);
            vmax = std::max(vmax, h.value);
        }
        const double cell = pic.heat_cell * scale;
        os << "<g stroke=\"none\">\n";
        for (const auto& h : pic.heat) {
            const double t = vmax > vmin ? (h.value - vmin) / (vmax - vmin) : 0.5;
            os << "<rect x=\"" << X(h.x.x) - cell / 2 << "\" y=\"" << Y(h.x.y) - cell / 2 << "\" width=\"" << cell
               << "\" height=\"" << cell << "\" fill=\"" << detail::ramp(t) << "\"/>\n";
        }
        os << "</g>\n";
    }

    for (const auto& tr : pic.traces) {
        if (tr.samples.size() < 2) continue;
        os << "<polyline fill=\"none\" stroke=\"#2ca02c\" stroke-width=\"1\" points=\"";
        for (const auto& s : tr.samples) os << X(s.x.x) << ',' << Y(s.x.y) << ' ';
        os << "\"/>\n";
    }

    if (pic.bc) {
        for (const auto& a : pic.bc->arcs) {
            const Point2 p = d.arc_point(a.arc, 0.0), q = d.arc_point(a.arc, 1.0);
            os << "<line x1=\"" << X(p.x) << "\" y1=\"" << Y(p.y) << "\" x2=\"" << X(q.x) << "\" y2=\"" << Y(q.y)
               << "\" stroke=\"" << detail::colour_of(a.label) << "\" stroke-width=\"3\"><title>edge " << a.arc.edge
               << ' ' << to_string(a.label) << "</title></line>\n";
        }
        for (const auto& c : pic.bc->components)
            os << "<circle cx=\"" << X(c.point.x) << "\" cy=\"" << Y(c.point.y)
               << "\" r=\"5\" fill=\"none\" stroke=\"#000000\" stroke-width=\"1.5\"/>\n";
    } else {
        os << "<polygon fill=\"none\" stroke=\"#000000\" stroke-width=\"2\" points=\"";
        for (const auto& v : d.vertices()) os << X(v.x) << ',' << Y(v.y) << ' ';
        os << "\"/>\n";
    }
    os << "</svg>\n";
    return os.str();
}

/// Forward characteristics from evenly spaced points of every inflow arc.
inline std::vector<CharacteristicTrace> sample_traces(const FlowContext& ctx, const BoundaryClassification& bc,
                                                      int per_arc = 5) {
    std::vector<CharacteristicTrace> out;
    for (const auto& a : bc.arcs_with(BoundaryLabel::inflow)) {
        for (int k = 0; k < per_arc; ++k) {
            const Point2 x0 = ctx.domain.arc_point(a, (k + 0.5) / per_arc);
            try {
                out.push_back(flow(ctx, x0, Direction::forward));
            } catch (const Error&) {
                // a failed trace only drops one curve from the picture
            }
        }
    }
    return out;
}

} // namespace advect::svg
