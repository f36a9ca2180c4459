#pragma once

#include <advect/error.hpp>
#include <advect/fields.hpp>
#include <advect/geometry.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <string>

namespace advect {

/// Lebesgue exponent p in [1, inf] with its Hoelder conjugate.
class NormOrder {
public:
    constexpr NormOrder() = default;
    explicit NormOrder(double p) : p_(p) {
        if (!(p >= 1.0)) throw Error(ErrorKind::invalid_config, "norm order must lie in [1, inf]");
    }
    static NormOrder infinity() { return NormOrder(std::numeric_limits<double>::infinity()); }

    double p() const { return p_; }
    bool is_infinite() const { return std::isinf(p_); }
    /// 1/p with the convention 1/inf = 0.
    double inverse() const { return is_infinite() ? 0.0 : 1.0 / p_; }
    NormOrder conjugate() const {
        if (is_infinite()) return NormOrder(1.0);
        if (p_ == 1.0) return infinity();
        return NormOrder(p_ / (p_ - 1.0));
    }
    std::string label() const {
        if (is_infinite()) return "infinity";
        std::string s = detail::format_number(p_);
        return s;
    }

    friend bool operator==(const NormOrder&, const NormOrder&) = default;

private:
    double p_ = 2.0;
};

/// User-facing tolerances. Unset optionals take defaults scaled to the
/// domain and field; see resolve().
struct SolverConfig {
    double ode_rtol = 1e-12;
    double ode_atol_rel = 1e-13; // times diameter
    std::optional<double> eps_geom;
    std::optional<double> eps_w;
    std::optional<double> eps_event;
    std::optional<double> max_time;
    std::optional<double> fd_step;
    std::optional<double> t_probe;
    std::optional<double> eps_trace;
    std::optional<double> w1inf; // exact ||beta||_{W^{1,inf}} if known
    double max_step_fraction = 0.05; // spatial displacement per ODE step, times diameter
    double eps_cut = 1e-12;
    int edge_samples = 64;
    int quad_order = 7;
    int boundary_points = 8;
    int grid_n = 32;
};

/// Fully resolved absolute tolerances.
struct Tolerances {
    double ode_rtol = 0.0;
    double ode_atol = 0.0;
    double eps_geom = 0.0;
    double eps_w = 0.0;
    double eps_event = 0.0;
    double max_time = 0.0;
    double max_step = 0.0; // spatial length
    double fd_step = 0.0;
    double t_probe = 0.0;
    double eps_trace = 0.0;
    double eps_cut = 0.0;
    int edge_samples = 0;
    int quad_order = 0;
    int boundary_points = 0;
    int grid_n = 0;
};

inline Tolerances resolve(const SolverConfig& c, const PolygonalDomain& d, const FieldNorms& n) {
    auto positive = [](double v, const char* name) {
        if (!(v > 0.0) || !std::isfinite(v)) throw Error(ErrorKind::invalid_config, std::string(name) + " must be positive");
        return v;
    };
    Tolerances t;
    const double diam = d.diameter();
    const double speed = std::max(n.sup_beta, std::numeric_limits<double>::min());
    t.ode_rtol = positive(c.ode_rtol, "ode_rtol");
    t.ode_atol = positive(c.ode_atol_rel, "ode_atol") * diam;
    t.eps_geom = positive(c.eps_geom.value_or(d.eps_geom()), "eps_geom");
    t.eps_w = positive(c.eps_w.value_or(1e-8 * speed), "eps_w");
    t.eps_event = positive(c.eps_event.value_or(1e-10 * diam), "eps_event");
    // Stagnation points would make perimeter / inf|beta| unbounded; the floor
    // keeps non-exiting orbits from running forever.
    t.max_time = positive(c.max_time.value_or(10.0 * d.perimeter() / std::max(n.inf_beta, 1e-2 * speed)), "max_time");
    t.max_step = positive(c.max_step_fraction, "max_step_fraction") * diam;
    t.fd_step = positive(c.fd_step.value_or(1e-5 * diam / std::max(1.0, n.sup_beta)), "fd_step");
    t.t_probe = positive(c.t_probe.value_or(1e-3 * diam / speed), "t_probe");
    t.eps_trace = positive(c.eps_trace.value_or(1e-9 * diam), "eps_trace");
    t.eps_cut = positive(c.eps_cut, "eps_cut");
    if (c.edge_samples < 2) throw Error(ErrorKind::invalid_config, "edge_samples must be at least 2");
    if (c.quad_order < 1) throw Error(ErrorKind::invalid_config, "quad_order must be at least 1");
    if (c.boundary_points < 1) throw Error(ErrorKind::invalid_config, "boundary_points must be at least 1");
    if (c.grid_n < 8) throw Error(ErrorKind::invalid_config, "grid_n must be at least 8");
    t.edge_samples = c.edge_samples;
    t.quad_order = c.quad_order;
    t.boundary_points = c.boundary_points;
    t.grid_n = c.grid_n;
    return t;
}

} // namespace advect
