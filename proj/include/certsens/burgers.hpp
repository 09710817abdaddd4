#pragma once

#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "certsens/errors.hpp"

namespace certsens {

/// Uncertain inputs of the viscous Burgers model: viscosity nu and the
/// initial-condition amplitude parameter u0m.
struct ParameterPoint {
    double nu = 10.0;   // must stay > 0
    double u0m = 0.0;
};

/// Uniform grid on [0,1] with n_space intervals (n_space+1 nodes) and a
/// fixed time step up to t_final.
struct Discretization {
    int n_space = 60;
    double dt = 0.01;
    double t_final = 0.05;

    Discretization() = default;

    Discretization(int n_space_, double dt_, double t_final_)
        : n_space(n_space_), dt(dt_), t_final(t_final_) {
        validate();
    }

    void validate() const {
        if (n_space < 2) throw ConfigError("n_space must be >= 2");
        if (dt <= 0.0) throw ConfigError("dt must be > 0");
        if (t_final < 0.0) throw ConfigError("t_final must be >= 0");
        const double steps = t_final / dt;
        const double rounded = std::round(steps);
        if (std::abs(steps - rounded) > 1e-9 * std::max(1.0, rounded))
            throw ConfigError("t_final / dt must be an integer (got " +
                              std::to_string(steps) + "); refusing to round silently");
    }

    int num_steps() const { return static_cast<int>(std::round(t_final / dt)); }
    double h() const { return 1.0 / n_space; }
    double node(int i) const { return static_cast<double>(i) / n_space; }
};

using SpatialState = std::vector<double>;

struct Trajectory {
    std::vector<SpatialState> states;  // num_steps()+1 entries
    Discretization disc;

    const SpatialState& final_state() const { return states.back(); }
};

/// Dirichlet data (b0, b1) from the compatibility conditions of the
/// initial profile u0m^2 + 5 sin(0.5 x).
inline std::pair<double, double> boundary_values(const ParameterPoint& p) {
    const double b0 = p.u0m * p.u0m;
    return {b0, b0 + 5.0 * std::sin(0.5)};
}

inline SpatialState initial_condition(const ParameterPoint& p, const Discretization& d) {
    SpatialState u(d.n_space + 1);
    const double c = p.u0m * p.u0m;
    for (int i = 0; i <= d.n_space; ++i)
        u[i] = c + 5.0 * std::sin(0.5 * d.node(i));
    // Endpoints match boundary_values analytically; pin them so the
    // boundary invariant is exact in floating point too.
    auto [b0, b1] = boundary_values(p);
    u.front() = b0;
    u.back() = b1;
    return u;
}

struct StepOptions {
    double forcing = 1.0;
    double magnitude_cap = 1e6;
};

namespace detail {

/// Solves the tridiagonal system with constant diagonals
/// (-mu, 1+2mu, -mu) of size n, in place on rhs.
inline void thomas_constant(double mu, std::vector<double>& rhs,
                            std::vector<double>& scratch) {
    const std::size_t n = rhs.size();
    scratch.resize(n);
    const double diag = 1.0 + 2.0 * mu;
    double denom = diag;
    rhs[0] /= denom;
    for (std::size_t i = 1; i < n; ++i) {
        scratch[i] = -mu / denom;
        denom = diag + mu * scratch[i];
        rhs[i] = (rhs[i] + mu * rhs[i - 1]) / denom;
    }
    for (std::size_t i = n - 1; i-- > 0;)
        rhs[i] -= scratch[i + 1] * rhs[i + 1];
}

}  // namespace detail

/// One semi-implicit time step: backward-Euler diffusion, explicit
/// conservative-form centered convection, explicit forcing.  Boundary
/// nodes are strongly re-imposed.
inline SpatialState step(const SpatialState& state, const ParameterPoint& p,
                         const Discretization& d, const StepOptions& opts = {}) {
    const int ns = d.n_space;
    const double h = d.h();
    const double mu = d.dt * p.nu / (h * h);
    auto [b0, b1] = boundary_values(p);

    std::vector<double> rhs(ns - 1);
    for (int i = 1; i < ns; ++i) {
        const double conv = (state[i + 1] * state[i + 1] - state[i - 1] * state[i - 1]) / (4.0 * h);
        rhs[i - 1] = state[i] + d.dt * (opts.forcing - conv);
    }
    rhs.front() += mu * b0;
    rhs.back() += mu * b1;

    std::vector<double> scratch;
    detail::thomas_constant(mu, rhs, scratch);

    SpatialState out(ns + 1);
    out.front() = b0;
    out.back() = b1;
    for (int i = 1; i < ns; ++i) {
        const double v = rhs[i - 1];
        if (!std::isfinite(v) || std::abs(v) > opts.magnitude_cap)
            throw SolverDiverged("nodal value " + std::to_string(v) + " at node " +
                                 std::to_string(i));
        out[i] = v;
    }
    return out;
}

inline Trajectory solve_full(const ParameterPoint& p, const Discretization& d,
                             const StepOptions& opts = {}) {
    Trajectory traj;
    traj.disc = d;
    const int steps = d.num_steps();
    traj.states.reserve(steps + 1);
    traj.states.push_back(initial_condition(p, d));
    for (int k = 0; k < steps; ++k) {
        try {
            traj.states.push_back(step(traj.states.back(), p, d, opts));
        } catch (const SolverDiverged& e) {
            throw SolverDiverged(std::string(e.what()) + " (time step " +
                                 std::to_string(k + 1) + ")");
        }
    }
    return traj;
}

/// Nodal mean-like output: sum of the N+1 final-time values divided by N
/// (the divisor is the interval count, not the node count).
inline double output_functional_state(const SpatialState& u, int n_space) {
    double s = 0.0;
    for (double v : u) s += v;
    return s / n_space;
}

inline double output_functional(const Trajectory& traj) {
    return output_functional_state(traj.final_state(), traj.disc.n_space);
}

/// Discrete L2([0,1]) norm, trapezoidal quadrature on the uniform grid.
inline double l2_norm(const SpatialState& u) {
    const std::size_t n = u.size() - 1;
    const double h = 1.0 / static_cast<double>(n);
    double s = 0.5 * (u.front() * u.front() + u.back() * u.back());
    for (std::size_t i = 1; i < n; ++i) s += u[i] * u[i];
    return std::sqrt(h * s);
}

inline double l2_inner(const SpatialState& a, const SpatialState& b) {
    const std::size_t n = a.size() - 1;
    const double h = 1.0 / static_cast<double>(n);
    double s = 0.5 * (a.front() * b.front() + a.back() * b.back());
    for (std::size_t i = 1; i < n; ++i) s += a[i] * b[i];
    return h * s;
}

}  // namespace certsens
