#pragma once

#include <utility>
#include <vector>

#include "enclosure/analytic_wave.hpp"
#include "enclosure/geometry.hpp"
#include "enclosure/vec3.hpp"

namespace enclosure::reffield {

/// Uniform time discretization of [0, horizon], horizon = n_steps * dt.
struct TimeGrid {
    int n_steps = 0;
    double dt = 0.0;

    TimeGrid(int n_steps_, double dt_);
    double horizon() const { return n_steps * dt; }
    double time(int k) const { return k * dt; }
};

/// Scalar field sampled at surface-quadrature nodes, optionally per time level.
struct BoundaryField {
    size_t n_nodes = 0;
    size_t n_times = 1;
    std::vector<double> values;  // [time * n_nodes + node]

    BoundaryField() = default;
    BoundaryField(size_t nodes, size_t times)
        : n_nodes(nodes), n_times(times), values(nodes * times, 0.0) {}
    double& at(size_t node, size_t k = 0) { return values[k * n_nodes + node]; }
    double at(size_t node, size_t k = 0) const { return values[k * n_nodes + node]; }
};

/// Margin of the time-window condition: (T - pulse_radius) - sup |x - p| over
/// the cavity. Nonnegative means the cavity is swallowed by the trailing front
/// at time T.
double time_window_margin(const geom::Domain& omega, const waves::SourcePulse& pulse, double T);

/// Throws AdmissibilityError when the margin is negative (beyond a tiny
/// floating-point tolerance so exact-equality configurations pass).
void require_time_window(const geom::Domain& omega, const waves::SourcePulse& pulse, double T);

/// Time-reversed Neumann data on the cavity boundary:
///   f(x, t_k) = n(x) . grad v(x, T - t_k),
/// zero at t = T by the zero-displacement limit.
BoundaryField neumann_data(const waves::SourcePulse& pulse, const geom::Domain& omega,
                           const geom::SurfaceQuadrature& quad, const TimeGrid& grid);

/// Pointwise Laplace-in-time image of the reversed field and its gradient:
///   value = int_0^T e^{-tau t} v(x, T-t) dt,   grad likewise.
/// Composite Gauss-Legendre in t with panels split at the region-transition
/// times of the closed form, refined until the change is below abs_tol.
struct LaplacePoint {
    double value = 0.0;
    Vec3 grad{0, 0, 0};
};
LaplacePoint laplace_point(const waves::SourcePulse& pulse, const Vec3& x, double tau, double T,
                           double abs_tol = 1e-12);

/// Laplace field and its outward normal derivative on the quadrature nodes.
std::pair<BoundaryField, BoundaryField> boundary_laplace_field(const waves::SourcePulse& pulse,
                                                               const geom::SurfaceQuadrature& quad,
                                                               double tau, double T);

/// Energy of the reference Laplace field over the obstacle:
///   int_D (|grad w|^2 + tau^2 w^2) dx
/// by volume quadrature over D (ball or union of balls), with the same
/// per-node time quadrature as laplace_point. Strictly positive.
double obstacle_field_energy(const waves::SourcePulse& pulse, const geom::Domain& obstacle,
                             double tau, double T, int order);

}  // namespace enclosure::reffield
