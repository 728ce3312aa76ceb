#include "enclosure/reference_field.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "enclosure/errors.hpp"
#include "enclosure/parallel.hpp"
#include "enclosure/quadrature.hpp"

namespace enclosure::reffield {

TimeGrid::TimeGrid(int n_steps_, double dt_) : n_steps(n_steps_), dt(dt_) {
    if (n_steps < 2) throw std::invalid_argument("TimeGrid: n_steps must be >= 2");
    if (!(dt > 0.0)) throw std::invalid_argument("TimeGrid: dt must be positive");
}

double time_window_margin(const geom::Domain& omega, const waves::SourcePulse& pulse, double T) {
    return (T - pulse.radius) - geom::sup_radius(omega, pulse.center);
}

void require_time_window(const geom::Domain& omega, const waves::SourcePulse& pulse, double T) {
    const double margin = time_window_margin(omega, pulse, T);
    const double tol = 1e-12 * std::max(1.0, T);
    if (margin < -tol) {
        std::ostringstream msg;
        msg << "time window too short: horizon - pulse_radius = " << T - pulse.radius
            << " must reach the cavity radius "
            << geom::sup_radius(omega, pulse.center) << " (margin " << margin << ")";
        throw AdmissibilityError(msg.str());
    }
}

BoundaryField neumann_data(const waves::SourcePulse& pulse, const geom::Domain& omega,
                           const geom::SurfaceQuadrature& quad, const TimeGrid& grid) {
    require_time_window(omega, pulse, grid.horizon());
    const double T = grid.horizon();
    BoundaryField f(quad.size(), grid.n_steps + 1);
    parallel_for(0, static_cast<int>(quad.size()), [&](int node) {
        for (int k = 0; k <= grid.n_steps; ++k) {
            const double s = T - grid.time(k);
            if (s <= 0.0) {
                f.at(node, k) = 0.0;  // zero-displacement limit at s = 0
                continue;
            }
            f.at(node, k) =
                quad.normals[node].dot(waves::gradient(pulse, quad.nodes[node], s));
        }
    });
    return f;
}

namespace {

// Integration window and interior breakpoints of t -> v(x, T - t) for a point
// at distance r from the pulse center.
struct TimeSupport {
    double t_lo, t_hi;
    std::vector<double> breaks;
};

TimeSupport time_support(double r, double eta, double T) {
    TimeSupport s;
    s.t_lo = std::max(0.0, T - (r + eta));
    s.t_hi = std::min(T, T - (r - eta));
    if (r < eta) s.breaks.push_back(T - (eta - r));  // core/shell transition
    return s;
}

}  // namespace

LaplacePoint laplace_point(const waves::SourcePulse& pulse, const Vec3& x, double tau, double T,
                           double abs_tol) {
    const double r = distance(x, pulse.center);
    const TimeSupport sup = time_support(r, pulse.radius, T);
    LaplacePoint out;
    if (sup.t_hi <= sup.t_lo) return out;

    std::vector<double> pts{sup.t_lo};
    for (double b : sup.breaks)
        if (b > sup.t_lo && b < sup.t_hi) pts.push_back(b);
    pts.push_back(sup.t_hi);
    std::sort(pts.begin(), pts.end());

    auto sweep = [&](int panels_per_unit) {
        double value = 0.0;
        Vec3 grad{0, 0, 0};
        for (size_t seg = 0; seg + 1 < pts.size(); ++seg) {
            const double lo = pts[seg], hi = pts[seg + 1];
            const double len = hi - lo;
            if (len < 1e-15) continue;
            const int panels =
                std::max(1, static_cast<int>(std::ceil(len * (tau / 8.0 + 1.0))) ) *
                panels_per_unit;
            const Rule1D rule = composite_gauss_legendre(16, lo, hi, panels);
            for (size_t i = 0; i < rule.nodes.size(); ++i) {
                const double t = rule.nodes[i];
                const double s = T - t;
                if (s <= 0.0) continue;
                const double w = rule.weights[i] * std::exp(-tau * t);
                value += w * waves::value(pulse, x, s);
                grad += waves::gradient(pulse, x, s) * w;
            }
        }
        return std::pair<double, Vec3>{value, grad};
    };

    auto [v1, g1] = sweep(1);
    for (int refine = 2; refine <= 8; refine *= 2) {
        auto [v2, g2] = sweep(refine);
        const double diff = std::max(std::fabs(v2 - v1), (g2 - g1).norm());
        v1 = v2;
        g1 = g2;
        if (diff <= abs_tol) break;
    }
    out.value = v1;
    out.grad = g1;
    return out;
}

std::pair<BoundaryField, BoundaryField> boundary_laplace_field(const waves::SourcePulse& pulse,
                                                               const geom::SurfaceQuadrature& quad,
                                                               double tau, double T) {
    BoundaryField w(quad.size(), 1);
    BoundaryField dwdn(quad.size(), 1);
    parallel_for(0, static_cast<int>(quad.size()), [&](int node) {
        const LaplacePoint lp = laplace_point(pulse, quad.nodes[node], tau, T);
        w.at(node) = lp.value;
        dwdn.at(node) = quad.normals[node].dot(lp.grad);
    });
    return {std::move(w), std::move(dwdn)};
}

double obstacle_field_energy(const waves::SourcePulse& pulse, const geom::Domain& obstacle,
                             double tau, double T, int order) {
    std::vector<geom::Ball> members;
    if (obstacle.is_ball()) {
        members.push_back(obstacle.ball());
    } else if (obstacle.is_union()) {
        members = obstacle.balls();
    } else {
        throw GeometryError("obstacle energy: obstacle must be a ball or a union of balls");
    }

    double total = 0.0;
    for (const geom::Ball& b : members) {
        const geom::VolumeQuadrature q = geom::ball_volume_quadrature(b, order);
        std::vector<double> partial(q.size(), 0.0);
        parallel_for(0, static_cast<int>(q.size()), [&](int i) {
            const LaplacePoint lp = laplace_point(pulse, q.nodes[i], tau, T, 1e-14);
            partial[i] = q.weights[i] * (lp.grad.norm2() + tau * tau * lp.value * lp.value);
        });
        for (double p : partial) total += p;  // ordered reduction
    }
    return total;
}

}  // namespace enclosure::reffield
