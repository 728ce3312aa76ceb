#include "enclosure/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "enclosure/errors.hpp"
#include "enclosure/quadrature.hpp"

namespace enclosure::geom {

namespace {

constexpr double kPi = std::numbers::pi;

void validate_ball(const Ball& b) {
    if (!(b.radius > 0.0)) throw GeometryError("ball radius must be positive");
}

void validate_box(const Box& b) {
    if (!(b.lo.x < b.hi.x && b.lo.y < b.hi.y && b.lo.z < b.hi.z))
        throw GeometryError("box corners must be strictly ordered per axis");
}

}  // namespace

Domain::Domain(const Ball& b) : shape_(b) { validate_ball(b); }

Domain::Domain(const Box& b) : shape_(b) { validate_box(b); }

Domain::Domain(std::vector<Ball> balls) : shape_(std::move(balls)) {
    const auto& bs = std::get<std::vector<Ball>>(shape_);
    if (bs.empty()) throw GeometryError("union of balls must be non-empty");
    if (bs.size() > 8) throw GeometryError("union of balls limited to 8 members");
    for (const auto& b : bs) validate_ball(b);
    for (size_t i = 0; i < bs.size(); ++i) {
        for (size_t j = i + 1; j < bs.size(); ++j) {
            if (distance(bs[i].center, bs[j].center) <= bs[i].radius + bs[j].radius)
                throw GeometryError("union members must be pairwise disjoint");
        }
    }
}

bool Domain::contains(const Vec3& x) const {
    if (is_ball()) return distance(x, ball().center) < ball().radius;
    if (is_box()) {
        const Box& b = box();
        return x.x > b.lo.x && x.x < b.hi.x && x.y > b.lo.y && x.y < b.hi.y && x.z > b.lo.z &&
               x.z < b.hi.z;
    }
    for (const auto& b : balls())
        if (distance(x, b.center) < b.radius) return true;
    return false;
}

Box Domain::bounding_box() const {
    if (is_box()) return box();
    if (is_ball()) {
        const Ball& b = ball();
        const Vec3 r{b.radius, b.radius, b.radius};
        return {b.center - r, b.center + r};
    }
    Box out{balls().front().center, balls().front().center};
    for (const auto& b : balls()) {
        out.lo.x = std::min(out.lo.x, b.center.x - b.radius);
        out.lo.y = std::min(out.lo.y, b.center.y - b.radius);
        out.lo.z = std::min(out.lo.z, b.center.z - b.radius);
        out.hi.x = std::max(out.hi.x, b.center.x + b.radius);
        out.hi.y = std::max(out.hi.y, b.center.y + b.radius);
        out.hi.z = std::max(out.hi.z, b.center.z + b.radius);
    }
    return out;
}

double Domain::volume() const {
    if (is_ball()) {
        const double r = ball().radius;
        return 4.0 / 3.0 * kPi * r * r * r;
    }
    if (is_box()) {
        const Box& b = box();
        return (b.hi.x - b.lo.x) * (b.hi.y - b.lo.y) * (b.hi.z - b.lo.z);
    }
    double v = 0.0;
    for (const auto& b : balls()) v += 4.0 / 3.0 * kPi * b.radius * b.radius * b.radius;
    return v;  // members are disjoint
}

double Domain::inner_margin(const Vec3& x) const {
    if (is_ball()) return ball().radius - distance(x, ball().center);
    if (is_box()) {
        const Box& b = box();
        double m = x.x - b.lo.x;
        m = std::min(m, b.hi.x - x.x);
        m = std::min(m, x.y - b.lo.y);
        m = std::min(m, b.hi.y - x.y);
        m = std::min(m, x.z - b.lo.z);
        m = std::min(m, b.hi.z - x.z);
        return m;
    }
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& b : balls()) best = std::max(best, b.radius - distance(x, b.center));
    return best;
}

double sup_radius(const Domain& domain, const Vec3& p) {
    if (domain.is_ball()) return distance(domain.ball().center, p) + domain.ball().radius;
    if (domain.is_box()) {
        const Box& b = domain.box();
        double best = 0.0;
        for (int i = 0; i < 8; ++i) {
            const Vec3 corner{(i & 1) ? b.hi.x : b.lo.x, (i & 2) ? b.hi.y : b.lo.y,
                              (i & 4) ? b.hi.z : b.lo.z};
            best = std::max(best, distance(corner, p));
        }
        return best;
    }
    double best = 0.0;
    for (const auto& b : domain.balls()) best = std::max(best, distance(b.center, p) + b.radius);
    return best;
}

bool strictly_inside(const Domain& inner, const Domain& outer, double margin) {
    std::vector<Ball> members;
    if (inner.is_ball()) {
        members.push_back(inner.ball());
    } else if (inner.is_union()) {
        members = inner.balls();
    } else {
        // Box inner region: reduce to its circumscribed corners.
        const Box& b = inner.box();
        for (int i = 0; i < 8; ++i) {
            members.push_back({Vec3{(i & 1) ? b.hi.x : b.lo.x, (i & 2) ? b.hi.y : b.lo.y,
                                    (i & 4) ? b.hi.z : b.lo.z},
                               0.0});
        }
    }
    for (const auto& m : members) {
        double clearance;
        if (outer.is_ball()) {
            clearance = outer.ball().radius - distance(m.center, outer.ball().center) - m.radius;
        } else if (outer.is_box()) {
            clearance = outer.inner_margin(m.center) - m.radius;
        } else {
            throw GeometryError("containment check against a union outer domain is unsupported");
        }
        if (clearance < margin) return false;
    }
    return true;
}

double SurfaceQuadrature::total_weight() const {
    double s = 0.0;
    for (double w : weights) s += w;
    return s;
}

double VolumeQuadrature::total_weight() const {
    double s = 0.0;
    for (double w : weights) s += w;
    return s;
}

SurfaceQuadrature unit_sphere_rule(int order) {
    if (order < 2) throw GeometryError("sphere rule order must be >= 2");
    SurfaceQuadrature q;
    const Rule1D& polar = gauss_legendre(order);  // nodes in cos(theta)
    const int n_phi = 2 * order;
    const double dphi = 2.0 * kPi / n_phi;
    q.nodes.reserve(static_cast<size_t>(order) * n_phi);
    for (int i = 0; i < order; ++i) {
        const double c = polar.nodes[i];
        const double s = std::sqrt(std::max(0.0, 1.0 - c * c));
        for (int j = 0; j < n_phi; ++j) {
            const double phi = (j + 0.5) * dphi;
            q.nodes.push_back({s * std::cos(phi), s * std::sin(phi), c});
            q.normals.push_back(q.nodes.back());
            q.weights.push_back(polar.weights[i] * dphi);
        }
    }
    return q;
}

SurfaceQuadrature surface_quadrature(const Domain& domain, int order) {
    if (order < 2) throw GeometryError("surface quadrature order must be >= 2");
    if (domain.is_ball()) {
        const Ball& b = domain.ball();
        SurfaceQuadrature q = unit_sphere_rule(order);
        for (size_t i = 0; i < q.size(); ++i) {
            q.nodes[i] = b.center + b.radius * q.nodes[i];
            q.weights[i] *= b.radius * b.radius;
        }
        return q;
    }
    if (domain.is_box()) {
        const Box& b = domain.box();
        SurfaceQuadrature q;
        const double lox = b.lo.x, hix = b.hi.x;
        const double loy = b.lo.y, hiy = b.hi.y;
        const double loz = b.lo.z, hiz = b.hi.z;
        struct Face {
            int axis;     // fixed axis
            double value;  // coordinate on that axis
            double sign;   // outward direction
        };
        const Face faces[6] = {{0, lox, -1}, {0, hix, +1}, {1, loy, -1},
                               {1, hiy, +1}, {2, loz, -1}, {2, hiz, +1}};
        for (const Face& f : faces) {
            const int a1 = (f.axis + 1) % 3, a2 = (f.axis + 2) % 3;
            const double lo1 = (a1 == 0 ? lox : (a1 == 1 ? loy : loz));
            const double hi1 = (a1 == 0 ? hix : (a1 == 1 ? hiy : hiz));
            const double lo2 = (a2 == 0 ? lox : (a2 == 1 ? loy : loz));
            const double hi2 = (a2 == 0 ? hix : (a2 == 1 ? hiy : hiz));
            const Rule1D r1 = gauss_legendre_on(order, lo1, hi1);
            const Rule1D r2 = gauss_legendre_on(order, lo2, hi2);
            Vec3 normal{0, 0, 0};
            if (f.axis == 0) normal.x = f.sign;
            if (f.axis == 1) normal.y = f.sign;
            if (f.axis == 2) normal.z = f.sign;
            for (int i = 0; i < order; ++i) {
                for (int j = 0; j < order; ++j) {
                    double coord[3];
                    coord[f.axis] = f.value;
                    coord[a1] = r1.nodes[i];
                    coord[a2] = r2.nodes[j];
                    q.nodes.push_back({coord[0], coord[1], coord[2]});
                    q.normals.push_back(normal);
                    q.weights.push_back(r1.weights[i] * r2.weights[j]);
                }
            }
        }
        return q;
    }
    throw GeometryError("surface quadrature is unsupported for union-of-balls boundaries");
}

VolumeQuadrature ball_volume_quadrature(const Ball& ball, int order) {
    validate_ball(ball);
    VolumeQuadrature q;
    const Rule1D radial = gauss_legendre_on(order, 0.0, ball.radius);
    const SurfaceQuadrature sphere = unit_sphere_rule(order);
    q.nodes.reserve(radial.nodes.size() * sphere.size());
    for (size_t i = 0; i < radial.nodes.size(); ++i) {
        const double r = radial.nodes[i];
        const double wr = radial.weights[i] * r * r;
        for (size_t j = 0; j < sphere.size(); ++j) {
            q.nodes.push_back(ball.center + r * sphere.nodes[j]);
            q.weights.push_back(wr * sphere.weights[j]);
        }
    }
    return q;
}

VolumeQuadrature box_volume_quadrature(const Box& box, int order, int panels_per_axis) {
    validate_box(box);
    VolumeQuadrature q;
    const Rule1D rx = composite_gauss_legendre(order, box.lo.x, box.hi.x, panels_per_axis);
    const Rule1D ry = composite_gauss_legendre(order, box.lo.y, box.hi.y, panels_per_axis);
    const Rule1D rz = composite_gauss_legendre(order, box.lo.z, box.hi.z, panels_per_axis);
    for (size_t i = 0; i < rx.nodes.size(); ++i)
        for (size_t j = 0; j < ry.nodes.size(); ++j)
            for (size_t k = 0; k < rz.nodes.size(); ++k) {
                q.nodes.push_back({rx.nodes[i], ry.nodes[j], rz.nodes[k]});
                q.weights.push_back(rx.weights[i] * ry.weights[j] * rz.weights[k]);
            }
    return q;
}

VolumeQuadrature annulus_volume_quadrature(const Vec3& p, double r_inner, double r_outer,
                                           int order, const std::vector<double>& radial_breaks) {
    if (!(r_inner >= 0.0 && r_outer > r_inner))
        throw GeometryError("annulus radii must satisfy 0 <= r_inner < r_outer");
    std::vector<double> cuts{r_inner};
    for (double b : radial_breaks)
        if (b > r_inner && b < r_outer) cuts.push_back(b);
    cuts.push_back(r_outer);
    std::sort(cuts.begin(), cuts.end());

    VolumeQuadrature q;
    const SurfaceQuadrature sphere = unit_sphere_rule(order);
    for (size_t s = 0; s + 1 < cuts.size(); ++s) {
        const Rule1D radial = gauss_legendre_on(order, cuts[s], cuts[s + 1]);
        for (size_t i = 0; i < radial.nodes.size(); ++i) {
            const double r = radial.nodes[i];
            const double wr = radial.weights[i] * r * r;
            for (size_t j = 0; j < sphere.size(); ++j) {
                q.nodes.push_back(p + r * sphere.nodes[j]);
                q.weights.push_back(wr * sphere.weights[j]);
            }
        }
    }
    return q;
}

}  // namespace enclosure::geom
