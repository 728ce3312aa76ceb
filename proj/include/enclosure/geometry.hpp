#pragma once

#include <variant>
#include <vector>

#include "enclosure/vec3.hpp"

namespace enclosure::geom {

struct Ball {
    Vec3 center;
    double radius = 0.0;
};

/// Axis-aligned box given by strictly ordered corners.
struct Box {
    Vec3 lo;
    Vec3 hi;
};

/// Supported shapes: a ball, a box, or a union of pairwise disjoint balls.
class Domain {
  public:
    explicit Domain(const Ball& b);
    explicit Domain(const Box& b);
    explicit Domain(std::vector<Ball> balls);  // union of disjoint balls

    bool is_ball() const { return std::holds_alternative<Ball>(shape_); }
    bool is_box() const { return std::holds_alternative<Box>(shape_); }
    bool is_union() const { return std::holds_alternative<std::vector<Ball>>(shape_); }

    const Ball& ball() const { return std::get<Ball>(shape_); }
    const Box& box() const { return std::get<Box>(shape_); }
    const std::vector<Ball>& balls() const { return std::get<std::vector<Ball>>(shape_); }

    bool contains(const Vec3& x) const;
    Box bounding_box() const;
    double volume() const;

    /// Signed distance to the complement: positive inside, measured to the
    /// nearest boundary (exact for ball/box; union takes the max over members).
    double inner_margin(const Vec3& x) const;

  private:
    std::variant<Ball, Box, std::vector<Ball>> shape_;
};

/// sup over the closure of |x - p|; exact per shape.
double sup_radius(const Domain& domain, const Vec3& p);

/// Analytic check that closure(inner) lies inside outer with at least `margin`
/// clearance. Supported for inner = ball/union-of-balls against outer = ball/box.
bool strictly_inside(const Domain& inner, const Domain& outer, double margin);

/// Quadrature rule on the boundary of a ball or box.
struct SurfaceQuadrature {
    std::vector<Vec3> nodes;
    std::vector<Vec3> normals;   // unit outward
    std::vector<double> weights;  // area weights, positive
    size_t size() const { return nodes.size(); }
    double total_weight() const;
};

/// Ball: Gauss-Legendre in the polar cosine x uniform azimuth; box: tensor
/// Gauss-Legendre per face. Exact for the shapes' areas; nodes strictly inside
/// faces for the box. Throws GeometryError for union-of-balls boundaries.
SurfaceQuadrature surface_quadrature(const Domain& domain, int order);

/// Volume rule {nodes, weights}; weights sum to the analytic volume.
struct VolumeQuadrature {
    std::vector<Vec3> nodes;
    std::vector<double> weights;
    size_t size() const { return nodes.size(); }
    double total_weight() const;
};

/// Radial Gauss-Legendre x spherical product rule over a ball.
VolumeQuadrature ball_volume_quadrature(const Ball& ball, int order);

/// Tensor Gauss-Legendre over a box (order points per axis, optionally split
/// into `panels_per_axis` composite panels per axis).
VolumeQuadrature box_volume_quadrature(const Box& box, int order, int panels_per_axis = 1);

/// Product rule over the spherical shell r_inner <= |y - p| <= r_outer with
/// optional extra radial breakpoints (kinks of the integrand).
VolumeQuadrature annulus_volume_quadrature(const Vec3& p, double r_inner, double r_outer,
                                           int order, const std::vector<double>& radial_breaks = {});

/// Unit-sphere direction rule (Gauss-Legendre in cos(theta) x uniform azimuth);
/// weights sum to 4*pi.
SurfaceQuadrature unit_sphere_rule(int order);

}  // namespace enclosure::geom
